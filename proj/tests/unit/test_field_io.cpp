#include <sstream>

#include "cnls/errors.hpp"
#include "cnls/field_io.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cnls;

namespace {

FieldVector sample_state() {
  auto g = Grid::create({16, 8}, {2.0, 3.5});
  ComplexField a = testing::gaussian(g, 0.4);
  ComplexField b = a;
  b *= cdouble(0.25, -1.5);
  return FieldVector({a, b});
}

}  // namespace

TEST_CASE("dump round trip is bit exact") {
  const FieldVector z = sample_state();
  std::stringstream buf;
  write_field_dump(buf, z);
  const FieldVector back = read_field_dump(buf);
  REQUIRE(back.ell() == 2);
  CHECK(back.grid().shape() == z.grid().shape());
  CHECK(back.grid().lengths() == z.grid().lengths());
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t p = 0; p < z.grid().size(); ++p) CHECK(back[j][p] == z[j][p]);
  }
}

TEST_CASE("dump header layout") {
  const FieldVector z = sample_state();
  std::stringstream buf;
  write_field_dump(buf, z);
  const std::string bytes = buf.str();
  CHECK(bytes.substr(0, 4) == "NLSF");
  CHECK(static_cast<unsigned char>(bytes[4]) == kFieldDumpVersion);
  CHECK(bytes.size() == 4 + 4 + 4 + 4 + 2 * 4 + 2 * 8 + 2 * 128 * 16);
}

TEST_CASE("corrupt dumps are rejected") {
  const FieldVector z = sample_state();
  std::stringstream buf;
  write_field_dump(buf, z);
  const std::string bytes = buf.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::stringstream s1(bad_magic);
  CHECK_THROWS_AS(read_field_dump(s1), FormatError);

  std::string bad_version = bytes;
  bad_version[4] = 9;
  std::stringstream s2(bad_version);
  CHECK_THROWS_AS(read_field_dump(s2), FormatError);

  std::stringstream s3(bytes.substr(0, bytes.size() - 5));
  CHECK_THROWS_AS(read_field_dump(s3), FormatError);

  std::string bad_points = bytes;
  bad_points[16] = 12;  // first axis: 12 points, not a power of two
  std::stringstream s4(bad_points);
  CHECK_THROWS_AS(read_field_dump(s4), FormatError);
}
