#include "cnls/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "cnls/errors.hpp"

namespace cnls {

namespace {

constexpr std::array<char, 4> kMagic{'N', 'L', 'S', 'F'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>(bits & 0xffU);
    bits >>= 8;
  }
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError("field dump: truncated data");
  U bits = 0;
  for (std::size_t i = sizeof(T); i-- > 0;) bits = (bits << 8) | bytes[i];
  return std::bit_cast<T>(bits);
}

}  // namespace

void write_field_dump(std::ostream& out, const FieldVector& z) {
  if (z.empty()) throw std::invalid_argument("write_field_dump: empty field vector");
  const Grid& grid = z.grid();
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kFieldDumpVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(grid.dims()));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(z.ell()));
  for (std::size_t n : grid.shape()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  for (double l : grid.lengths()) put_le<double>(out, l);
  for (const ComplexField& c : z) {
    for (const cdouble& v : c.values()) {
      put_le<double>(out, v.real());
      put_le<double>(out, v.imag());
    }
  }
  if (!out) throw FormatError("field dump: write failed");
}

void write_field_dump(const std::filesystem::path& path, const FieldVector& z) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("field dump: cannot open " + path.string() + " for writing");
  write_field_dump(out, z);
}

FieldVector read_field_dump(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("field dump: bad magic bytes");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kFieldDumpVersion) {
    throw FormatError("field dump: unsupported format version " + std::to_string(version));
  }
  const auto dims = get_le<std::uint32_t>(in);
  const auto ell = get_le<std::uint32_t>(in);
  if (dims < 1 || dims > 3) throw FormatError("field dump: invalid dimension");
  if (ell < 1 || ell > 1024) throw FormatError("field dump: invalid component count");
  std::vector<std::size_t> points(dims);
  std::vector<double> lengths(dims);
  for (auto& n : points) n = get_le<std::uint32_t>(in);
  for (auto& l : lengths) l = get_le<double>(in);

  GridPtr grid;
  try {
    grid = Grid::create(points, lengths);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("field dump: ") + e.what());
  }

  std::vector<ComplexField> comps;
  comps.reserve(ell);
  for (std::uint32_t j = 0; j < ell; ++j) {
    std::vector<cdouble> values(grid->size());
    for (auto& v : values) {
      const double re = get_le<double>(in);
      const double im = get_le<double>(in);
      v = cdouble(re, im);
    }
    try {
      comps.emplace_back(grid, std::move(values));
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("field dump: ") + e.what());
    }
  }
  return FieldVector(std::move(comps));
}

FieldVector read_field_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("field dump: cannot open " + path.string());
  return read_field_dump(in);
}

}  // namespace cnls
