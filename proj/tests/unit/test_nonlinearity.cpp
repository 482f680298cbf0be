#include <cmath>

#include "cnls/energy.hpp"
#include "cnls/errors.hpp"
#include "cnls/nonlinearity.hpp"
#include "doctest.h"

using namespace cnls;

TEST_CASE("power family values") {
  auto spec = families::scalar_power(5.0);
  const std::vector<double> s{1.5};
  const std::vector<double> t{2.25};
  CHECK(eval_H(*spec, {}, s) == doctest::Approx(2.0 * std::pow(1.5, 6.0) / 6.0));
  CHECK(eval_hj(*spec, 0, {}, t) == doctest::Approx(std::pow(2.25, 2.0)));
  CHECK_THROWS_AS(families::scalar_power(1.0), std::invalid_argument);
}

TEST_CASE("cubic and manakov values") {
  const std::vector<double> s{3.0};
  CHECK(eval_H(*families::scalar_cubic(), {}, s) == doctest::Approx(40.5));
  const std::vector<double> s2{1.0, 2.0};
  const std::vector<double> t2{1.0, 4.0};
  auto m = families::manakov();
  CHECK(eval_H(*m, {}, s2) == doctest::Approx(12.5));
  CHECK(eval_hj(*m, 0, {}, t2) == doctest::Approx(5.0));
  CHECK(eval_hj(*m, 1, {}, t2) == doctest::Approx(5.0));
}

TEST_CASE("checked evaluation rejects bad input") {
  auto m = families::manakov();
  const std::vector<double> wrong_size{1.0};
  const std::vector<double> negative{1.0, -1.0};
  CHECK_THROWS_AS(eval_H(*m, {}, wrong_size), std::invalid_argument);
  CHECK_THROWS_AS(eval_H(*m, {}, negative), std::invalid_argument);
  const std::vector<double> t{1.0, 1.0};
  CHECK_THROWS_AS(eval_hj(*m, 2, {}, t), std::out_of_range);
}

TEST_CASE("product coupling exponents") {
  CHECK_THROWS_AS(families::product_coupling(1.0, 1.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(families::product_coupling(-1.0, 2.0, 2.0), std::invalid_argument);
  auto p = families::product_coupling(2.0, 2.0, 3.0);
  const std::vector<double> s{2.0, 1.0};
  CHECK(eval_H(*p, {}, s) == doctest::Approx(8.0));
}

TEST_CASE("x dependent family and its limit") {
  auto base = families::scalar_cubic();
  auto xd = families::x_dependent(base);
  CHECK(xd->x_dependent());
  REQUIRE(xd->asymptotic());
  const std::vector<double> s{1.0};
  const std::vector<double> origin{0.0};
  const std::vector<double> far{50.0};
  CHECK(eval_H(*xd, origin, s) == doctest::Approx(1.0));
  CHECK(eval_H(*xd, far, s) == doctest::Approx(0.5));
  CHECK(eval_H(*xd->asymptotic(), far, s) == doctest::Approx(0.5));
  CHECK_THROWS_AS(families::x_dependent(xd), std::invalid_argument);
}

TEST_CASE("every built-in family is consistent") {
  const std::vector<NonlinearityPtr> specs{
      families::scalar_power(2.0),        families::scalar_power(3.0), families::scalar_power(7.0),
      families::scalar_cubic(),           families::manakov(),         families::product_coupling(1.0, 2.0, 2.0),
      families::product_coupling(0.5, 3.0, 2.5), families::x_dependent(families::scalar_cubic()),
      families::x_dependent(families::manakov()), families::zero(3)};
  for (const auto& spec : specs) {
    for (std::size_t dims = 1; dims <= 3; ++dims) {
      SamplerOptions opts;
      opts.dims = dims;
      opts.samples = 512;
      const ConsistencyReport r = check_consistency(*spec, opts, kConsistencyTolerance);
      INFO(spec->name(), " N=", dims, " deviation ", r.max_deviation);
      CHECK(r.consistent);
      CHECK(r.max_deviation < 1e-8);
    }
  }
}

TEST_CASE("mismatched fixture is rejected") {
  auto bad = families::mismatched_fixture();
  SamplerOptions opts;
  const ConsistencyReport r = check_consistency(*bad, opts, kConsistencyTolerance);
  CHECK_FALSE(r.consistent);
  CHECK(r.max_deviation > 0.1);
  CHECK_THROWS_AS(require_consistent(*bad, 1), InconsistentSpecError);
  CHECK_THROWS_AS(EnergyContext(Grid::create({16}, {1.0}), bad), InconsistentSpecError);
}

TEST_CASE("finite difference partial of H") {
  auto spec = families::manakov();
  const std::vector<double> s{0.7, 1.3};
  // dH/ds_1 = 2 (s_1^2 + s_2^2) s_1
  CHECK(potential_partial_fd(*spec, 0, {}, s) == doctest::Approx(2.0 * (0.49 + 1.69) * 0.7).epsilon(1e-8));
  const std::vector<double> axis{0.0, 1.3};
  CHECK(std::abs(potential_partial_fd(*spec, 0, {}, axis)) < 1e-9);
}

TEST_CASE("sampler is deterministic and includes corners") {
  SamplerOptions opts;
  opts.samples = 64;
  opts.dims = 2;
  const auto a = draw_samples(opts, 2);
  const auto b = draw_samples(opts, 2);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].s == b[i].s);
    CHECK(a[i].x == b[i].x);
  }
  bool origin = false;
  for (const auto& smp : a) {
    for (double v : smp.s) CHECK(v >= 0.0);
    for (double v : smp.theta) CHECK(v >= 1.0);
    CHECK(smp.x.size() == 2);
    origin = origin || euclidean_norm(smp.s) == 0.0;
  }
  CHECK(origin);
}
