#include <cmath>
#include <numbers>

#include "cnls/energy.hpp"
#include "cnls/errors.hpp"
#include "cnls/random_fields.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cnls;

namespace {

GridPtr line() { return Grid::create({512}, {40.0}); }

FieldVector random_state(const GridPtr& grid, std::size_t ell, std::uint64_t seed) {
  Rng rng(seed);
  RandomFieldOptions opts;
  opts.smoothing_fraction = 0.2;
  std::vector<ComplexField> parts;
  for (std::size_t j = 0; j < ell; ++j) {
    ComplexField f = random_smooth_field(grid, rng, opts);
    const ComplexField env = testing::gaussian(grid, 4.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= env[i] * 0.3;
    parts.push_back(std::move(f));
  }
  return FieldVector(std::move(parts));
}

}  // namespace

TEST_CASE("soliton energy and gradient") {
  auto grid = Grid::create({1024}, {80.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  for (double eta : {1.0, 1.5}) {
    const FieldVector w = testing::soliton(grid, eta);
    CHECK(charges(w)[0] == doctest::Approx(4.0 * eta).epsilon(1e-12));
    CHECK(energy_hat(ctx, w) == doctest::Approx(-2.0 * eta * eta * eta / 3.0).epsilon(1e-10));
    CHECK(energy_real(ctx, w) == doctest::Approx(energy_hat(ctx, w)).epsilon(1e-14));
    // -u'' - u^3 = -eta^2 u
    const FieldVector g = energy_gradient(ctx, w);
    double err = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) err = std::max(err, std::abs(g[0][i] + eta * eta * w[0][i]));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("energy rejects incompatible states") {
  auto grid = line();
  EnergyContext ctx(grid, families::manakov());
  CHECK_THROWS_AS(energy_hat(ctx, testing::soliton(grid, 1.0)), std::invalid_argument);
  auto other = Grid::create({256}, {40.0});
  EnergyContext scalar(grid, families::scalar_cubic());
  CHECK_THROWS_AS(energy_hat(scalar, testing::soliton(other, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(ConstraintSet({1.0, 0.0}), std::invalid_argument);
  CHECK(ConstraintSet({1.0, 2.0}).total_mass() == doctest::Approx(5.0));
}

TEST_CASE("gradient matches central differences") {
  auto grid = Grid::create({128}, {20.0});
  const std::vector<NonlinearityPtr> specs{families::scalar_cubic(), families::scalar_power(2.0),
                                           families::manakov(), families::product_coupling(1.0, 2.0, 3.0),
                                           families::x_dependent(families::scalar_cubic())};
  for (const auto& spec : specs) {
    EnergyContext ctx(grid, spec);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const FieldVector z = random_state(grid, spec->ell(), seed);
      const FieldVector v = random_state(grid, spec->ell(), seed + 100);
      const double h = 1e-5;
      const double fd = (energy_hat(ctx, z + cdouble(h) * v) - energy_hat(ctx, z - cdouble(h) * v)) / (2.0 * h);
      const double analytic = real_inner(energy_gradient(ctx, z), v);
      INFO(spec->name(), " seed ", seed);
      CHECK(std::abs(fd - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST_CASE("diamagnetic defect of a phase-modulated profile") {
  auto grid = line();
  EnergyContext ctx(grid, families::scalar_cubic());
  const FieldVector w = testing::soliton(grid, 1.0);
  const double k = 2.0 * std::numbers::pi * 3.0 / 40.0;
  ComplexField z(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) z[i] = w[0][i] * std::polar(1.0, k * grid->coordinate(0, i));
  const DiamagneticDefect d = diamagnetic_defect(ctx, FieldVector({z}));
  const double expected = 0.5 * k * k * 4.0;
  CHECK(d.direct == doctest::Approx(expected).epsilon(1e-9));
  CHECK(d.formula == doctest::Approx(expected).epsilon(1e-9));
  CHECK(d.relative_discrepancy < 1e-8);

  const DiamagneticDefect real = diamagnetic_defect(ctx, w);
  CHECK(std::abs(real.direct) < 1e-12);
  CHECK(std::abs(real.formula) < 1e-12);
}

TEST_CASE("diamagnetic defect on random states") {
  auto grid = line();
  EnergyContext ctx(grid, families::manakov());
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const DiamagneticDefect d = diamagnetic_defect(ctx, random_state(grid, 2, seed));
    CHECK(d.relative_discrepancy < 1e-8);
    CHECK(d.direct >= -1e-10);
    CHECK(d.formula >= -1e-10);
  }
}

TEST_CASE("coercivity exponent") {
  CHECK(coercivity_gamma(2.0, 1) == doctest::Approx(6.0));
  CHECK(coercivity_gamma(1.0, 2) == doctest::Approx(4.0));
  CHECK_THROWS_AS(coercivity_gamma(4.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(coercivity_gamma(0.0, 1), std::invalid_argument);
}

TEST_CASE("coercivity constant over soliton dilations") {
  auto grid = Grid::create({1024}, {80.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  // sqrt(s) w(s x) keeps the mass 4 of w = sqrt(2) sech; E = (2 s^2 - 4 s) / 3 and
  // |grad|^2 = 4 s^2 / 3, so C = max_s (4 s - s^2) / (3 (4 + 64)) = (4/3) / 68 at s = 2.
  std::vector<FieldVector> states;
  for (double s : {0.5, 1.0, 2.0, 3.0}) {
    FieldVector w = testing::soliton(grid, s);
    states.push_back(cdouble(1.0 / std::sqrt(s)) * w);
  }
  const CoercivityReport r = coercivity_check(ctx, states, 2.0);
  CHECK(r.applicable);
  CHECK(r.gamma == doctest::Approx(6.0));
  CHECK(r.constant == doctest::Approx((4.0 / 3.0) / 68.0).epsilon(1e-8));
  CHECK(r.witness == 2);
  for (const auto& p : r.points) CHECK(p.margin >= -1e-12);

  const CoercivityReport na = coercivity_check(ctx, states, std::nullopt);
  CHECK_FALSE(na.applicable);
}

TEST_CASE("coupling field of the x dependent family") {
  auto grid = line();
  EnergyContext ctx(grid, families::x_dependent(families::scalar_cubic()));
  const FieldVector w = testing::soliton(grid, 1.0);
  const RealField h = ctx.coupling_field(w, 0);
  const std::size_t centre = grid->size() / 2;
  CHECK(h[centre] == doctest::Approx(2.0 * std::norm(w[0][centre])));
  CHECK(ctx.point(centre).size() == 1);
  CHECK(ctx.point(centre)[0] == doctest::Approx(0.0));
}
