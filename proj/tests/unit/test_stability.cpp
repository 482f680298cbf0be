#include <cmath>
#include <numbers>
#include <sstream>

#include "cnls/errors.hpp"
#include "cnls/random_fields.hpp"
#include "cnls/stability.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cnls;

namespace {

FieldVector shifted_soliton(const GridPtr& grid, double shift, double phase) {
  return cdouble(std::polar(1.0, phase)) * testing::soliton(grid, 1.0, shift);
}

}  // namespace

TEST_CASE("distance vanishes on the orbit") {
  auto grid = Grid::create({256}, {40.0});
  const FieldVector w = testing::soliton(grid, 1.0);
  const OrbitProxy proxy(w, true);
  CHECK(orbit_distance(proxy, w) < 1e-9);
  const FieldVector moved = shifted_soliton(grid, 1.3, 2.1);
  const OrbitProxy::Alignment a = proxy.align(moved);
  CHECK(a.distance < 1e-7);
  CHECK(a.shift[0] == doctest::Approx(1.3).epsilon(1e-6));
  CHECK(std::remainder(a.phases[0] - 2.1, 2.0 * std::numbers::pi) == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(symmetry_distance(proxy, moved, a.phases, a.shift) == doctest::Approx(a.distance).epsilon(1e-6));
}

TEST_CASE("without translations only phases are removed") {
  auto grid = Grid::create({256}, {40.0});
  const FieldVector w = testing::soliton(grid, 1.0);
  const OrbitProxy proxy(w, false);
  const FieldVector moved = shifted_soliton(grid, 1.0, 0.4);
  const double d = orbit_distance(proxy, moved);
  CHECK(d == doctest::Approx(h1_distance(testing::soliton(grid, 1.0, 1.0), w)).epsilon(1e-8));
}

TEST_CASE("phase alignment beats a brute force scan") {
  auto grid = Grid::create({128}, {30.0});
  const FieldVector w = testing::soliton(grid, 1.0);
  const OrbitProxy proxy(w, false);
  Rng rng(3);
  FieldVector z = cdouble(std::polar(1.0, 1.0)) * w;
  z[0] += cdouble(0.3) * random_smooth_field(grid, rng);
  const double d = orbit_distance(proxy, z);
  double best = 1e300;
  const std::vector<double> none{0.0};
  for (int k = 0; k < 4096; ++k) {
    const std::vector<double> phase{2.0 * std::numbers::pi * k / 4096.0};
    best = std::min(best, symmetry_distance(proxy, z, phase, none));
  }
  CHECK(d <= best + 1e-12);
  CHECK(d >= best - 1e-5);
}

TEST_CASE("orthogonal perturbation distance is linear") {
  auto grid = Grid::create({256}, {40.0});
  const FieldVector w = testing::soliton(grid, 1.0);
  const OrbitProxy proxy(w, true);
  FieldVector g = perturbation_direction(grid, 1, 4);
  CHECK(h1_norm(g) == doctest::Approx(1.0).epsilon(1e-12));
  const FieldVector iw = cdouble(0.0, 1.0) * w;
  const FieldVector dw({spectral_derivative(w[0], 0)});
  for (const FieldVector* t : {&iw, &dw}) {
    g -= cdouble(h1_inner(*t, g) / h1_inner(*t, *t)) * *t;
  }
  g *= cdouble(1.0 / h1_norm(g));
  const double delta = 1e-4;
  const double d = orbit_distance(proxy, w + cdouble(delta) * g);
  CHECK(d == doctest::Approx(delta).epsilon(1e-3));
}

TEST_CASE("proxy requires a certified minimizer") {
  auto grid = Grid::create({128}, {40.0});
  EnergyContext ctx(grid, families::zero(1));
  GroundStateResult unconverged;
  unconverged.state = testing::soliton(grid, 1.0);
  CHECK_THROWS_AS(OrbitProxy(ctx, ConstraintSet({2.0}), unconverged), NotAttainedError);
  GroundStateResult wrong_mass = unconverged;
  wrong_mass.converged = true;
  CHECK_THROWS_AS(OrbitProxy(ctx, ConstraintSet({1.0}), wrong_mass), std::invalid_argument);
}

TEST_CASE("perturbation directions are seeded and band limited") {
  auto grid = Grid::create({64}, {20.0});
  const FieldVector a = perturbation_direction(grid, 2, 9);
  const FieldVector b = perturbation_direction(grid, 2, 9);
  CHECK(h1_distance(a, b) == 0.0);
  CHECK(h1_distance(a, perturbation_direction(grid, 2, 10)) > 0.1);
  const ComplexField spec = forward_transform(a[1]);
  const auto k = grid->wavenumbers(0);
  const double kmax = std::numbers::pi / grid->spacing(0);
  for (std::size_t i = 0; i < spec.size(); ++i) {
    if (std::abs(k[i]) > 2.0 / 3.0 * kmax) CHECK(std::abs(spec[i]) < 1e-12);
  }
}

TEST_CASE("soliton tracks its own orbit") {
  auto grid = Grid::create({256}, {40.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  const OrbitProxy proxy(testing::soliton(grid, 1.0), true);
  EvolveOptions o;
  o.dt = 1e-3;
  o.T = 1.0;
  o.sample_every = 100;
  const StabilityReport r = stability_experiment(ctx, proxy, 0.0, 1, o);
  CHECK(r.sup_distance < 1e-4);
  CHECK(r.series.size() == 11);
  CHECK(r.label == kOrbitDistanceLabel);

  const StabilityReport p = stability_experiment(ctx, proxy, 1e-2, 1, o);
  CHECK(p.series.front().second == doctest::Approx(1e-2).epsilon(0.05));
  CHECK(p.sup_distance < 0.1);
  CHECK_THROWS_AS(stability_experiment(ctx, proxy, -1.0, 1, o), std::invalid_argument);
}

TEST_CASE("sweep sorts and validates") {
  auto grid = Grid::create({128}, {40.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  const OrbitProxy proxy(testing::soliton(grid, 1.0), true);
  EvolveOptions o;
  o.dt = 1e-2;
  o.T = 0.2;
  o.sample_every = 5;
  const StabilityCurve curve = delta_eps_sweep(ctx, proxy, {2e-2, 1e-3}, {1, 2}, o);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].delta == 1e-3);
  CHECK(curve.runs.size() == 4);
  CHECK(curve.monotone);
  std::ostringstream out;
  write_curve_csv(out, curve);
  CHECK(out.str().rfind("delta,epsilon,worst_seed,blowup,monotone\n", 0) == 0);
  CHECK_THROWS_AS(delta_eps_sweep(ctx, proxy, {}, {1}, o), std::invalid_argument);
  CHECK_THROWS_AS(delta_eps_sweep(ctx, proxy, {1e-2}, {}, o), std::invalid_argument);
  CHECK_THROWS_AS(delta_eps_sweep(ctx, proxy, {-1e-2}, {1}, o), std::invalid_argument);
}
