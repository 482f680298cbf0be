#include <cmath>
#include <numbers>
#include <sstream>

#include "cnls/dynamics.hpp"
#include "cnls/random_fields.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace cnls;

namespace {

double sup_difference(const FieldVector& a, const FieldVector& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.ell(); ++j) {
    for (std::size_t i = 0; i < a[j].size(); ++i) m = std::max(m, std::abs(a[j][i] - b[j][i]));
  }
  return m;
}

FieldVector random_state(const GridPtr& grid, std::size_t ell, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<ComplexField> parts;
  for (std::size_t j = 0; j < ell; ++j) parts.push_back(random_smooth_field(grid, rng));
  return FieldVector(std::move(parts));
}

}  // namespace

TEST_CASE("plane wave evolves exactly") {
  auto grid = Grid::create({64}, {10.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  const double k = 2.0 * std::numbers::pi * 2.0 / 10.0;
  const double a = 0.7;
  ComplexField z(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) z[i] = a * std::polar(1.0, k * grid->coordinate(0, i));
  const FieldVector z0({z});
  EvolveOptions o;
  o.dt = 1e-2;
  o.T = 1.0;
  const Trajectory traj = evolve(ctx, z0, o);
  const FieldVector exact = cdouble(std::polar(1.0, (a * a - k * k) * 1.0)) * z0;
  CHECK(sup_difference(traj.final_state, exact) < 1e-11);
}

TEST_CASE("zero stays zero") {
  auto grid = Grid::create({32}, {10.0});
  EnergyContext ctx(grid, families::manakov());
  const FieldVector z = FieldVector::zeros(grid, 2);
  const FieldVector next = step(ctx, z, 0.1);
  CHECK(sup_difference(next, z) == 0.0);
}

TEST_CASE("gauge covariance and time reversal") {
  auto grid = Grid::create({128}, {20.0});
  EnergyContext ctx(grid, families::manakov());
  const FieldVector z = random_state(grid, 2, 5);
  const cdouble phase = std::polar(1.0, 0.9);
  CHECK(sup_difference(step(ctx, phase * z, 1e-2), phase * step(ctx, z, 1e-2)) < 1e-13);

  SplitStep forward(ctx, 1e-2);
  SplitStep backward(ctx, -1e-2);
  FieldVector w = z;
  for (int n = 0; n < 20; ++n) forward.advance(w);
  for (int n = 0; n < 20; ++n) backward.advance(w);
  CHECK(sup_difference(w, z) < 1e-12);
}

TEST_CASE("soliton conserves charge and energy") {
  auto grid = Grid::create({512}, {40.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  EvolveOptions o;
  o.dt = 1e-3;
  o.T = 1.0;
  o.sample_every = 50;
  o.snapshot_times = {0.5};
  const Trajectory traj = evolve(ctx, testing::soliton(grid, 1.0), o);
  CHECK_FALSE(traj.blowup_time.has_value());
  REQUIRE(traj.times.size() == 21);
  CHECK(traj.times.back() == doctest::Approx(1.0));
  REQUIRE(traj.snapshots.size() == 1);
  CHECK(traj.snapshots[0].time == doctest::Approx(0.5));
  const ConservationReport c = conservation_report(traj);
  CHECK(c.max_charge_drift <= 1e-12);
  CHECK(c.energy_drift <= 1e-8);
  // the profile only rotates: |z(T)| = |z(0)|
  const FieldVector w = testing::soliton(grid, 1.0);
  double err = 0.0;
  for (std::size_t i = 0; i < grid->size(); ++i) err = std::max(err, std::abs(std::abs(traj.final_state[0][i]) - w[0][i].real()));
  CHECK(err < 1e-6);
}

TEST_CASE("second order in dt on a breathing gaussian") {
  auto grid = Grid::create({512}, {40.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  const FieldVector z0({testing::gaussian(grid, 1.0, 1.5)});
  std::vector<FieldVector> finals;
  std::vector<double> drifts;
  for (double dt : {4e-2, 2e-2, 1e-2}) {
    EvolveOptions o;
    o.dt = dt;
    o.T = 2.0;
    const Trajectory traj = evolve(ctx, z0, o);
    finals.push_back(traj.final_state);
    drifts.push_back(conservation_report(traj).energy_drift);
  }
  const double self = h1_distance(finals[0], finals[1]) / h1_distance(finals[1], finals[2]);
  CHECK(self == doctest::Approx(4.0).epsilon(0.05));
  CHECK(drifts[0] / drifts[1] == doctest::Approx(4.0).epsilon(0.05));
  CHECK(drifts[1] / drifts[2] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("monitor sees every sample") {
  auto grid = Grid::create({64}, {20.0});
  EnergyContext ctx(grid, families::scalar_cubic());
  EvolveOptions o;
  o.dt = 0.01;
  o.T = 0.1;
  o.sample_every = 3;
  std::vector<double> seen;
  const Trajectory traj = evolve(ctx, testing::soliton(grid, 1.0), o, [&](double t, const FieldVector&) { seen.push_back(t); });
  CHECK(seen == traj.times);
  REQUIRE(seen.size() == 5);
  CHECK(seen.front() == 0.0);
  CHECK(seen.back() == doctest::Approx(0.1));
}

TEST_CASE("collapse is flagged, not thrown") {
  auto grid = Grid::create({256}, {20.0});
  EnergyContext ctx(grid, families::scalar_power(7.0));
  const FieldVector z({testing::gaussian(grid, 0.5, 3.0)});
  EvolveOptions o;
  o.dt = 1e-4;
  o.T = 1.0;
  o.sample_every = 10;
  const Trajectory traj = evolve(ctx, z, o);
  REQUIRE(traj.blowup_time.has_value());
  CHECK(*traj.blowup_time < 1.0);
  CHECK_FALSE(traj.blowup_reason.empty());
}

TEST_CASE("option validation") {
  EvolveOptions o;
  CHECK_NOTHROW(validate(o));
  o.dt = 0.0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  o = EvolveOptions{};
  o.T = 1e-4;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  o = EvolveOptions{};
  o.sample_every = 0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  o = EvolveOptions{};
  o.blowup_ratio = 1.0;
  CHECK_THROWS_AS(validate(o), std::invalid_argument);
  CHECK_THROWS_AS(conservation_report(Trajectory{}), std::invalid_argument);
}

TEST_CASE("trajectory csv layout") {
  Trajectory traj;
  traj.times = {0.0, 0.5};
  traj.charges_series = {{1.0, 2.0}, {1.0, 2.0}};
  traj.energy_series = {-0.25, -0.25};
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  CHECK(out.str() == "t,Q_1,Q_2,E\n0,1,2,-0.25\n0.5,1,2,-0.25\n");
  CHECK(format_double(0.1) == "0.10000000000000001");
}
