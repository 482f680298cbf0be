#include "cnls/stability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "cnls/errors.hpp"
#include "cnls/random_fields.hpp"
#include "cnls/summation.hpp"

namespace cnls {

namespace {

constexpr double kChargeMatchTol = 1e-10;
constexpr std::size_t kNewtonIterations = 30;

std::vector<cdouble> spectrum(const ComplexField& z) {
  std::vector<cdouble> out(z.size());
  z.grid().forward(z.values(), out);
  return out;
}

std::vector<double> h1_weight(const Grid& grid) {
  const auto symbol = grid.kinetic_symbol();
  std::vector<double> w(symbol.size());
  for (std::size_t p = 0; p < w.size(); ++p) w[p] = 1.0 + symbol[p];
  return w;
}

struct Objective {
  double value = 0.0;
  std::array<double, 3> grad{};
  std::array<std::array<double, 3>, 3> hess{};
};

/// Solves (-H) s = g by Cholesky; false when -H is not positive definite.
bool newton_direction(const Objective& obj, std::size_t dims, std::array<double, 3>& s) {
  std::array<std::array<double, 3>, 3> l{};
  for (std::size_t i = 0; i < dims; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = -obj.hess[i][j];
      for (std::size_t k = 0; k < j; ++k) sum -= l[i][k] * l[j][k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        l[i][i] = std::sqrt(sum);
      } else {
        l[i][j] = sum / l[j][j];
      }
    }
  }
  std::array<double, 3> y{};
  for (std::size_t i = 0; i < dims; ++i) {
    double sum = obj.grad[i];
    for (std::size_t k = 0; k < i; ++k) sum -= l[i][k] * y[k];
    y[i] = sum / l[i][i];
  }
  for (std::size_t i = dims; i-- > 0;) {
    double sum = y[i];
    for (std::size_t k = i + 1; k < dims; ++k) sum -= l[k][i] * s[k];
    s[i] = sum / l[i][i];
  }
  return true;
}

class Correlation {
 public:
  Correlation(const Grid& grid, std::vector<std::vector<cdouble>> a) : grid_(grid), a_(std::move(a)) {}

  std::vector<cdouble> at(std::span<const double> y) const {
    std::vector<cdouble> c;
    for (const auto& a : a_) {
      std::vector<cdouble> terms(a.size());
      for (std::size_t p = 0; p < a.size(); ++p) terms[p] = a[p] * std::polar(1.0, phase(p, y));
      c.push_back(sum(terms));
    }
    return c;
  }

  Objective objective(std::span<const double> y) const {
    const std::size_t dims = grid_.dims();
    Objective obj;
    std::vector<cdouble> terms(grid_.size());
    for (const auto& a : a_) {
      std::vector<cdouble> e(a.size());
      for (std::size_t p = 0; p < a.size(); ++p) e[p] = a[p] * std::polar(1.0, phase(p, y));
      const cdouble c = sum(e);
      const double f = std::abs(c);
      if (!(f > 0.0)) continue;
      std::array<cdouble, 3> g{};
      std::array<std::array<cdouble, 3>, 3> h{};
      for (std::size_t i = 0; i < dims; ++i) {
        for (std::size_t p = 0; p < e.size(); ++p) terms[p] = cdouble(0.0, 1.0) * k(p, i) * e[p];
        g[i] = sum(terms);
        for (std::size_t j = 0; j <= i; ++j) {
          for (std::size_t p = 0; p < e.size(); ++p) terms[p] = -k(p, i) * k(p, j) * e[p];
          h[i][j] = h[j][i] = sum(terms);
        }
      }
      obj.value += f;
      std::array<double, 3> fg{};
      for (std::size_t i = 0; i < dims; ++i) {
        fg[i] = (std::conj(c) * g[i]).real() / f;
        obj.grad[i] += fg[i];
      }
      for (std::size_t i = 0; i < dims; ++i) {
        for (std::size_t j = 0; j < dims; ++j) {
          obj.hess[i][j] += ((std::conj(g[i]) * g[j]).real() + (std::conj(c) * h[i][j]).real()) / f - fg[i] * fg[j] / f;
        }
      }
    }
    return obj;
  }

 private:
  double k(std::size_t p, std::size_t axis) const { return grid_.wavenumbers(axis)[grid_.axis_index(p, axis)]; }
  double phase(std::size_t p, std::span<const double> y) const {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += k(p, i) * y[i];
    return s;
  }
  static cdouble sum(std::span<const cdouble> v) {
    std::vector<double> re(v.size()), im(v.size());
    for (std::size_t p = 0; p < v.size(); ++p) {
      re[p] = v[p].real();
      im[p] = v[p].imag();
    }
    return {pairwise_sum(re), pairwise_sum(im)};
  }

  const Grid& grid_;
  std::vector<std::vector<cdouble>> a_;
};

const FieldVector& converged_state(const GroundStateResult& ground) {
  if (!ground.converged || ground.state.empty()) {
    throw NotAttainedError("OrbitProxy: the ground state did not converge; no minimizer to build an orbit from");
  }
  return ground.state;
}

}  // namespace

OrbitProxy::OrbitProxy(FieldVector reference, bool translations)
    : w_(std::move(reference)), translations_(translations) {
  if (w_.empty()) throw std::invalid_argument("OrbitProxy: empty reference");
  for (const auto& comp : w_) w_hat_.push_back(spectrum(comp));
  weight_ = h1_weight(w_.grid());
}

OrbitProxy::OrbitProxy(const EnergyContext& ctx, const ConstraintSet& c, const GroundStateResult& ground)
    : OrbitProxy(converged_state(ground), !ctx.spec().x_dependent()) {
  ctx.require_compatible(w_);
  if (c.ell() != w_.ell()) throw std::invalid_argument("OrbitProxy: constraint count mismatch");
  for (std::size_t j = 0; j < w_.ell(); ++j) {
    const double q = l2_norm_sq(w_[j]);
    if (std::abs(q - c.mass(j)) > kChargeMatchTol * c.mass(j)) {
      throw std::invalid_argument("OrbitProxy: reference charge does not match the constraint");
    }
  }
}

OrbitProxy::Alignment OrbitProxy::align(const FieldVector& z) const {
  if (!z.compatible(w_)) throw std::invalid_argument("orbit_distance: state not on the reference grid");
  const Grid& grid = w_.grid();
  const std::size_t dims = grid.dims();
  const double scale = grid.cell_volume() / static_cast<double>(grid.size());

  std::vector<std::vector<cdouble>> a;
  for (std::size_t j = 0; j < z.ell(); ++j) {
    const auto z_hat = spectrum(z[j]);
    std::vector<cdouble> aj(z_hat.size());
    for (std::size_t p = 0; p < aj.size(); ++p) aj[p] = scale * weight_[p] * z_hat[p] * std::conj(w_hat_[j][p]);
    a.push_back(std::move(aj));
  }
  const Correlation corr(grid, a);

  Alignment out;
  out.shift.assign(dims, 0.0);
  if (translations_) {
    std::vector<double> score(grid.size(), 0.0);
    std::vector<cdouble> c(grid.size());
    for (const auto& aj : a) {
      grid.inverse(aj, c);
      for (std::size_t p = 0; p < c.size(); ++p) score[p] += std::abs(c[p]);
    }
    std::size_t best = 0;
    for (std::size_t p = 1; p < score.size(); ++p) {
      if (score[p] > score[best]) best = p;
    }
    std::vector<double> anchor(dims);
    for (std::size_t i = 0; i < dims; ++i) {
      const auto n = static_cast<long long>(grid.points(i));
      auto m = static_cast<long long>(grid.axis_index(best, i));
      if (m >= n / 2) m -= n;
      anchor[i] = static_cast<double>(m) * grid.spacing(i);
    }
    std::vector<double> y = anchor;
    Objective obj = corr.objective(y);
    for (std::size_t it = 0; it < kNewtonIterations; ++it) {
      std::array<double, 3> s{};
      if (!newton_direction(obj, dims, s)) break;
      bool improved = false;
      double step_size = 0.0;
      for (int halving = 0; halving < 20 && !improved; ++halving) {
        std::vector<double> trial(dims);
        step_size = 0.0;
        for (std::size_t i = 0; i < dims; ++i) {
          const double h = grid.spacing(i);
          trial[i] = std::clamp(y[i] + s[i], anchor[i] - h, anchor[i] + h);
          step_size = std::max(step_size, std::abs(trial[i] - y[i]) / h);
        }
        const Objective next = corr.objective(trial);
        if (next.value > obj.value) {
          y = trial;
          obj = next;
          improved = true;
        } else {
          for (auto& v : s) v *= 0.5;
        }
      }
      if (!improved || step_size < 1e-13) break;
    }
    out.shift = y;
  }
  const auto c = corr.at(out.shift);
  for (const auto& cj : c) out.phases.push_back(std::abs(cj) > 0.0 ? std::arg(cj) : 0.0);
  out.distance = symmetry_distance(*this, z, out.phases, out.shift);
  return out;
}

double symmetry_distance(const OrbitProxy& proxy, const FieldVector& z, std::span<const double> phases,
                         std::span<const double> shift) {
  const FieldVector& w = proxy.reference();
  if (!z.compatible(w)) throw std::invalid_argument("symmetry_distance: state not on the reference grid");
  const Grid& grid = w.grid();
  if (phases.size() != w.ell() || shift.size() != grid.dims()) {
    throw std::invalid_argument("symmetry_distance: wrong number of symmetry parameters");
  }
  const auto weight = h1_weight(grid);
  std::vector<double> terms(grid.size() * w.ell());
  std::vector<double> k(grid.dims());
  for (std::size_t j = 0; j < w.ell(); ++j) {
    const auto z_hat = spectrum(z[j]);
    const auto w_hat = spectrum(w[j]);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      double phase = phases[j];
      for (std::size_t i = 0; i < grid.dims(); ++i) phase -= grid.wavenumbers(i)[grid.axis_index(p, i)] * shift[i];
      const cdouble diff = z_hat[p] - std::polar(1.0, phase) * w_hat[p];
      terms[j * grid.size() + p] = weight[p] * std::norm(diff);
    }
  }
  const double scale = grid.cell_volume() / static_cast<double>(grid.size());
  return std::sqrt(std::max(0.0, scale * pairwise_sum(terms)));
}

double orbit_distance(const OrbitProxy& proxy, const FieldVector& z) { return proxy.align(z).distance; }

double h1_inner(const FieldVector& a, const FieldVector& b) {
  if (!a.compatible(b)) throw std::invalid_argument("h1_inner: incompatible fields");
  const Grid& grid = a.grid();
  const auto weight = h1_weight(grid);
  std::vector<double> terms(grid.size() * a.ell());
  for (std::size_t j = 0; j < a.ell(); ++j) {
    const auto a_hat = spectrum(a[j]);
    const auto b_hat = spectrum(b[j]);
    for (std::size_t p = 0; p < grid.size(); ++p) {
      terms[j * grid.size() + p] = weight[p] * (std::conj(a_hat[p]) * b_hat[p]).real();
    }
  }
  return grid.cell_volume() / static_cast<double>(grid.size()) * pairwise_sum(terms);
}

double h1_norm(const FieldVector& z) { return std::sqrt(std::max(0.0, h1_inner(z, z))); }

FieldVector perturbation_direction(const GridPtr& grid, std::size_t ell, std::uint64_t seed) {
  Rng rng(seed);
  RandomFieldOptions opts;
  opts.cutoff_fraction = 2.0 / 3.0;
  opts.complex_values = true;
  std::vector<ComplexField> comps;
  for (std::size_t j = 0; j < ell; ++j) comps.push_back(random_smooth_field(grid, rng, opts));
  FieldVector g(std::move(comps));
  g *= 1.0 / h1_norm(g);
  return g;
}

StabilityReport stability_experiment(const EnergyContext& ctx, const OrbitProxy& proxy, double delta,
                                     std::uint64_t seed, const EvolveOptions& opts) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("stability_experiment: delta must be >= 0");
  const FieldVector& w = proxy.reference();
  ctx.require_compatible(w);
  FieldVector z0 = w;
  if (delta > 0.0) z0 += delta * perturbation_direction(w.grid_ptr(), w.ell(), seed);

  StabilityReport report;
  report.delta = delta;
  report.seed = seed;
  report.dt = opts.dt;
  report.T = opts.T;
  report.points = w.grid().shape();
  report.lengths = w.grid().lengths();
  const Trajectory traj = evolve(ctx, z0, opts, [&](double t, const FieldVector& z) {
    const double d = orbit_distance(proxy, z);
    report.series.emplace_back(t, d);
    report.sup_distance = std::max(report.sup_distance, d);
  });
  report.blowup_time = traj.blowup_time;
  const ConservationReport cons = conservation_report(traj);
  report.max_charge_drift = cons.max_charge_drift;
  report.energy_drift = cons.energy_drift;
  return report;
}

StabilityCurve delta_eps_sweep(const EnergyContext& ctx, const OrbitProxy& proxy, std::vector<double> deltas,
                               const std::vector<std::uint64_t>& seeds, const EvolveOptions& opts) {
  if (deltas.empty()) throw std::invalid_argument("delta_eps_sweep: no deltas");
  if (seeds.empty()) throw std::invalid_argument("delta_eps_sweep: no seeds");
  for (double d : deltas) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw std::invalid_argument("delta_eps_sweep: deltas must be >= 0");
  }
  validate(opts);
  std::stable_sort(deltas.begin(), deltas.end());

  StabilityCurve curve;
  for (double delta : deltas) {
    SweepPoint point;
    point.delta = delta;
    point.worst_seed = seeds.front();
    for (std::uint64_t seed : seeds) {
      StabilityReport r = stability_experiment(ctx, proxy, delta, seed, opts);
      if (r.sup_distance > point.epsilon) {
        point.epsilon = r.sup_distance;
        point.worst_seed = seed;
      }
      point.blowup = point.blowup || r.blowup_time.has_value();
      curve.runs.push_back(std::move(r));
    }
    if (!curve.points.empty()) point.monotone_so_far = point.epsilon >= curve.points.back().epsilon;
    curve.monotone = curve.monotone && point.monotone_so_far;
    curve.points.push_back(point);
  }
  return curve;
}

void write_distance_csv(std::ostream& out, const StabilityReport& report) {
  out << "t,distance\n";
  for (const auto& [t, d] : report.series) out << format_double(t) << ',' << format_double(d) << '\n';
}

void write_curve_csv(std::ostream& out, const StabilityCurve& curve) {
  out << "delta,epsilon,worst_seed,blowup,monotone\n";
  for (const auto& p : curve.points) {
    out << format_double(p.delta) << ',' << format_double(p.epsilon) << ',' << p.worst_seed << ','
        << (p.blowup ? 1 : 0) << ',' << (p.monotone_so_far ? 1 : 0) << '\n';
  }
}

}  // namespace cnls
