#include "cnls/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "cnls/errors.hpp"
#include "cnls/random_fields.hpp"
#include "cnls/summation.hpp"

namespace cnls {

namespace {

constexpr double kAcceptSlack = 1e-14;
constexpr double kStagnationFactor = 0.999;

void rescale_to(ComplexField& z, double c) {
  const double norm_sq = l2_norm_sq(z);
  if (!(norm_sq > 0.0)) throw DivergenceError("minimize: component collapsed to zero");
  z *= c / std::sqrt(norm_sq);
}

void rescale_to(FieldVector& z, const ConstraintSet& c) {
  for (std::size_t j = 0; j < z.ell(); ++j) rescale_to(z[j], c.c(j));
}

RealField gaussian_envelope(const GridPtr& grid, Rng& rng) {
  const std::size_t dims = grid->dims();
  std::vector<double> center(dims), width(dims);
  for (std::size_t a = 0; a < dims; ++a) {
    const double l = grid->length(a);
    center[a] = rng.uniform(-l / 40.0, l / 40.0);
    width[a] = l / 16.0;
  }
  RealField env(grid);
  std::vector<double> x(dims);
  for (std::size_t p = 0; p < grid->size(); ++p) {
    grid->point(p, x);
    double r2 = 0.0;
    for (std::size_t a = 0; a < dims; ++a) {
      const double d = (x[a] - center[a]) / width[a];
      r2 += d * d;
    }
    env[p] = std::exp(-0.5 * r2);
  }
  return env;
}

double max_abs(std::span<const cdouble> v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e));
  return m;
}

FieldVector seeded_state(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts,
                         bool random_phase) {
  const GridPtr& grid = ctx.grid_ptr();
  if (c.ell() != ctx.ell()) throw std::invalid_argument("minimize: constraint count does not match the nonlinearity");
  if (opts.initial_guess == InitialGuess::Given) {
    if (!opts.initial) throw std::invalid_argument("minimize: initial guess policy 'given' without a state");
    ctx.require_compatible(*opts.initial);
    FieldVector z = *opts.initial;
    if (!random_phase) {
      for (auto& comp : z) {
        for (auto& v : comp.values()) v = cdouble(std::abs(v), 0.0);
      }
    }
    rescale_to(z, c);
    return z;
  }

  Rng rng(opts.seed);
  std::vector<ComplexField> comps;
  for (std::size_t j = 0; j < ctx.ell(); ++j) {
    RealField env = gaussian_envelope(grid, rng);
    if (opts.initial_guess == InitialGuess::RandomSeeded) {
      RandomFieldOptions ro;
      ro.cutoff_fraction = 0.5;
      ro.smoothing_fraction = 0.05;
      ro.complex_values = false;
      ComplexField bump = random_smooth_field(grid, rng, ro);
      const double m = max_abs(bump.values());
      for (std::size_t p = 0; p < env.size(); ++p) {
        env[p] *= 1.0 + 0.5 * (m > 0.0 ? bump[p].real() / m : 0.0);
      }
    }
    ComplexField comp(env);
    if (random_phase) {
      RandomFieldOptions ro;
      ro.cutoff_fraction = 0.5;
      ro.smoothing_fraction = 0.05;
      ro.complex_values = false;
      ComplexField phase = random_smooth_field(grid, rng, ro);
      const double m = max_abs(phase.values());
      for (std::size_t p = 0; p < comp.size(); ++p) {
        const double theta = m > 0.0 ? std::numbers::pi * phase[p].real() / m : 0.0;
        comp[p] *= std::polar(1.0, theta);
      }
    }
    comps.push_back(std::move(comp));
  }
  FieldVector z(std::move(comps));
  rescale_to(z, c);
  return z;
}

/// (alpha + |k|^2)^-1 applied spectrally.
ComplexField precondition(const ComplexField& r, double alpha) {
  ComplexField spec = forward_transform(r);
  const auto symbol = r.grid().kinetic_symbol();
  for (std::size_t p = 0; p < spec.size(); ++p) spec[p] *= 1.0 / (alpha + symbol[p]);
  return inverse_transform(spec);
}

GroundStateResult run_flow(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts,
                           bool real_cone) {
  if (!(opts.tau0 > 0.0)) throw std::invalid_argument("minimize: tau0 must be positive");
  if (!(opts.tol_grad > 0.0)) throw std::invalid_argument("minimize: tol_grad must be positive");
  if (!(opts.backtracking > 0.0 && opts.backtracking < 1.0)) {
    throw std::invalid_argument("minimize: backtracking factor must lie in (0, 1)");
  }

  const Grid& grid = ctx.grid();
  double alpha_floor = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < grid.dims(); ++a) {
    const double k = 2.0 * std::numbers::pi / grid.length(a);
    alpha_floor = std::min(alpha_floor, k * k);
  }

  GroundStateResult result;
  result.seed = opts.seed;
  FieldVector u = seeded_state(ctx, c, opts, !real_cone);
  double energy = energy_hat(ctx, u);
  if (!std::isfinite(energy)) throw DivergenceError("minimize: initial energy is not finite");
  result.energy_trace.push_back(energy);

  const double tau_max = 2.0 * opts.tau0;
  double tau = opts.tau0;
  bool gradient_small = false;
  std::string stop_reason = "iteration limit reached";
  std::vector<double> best_gnorm;
  std::size_t it = 0;
  for (; it < opts.max_iterations; ++it) {
    FieldVector g = energy_gradient(ctx, u);
    std::vector<double> sq(u.ell());
    std::vector<double> alphas(u.ell());
    for (std::size_t j = 0; j < u.ell(); ++j) {
      if (real_cone) {
        for (auto& v : g[j].values()) v = cdouble(v.real(), 0.0);
      }
      const double mass = l2_norm_sq(u[j]);
      const double mu = real_inner(g[j], u[j]) / mass;
      for (std::size_t p = 0; p < g[j].size(); ++p) g[j][p] -= mu * u[j][p];
      sq[j] = l2_norm_sq(g[j]);
      alphas[j] = std::max(-mu, alpha_floor);
    }
    const double gnorm = std::sqrt(pairwise_sum(sq));
    if (gnorm <= opts.tol_grad) {
      gradient_small = true;
      stop_reason = "projected gradient below tolerance";
      break;
    }
    best_gnorm.push_back(best_gnorm.empty() ? gnorm : std::min(best_gnorm.back(), gnorm));
    const std::size_t n = best_gnorm.size();
    if (opts.stagnation_window > 0 && n > opts.stagnation_window &&
        best_gnorm.back() > kStagnationFactor * best_gnorm[n - 1 - opts.stagnation_window]) {
      stop_reason = "no progress over the stagnation window";
      break;
    }

    FieldVector direction = g;
    for (std::size_t j = 0; j < u.ell(); ++j) {
      direction[j] = precondition(g[j], alphas[j]);
      if (real_cone) {
        for (auto& v : direction[j].values()) v = cdouble(v.real(), 0.0);
      }
      const double along = real_inner(direction[j], u[j]) / l2_norm_sq(u[j]);
      for (std::size_t p = 0; p < u[j].size(); ++p) direction[j][p] -= along * u[j][p];
    }

    bool accepted = false;
    while (tau >= 1e-12 * opts.tau0) {
      FieldVector trial = u;
      for (std::size_t j = 0; j < u.ell(); ++j) {
        for (std::size_t p = 0; p < trial[j].size(); ++p) {
          cdouble v = trial[j][p] - tau * direction[j][p];
          if (real_cone) v = cdouble(v.real(), 0.0);
          trial[j][p] = v;
        }
      }
      double trial_energy = std::numeric_limits<double>::infinity();
      bool valid = true;
      for (const auto& comp : trial) {
        if (!(l2_norm_sq(comp) > 0.0)) valid = false;
      }
      if (valid) {
        rescale_to(trial, c);
        trial_energy = energy_hat(ctx, trial);
      }
      if (std::isfinite(trial_energy) && trial_energy <= energy + kAcceptSlack * (1.0 + std::abs(energy))) {
        u = std::move(trial);
        energy = trial_energy;
        result.energy_trace.push_back(energy);
        tau = std::min(tau * 1.1, tau_max);
        accepted = true;
        break;
      }
      tau *= opts.backtracking;
    }
    if (!accepted) {
      if (!std::isfinite(energy)) throw DivergenceError("minimize: energy diverged");
      stop_reason = "line search could not decrease the energy";
      break;
    }
  }
  if (!std::isfinite(energy)) throw DivergenceError("minimize: energy diverged");

  result.iterations = it;
  result.state = ctx.spec().x_dependent() ? std::move(u) : center_by_centroid(u);
  result.value = energy_hat(ctx, result.state);
  result.multipliers = lagrange_multipliers(ctx, result.state);
  result.residual = elliptic_residual(ctx, result.state, result.multipliers);
  result.localized = boundary_ratio(result.state) <= opts.localization_tol;
  result.resolved = spectral_tail_fraction(result.state) <= opts.resolution_tol;
  result.converged =
      gradient_small && result.localized && result.resolved && result.residual <= 10.0 * opts.tol_grad;
  result.message = stop_reason;
  if (!result.resolved) {
    result.message += "; state concentrates at the grid scale (collapse, infimum not attained on the continuum)";
  }
  if (!result.localized) {
    result.message += "; state reaches the box boundary (mass escapes, infimum not attained)";
  }
  return result;
}

}  // namespace

FieldVector initial_state(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts) {
  return seeded_state(ctx, c, opts, false);
}

GroundStateResult minimize(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts) {
  return run_flow(ctx, c, opts, true);
}

GroundStateResult complex_minimize(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts) {
  return run_flow(ctx, c, opts, false);
}

FieldVector elliptic_defect(const EnergyContext& ctx, const FieldVector& u, std::span<const double> lambdas) {
  ctx.require_compatible(u);
  if (lambdas.size() != u.ell()) throw std::invalid_argument("elliptic_defect: need one multiplier per component");
  std::vector<ComplexField> out;
  out.reserve(u.ell());
  for (std::size_t j = 0; j < u.ell(); ++j) {
    ComplexField d = laplacian(u[j]);
    const RealField h = ctx.coupling_field(u, j);
    for (std::size_t p = 0; p < d.size(); ++p) d[p] += (h[p] + lambdas[j]) * u[j][p];
    out.push_back(std::move(d));
  }
  return FieldVector(std::move(out));
}

std::vector<double> lagrange_multipliers(const EnergyContext& ctx, const FieldVector& u) {
  const std::vector<double> zeros(u.ell(), 0.0);
  const FieldVector d = elliptic_defect(ctx, u, zeros);
  std::vector<double> lambdas(u.ell());
  for (std::size_t j = 0; j < u.ell(); ++j) {
    const double mass = l2_norm_sq(u[j]);
    if (!(mass > 0.0)) throw std::domain_error("lagrange_multipliers: component has zero norm");
    lambdas[j] = -real_inner(d[j], u[j]) / mass;
  }
  return lambdas;
}

double elliptic_residual(const EnergyContext& ctx, const FieldVector& u, std::span<const double> lambdas) {
  const FieldVector d = elliptic_defect(ctx, u, lambdas);
  std::vector<double> sq(d.ell());
  for (std::size_t j = 0; j < d.ell(); ++j) sq[j] = l2_norm_sq(d[j]);
  return std::sqrt(pairwise_sum(sq));
}

FieldVector standing_wave(const FieldVector& u, std::span<const double> lambdas, double t) {
  if (lambdas.size() != u.ell()) throw std::invalid_argument("standing_wave: need one multiplier per component");
  FieldVector out = u;
  for (std::size_t j = 0; j < u.ell(); ++j) out[j] *= std::polar(1.0, -lambdas[j] * t);
  return out;
}

std::vector<double> modulus_centroid(const FieldVector& z) {
  const Grid& grid = z.grid();
  const std::size_t dims = grid.dims();
  std::vector<double> density(grid.size(), 0.0);
  for (const auto& comp : z) {
    for (std::size_t p = 0; p < grid.size(); ++p) density[p] += std::norm(comp[p]);
  }
  std::vector<double> centroid(dims);
  std::vector<double> cs(grid.size()), sn(grid.size());
  for (std::size_t a = 0; a < dims; ++a) {
    const double n = static_cast<double>(grid.points(a));
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(grid.axis_index(p, a)) / n;
      cs[p] = density[p] * std::cos(angle);
      sn[p] = density[p] * std::sin(angle);
    }
    double angle = std::atan2(pairwise_sum(sn), pairwise_sum(cs));
    if (angle < 0.0) angle += 2.0 * std::numbers::pi;
    const double index = angle * n / (2.0 * std::numbers::pi);
    centroid[a] = -0.5 * grid.length(a) + index * grid.spacing(a);
  }
  return centroid;
}

FieldVector center_by_centroid(const FieldVector& z) {
  const Grid& grid = z.grid();
  const std::size_t dims = grid.dims();
  const auto centroid = modulus_centroid(z);
  std::vector<std::size_t> shift(dims);
  for (std::size_t a = 0; a < dims; ++a) {
    const auto n = static_cast<long long>(grid.points(a));
    // Box center is x = 0, i.e. index n/2.
    const long long offset = std::llround(-centroid[a] / grid.spacing(a));
    shift[a] = static_cast<std::size_t>(((offset % n) + n) % n);
  }
  FieldVector out = z;
  std::vector<std::size_t> idx(dims);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    std::size_t target = 0;
    for (std::size_t a = 0; a < dims; ++a) {
      const std::size_t n = grid.points(a);
      target = target * n + (grid.axis_index(p, a) + shift[a]) % n;
    }
    for (std::size_t j = 0; j < z.ell(); ++j) out[j][target] = z[j][p];
  }
  return out;
}

double spectral_tail_fraction(const FieldVector& z) {
  const Grid& grid = z.grid();
  std::vector<double> tail, total;
  for (const auto& comp : z) {
    const ComplexField spec = forward_transform(comp);
    for (std::size_t p = 0; p < spec.size(); ++p) {
      const double w = std::norm(spec[p]);
      total.push_back(w);
      bool high = false;
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        const double nyquist = std::numbers::pi / grid.spacing(a);
        if (std::abs(grid.wavenumbers(a)[p]) > 2.0 / 3.0 * nyquist) high = true;
      }
      if (high) tail.push_back(w);
    }
  }
  const double sum = pairwise_sum(total);
  return sum > 0.0 ? pairwise_sum(tail) / sum : 0.0;
}

double boundary_ratio(const FieldVector& z) {
  const Grid& grid = z.grid();
  double global = 0.0;
  double boundary = 0.0;
  for (const auto& comp : z) {
    for (std::size_t p = 0; p < grid.size(); ++p) {
      const double m = std::abs(comp[p]);
      global = std::max(global, m);
      bool on_face = false;
      for (std::size_t a = 0; a < grid.dims(); ++a) {
        const std::size_t i = grid.axis_index(p, a);
        if (i == 0 || i + 1 == grid.points(a)) on_face = true;
      }
      if (on_face) boundary = std::max(boundary, m);
    }
  }
  return global > 0.0 ? boundary / global : 0.0;
}

}  // namespace cnls
