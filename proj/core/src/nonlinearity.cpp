#include "cnls/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cnls/errors.hpp"
#include "cnls/random.hpp"

namespace cnls {

NonlinearitySpec::NonlinearitySpec(std::string name, std::size_t ell, PotentialFn potential,
                                   CouplingFn coupling, bool x_dependent,
                                   std::map<std::string, double> params,
                                   std::shared_ptr<const NonlinearitySpec> asymptotic)
    : name_(std::move(name)),
      ell_(ell),
      potential_(std::move(potential)),
      coupling_(std::move(coupling)),
      x_dependent_(x_dependent),
      params_(std::move(params)),
      asymptotic_(std::move(asymptotic)) {
  if (ell_ == 0) throw std::invalid_argument("nonlinearity: need at least one component");
  if (!potential_ || !coupling_) throw std::invalid_argument("nonlinearity: missing evaluator");
  if (asymptotic_ && asymptotic_->ell() != ell_) {
    throw std::invalid_argument("nonlinearity: asymptotic spec has a different component count");
  }
}

double eval_H(const NonlinearitySpec& spec, std::span<const double> x, std::span<const double> s) {
  if (s.size() != spec.ell()) throw std::invalid_argument("eval_H: expected one modulus per component");
  for (double v : s) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("eval_H: moduli must be finite and >= 0");
  }
  const double value = spec.potential(x, s);
  if (!std::isfinite(value)) throw std::domain_error("eval_H: non-finite result");
  return value;
}

double eval_hj(const NonlinearitySpec& spec, std::size_t j, std::span<const double> x,
               std::span<const double> s_sq) {
  if (j >= spec.ell()) throw std::out_of_range("eval_hj: component index out of range");
  if (s_sq.size() != spec.ell()) throw std::invalid_argument("eval_hj: expected one argument per component");
  for (double v : s_sq) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("eval_hj: arguments must be finite and >= 0");
  }
  const double value = spec.coupling(j, x, s_sq);
  if (!std::isfinite(value)) throw std::domain_error("eval_hj: non-finite result");
  return value;
}

namespace families {

NonlinearityPtr scalar_power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("scalar_power: need p > 1");
  const double half_exponent = 0.5 * (p - 1.0);
  const double scale = 2.0 / (p + 1.0);
  return std::make_shared<NonlinearitySpec>(
      "power", 1,
      [=](std::span<const double>, std::span<const double> s) { return scale * std::pow(s[0], p + 1.0); },
      [=](std::size_t, std::span<const double>, std::span<const double> t) {
        return std::pow(t[0], half_exponent);
      },
      false, std::map<std::string, double>{{"p", p}});
}

NonlinearityPtr scalar_cubic() {
  return std::make_shared<NonlinearitySpec>(
      "cubic", 1,
      [](std::span<const double>, std::span<const double> s) {
        const double s2 = s[0] * s[0];
        return 0.5 * s2 * s2;
      },
      [](std::size_t, std::span<const double>, std::span<const double> t) { return t[0]; }, false,
      std::map<std::string, double>{{"p", 3.0}});
}

NonlinearityPtr manakov() {
  return std::make_shared<NonlinearitySpec>(
      "manakov", 2,
      [](std::span<const double>, std::span<const double> s) {
        const double total = s[0] * s[0] + s[1] * s[1];
        return 0.5 * total * total;
      },
      [](std::size_t, std::span<const double>, std::span<const double> t) { return t[0] + t[1]; }, false);
}

NonlinearityPtr product_coupling(double strength, double alpha1, double alpha2) {
  if (!(strength >= 0.0) || !std::isfinite(strength)) {
    throw std::invalid_argument("product_coupling: strength must be finite and >= 0");
  }
  if (!(alpha1 >= 2.0) || !(alpha2 >= 2.0)) {
    throw std::invalid_argument("product_coupling: exponents must be >= 2");
  }
  return std::make_shared<NonlinearitySpec>(
      "product", 2,
      [=](std::span<const double>, std::span<const double> s) {
        return strength * std::pow(s[0], alpha1) * std::pow(s[1], alpha2);
      },
      [=](std::size_t j, std::span<const double>, std::span<const double> t) {
        if (j == 0) return 0.5 * strength * alpha1 * std::pow(t[0], 0.5 * alpha1 - 1.0) * std::pow(t[1], 0.5 * alpha2);
        return 0.5 * strength * alpha2 * std::pow(t[0], 0.5 * alpha1) * std::pow(t[1], 0.5 * alpha2 - 1.0);
      },
      false, std::map<std::string, double>{{"strength", strength}, {"alpha1", alpha1}, {"alpha2", alpha2}});
}

NonlinearityPtr x_dependent(NonlinearityPtr base) {
  if (!base) throw std::invalid_argument("x_dependent: null base");
  if (base->x_dependent()) throw std::invalid_argument("x_dependent: base must be x-independent");
  auto factor = [](std::span<const double> x) { return 1.0 + std::exp(-euclidean_norm(x)); };
  auto params = base->params();
  return std::make_shared<NonlinearitySpec>(
      "xdep-" + base->name(), base->ell(),
      [base, factor](std::span<const double> x, std::span<const double> s) {
        return factor(x) * base->potential(x, s);
      },
      [base, factor](std::size_t j, std::span<const double> x, std::span<const double> t) {
        return factor(x) * base->coupling(j, x, t);
      },
      true, std::move(params), base);
}

NonlinearityPtr zero(std::size_t ell) {
  return std::make_shared<NonlinearitySpec>(
      "zero", ell, [](std::span<const double>, std::span<const double>) { return 0.0; },
      [](std::size_t, std::span<const double>, std::span<const double>) { return 0.0; }, false);
}

NonlinearityPtr mismatched_fixture() {
  return std::make_shared<NonlinearitySpec>(
      "mismatched", 1,
      [](std::span<const double>, std::span<const double> s) {
        const double s2 = s[0] * s[0];
        return s2 * s2;
      },
      [](std::size_t, std::span<const double>, std::span<const double> t) { return t[0]; }, false);
}

}  // namespace families

// ---------------------------------------------------------------------------

double euclidean_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double e : v) acc += e * e;
  return std::sqrt(acc);
}

namespace {

std::vector<double> orthant_direction(Rng& rng, std::size_t ell) {
  std::vector<double> d(ell);
  double norm = 0.0;
  while (norm == 0.0) {
    for (auto& e : d) e = std::abs(rng.normal());
    norm = euclidean_norm(d);
  }
  for (auto& e : d) e /= norm;
  return d;
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

}  // namespace

std::vector<Sample> draw_samples(const SamplerOptions& options, std::size_t ell) {
  if (options.dims < 1 || options.dims > 3) throw std::invalid_argument("sampler: dims must be 1..3");
  if (!(options.s_min > 0.0) || !(options.s_max > options.s_min)) {
    throw std::invalid_argument("sampler: need 0 < s_min < s_max");
  }
  if (!(options.theta_max >= 1.0)) throw std::invalid_argument("sampler: theta_max must be >= 1");
  Rng rng(options.seed);

  auto random_x = [&] {
    std::vector<double> x(options.dims);
    for (auto& e : x) e = rng.uniform(-options.x_extent, options.x_extent);
    return x;
  };
  auto random_theta = [&] {
    std::vector<double> theta(ell);
    const double mode = rng.uniform();
    if (mode < 0.25) {
      std::ranges::fill(theta, log_uniform(rng, 1.0, options.theta_max));
    } else {
      for (auto& e : theta) e = rng.uniform() < 0.2 ? 1.0 : log_uniform(rng, 1.0, options.theta_max);
    }
    return theta;
  };
  auto random_s = [&] {
    auto s = orthant_direction(rng, ell);
    const double magnitude = log_uniform(rng, options.s_min, options.s_max);
    for (auto& e : s) e *= magnitude;
    if (ell > 1 && rng.uniform() < 0.125) s[rng.next() % ell] = 0.0;
    return s;
  };
  auto partner = [&](const std::vector<double>& s) {
    if (rng.uniform() < 0.5) return random_s();
    std::vector<double> r(s);
    const double scale = std::max(euclidean_norm(s), options.s_min) * log_uniform(rng, 1e-6, 1.0);
    for (auto& e : r) e = std::abs(e + scale * rng.normal());
    return r;
  };

  std::vector<Sample> out;
  out.reserve(options.samples + 4 * ell + 4);
  auto push_corner = [&](std::vector<double> s) {
    Sample smp;
    smp.x.assign(options.dims, 0.0);
    smp.r = partner(s);
    smp.s = std::move(s);
    smp.theta = random_theta();
    out.push_back(std::move(smp));
  };
  push_corner(std::vector<double>(ell, 0.0));
  for (double m : {options.s_min, 1.0, options.s_max}) {
    for (std::size_t j = 0; j < ell; ++j) {
      std::vector<double> s(ell, 0.0);
      s[j] = m;
      push_corner(std::move(s));
    }
    push_corner(std::vector<double>(ell, m / std::sqrt(static_cast<double>(ell))));
  }
  while (out.size() < options.samples + 3 * ell + 4) {
    Sample smp;
    smp.x = random_x();
    smp.s = random_s();
    smp.r = partner(smp.s);
    smp.theta = random_theta();
    out.push_back(std::move(smp));
  }
  return out;
}

double potential_partial_fd(const NonlinearitySpec& spec, std::size_t j, std::span<const double> x,
                            std::span<const double> s) {
  const double scale = s[j] > 0.0 ? s[j] : std::max(euclidean_norm(s), 1e-300);
  const double step = 1e-5 * scale;
  std::vector<double> plus(s.begin(), s.end());
  std::vector<double> minus(s.begin(), s.end());
  plus[j] = s[j] + step;
  // H depends on moduli only, so it is even in each s_j; mirror through 0.
  minus[j] = std::abs(s[j] - step);
  return (spec.potential(x, plus) - spec.potential(x, minus)) / (2.0 * step);
}

ConsistencyReport check_consistency(const NonlinearitySpec& spec, std::span<const Sample> samples,
                                    double tolerance) {
  ConsistencyReport report;
  report.tolerance = tolerance;
  report.samples = samples.size();
  const std::size_t ell = spec.ell();
  std::vector<double> s_sq(ell), analytic(ell);
  bool have_worst = false;
  for (const Sample& smp : samples) {
    for (std::size_t k = 0; k < ell; ++k) s_sq[k] = smp.s[k] * smp.s[k];
    double scale = 0.0;
    for (std::size_t k = 0; k < ell; ++k) {
      analytic[k] = 2.0 * spec.coupling(k, smp.x, s_sq) * smp.s[k];
      scale = std::max(scale, std::abs(analytic[k]));
    }
    for (std::size_t j = 0; j < ell; ++j) {
      const double fd = potential_partial_fd(spec, j, smp.x, smp.s);
      // Roundoff in the difference quotient is of order eps |H| / s_j.
      const double noise = smp.s[j] > 0.0 ? std::abs(spec.potential(smp.x, smp.s)) / smp.s[j] : 0.0;
      double deviation = std::abs(fd - analytic[j]) / (1.0 + std::max(scale, noise));
      if (!std::isfinite(deviation)) deviation = std::numeric_limits<double>::infinity();
      if (!have_worst || deviation > report.max_deviation) {
        have_worst = true;
        report.max_deviation = deviation;
        report.component = j;
        report.x = smp.x;
        report.s = smp.s;
        report.finite_difference = fd;
        report.analytic = analytic[j];
      }
    }
  }
  report.consistent = report.max_deviation <= tolerance;
  return report;
}

ConsistencyReport check_consistency(const NonlinearitySpec& spec, const SamplerOptions& sampler,
                                    double tolerance) {
  const auto samples = draw_samples(sampler, spec.ell());
  return check_consistency(spec, samples, tolerance);
}

void require_consistent(const NonlinearitySpec& spec, std::size_t dims) {
  SamplerOptions options;
  options.dims = dims;
  options.samples = 512;
  const auto report = check_consistency(spec, options, kConsistencyTolerance);
  if (!report.consistent) {
    std::ostringstream msg;
    msg << "nonlinearity '" << spec.name() << "' fails dH/ds_j = 2 h_j s_j: deviation " << report.max_deviation
        << " at component " << report.component;
    throw InconsistentSpecError(msg.str());
  }
}

}  // namespace cnls
