#include "cnls/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "cnls/random.hpp"

namespace cnls {

std::string to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H0: return "H0";
    case Hypothesis::H1: return "H1";
    case Hypothesis::H1Lipschitz: return "H1-Lipschitz";
    case Hypothesis::H2: return "H2";
    case Hypothesis::H3: return "H3";
    case Hypothesis::H4: return "H4";
    case Hypothesis::H5: return "H5";
    case Hypothesis::H6: return "H6";
    case Hypothesis::H7: return "H7";
  }
  return "?";
}

std::string to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::Pass: return "pass";
    case HypothesisStatus::Fail: return "fail";
    case HypothesisStatus::NotApplicable: return "n/a";
    case HypothesisStatus::Confirmed: return "confirmed";
  }
  return "?";
}

std::vector<Hypothesis> all_hypotheses() {
  return {Hypothesis::H0, Hypothesis::H1, Hypothesis::H1Lipschitz, Hypothesis::H2, Hypothesis::H3,
          Hypothesis::H4, Hypothesis::H5, Hypothesis::H6,          Hypothesis::H7};
}

std::optional<Hypothesis> parse_hypothesis(const std::string& name) {
  for (Hypothesis h : all_hypotheses()) {
    if (to_string(h) == name) return h;
  }
  return std::nullopt;
}

bool needs_asymptotic(Hypothesis h) {
  return h == Hypothesis::H5 || h == Hypothesis::H6 || h == Hypothesis::H7;
}

const HypothesisEntry* HypothesisReport::find(Hypothesis h) const {
  for (const auto& e : entries) {
    if (e.id == h) return &e;
  }
  return nullptr;
}

std::string validate_params(const HypothesisParams& p, Hypothesis h, std::size_t dims, std::size_t ell) {
  const double n = static_cast<double>(dims);
  const double critical = 4.0 / n;
  auto ell1_ok = [&] { return p.ell1 > 0.0 && p.ell1 < critical; };
  switch (h) {
    case Hypothesis::H0:
    case Hypothesis::H2:
      if (!ell1_ok()) return "ell1 must lie in (0, 4/N)";
      if (h == Hypothesis::H0 && !(p.K > 0.0)) return "K must be positive";
      if (h == Hypothesis::H2 && !(p.B > 0.0)) return "B must be positive";
      return {};
    case Hypothesis::H1:
      if (!(p.c_prime > 0.0)) return "c' must be positive";
      if (p.alpha < 0.0) return "alpha must be >= 0";
      if (dims >= 3 && !(p.alpha < 4.0 / (n - 2.0))) return "alpha must be < 4/(N-2) for N >= 3";
      return {};
    case Hypothesis::H1Lipschitz:
      if (!(p.c_prime > 0.0)) return "c' must be positive";
      if (!(p.lipschitz_radius > 0.0)) return "lipschitz_radius must be positive";
      return {};
    case Hypothesis::H3: {
      if (!(p.Delta > 0.0) || !(p.R > 0.0) || !(p.S > 0.0)) return "Delta, R and S must be positive";
      if (p.alphas.size() != ell) return "need one H3 exponent per component";
      if (std::ranges::any_of(p.alphas, [](double a) { return !(a > 0.0); })) return "H3 exponents must be positive";
      if (!(p.t_exp >= 0.0 && p.t_exp < 2.0)) return "t must lie in [0, 2)";
      double total = 0.0;
      for (double a : p.alphas) total += a;
      if (!(n + 2.0 > 0.5 * n * total + p.t_exp)) return "need N + 2 > (N/2) alpha + t";
      return {};
    }
    case Hypothesis::H4:
      return {};
    case Hypothesis::H5:
      if (!(p.Gamma > 0.0 && p.Gamma < critical)) return "Gamma must lie in (0, 4/N)";
      if (!p.period.empty() && p.period.size() != dims) return "period needs one entry per dimension";
      return {};
    case Hypothesis::H6:
      if (!ell1_ok()) return "ell1 must lie in (0, 4/N)";
      if (!(p.beta > 0.0 && p.beta < p.ell1)) return "beta must lie in (0, ell1)";
      if (!(p.A_prime > 0.0) || !(p.B_prime > 0.0)) return "A' and B' must be positive";
      return {};
    case Hypothesis::H7:
      if (!(p.sigma > 0.0 && p.sigma < critical)) return "sigma must lie in (0, 4/N)";
      return {};
  }
  return {};
}

namespace {

constexpr double kRelTol = 1e-12;
constexpr double kFdRelTol = 1e-6;

/// Keeps the worst normalized margin of an inequality lhs <= rhs; a violating
/// sample always outranks a satisfied one.
class Tracker {
 public:
  explicit Tracker(double rel_tol) : rel_tol_(rel_tol) {}

  void test(double lhs, double rhs, const Witness& where) {
    const bool finite = std::isfinite(lhs) && std::isfinite(rhs);
    const bool violated = !finite || lhs - rhs > rel_tol_ * std::max(std::abs(lhs), std::abs(rhs));
    const double scale = std::abs(lhs) + std::abs(rhs);
    double normalized = scale > 0.0 ? (lhs - rhs) / scale : 0.0;
    if (!finite) normalized = std::numeric_limits<double>::infinity();
    record(violated, lhs - rhs, normalized, where);
  }

  void record(bool violated, double margin, double normalized, const Witness& where) {
    ++count_;
    violated_ = violated_ || violated;
    const bool better = !worst_ || (violated && !worst_violated_) ||
                        (violated == worst_violated_ && normalized > worst_normalized_);
    if (!better) return;
    worst_ = where;
    worst_->margin = margin;
    worst_normalized_ = normalized;
    worst_violated_ = violated;
  }

  HypothesisEntry finish(Hypothesis id, HypothesisStatus pass_status) const {
    HypothesisEntry e;
    e.id = id;
    e.samples = count_;
    e.status = violated_ ? HypothesisStatus::Fail : pass_status;
    e.witness = worst_;
    return e;
  }

 private:
  double rel_tol_;
  std::size_t count_ = 0;
  bool violated_ = false;
  bool worst_violated_ = false;
  double worst_normalized_ = -std::numeric_limits<double>::infinity();
  std::optional<Witness> worst_;
};

Witness at(const Sample& s) { return Witness{s.x, s.s, {}, {}, 0.0}; }

double power_sum(double norm, double a, double b) { return std::pow(norm, a) + std::pow(norm, b); }

std::vector<double> scaled(std::span<const double> s, std::span<const double> theta) {
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = theta[i] * s[i];
  return out;
}

HypothesisEntry check_h0(const NonlinearitySpec& spec, const HypothesisParams& p, std::span<const Sample> samples) {
  Tracker t(kRelTol);
  for (const Sample& smp : samples) {
    const double value = spec.potential(smp.x, smp.s);
    const double norm = euclidean_norm(smp.s);
    t.test(-value, 0.0, at(smp));
    t.test(value, p.K * power_sum(norm, 2.0, p.ell1 + 2.0), at(smp));
  }
  return t.finish(Hypothesis::H0, HypothesisStatus::Pass);
}

double coupling_term(const NonlinearitySpec& spec, std::size_t j, std::span<const double> x,
                     std::span<const double> s) {
  std::vector<double> s_sq(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) s_sq[k] = s[k] * s[k];
  return spec.coupling(j, x, s_sq) * s[j];
}

double distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc);
}

HypothesisEntry check_h1(const NonlinearitySpec& spec, const HypothesisParams& p, std::span<const Sample> samples) {
  Tracker t(kRelTol);
  for (const Sample& smp : samples) {
    const double ns = euclidean_norm(smp.s);
    const double nr = euclidean_norm(smp.r);
    const double bound_factor = p.c_prime * (1.0 + std::pow(ns, p.alpha) + std::pow(nr, p.alpha)) * distance(smp.s, smp.r);
    for (std::size_t j = 0; j < spec.ell(); ++j) {
      const double lhs = std::abs(coupling_term(spec, j, smp.x, smp.s) - coupling_term(spec, j, smp.x, smp.r));
      Witness w = at(smp);
      w.r = smp.r;
      t.test(lhs, bound_factor, w);
    }
  }
  return t.finish(Hypothesis::H1, HypothesisStatus::Pass);
}

HypothesisEntry check_h1_lipschitz(const NonlinearitySpec& spec, const HypothesisParams& p,
                                   std::span<const Sample> samples) {
  // Pairs are pulled into the ball |s| + |r| <= R; the constant is the one the
  // global growth form implies there, L(R) = c' (1 + 2 R^alpha).
  Tracker t(kRelTol);
  const double radius = p.lipschitz_radius;
  const double lipschitz = p.c_prime * (1.0 + 2.0 * std::pow(radius, p.alpha));
  for (const Sample& smp : samples) {
    const double total = euclidean_norm(smp.s) + euclidean_norm(smp.r);
    const double shrink = total > radius ? radius / total : 1.0;
    std::vector<double> s(smp.s), r(smp.r);
    for (auto& e : s) e *= shrink;
    for (auto& e : r) e *= shrink;
    for (std::size_t j = 0; j < spec.ell(); ++j) {
      const double lhs = std::abs(coupling_term(spec, j, smp.x, s) - coupling_term(spec, j, smp.x, r));
      t.test(lhs, lipschitz * distance(s, r), Witness{smp.x, s, r, {}, 0.0});
    }
  }
  HypothesisEntry e = t.finish(Hypothesis::H1Lipschitz, HypothesisStatus::Pass);
  std::ostringstream note;
  note << "L(R) = " << lipschitz << " on |s| + |r| <= " << radius;
  e.note = note.str();
  return e;
}

HypothesisEntry check_h2(const NonlinearitySpec& spec, const HypothesisParams& p, std::span<const Sample> samples) {
  Tracker t(kFdRelTol);
  for (const Sample& smp : samples) {
    const double norm = euclidean_norm(smp.s);
    const double bound = p.B * power_sum(norm, 1.0, p.ell1 + 1.0);
    for (std::size_t j = 0; j < spec.ell(); ++j) {
      t.test(std::abs(potential_partial_fd(spec, j, smp.x, smp.s)), bound, at(smp));
    }
  }
  return t.finish(Hypothesis::H2, HypothesisStatus::Pass);
}

HypothesisEntry check_h3(const NonlinearitySpec& spec, const HypothesisParams& p, const SamplerOptions& sampler) {
  // Only |x| >= R and |s| < S matter; draw there directly. Components are kept
  // strictly positive: with any s_j = 0 the product bound vanishes and the
  // strict inequality could only hold for H > 0 on the axes.
  Rng rng(sampler.seed ^ 0x4833ULL);
  const std::size_t ell = spec.ell();
  Tracker t(0.0);
  const double s_lo = std::min(sampler.s_min, 1e-3 * p.S);
  for (std::size_t i = 0; i < sampler.samples; ++i) {
    std::vector<double> x(sampler.dims);
    double xn = 0.0;
    while (xn == 0.0) {
      for (auto& e : x) e = rng.normal();
      xn = euclidean_norm(x);
    }
    const double radius = p.R * std::exp(rng.uniform(0.0, std::log(100.0)));
    for (auto& e : x) e *= radius / xn;

    std::vector<double> s(ell);
    for (auto& e : s) e = std::abs(rng.normal()) + 1e-3;
    const double sn = euclidean_norm(s);
    const double magnitude = std::exp(rng.uniform(std::log(s_lo), std::log(p.S)));
    for (auto& e : s) e *= magnitude / sn * (1.0 - 1e-12);

    double lower = p.Delta * std::pow(radius, -p.t_exp);
    for (std::size_t j = 0; j < ell; ++j) lower *= std::pow(s[j], p.alphas[j]);
    const double value = spec.potential(x, s);
    // Strict inequality: equality counts as a violation.
    const double scale = std::abs(lower) + std::abs(value);
    const double normalized = scale > 0.0 ? (lower - value) / scale : 0.0;
    t.record(!(value > lower), lower - value, normalized, Witness{x, s, {}, {}, 0.0});
  }
  HypothesisEntry e = t.finish(Hypothesis::H3, HypothesisStatus::Confirmed);
  e.note = "confirmed for the supplied constants only";
  return e;
}

HypothesisEntry check_scaling(const NonlinearitySpec& spec, double exponent_offset, Hypothesis id,
                              std::span<const Sample> samples) {
  // Common dilation: H(theta s) >= theta^(2 + offset) H(s) with theta = theta_max.
  // The componentwise form is tracked separately and only reported.
  Tracker common(kRelTol);
  Tracker componentwise(kRelTol);
  for (const Sample& smp : samples) {
    const double theta_max = *std::ranges::max_element(smp.theta);
    const double base = spec.potential(smp.x, smp.s);
    const double lhs = std::pow(theta_max, 2.0 + exponent_offset) * base;

    std::vector<double> uniform(smp.s.size(), theta_max);
    Witness w = at(smp);
    w.theta = uniform;
    common.test(lhs, spec.potential(smp.x, scaled(smp.s, uniform)), w);

    Witness wc = at(smp);
    wc.theta = smp.theta;
    componentwise.test(lhs, spec.potential(smp.x, scaled(smp.s, smp.theta)), wc);
  }
  HypothesisEntry entry = common.finish(id, HypothesisStatus::Pass);
  const HypothesisEntry cw = componentwise.finish(id, HypothesisStatus::Pass);
  std::ostringstream note;
  note << "common dilation theta_1 = ... = theta_l; componentwise thetas: " << to_string(cw.status);
  if (cw.status == HypothesisStatus::Fail && cw.witness) {
    note << " (s=";
    for (std::size_t i = 0; i < cw.witness->s.size(); ++i) note << (i ? ";" : "") << cw.witness->s[i];
    note << " theta=";
    for (std::size_t i = 0; i < cw.witness->theta.size(); ++i) note << (i ? ";" : "") << cw.witness->theta[i];
    note << ")";
  }
  entry.note = note.str();
  return entry;
}

HypothesisEntry check_h5(const NonlinearitySpec& spec, const NonlinearitySpec& asym, const HypothesisParams& p,
                         const SamplerOptions& sampler, std::span<const Sample> samples) {
  HypothesisEntry e;
  e.id = Hypothesis::H5;
  const std::size_t dims = sampler.dims;
  std::vector<int> period = p.period.empty() ? std::vector<int>(dims, 1) : p.period;

  // Periodicity of H^infinity under translation by T.
  Tracker periodic(kRelTol);
  for (const Sample& smp : samples) {
    std::vector<double> shifted(smp.x);
    for (std::size_t a = 0; a < dims; ++a) shifted[a] += period[a];
    const double base = asym.potential(smp.x, smp.s);
    const double moved = asym.potential(shifted, smp.s);
    periodic.test(std::abs(moved - base), 0.0, at(smp));
  }
  const HypothesisEntry periodic_entry = periodic.finish(Hypothesis::H5, HypothesisStatus::Pass);
  if (periodic_entry.status == HypothesisStatus::Fail) {
    e = periodic_entry;
    e.note = "H^infinity is not periodic with the given period";
    return e;
  }

  // Sup over s of the quotient on an increasing |x| schedule.
  Rng rng(sampler.seed ^ 0x4835ULL);
  const double start = std::max(p.R, 1.0);
  constexpr int kShells = 8;
  const std::size_t per_shell = std::max<std::size_t>(samples.size() / kShells, 16);
  std::ostringstream note;
  note << "sup quotient by |x|:";
  double last_sup = 0.0;
  Witness last_witness;
  std::size_t count = 0;
  for (int shell = 0; shell < kShells; ++shell) {
    const double radius = start * std::ldexp(1.0, shell);
    double sup = 0.0;
    Witness sup_witness;
    for (std::size_t i = 0; i < per_shell; ++i) {
      const Sample& smp = samples[i % samples.size()];
      const double sn = euclidean_norm(smp.s);
      if (sn == 0.0) continue;
      std::vector<double> x(dims);
      double xn = 0.0;
      while (xn == 0.0) {
        for (auto& c : x) c = rng.normal();
        xn = euclidean_norm(x);
      }
      for (auto& c : x) c *= radius / xn;
      const double q = std::abs(spec.potential(x, smp.s) - asym.potential(x, smp.s)) /
                       power_sum(sn, 2.0, p.Gamma + 2.0);
      ++count;
      if (!std::isfinite(q) || q >= sup) {
        sup = std::isfinite(q) ? q : std::numeric_limits<double>::infinity();
        sup_witness = Witness{x, smp.s, {}, {}, 0.0};
      }
    }
    note << ' ' << radius << ':' << sup;
    last_sup = sup;
    last_witness = sup_witness;
  }
  e.samples = count + periodic_entry.samples;
  last_witness.margin = last_sup - p.h5_tolerance;
  e.witness = last_witness;
  e.status = last_sup <= p.h5_tolerance ? HypothesisStatus::Pass : HypothesisStatus::Fail;
  e.note = note.str();
  return e;
}

HypothesisEntry check_h6(const NonlinearitySpec& asym, const HypothesisParams& p, std::span<const Sample> samples) {
  Tracker growth(kRelTol);
  Tracker derivative(kFdRelTol);
  for (const Sample& smp : samples) {
    const double norm = euclidean_norm(smp.s);
    const double value = asym.potential(smp.x, smp.s);
    growth.test(-value, 0.0, at(smp));
    growth.test(value, p.A_prime * power_sum(norm, p.beta + 2.0, p.ell1 + 2.0), at(smp));
    const double bound = p.B_prime * power_sum(norm, p.beta + 1.0, p.ell1 + 1.0);
    for (std::size_t j = 0; j < asym.ell(); ++j) {
      derivative.test(potential_partial_fd(asym, j, smp.x, smp.s), bound, at(smp));
    }
  }
  HypothesisEntry g = growth.finish(Hypothesis::H6, HypothesisStatus::Pass);
  HypothesisEntry d = derivative.finish(Hypothesis::H6, HypothesisStatus::Pass);
  HypothesisEntry& chosen = (g.status == HypothesisStatus::Fail || d.status != HypothesisStatus::Fail) ? g : d;
  chosen.samples = g.samples + d.samples;
  if (g.status == HypothesisStatus::Fail) chosen.note = "growth bound violated";
  else if (d.status == HypothesisStatus::Fail) chosen.note = "derivative bound violated";
  return chosen;
}

}  // namespace

HypothesisReport check_hypotheses(const NonlinearitySpec& spec, const HypothesisParams& params,
                                  const SamplerOptions& sampler, const NonlinearitySpec* asymptotic,
                                  std::span<const Hypothesis> requested) {
  for (Hypothesis h : requested) {
    if (needs_asymptotic(h) && asymptotic == nullptr) {
      throw std::invalid_argument(to_string(h) + " requires the asymptotic nonlinearity H^infinity");
    }
    if (auto problem = validate_params(params, h, sampler.dims, spec.ell()); !problem.empty()) {
      throw std::invalid_argument(to_string(h) + ": " + problem);
    }
  }
  if (asymptotic && asymptotic->ell() != spec.ell()) {
    throw std::invalid_argument("H^infinity has a different component count");
  }

  const auto samples = draw_samples(sampler, spec.ell());
  HypothesisReport report;
  for (Hypothesis h : requested) {
    HypothesisEntry entry;
    switch (h) {
      case Hypothesis::H0: entry = check_h0(spec, params, samples); break;
      case Hypothesis::H1:
        if (sampler.dims < 2) {
          entry.id = h;
          entry.status = HypothesisStatus::NotApplicable;
          entry.note = "global growth form applies for N >= 2; see H1-Lipschitz";
        } else {
          entry = check_h1(spec, params, samples);
        }
        break;
      case Hypothesis::H1Lipschitz:
        if (sampler.dims != 1) {
          entry.id = h;
          entry.status = HypothesisStatus::NotApplicable;
          entry.note = "local Lipschitz form applies for N = 1";
        } else {
          entry = check_h1_lipschitz(spec, params, samples);
        }
        break;
      case Hypothesis::H2: entry = check_h2(spec, params, samples); break;
      case Hypothesis::H3: entry = check_h3(spec, params, sampler); break;
      case Hypothesis::H4: entry = check_scaling(spec, 0.0, Hypothesis::H4, samples); break;
      case Hypothesis::H5: entry = check_h5(spec, *asymptotic, params, sampler, samples); break;
      case Hypothesis::H6: entry = check_h6(*asymptotic, params, samples); break;
      case Hypothesis::H7: entry = check_scaling(*asymptotic, params.sigma, Hypothesis::H7, samples); break;
    }
    entry.id = h;
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace cnls
