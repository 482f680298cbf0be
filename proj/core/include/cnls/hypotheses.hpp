#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnls/nonlinearity.hpp"

namespace cnls {

/// Constants appearing in the growth, coupling and asymptotic hypotheses on H.
struct HypothesisParams {
  double K = 1.0;             ///< growth constant of H0
  double ell1 = 1.0;          ///< growth exponent, 0 < ell1 < 4/N
  double c_prime = 1.0;       ///< Lipschitz-growth constant of H1
  double alpha = 2.0;         ///< growth exponent of H1
  double lipschitz_radius = 10.0;  ///< ball radius for the N = 1 local Lipschitz form of H1
  double B = 1.0;             ///< bound of H2
  double Delta = 1e-3;        ///< H3 lower-bound constant
  double R = 1.0;             ///< H3: |x| >= R
  double S = 1.0;             ///< H3: |s| < S
  std::vector<double> alphas; ///< H3 exponents, one per component
  double t_exp = 0.0;         ///< H3 decay exponent, in [0, 2)
  double Gamma = 1.0;         ///< H5 exponent, in (0, 4/N)
  double A_prime = 1.0;       ///< H6 growth constant
  double B_prime = 1.0;       ///< H6 derivative constant
  double beta = 0.5;          ///< H6 lower exponent, beta < ell1
  double sigma = 1.0;         ///< H7 exponent, in (0, 4/N)
  std::vector<int> period;    ///< period of H^infinity; empty means all ones
  double h5_tolerance = 1e-8; ///< sup of the H5 quotient allowed at the far end of the |x| schedule
};

enum class Hypothesis { H0, H1, H1Lipschitz, H2, H3, H4, H5, H6, H7 };
enum class HypothesisStatus { Pass, Fail, NotApplicable, Confirmed };

std::string to_string(Hypothesis h);
std::string to_string(HypothesisStatus s);
std::optional<Hypothesis> parse_hypothesis(const std::string& name);
std::vector<Hypothesis> all_hypotheses();
bool needs_asymptotic(Hypothesis h);

struct Witness {
  std::vector<double> x;
  std::vector<double> s;
  std::vector<double> r;      ///< second point (H1 variants)
  std::vector<double> theta;  ///< scaling factors (H4, H7)
  /// lhs - rhs of the tested inequality; positive means violated.
  double margin = 0.0;
};

struct HypothesisEntry {
  Hypothesis id{};
  HypothesisStatus status = HypothesisStatus::NotApplicable;
  /// Tightest (or violating) sample; always set for Fail.
  std::optional<Witness> witness;
  std::size_t samples = 0;
  std::string note;
};

struct HypothesisReport {
  std::vector<HypothesisEntry> entries;
  const HypothesisEntry* find(Hypothesis h) const;
};

/// Tests each requested hypothesis on sampled (x, s, r, theta). A pass means
/// no violation among the recorded number of samples. H3 passes as
/// "confirmed" for the supplied constants only. H4 and H7 are decided on the
/// common dilation theta_j = theta_max; the componentwise form, which fails
/// for any coupled H that is positive on a coordinate axis, is reported in
/// the entry note.
///
/// Throws std::invalid_argument when a requested hypothesis needs H^infinity
/// and `asymptotic` is null, or when the constants violate their admissible
/// ranges.
HypothesisReport check_hypotheses(const NonlinearitySpec& spec, const HypothesisParams& params,
                                  const SamplerOptions& sampler, const NonlinearitySpec* asymptotic,
                                  std::span<const Hypothesis> requested);

/// Admissibility of the constants for `h` in N dimensions; returns an empty
/// string when fine, otherwise the violated condition.
std::string validate_params(const HypothesisParams& params, Hypothesis h, std::size_t dims, std::size_t ell);

}  // namespace cnls
