#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace cnls {

/// Local coupling of an l-component system: the potential H(x, s) on
/// nonnegative moduli s and the coefficients h_j(x, s^2) entering the
/// evolution equations. The two must satisfy dH/ds_j = 2 h_j(x, s^2) s_j;
/// check_consistency() verifies that by sampling.
///
/// Specs are immutable once built and safe to evaluate concurrently.
class NonlinearitySpec {
 public:
  /// H(x, s): x has N entries (may be empty for x-independent specs), s has l.
  using PotentialFn = std::function<double(std::span<const double> x, std::span<const double> s)>;
  /// h_j(x, s^2): j is zero-based, s_sq holds the squared moduli.
  using CouplingFn =
      std::function<double(std::size_t j, std::span<const double> x, std::span<const double> s_sq)>;

  NonlinearitySpec(std::string name, std::size_t ell, PotentialFn potential, CouplingFn coupling,
                   bool x_dependent, std::map<std::string, double> params = {},
                   std::shared_ptr<const NonlinearitySpec> asymptotic = nullptr);

  const std::string& name() const { return name_; }
  std::size_t ell() const { return ell_; }
  bool x_dependent() const { return x_dependent_; }
  const std::map<std::string, double>& params() const { return params_; }
  /// The |x| -> infinity limit H^infinity, when the family defines one.
  const std::shared_ptr<const NonlinearitySpec>& asymptotic() const { return asymptotic_; }

  // Unchecked evaluation for inner loops; see eval_H / eval_hj for the
  // validating entry points.
  double potential(std::span<const double> x, std::span<const double> s) const { return potential_(x, s); }
  double coupling(std::size_t j, std::span<const double> x, std::span<const double> s_sq) const {
    return coupling_(j, x, s_sq);
  }

 private:
  std::string name_;
  std::size_t ell_;
  PotentialFn potential_;
  CouplingFn coupling_;
  bool x_dependent_;
  std::map<std::string, double> params_;
  std::shared_ptr<const NonlinearitySpec> asymptotic_;
};

using NonlinearityPtr = std::shared_ptr<const NonlinearitySpec>;

/// H(x, s). Throws std::invalid_argument for a negative or wrongly sized s.
double eval_H(const NonlinearitySpec& spec, std::span<const double> x, std::span<const double> s);
/// h_j(x, s^2), zero-based j. Throws std::out_of_range for j >= l.
double eval_hj(const NonlinearitySpec& spec, std::size_t j, std::span<const double> x,
               std::span<const double> s_sq);

namespace families {

/// h(x, t) = t^((p-1)/2), H(s) = 2 s^(p+1) / (p+1). Requires p > 1.
NonlinearityPtr scalar_power(double p);
/// p = 3: h(t) = t, H(s) = s^4 / 2.
NonlinearityPtr scalar_cubic();
/// Two components, h_j = s_1^2 + s_2^2, H = (s_1^2 + s_2^2)^2 / 2.
NonlinearityPtr manakov();
/// H = strength * s_1^a1 * s_2^a2 with a1, a2 >= 2 so every h_j stays finite at 0.
NonlinearityPtr product_coupling(double strength, double alpha1, double alpha2);
/// H(x, s) = (1 + exp(-|x|)) * H_base(s); asymptotic() returns the base.
NonlinearityPtr x_dependent(NonlinearityPtr base);
/// H = 0, h_j = 0 for l components.
NonlinearityPtr zero(std::size_t ell);
/// Deliberately inconsistent pair H = s^4, h(t) = t, for testing rejection.
NonlinearityPtr mismatched_fixture();

}  // namespace families

// ---------------------------------------------------------------------------
// Sampling

struct SamplerOptions {
  std::size_t dims = 1;
  std::size_t samples = 2048;
  std::uint64_t seed = 1;
  double s_min = 1e-3;
  double s_max = 1e3;
  double x_extent = 10.0;
  double theta_max = 100.0;
};

/// One draw for the hypothesis and consistency checks. s and r are nonnegative
/// l-vectors, theta has entries >= 1, x has `dims` entries.
struct Sample {
  std::vector<double> x;
  std::vector<double> s;
  std::vector<double> r;
  std::vector<double> theta;
};

/// Deterministic draws: |s| log-uniform over [s_min, s_max], directions in the
/// positive orthant, plus corner points (origin, axis points, the diagonal at
/// both ends of the range).
std::vector<Sample> draw_samples(const SamplerOptions& options, std::size_t ell);

double euclidean_norm(std::span<const double> v);

struct ConsistencyReport {
  bool consistent = true;
  double tolerance = 0.0;
  /// max over samples and j of |dH/ds_j - 2 h_j s_j| / (1 + max_k |2 h_k s_k|)
  double max_deviation = 0.0;
  std::size_t samples = 0;
  // Worst point.
  std::size_t component = 0;
  std::vector<double> x;
  std::vector<double> s;
  double finite_difference = 0.0;
  double analytic = 0.0;
};

/// Central differences of H in s_j with step 1e-5 s_j (1e-5 |s| mirrored
/// through 0 when s_j = 0, where H is even) against 2 h_j(x, s^2) s_j. The
/// deviation is scaled by 1 + max(max_k |2 h_k s_k|, |H| / s_j), the second
/// term being the roundoff level of the difference quotient.
ConsistencyReport check_consistency(const NonlinearitySpec& spec, std::span<const Sample> samples,
                                    double tolerance);
ConsistencyReport check_consistency(const NonlinearitySpec& spec, const SamplerOptions& sampler,
                                    double tolerance);

/// dH/ds_j by the same central difference used in check_consistency.
double potential_partial_fd(const NonlinearitySpec& spec, std::size_t j, std::span<const double> x,
                            std::span<const double> s);

inline constexpr double kConsistencyTolerance = 1e-6;

/// Throws InconsistentSpecError unless the spec passes check_consistency with
/// the default sampler in `dims` dimensions.
void require_consistent(const NonlinearitySpec& spec, std::size_t dims);

}  // namespace cnls
