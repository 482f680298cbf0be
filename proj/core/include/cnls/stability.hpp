#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "cnls/dynamics.hpp"
#include "cnls/groundstate.hpp"

namespace cnls {

inline constexpr const char* kOrbitDistanceLabel =
    "distance to the symmetry orbit of the reference minimizer (an upper bound for the distance to the set of "
    "minimizers)";

/// Symmetry orbit of one reference minimizer: per-component phases, plus
/// translations when the nonlinearity does not depend on x.
class OrbitProxy {
 public:
  /// Throws NotAttainedError unless ground.converged, and std::invalid_argument
  /// when the reference charges differ from c_j^2 by more than 1e-10 relative.
  OrbitProxy(const EnergyContext& ctx, const ConstraintSet& c, const GroundStateResult& ground);
  /// Unchecked reference, e.g. a hand-built soliton.
  OrbitProxy(FieldVector reference, bool translations);

  const FieldVector& reference() const { return w_; }
  bool translations() const { return translations_; }
  const Grid& grid() const { return w_.grid(); }

  struct Alignment {
    double distance = 0.0;
    std::vector<double> phases;  ///< theta_j
    std::vector<double> shift;   ///< y, zeros without translations
  };
  Alignment align(const FieldVector& z) const;

 private:
  FieldVector w_;
  bool translations_;
  std::vector<std::vector<cdouble>> w_hat_;
  std::vector<double> weight_;  ///< 1 + |k|^2
};

/// inf over symmetries g of h1_distance(z, g w).
double orbit_distance(const OrbitProxy& proxy, const FieldVector& z);

/// H^1 distance between z and e^{i theta_j} w_j(x - y), evaluated spectrally.
double symmetry_distance(const OrbitProxy& proxy, const FieldVector& z, std::span<const double> phases,
                         std::span<const double> shift);

/// Real H^1 pairing sum_j Re integral (conj(a_j) b_j + grad conj(a_j) . grad b_j).
double h1_inner(const FieldVector& a, const FieldVector& b);
double h1_norm(const FieldVector& z);

/// Seeded perturbation direction: complex random smooth field per component
/// with the top third of the spectrum zeroed, normalized to unit H^1 norm.
FieldVector perturbation_direction(const GridPtr& grid, std::size_t ell, std::uint64_t seed);

struct StabilityReport {
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> series;  ///< (t, orbit distance)
  double sup_distance = 0.0;
  std::optional<double> blowup_time;
  double max_charge_drift = 0.0;
  double energy_drift = 0.0;
  double dt = 0.0;
  double T = 0.0;
  std::vector<std::size_t> points;
  std::vector<double> lengths;
  std::string label = kOrbitDistanceLabel;
};

/// Evolves w + delta g / |g|_H from the seeded direction g and tracks the
/// orbit distance at every monitor sample. delta may be 0.
StabilityReport stability_experiment(const EnergyContext& ctx, const OrbitProxy& proxy, double delta,
                                     std::uint64_t seed, const EvolveOptions& opts);

struct SweepPoint {
  double delta = 0.0;
  double epsilon = 0.0;        ///< max over seeds of sup_distance
  std::uint64_t worst_seed = 0;
  bool blowup = false;
  bool monotone_so_far = true;  ///< epsilon >= the previous row's epsilon
};

struct StabilityCurve {
  std::vector<SweepPoint> points;  ///< sorted by delta
  std::vector<StabilityReport> runs;
  bool monotone = true;
};

/// Throws std::invalid_argument for empty or negative deltas or empty seeds.
StabilityCurve delta_eps_sweep(const EnergyContext& ctx, const OrbitProxy& proxy, std::vector<double> deltas,
                               const std::vector<std::uint64_t>& seeds, const EvolveOptions& opts);

/// Columns t, distance.
void write_distance_csv(std::ostream& out, const StabilityReport& report);
/// Columns delta, epsilon, worst_seed, blowup, monotone.
void write_curve_csv(std::ostream& out, const StabilityCurve& curve);

}  // namespace cnls
