#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cnls/energy.hpp"

namespace cnls {

struct EvolveOptions {
  double dt = 1e-3;
  double T = 1.0;
  /// Charges and energy are recorded every sample_every steps (and at T).
  std::size_t sample_every = 1;
  /// Snapshots are taken at the nearest step time.
  std::vector<double> snapshot_times;
  /// The run is flagged as blowing up when |grad z|^2 exceeds this multiple of
  /// its initial value.
  double blowup_ratio = 100.0;
};

/// Throws std::invalid_argument for dt <= 0, T < dt, sample_every == 0 or
/// blowup_ratio <= 1.
void validate(const EvolveOptions& opts);

struct Snapshot {
  double time = 0.0;
  FieldVector state;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> charges_series;
  std::vector<double> energy_series;
  std::vector<Snapshot> snapshots;
  FieldVector final_state;
  /// Set when the run stopped early; final_state is then the last finite state.
  std::optional<double> blowup_time;
  std::string blowup_reason;
};

/// Strang splitting with cached kinetic phases: half kinetic step, exact
/// pointwise nonlinear phase rotation, half kinetic step. dt may be negative.
class SplitStep {
 public:
  SplitStep(const EnergyContext& ctx, double dt);

  double dt() const { return dt_; }
  /// Advances z in place. Throws BlowUpError (with time 0) on non-finite values.
  void advance(FieldVector& z) const;

 private:
  void kinetic(ComplexField& z) const;

  const EnergyContext* ctx_;
  double dt_;
  std::vector<cdouble> half_phase_;
};

/// One Strang step of size dt.
FieldVector step(const EnergyContext& ctx, const FieldVector& z, double dt);

/// Called at every sample with (time, state); must not retain the reference.
using Monitor = std::function<void(double, const FieldVector&)>;

/// Repeated steps up to T. Blow-up is not thrown: the trajectory stops and
/// records blowup_time instead.
Trajectory evolve(const EnergyContext& ctx, const FieldVector& z0, const EvolveOptions& opts,
                  const Monitor& monitor = {});

struct ConservationReport {
  /// Per component max_t |Q_j(t) - Q_j(0)| / Q_j(0) (absolute when Q_j(0) = 0).
  std::vector<double> charge_drift;
  double max_charge_drift = 0.0;
  /// max_t |E(t) - E(0)| / |E(0)| (absolute when E(0) = 0).
  double energy_drift = 0.0;
};

/// Throws std::invalid_argument for an empty trajectory.
ConservationReport conservation_report(const Trajectory& traj);

/// Columns t, Q_1..Q_l, E with 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// printf("%.17g").
std::string format_double(double v);

}  // namespace cnls
