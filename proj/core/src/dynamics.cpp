#include "cnls/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cnls/errors.hpp"

namespace cnls {

namespace {

bool all_finite(const FieldVector& z) {
  for (const auto& comp : z) {
    for (const auto& v : comp.values()) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

double kinetic_norm(const FieldVector& z) {
  double sum = 0.0;
  for (const auto& comp : z) sum += gradient_sq_norm(comp);
  return sum;
}

double relative_change(double value, double reference) {
  const double diff = std::abs(value - reference);
  return reference != 0.0 ? diff / std::abs(reference) : diff;
}

}  // namespace

void validate(const EvolveOptions& opts) {
  if (!(opts.dt > 0.0) || !std::isfinite(opts.dt)) throw std::invalid_argument("evolve: dt must be positive");
  if (!(opts.T >= opts.dt) || !std::isfinite(opts.T)) throw std::invalid_argument("evolve: T must be at least dt");
  if (opts.sample_every == 0) throw std::invalid_argument("evolve: sample_every must be at least 1");
  if (!(opts.blowup_ratio > 1.0)) throw std::invalid_argument("evolve: blowup_ratio must exceed 1");
  for (double t : opts.snapshot_times) {
    if (!(t >= 0.0 && t <= opts.T)) throw std::invalid_argument("evolve: snapshot time outside [0, T]");
  }
}

SplitStep::SplitStep(const EnergyContext& ctx, double dt) : ctx_(&ctx), dt_(dt) {
  if (!std::isfinite(dt) || dt == 0.0) throw std::invalid_argument("step: dt must be finite and nonzero");
  const auto symbol = ctx.grid().kinetic_symbol();
  half_phase_.resize(symbol.size());
  for (std::size_t p = 0; p < symbol.size(); ++p) half_phase_[p] = std::polar(1.0, -0.5 * symbol[p] * dt);
}

void SplitStep::kinetic(ComplexField& z) const {
  ComplexField spec = forward_transform(z);
  for (std::size_t p = 0; p < spec.size(); ++p) spec[p] *= half_phase_[p];
  z = inverse_transform(spec);
}

void SplitStep::advance(FieldVector& z) const {
  ctx_->require_compatible(z);
  for (auto& comp : z) kinetic(comp);
  std::vector<RealField> h;
  h.reserve(z.ell());
  for (std::size_t j = 0; j < z.ell(); ++j) h.push_back(ctx_->coupling_field(z, j));
  for (std::size_t j = 0; j < z.ell(); ++j) {
    for (std::size_t p = 0; p < z[j].size(); ++p) z[j][p] *= std::polar(1.0, dt_ * h[j][p]);
  }
  for (auto& comp : z) kinetic(comp);
  if (!all_finite(z)) throw BlowUpError("step: state became non-finite");
}

FieldVector step(const EnergyContext& ctx, const FieldVector& z, double dt) {
  FieldVector out = z;
  SplitStep(ctx, dt).advance(out);
  return out;
}

Trajectory evolve(const EnergyContext& ctx, const FieldVector& z0, const EvolveOptions& opts, const Monitor& monitor) {
  validate(opts);
  ctx.require_compatible(z0);
  if (!all_finite(z0)) throw std::invalid_argument("evolve: initial state is not finite");

  const auto steps = static_cast<std::size_t>(std::llround(opts.T / opts.dt));
  std::vector<std::size_t> snapshot_steps;
  for (double t : opts.snapshot_times) snapshot_steps.push_back(static_cast<std::size_t>(std::llround(t / opts.dt)));

  Trajectory traj;
  FieldVector z = z0;
  const double kinetic0 = kinetic_norm(z0);

  auto sample = [&](std::size_t n) {
    const double t = static_cast<double>(n) * opts.dt;
    traj.times.push_back(t);
    traj.charges_series.push_back(charges(z));
    traj.energy_series.push_back(energy_hat(ctx, z));
    if (monitor) monitor(t, z);
  };
  auto snapshot = [&](std::size_t n) {
    for (std::size_t s : snapshot_steps) {
      if (s == n) traj.snapshots.push_back({static_cast<double>(n) * opts.dt, z});
    }
  };

  const SplitStep stepper(ctx, opts.dt);
  sample(0);
  snapshot(0);
  for (std::size_t n = 1; n <= steps; ++n) {
    FieldVector next = z;
    const double t = static_cast<double>(n) * opts.dt;
    try {
      stepper.advance(next);
    } catch (const BlowUpError&) {
      traj.blowup_time = t;
      traj.blowup_reason = "non-finite values";
      break;
    }
    z = std::move(next);
    if (n % opts.sample_every == 0 || n == steps) {
      if (kinetic0 > 0.0 && kinetic_norm(z) > opts.blowup_ratio * kinetic0) {
        sample(n);
        traj.blowup_time = t;
        traj.blowup_reason = "gradient norm growth beyond blowup_ratio";
        break;
      }
      sample(n);
    }
    snapshot(n);
  }
  traj.final_state = std::move(z);
  return traj;
}

ConservationReport conservation_report(const Trajectory& traj) {
  if (traj.times.empty()) throw std::invalid_argument("conservation_report: empty trajectory");
  ConservationReport report;
  const auto& q0 = traj.charges_series.front();
  report.charge_drift.assign(q0.size(), 0.0);
  for (const auto& q : traj.charges_series) {
    for (std::size_t j = 0; j < q.size(); ++j) {
      report.charge_drift[j] = std::max(report.charge_drift[j], relative_change(q[j], q0[j]));
    }
  }
  for (double d : report.charge_drift) report.max_charge_drift = std::max(report.max_charge_drift, d);
  const double e0 = traj.energy_series.front();
  for (double e : traj.energy_series) report.energy_drift = std::max(report.energy_drift, relative_change(e, e0));
  return report;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t ell = traj.charges_series.empty() ? 0 : traj.charges_series.front().size();
  out << "t";
  for (std::size_t j = 1; j <= ell; ++j) out << ",Q_" << j;
  out << ",E\n";
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    out << format_double(traj.times[i]);
    for (double q : traj.charges_series[i]) out << ',' << format_double(q);
    out << ',' << format_double(traj.energy_series[i]) << '\n';
  }
}

}  // namespace cnls
