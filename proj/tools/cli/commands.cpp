#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>

#include "cnls/errors.hpp"
#include "cnls/field_io.hpp"
#include "cnls/random_fields.hpp"
#include "cnls/stability.hpp"
#include "output.hpp"

namespace cnls::cli {

namespace {

std::ostream& log_stream(const CommandOptions& opts) { return opts.log ? *opts.log : std::cerr; }

void progress(const CommandOptions& opts, const std::string& message) {
  if (opts.verbose) log_stream(opts) << message << '\n';
}

std::string fmt(double v) { return format_double(v); }

std::string join(std::span<const double> values, char sep = ';') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += fmt(values[i]);
  }
  return out;
}

struct Problem {
  GridPtr grid;
  EnergyContext ctx;
  ConstraintSet c;
};

Problem make_problem(const RunConfig& config) {
  GridPtr grid = build_grid(config);
  if (config.c.empty()) throw ConfigError("this command needs a constraint block");
  return Problem{grid, EnergyContext(grid, build_nonlinearity(config)), ConstraintSet(config.c)};
}

std::string ground_summary(const GroundStateResult& r) {
  std::ostringstream s;
  s << "ground state\n";
  s << "  I_c          " << fmt(r.value) << '\n';
  for (std::size_t j = 0; j < r.multipliers.size(); ++j) s << "  lambda_" << j + 1 << "     " << fmt(r.multipliers[j]) << '\n';
  s << "  residual     " << fmt(r.residual) << '\n';
  s << "  iterations   " << r.iterations << '\n';
  s << "  converged    " << (r.converged ? "yes" : "no") << '\n';
  s << "  localized    " << (r.localized ? "yes" : "no") << '\n';
  s << "  resolved     " << (r.resolved ? "yes" : "no") << '\n';
  s << "  seed         " << r.seed << '\n';
  s << "  stop         " << r.message << '\n';
  return s.str();
}

}  // namespace

int cmd_groundstate(const RunConfig& config, const CommandOptions& opts) {
  Problem p = make_problem(config);
  progress(opts, "minimizing");
  const GroundStateResult r = minimize(p.ctx, p.c, config.solver);
  OutputWriter out(config, "groundstate");
  out.dump("state.nlsf", r.state);

  std::ostringstream meta;
  meta << "key,value\n";
  meta << "I_c," << fmt(r.value) << '\n';
  for (std::size_t j = 0; j < r.multipliers.size(); ++j) meta << "lambda_" << j + 1 << ',' << fmt(r.multipliers[j]) << '\n';
  meta << "residual," << fmt(r.residual) << '\n';
  meta << "iterations," << r.iterations << '\n';
  meta << "converged," << (r.converged ? 1 : 0) << '\n';
  meta << "localized," << (r.localized ? 1 : 0) << '\n';
  meta << "resolved," << (r.resolved ? 1 : 0) << '\n';
  meta << "seed," << r.seed << '\n';
  out.csv("metadata.csv", meta.str());
  out.text("summary.txt", ground_summary(r));
  progress(opts, r.converged ? "converged" : "not converged: " + r.message);
  return r.converged ? kExitSuccess : kExitFailure;
}

int cmd_evolve(const RunConfig& config, const CommandOptions& opts) {
  const auto path = opts.initial ? opts.initial : config.initial;
  if (!path) throw ConfigError("evolve needs an initial field dump (--initial or dynamics.initial)");
  Problem p = make_problem(config);
  const FieldVector loaded = read_field_dump(*path);
  if (loaded.ell() != config.problem.components) {
    throw ConfigError("initial dump has " + std::to_string(loaded.ell()) + " components, config has " +
                      std::to_string(config.problem.components));
  }
  if (loaded.grid().shape() != p.grid->shape() || loaded.grid().lengths() != p.grid->lengths()) {
    throw ConfigError("initial dump grid does not match the grid block");
  }
  std::vector<ComplexField> comps;
  for (const auto& comp : loaded) comps.emplace_back(p.grid, std::vector<cdouble>(comp.values().begin(), comp.values().end()));
  const FieldVector z0(std::move(comps));

  progress(opts, "evolving");
  const Trajectory traj = evolve(p.ctx, z0, config.dynamics);
  const ConservationReport cons = conservation_report(traj);
  OutputWriter out(config, "evolve");
  std::ostringstream csv;
  write_trajectory_csv(csv, traj);
  out.csv("trajectory.csv", csv.str());
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    out.dump("snapshot_" + std::to_string(i) + ".nlsf", traj.snapshots[i].state);
  }

  std::ostringstream s;
  s << "evolution\n";
  s << "  dt                 " << fmt(config.dynamics.dt) << '\n';
  s << "  T                  " << fmt(config.dynamics.T) << '\n';
  s << "  samples            " << traj.times.size() << '\n';
  for (std::size_t j = 0; j < cons.charge_drift.size(); ++j) {
    s << "  charge_drift_" << j + 1 << "     " << fmt(cons.charge_drift[j]) << '\n';
  }
  s << "  energy_drift       " << fmt(cons.energy_drift) << '\n';
  for (std::size_t i = 0; i < traj.snapshots.size(); ++i) {
    s << "  snapshot_" << i << "         t=" << fmt(traj.snapshots[i].time) << '\n';
  }
  if (traj.blowup_time) {
    s << "  blowup_time        " << fmt(*traj.blowup_time) << " (" << traj.blowup_reason << ")\n";
  } else {
    s << "  blowup_time        none\n";
  }
  out.text("summary.txt", s.str());
  return traj.blowup_time ? kExitFailure : kExitSuccess;
}

int cmd_stability(const RunConfig& config, const CommandOptions& opts) {
  if (!config.stability) throw ConfigError("stability needs a stability block");
  EvolveOptions evo = config.dynamics;
  evo.T = config.stability->T;
  evo.snapshot_times.clear();
  try {
    validate(evo);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("stability: ") + e.what());
  }
  Problem p = make_problem(config);
  OutputWriter out(config, "stability");

  progress(opts, "computing the reference ground state");
  const GroundStateResult ground = minimize(p.ctx, p.c, config.solver);
  if (!ground.converged) {
    out.text("summary.txt", ground_summary(ground) + "\nno reference minimizer; sweep not run\n");
    throw NotAttainedError("reference ground state did not converge: " + ground.message);
  }
  const OrbitProxy proxy(p.ctx, p.c, ground);

  progress(opts, "running the delta sweep");
  const StabilityCurve curve = delta_eps_sweep(p.ctx, proxy, config.stability->deltas, config.stability->seeds, evo);

  std::ostringstream table;
  write_curve_csv(table, curve);
  out.csv("curve.csv", table.str());

  std::ostringstream runs;
  runs << "delta,seed,sup_distance,blowup_time,charge_drift,energy_drift,dt,T\n";
  for (std::size_t i = 0; i < curve.runs.size(); ++i) {
    const StabilityReport& r = curve.runs[i];
    runs << fmt(r.delta) << ',' << r.seed << ',' << fmt(r.sup_distance) << ','
         << (r.blowup_time ? fmt(*r.blowup_time) : std::string("none")) << ',' << fmt(r.max_charge_drift) << ','
         << fmt(r.energy_drift) << ',' << fmt(r.dt) << ',' << fmt(r.T) << '\n';
    std::ostringstream series;
    write_distance_csv(series, r);
    out.csv("distance_" + std::to_string(i / config.stability->seeds.size()) + "_seed" + std::to_string(r.seed) + ".csv",
            series.str());
  }
  out.csv("runs.csv", runs.str());

  bool blowup = false;
  std::ostringstream s;
  s << "stability sweep\n";
  s << "  measured quantity  " << kOrbitDistanceLabel << '\n';
  s << "  grid               " << join(std::vector<double>(p.grid->shape().begin(), p.grid->shape().end()), 'x')
    << " points, lengths " << join(p.grid->lengths(), 'x') << '\n';
  s << "  dt, T              " << fmt(evo.dt) << ", " << fmt(evo.T) << '\n';
  s << "  reference I_c      " << fmt(ground.value) << '\n';
  s << "  monotone           " << (curve.monotone ? "yes" : "no") << '\n';
  for (const SweepPoint& pt : curve.points) {
    s << "  delta " << fmt(pt.delta) << "  epsilon " << fmt(pt.epsilon) << "  worst seed " << pt.worst_seed;
    if (pt.blowup) s << "  BLOW-UP";
    s << '\n';
    blowup = blowup || pt.blowup;
  }
  for (const StabilityReport& r : curve.runs) {
    if (r.blowup_time) s << "  blow-up: delta " << fmt(r.delta) << " seed " << r.seed << " at t=" << fmt(*r.blowup_time) << '\n';
  }
  out.text("summary.txt", s.str());
  return blowup ? kExitFailure : kExitSuccess;
}

int cmd_check(const RunConfig& config, const CommandOptions& opts) {
  const NonlinearityPtr spec = build_nonlinearity(config);
  NonlinearityPtr asymptotic = spec->asymptotic();
  if (config.problem.infinity) asymptotic = build_nonlinearity(*config.problem.infinity, config.problem.components, false);

  std::vector<Hypothesis> requested = config.problem.requested;
  if (requested.empty()) {
    requested = {Hypothesis::H0, Hypothesis::H1, Hypothesis::H1Lipschitz, Hypothesis::H2, Hypothesis::H4};
    if (asymptotic) requested.insert(requested.end(), {Hypothesis::H5, Hypothesis::H6, Hypothesis::H7});
  }
  SamplerOptions sampler;
  sampler.dims = config.problem.dims;
  sampler.samples = config.problem.hypothesis_samples;
  sampler.seed = config.seed;

  HypothesisReport report;
  try {
    report = check_hypotheses(*spec, config.problem.hypothesis_params, sampler, asymptotic.get(), requested);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  progress(opts, "checking consistency");
  SamplerOptions consistency_sampler = sampler;
  consistency_sampler.samples = 512;
  const ConsistencyReport consistency = check_consistency(*spec, consistency_sampler, kConsistencyTolerance);

  OutputWriter out(config, "check");
  std::ostringstream text;
  text << "nonlinearity " << spec->name() << ", N=" << config.problem.dims << ", l=" << spec->ell() << '\n';
  text << "consistency  " << (consistency.consistent ? "pass" : "FAIL") << "  max deviation "
       << fmt(consistency.max_deviation) << " (tolerance " << fmt(consistency.tolerance) << ", " << consistency.samples
       << " samples)\n";
  if (!consistency.consistent) {
    text << "  worst point: component " << consistency.component + 1 << ", s=" << join(consistency.s)
         << ", finite difference " << fmt(consistency.finite_difference) << ", 2 h_j s_j "
         << fmt(consistency.analytic) << '\n';
  }
  std::ostringstream csv;
  csv << "hypothesis,status,samples,margin,x,s,r,theta,note\n";
  csv << "consistency," << (consistency.consistent ? "pass" : "fail") << ',' << consistency.samples << ','
      << fmt(consistency.max_deviation) << ',' << join(consistency.x) << ',' << join(consistency.s) << ",,,\n";
  for (const HypothesisEntry& e : report.entries) {
    text << to_string(e.id) << std::string(14 - std::min<std::size_t>(13, to_string(e.id).size()), ' ')
         << to_string(e.status);
    if (e.samples) text << "  (" << e.samples << " samples";
    if (e.witness) text << ", worst margin " << fmt(e.witness->margin);
    if (e.samples) text << ')';
    if (!e.note.empty()) text << "  " << e.note;
    text << '\n';
    if (e.status == HypothesisStatus::Fail && e.witness) {
      text << "  witness x=" << join(e.witness->x) << " s=" << join(e.witness->s);
      if (!e.witness->r.empty()) text << " r=" << join(e.witness->r);
      if (!e.witness->theta.empty()) text << " theta=" << join(e.witness->theta);
      text << '\n';
    }
    csv << to_string(e.id) << ',' << to_string(e.status) << ',' << e.samples << ','
        << (e.witness ? fmt(e.witness->margin) : std::string()) << ',' << (e.witness ? join(e.witness->x) : "") << ','
        << (e.witness ? join(e.witness->s) : "") << ',' << (e.witness ? join(e.witness->r) : "") << ','
        << (e.witness ? join(e.witness->theta) : "") << ',' << e.note << '\n';
  }
  out.text("report.txt", text.str());
  out.csv("report.csv", csv.str());
  return consistency.consistent ? kExitSuccess : kExitFailure;
}

namespace {

struct DiagRow {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string status;  // pass, fail, info, n/a
  std::string note;
};

constexpr std::size_t kDiagStates = 20;
constexpr double kDiamagneticTol = 1e-8;
constexpr double kDiamagneticFloor = -1e-10;
constexpr double kModulusTol = 1e-10;
constexpr double kEqualityTol = 1e-5;
constexpr double kGradientTol = 1e-6;

FieldVector random_state(const GridPtr& grid, std::size_t ell, Rng& rng) {
  RandomFieldOptions ro;
  ro.cutoff_fraction = 0.5;
  ro.smoothing_fraction = 0.1;
  std::vector<ComplexField> comps;
  for (std::size_t j = 0; j < ell; ++j) comps.push_back(random_smooth_field(grid, rng, ro));
  return FieldVector(std::move(comps));
}

}  // namespace

int cmd_diag(const RunConfig& config, const CommandOptions& opts) {
  Problem p = make_problem(config);
  const std::size_t ell = config.problem.components;
  const std::size_t dims = config.problem.dims;
  std::vector<DiagRow> rows;

  const double ell1 = config.problem.hypothesis_params.ell1;
  const bool ell1_ok = ell1 > 0.0 && ell1 < 4.0 / static_cast<double>(dims);
  if (ell1_ok) {
    rows.push_back({"gamma", coercivity_gamma(ell1, dims), 0.0, "info", "ell1=" + fmt(ell1)});
  } else {
    rows.push_back({"gamma", 0.0, 0.0, "n/a", "ell1 outside (0, 4/N)"});
  }

  progress(opts, "diamagnetic identity");
  Rng rng(config.seed);
  std::vector<FieldVector> states;
  double worst_rel = 0.0;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < kDiagStates; ++i) {
    states.push_back(random_state(p.grid, ell, rng));
    const DiamagneticDefect d = diamagnetic_defect(p.ctx, states.back());
    worst_rel = std::max(worst_rel, d.relative_discrepancy);
    lowest = std::min({lowest, d.direct, d.formula});
  }
  rows.push_back({"diamagnetic_relative_discrepancy", worst_rel, kDiamagneticTol,
                  worst_rel <= kDiamagneticTol ? "pass" : "fail", std::to_string(kDiagStates) + " random states"});
  rows.push_back({"diamagnetic_lowest_value", lowest, kDiamagneticFloor, lowest >= kDiamagneticFloor ? "pass" : "fail",
                  "both evaluations"});

  progress(opts, "gradient check");
  {
    double worst = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
      const FieldVector& z = states[i];
      FieldVector v = random_state(p.grid, ell, rng);
      const double eps = 1e-4;
      const double fd = (energy_hat(p.ctx, z + cdouble(eps) * v) - energy_hat(p.ctx, z - cdouble(eps) * v)) / (2.0 * eps);
      const double analytic = real_inner(energy_gradient(p.ctx, z), v);
      worst = std::max(worst, std::abs(fd - analytic) / std::max(1.0, std::abs(analytic)));
    }
    rows.push_back({"gradient_fd_relative_error", worst, kGradientTol, worst <= kGradientTol ? "pass" : "fail",
                    "central differences, step 1e-4"});
  }

  progress(opts, "ground state");
  const GroundStateResult ground = minimize(p.ctx, p.c, config.solver);
  rows.push_back({"ground_state_residual", ground.residual, 0.0, ground.converged ? "info" : "n/a", ground.message});

  {
    // Phase-removal oracle on a positive profile: the ground state when it
    // exists, otherwise a gaussian.
    ComplexField w = ground.state[0];
    if (!ground.converged) {
      std::vector<double> x(dims);
      for (std::size_t q = 0; q < w.size(); ++q) {
        p.grid->point(q, x);
        double r2 = 0.0;
        for (std::size_t a = 0; a < dims; ++a) r2 += x[a] * x[a] / (p.grid->length(a) * p.grid->length(a) / 100.0);
        w[q] = std::exp(-0.5 * r2);
      }
    }
    const double k = 2.0 * std::numbers::pi * 3.0 / p.grid->length(0);
    ComplexField z = w;
    std::vector<double> x(dims);
    for (std::size_t q = 0; q < z.size(); ++q) {
      p.grid->point(q, x);
      z[q] *= std::polar(1.0, k * x[0]);
    }
    double peak = 0.0;
    for (const auto& v : w.values()) peak = std::max(peak, std::abs(v));
    double worst = 0.0;
    for (std::size_t a = 0; a < dims; ++a) {
      const RealField mp = modulus_partial(z, a);
      const ComplexField dw = spectral_derivative(w, a);
      for (std::size_t q = 0; q < z.size(); ++q) {
        if (std::abs(w[q]) < 1e-6 * peak) continue;
        worst = std::max(worst, std::abs(mp[q] - dw[q].real()));
      }
    }
    rows.push_back({"modulus_partial_phase_removal", worst, kModulusTol, worst <= kModulusTol ? "pass" : "fail",
                    "z = w exp(ikx), points with |w| >= 1e-6 max|w|"});
  }

  {
    std::vector<FieldVector> samples;
    for (const double scale : {0.5, 1.0, 2.0}) {
      for (std::size_t i = 0; i < 5; ++i) samples.push_back(cdouble(scale) * states[i]);
    }
    const CoercivityReport cr = coercivity_check(p.ctx, samples, ell1_ok ? std::optional<double>(ell1) : std::nullopt);
    if (cr.applicable) {
      rows.push_back({"coercivity_constant", cr.constant, 0.0, std::isfinite(cr.constant) ? "info" : "fail",
                      cr.growth_flag ? "estimate grows with c" : "estimate bounded over sampled c"});
    } else {
      rows.push_back({"coercivity_constant", 0.0, 0.0, "n/a", "growth hypothesis constants not admissible"});
    }
  }

  if (ground.converged) {
    progress(opts, "complex minimization");
    const GroundStateResult cplx = complex_minimize(p.ctx, p.c, config.solver);
    const double diff = std::abs(cplx.value - ground.value);
    rows.push_back({"complex_vs_real_infimum", diff, kEqualityTol, diff <= kEqualityTol ? "pass" : "fail",
                    "I_c=" + fmt(ground.value) + ", complex=" + fmt(cplx.value)});
  } else {
    rows.push_back({"complex_vs_real_infimum", 0.0, kEqualityTol, "n/a", "no minimizer"});
  }

  OutputWriter out(config, "diag");
  std::ostringstream csv;
  std::ostringstream text;
  csv << "check,measured,threshold,status,note\n";
  bool failed = false;
  for (const DiagRow& r : rows) {
    csv << r.name << ',' << fmt(r.measured) << ',' << fmt(r.threshold) << ',' << r.status << ',' << r.note << '\n';
    text << r.name << std::string(34 - std::min<std::size_t>(33, r.name.size()), ' ') << r.status << "  " << fmt(r.measured);
    if (r.status == "pass" || r.status == "fail") text << " (threshold " << fmt(r.threshold) << ")";
    if (!r.note.empty()) text << "  " << r.note;
    text << '\n';
    failed = failed || r.status == "fail";
  }
  out.csv("diag.csv", csv.str());
  out.text("summary.txt", text.str());
  return failed ? kExitFailure : kExitSuccess;
}

int run_command(const std::string& name, const RunConfig& config, const CommandOptions& opts) {
  std::ostream& log = log_stream(opts);
  try {
    if (name == "groundstate") return cmd_groundstate(config, opts);
    if (name == "evolve") return cmd_evolve(config, opts);
    if (name == "stability") return cmd_stability(config, opts);
    if (name == "check") return cmd_check(config, opts);
    if (name == "diag") return cmd_diag(config, opts);
    log << "error: unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "failure: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace cnls::cli
