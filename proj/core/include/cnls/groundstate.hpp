#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cnls/energy.hpp"

namespace cnls {

enum class InitialGuess {
  Gaussian,      ///< one gaussian per component, seeded random centers
  Given,         ///< MinimizeOptions::initial
  RandomSeeded,  ///< gaussian envelope times a seeded random smooth profile
};

struct MinimizeOptions {
  InitialGuess initial_guess = InitialGuess::Gaussian;
  std::optional<FieldVector> initial;
  std::uint64_t seed = 1;
  double tau0 = 0.5;
  double backtracking = 0.5;
  std::size_t max_iterations = 20000;
  /// Stop once the L^2 norm of the constraint-projected gradient (which is
  /// the elliptic residual) drops below this.
  double tol_grad = 1e-9;
  /// Give up when the smallest projected gradient norm seen has not dropped
  /// by 0.1% over this many iterations.
  std::size_t stagnation_window = 500;
  /// A minimizer must decay: max |u_j| on the box faces over max |u_j|.
  double localization_tol = 1e-6;
  /// A minimizer must be resolved: the fraction of sum_j |u_j|_2^2 carried by
  /// modes above 2/3 of the Nyquist wavenumber must not exceed this.
  double resolution_tol = 1e-6;
};

/// Minimizer over the constraint set with everything needed to certify it.
struct GroundStateResult {
  FieldVector state;                 ///< real nonnegative for minimize()
  double value = 0.0;                ///< the constrained infimum estimate
  std::vector<double> multipliers;   ///< lambda_j
  double residual = 0.0;             ///< L^2 norm of the elliptic defect
  std::size_t iterations = 0;
  bool converged = false;
  bool localized = false;
  bool resolved = false;
  std::vector<double> energy_trace;  ///< energy after every accepted step
  std::uint64_t seed = 0;
  std::string message;
};

/// Normalized (projected) gradient flow for the real functional over the
/// nonnegative cone: u <- rescale(clamp(u - tau P g)), with g the projected
/// L^2 gradient, P = (alpha - Laplacian)^-1 a kinetic preconditioner with
/// alpha = max(-mu_j, (2 pi / L_min)^2),
/// and tau from backtracking. For x-independent nonlinearities the result is
/// shifted so that its total modulus centroid sits at the box center.
///
/// Throws DivergenceError when the energy becomes non-finite.
GroundStateResult minimize(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts);

/// Same flow over complex states, without the nonnegativity clamp and started
/// from random-phase data; value is energy_hat of the result.
GroundStateResult complex_minimize(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts);

/// lambda_j = -<Laplacian u_j + h_j u_j, u_j> / |u_j|_2^2 (real part for
/// complex states). Throws std::domain_error for a component with zero norm.
std::vector<double> lagrange_multipliers(const EnergyContext& ctx, const FieldVector& u);

/// (sum_j |Laplacian u_j + h_j u_j + lambda_j u_j|_2^2)^(1/2)
double elliptic_residual(const EnergyContext& ctx, const FieldVector& u, std::span<const double> lambdas);
/// Per-component defect fields Laplacian u_j + h_j u_j + lambda_j u_j.
FieldVector elliptic_defect(const EnergyContext& ctx, const FieldVector& u, std::span<const double> lambdas);

/// u_j exp(-i lambda_j t).
FieldVector standing_wave(const FieldVector& u, std::span<const double> lambdas, double t);

/// The initial state minimize() would start from.
FieldVector initial_state(const EnergyContext& ctx, const ConstraintSet& c, const MinimizeOptions& opts);

/// Integer grid shift moving the total-modulus centroid (circular mean per
/// axis) to the box center. Exact: values are permuted, not interpolated.
FieldVector center_by_centroid(const FieldVector& z);

/// Circular centroid of sum_j |z_j|^2 per axis, in box coordinates.
std::vector<double> modulus_centroid(const FieldVector& z);

/// Max |z_j| on the box faces relative to the global max.
double boundary_ratio(const FieldVector& z);

/// Fraction of the total L^2 mass in modes with some |k_i| above 2/3 of that
/// axis' Nyquist wavenumber.
double spectral_tail_fraction(const FieldVector& z);

}  // namespace cnls
