#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cnls/grid.hpp"
#include "cnls/nonlinearity.hpp"

namespace cnls {

/// Grid plus a nonlinearity that has passed the consistency check. Point
/// coordinates are cached when the nonlinearity depends on x.
class EnergyContext {
 public:
  /// Throws InconsistentSpecError for a spec failing check_consistency.
  EnergyContext(GridPtr grid, NonlinearityPtr spec);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const NonlinearitySpec& spec() const { return *spec_; }
  const NonlinearityPtr& spec_ptr() const { return spec_; }
  std::size_t ell() const { return spec_->ell(); }

  /// Coordinates of grid point `flat` (empty span when x-independent).
  std::span<const double> point(std::size_t flat) const;

  /// Throws std::invalid_argument unless z has ell() components on this grid.
  void require_compatible(const FieldVector& z) const;

  /// H(x, |z_1|, ..., |z_l|) at every grid point.
  RealField potential_density(const FieldVector& z) const;
  /// h_j(x, |z_1|^2, ..., |z_l|^2) at every grid point.
  RealField coupling_field(const FieldVector& z, std::size_t j) const;

 private:
  GridPtr grid_;
  NonlinearityPtr spec_;
  std::vector<double> coords_;
};

/// Target masses c_j > 0; the constraint is |u_j|_2^2 = c_j^2.
class ConstraintSet {
 public:
  explicit ConstraintSet(std::vector<double> c);
  std::size_t ell() const { return c_.size(); }
  double c(std::size_t j) const { return c_.at(j); }
  double mass(std::size_t j) const { return c_.at(j) * c_.at(j); }
  const std::vector<double>& values() const { return c_; }
  /// c^2 = sum_j c_j^2.
  double total_mass() const;

 private:
  std::vector<double> c_;
};

/// 1/2 (|grad z|_2^2 - integral of H(x, |z|)).
double energy_hat(const EnergyContext& ctx, const FieldVector& z);
/// The same functional restricted to real fields.
double energy_real(const EnergyContext& ctx, std::span<const RealField> u);
/// energy_real for a FieldVector whose imaginary parts are exactly zero.
double energy_real(const EnergyContext& ctx, const FieldVector& u);

/// L^2 gradient of energy_hat: -Laplacian z_j - h_j(x, |z|^2) z_j.
FieldVector energy_gradient(const EnergyContext& ctx, const FieldVector& z);

/// (|z_1|_2^2, ..., |z_l|_2^2).
std::vector<double> charges(const FieldVector& z);

/// Componentwise moduli |z_j|.
std::vector<RealField> moduli(const FieldVector& z);

/// energy_hat(z) - energy_real(|z|) computed two ways.
struct DiamagneticDefect {
  /// Difference of energies, with grad|z_j| from modulus_partial.
  double direct = 0.0;
  /// 1/2 sum_j sum_i integral (u_j d_i v_j - v_j d_i u_j)^2 / (u_j^2 + v_j^2).
  double formula = 0.0;
  /// |direct - formula|.
  double discrepancy = 0.0;
  /// discrepancy / max(|direct|, |formula|), 0 when both vanish.
  double relative_discrepancy = 0.0;
};
DiamagneticDefect diamagnetic_defect(const EnergyContext& ctx, const FieldVector& z);

/// gamma = 2 (2 ell1 + 4 - N ell1) / (4 - N ell1). Requires 0 < ell1 < 4/N.
double coercivity_gamma(double ell1, std::size_t dims);

struct CoercivityPoint {
  double c = 0.0;          ///< sqrt of the total mass of the sample
  double energy = 0.0;     ///< energy_hat
  double kinetic = 0.0;    ///< |grad z|_2^2
  /// Smallest C for which energy >= kinetic/4 - C (c^2 + c^gamma) holds here.
  double required_c = 0.0;
  /// energy - (kinetic/4 - C (c^2 + c^gamma)) with the reported C.
  double margin = 0.0;
};

struct CoercivityReport {
  bool applicable = true;
  double gamma = 0.0;
  /// Sampled estimate of the constant: max over samples of required_c, >= 0.
  double constant = 0.0;
  std::size_t witness = 0;
  std::vector<CoercivityPoint> points;
  /// Set when the per-c estimate grows by more than 10x from the smallest to
  /// the largest sampled c.
  bool growth_flag = false;
};

/// Estimates the lower-bound constant of energy_hat >= |grad z|^2/4 - C (c^2 + c^gamma)
/// over the sample states. A diagnostic: it reports, it never proves. Pass
/// std::nullopt for ell1 when the growth hypothesis does not hold; the report
/// is then marked not applicable.
CoercivityReport coercivity_check(const EnergyContext& ctx, std::span<const FieldVector> samples,
                                  std::optional<double> ell1);

}  // namespace cnls
