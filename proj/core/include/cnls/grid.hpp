#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace cnls {

using cdouble = std::complex<double>;

/// Below this modulus a point is treated as part of the zero set, where the
/// derivative of |z| is defined to be 0.
inline constexpr double kModulusCutoff = 1e-14;

class Grid;
using GridPtr = std::shared_ptr<const Grid>;

/// Periodic box [-L_i/2, L_i/2) in N = 1, 2 or 3 dimensions with a power of
/// two number of points per axis, stored row-major (last axis fastest).
///
/// The grid owns the FFT plans for its shape; transforms are const and may be
/// called concurrently on distinct buffers.
class Grid {
 public:
  static GridPtr create(std::vector<std::size_t> points, std::vector<double> lengths);
  ~Grid();

  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

  std::size_t dims() const { return points_.size(); }
  std::size_t points(std::size_t axis) const { return points_.at(axis); }
  double length(std::size_t axis) const { return lengths_.at(axis); }
  double spacing(std::size_t axis) const { return lengths_.at(axis) / static_cast<double>(points_.at(axis)); }
  const std::vector<std::size_t>& shape() const { return points_; }
  const std::vector<double>& lengths() const { return lengths_; }
  std::size_t size() const { return size_; }
  double cell_volume() const { return cell_volume_; }
  double volume() const;

  double coordinate(std::size_t axis, std::size_t index) const;
  /// Coordinates of the point with flat index `flat`; `out` must have dims() entries.
  void point(std::size_t flat, std::span<double> out) const;
  /// Per-axis index of the flat index.
  std::size_t axis_index(std::size_t flat, std::size_t axis) const;

  /// Wavenumber of spectral mode `flat` along `axis`, in (2pi/L)*{-n/2..n/2-1}.
  std::span<const double> wavenumbers(std::size_t axis) const { return wavenumbers_.at(axis); }
  /// Same as wavenumbers() with the Nyquist mode set to zero; used for every
  /// derivative so that real fields differentiate to real fields.
  std::span<const double> derivative_wavenumbers(std::size_t axis) const { return derivative_wavenumbers_.at(axis); }
  /// Sum over axes of wavenumbers squared, Nyquist included: the symbol of
  /// -Laplacian, also used for gradient norms.
  std::span<const double> kinetic_symbol() const { return kinetic_symbol_; }

  /// Unnormalized forward DFT.
  void forward(std::span<const cdouble> in, std::span<cdouble> out) const;
  /// Inverse DFT scaled by 1/size(), so inverse(forward(f)) == f.
  void inverse(std::span<const cdouble> in, std::span<cdouble> out) const;

  bool same_shape(const Grid& other) const;

 private:
  Grid(std::vector<std::size_t> points, std::vector<double> lengths);

  struct Plans;
  std::vector<std::size_t> points_;
  std::vector<double> lengths_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
  std::vector<std::vector<double>> wavenumbers_;
  std::vector<std::vector<double>> derivative_wavenumbers_;
  std::vector<double> kinetic_symbol_;
  std::unique_ptr<Plans> plans_;
};

class RealField {
 public:
  explicit RealField(GridPtr grid);
  RealField(GridPtr grid, std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

class ComplexField {
 public:
  explicit ComplexField(GridPtr grid);
  ComplexField(GridPtr grid, std::vector<cdouble> values);
  /// Real field promoted with zero imaginary part.
  explicit ComplexField(const RealField& real);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const cdouble> values() const { return values_; }
  std::span<cdouble> values() { return values_; }
  cdouble& operator[](std::size_t i) { return values_[i]; }
  const cdouble& operator[](std::size_t i) const { return values_[i]; }

  RealField real_part() const;
  RealField imag_part() const;
  bool is_real() const;

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(cdouble factor);

 private:
  GridPtr grid_;
  std::vector<cdouble> values_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(cdouble factor, ComplexField a);

/// The state (z_1, ..., z_l): l >= 1 complex components on one grid.
class FieldVector {
 public:
  FieldVector() = default;
  explicit FieldVector(std::vector<ComplexField> components);
  static FieldVector zeros(GridPtr grid, std::size_t ell);

  std::size_t ell() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  const Grid& grid() const { return components_.front().grid(); }
  const GridPtr& grid_ptr() const { return components_.front().grid_ptr(); }

  ComplexField& operator[](std::size_t j) { return components_[j]; }
  const ComplexField& operator[](std::size_t j) const { return components_[j]; }
  auto begin() { return components_.begin(); }
  auto end() { return components_.end(); }
  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }

  bool is_real() const;
  bool compatible(const FieldVector& other) const;

  FieldVector& operator+=(const FieldVector& other);
  FieldVector& operator-=(const FieldVector& other);
  FieldVector& operator*=(cdouble factor);

 private:
  std::vector<ComplexField> components_;
};

FieldVector operator+(FieldVector a, const FieldVector& b);
FieldVector operator-(FieldVector a, const FieldVector& b);
FieldVector operator*(cdouble factor, FieldVector a);

// Quadrature and norms. All reductions use pairwise summation.

double integrate(const RealField& f);
double l2_norm_sq(const ComplexField& z);
/// l2_norm_sq evaluated from the spectrum (Parseval).
double l2_norm_sq_spectral(const ComplexField& z);
/// Sum over axes of the integral of |d_i z|^2, by spectral differentiation.
double gradient_sq_norm(const ComplexField& z);
/// Re of the integral of conj(a) * b.
double real_inner(const ComplexField& a, const ComplexField& b);
double real_inner(const FieldVector& a, const FieldVector& b);

/// Pointwise (u^2 + v^2)^(1/2).
RealField modulus(const ComplexField& z);
/// d_i |z| = (u d_i u + v d_i v) / |z|, and 0 where |z| <= kModulusCutoff.
RealField modulus_partial(const ComplexField& z, std::size_t axis);
/// H^1 distance (sum_j |a_j - b_j|_2^2 + |grad(a_j - b_j)|_2^2)^(1/2).
double h1_distance(const FieldVector& a, const FieldVector& b);

ComplexField spectral_derivative(const ComplexField& z, std::size_t axis);
ComplexField laplacian(const ComplexField& z);
ComplexField forward_transform(const ComplexField& z);
ComplexField inverse_transform(const ComplexField& spectrum);

/// Throws std::invalid_argument unless every value is finite.
void require_finite(std::span<const double> values, const char* what);
void require_finite(std::span<const cdouble> values, const char* what);

}  // namespace cnls
