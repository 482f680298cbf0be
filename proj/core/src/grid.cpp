#include "cnls/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cnls/summation.hpp"

namespace cnls {

namespace {

// The FFTW planner is not thread-safe; execution on new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cdouble* p) { return reinterpret_cast<fftw_complex*>(p); }
fftw_complex* as_fftw(const cdouble* p) {
  return reinterpret_cast<fftw_complex*>(const_cast<cdouble*>(p));
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (&a != &b && !a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": fields live on different grids");
  }
}

}  // namespace

struct Grid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

GridPtr Grid::create(std::vector<std::size_t> points, std::vector<double> lengths) {
  return GridPtr(new Grid(std::move(points), std::move(lengths)));
}

Grid::Grid(std::vector<std::size_t> points, std::vector<double> lengths)
    : points_(std::move(points)), lengths_(std::move(lengths)) {
  if (points_.empty() || points_.size() > 3) {
    throw std::invalid_argument("grid: dimension must be 1, 2 or 3");
  }
  if (lengths_.size() != points_.size()) {
    throw std::invalid_argument("grid: need one length per dimension");
  }
  size_ = 1;
  for (std::size_t axis = 0; axis < points_.size(); ++axis) {
    const std::size_t n = points_[axis];
    if (n < 8 || !std::has_single_bit(n)) {
      throw std::invalid_argument("grid: points per dimension must be a power of two >= 8");
    }
    if (!(lengths_[axis] > 0.0) || !std::isfinite(lengths_[axis])) {
      throw std::invalid_argument("grid: lengths must be finite and positive");
    }
    if (size_ > std::numeric_limits<int>::max() / n) {
      throw std::invalid_argument("grid: total point count too large");
    }
    size_ *= n;
  }

  strides_.assign(points_.size(), 1);
  for (std::size_t axis = points_.size() - 1; axis > 0; --axis) {
    strides_[axis - 1] = strides_[axis] * points_[axis];
  }

  cell_volume_ = 1.0;
  for (std::size_t axis = 0; axis < points_.size(); ++axis) cell_volume_ *= spacing(axis);

  wavenumbers_.assign(points_.size(), std::vector<double>(size_));
  derivative_wavenumbers_.assign(points_.size(), std::vector<double>(size_));
  kinetic_symbol_.assign(size_, 0.0);
  for (std::size_t axis = 0; axis < points_.size(); ++axis) {
    const auto n = static_cast<std::ptrdiff_t>(points_[axis]);
    const double base = 2.0 * std::numbers::pi / lengths_[axis];
    for (std::size_t flat = 0; flat < size_; ++flat) {
      const auto q = static_cast<std::ptrdiff_t>(axis_index(flat, axis));
      const std::ptrdiff_t signed_q = q < n / 2 ? q : q - n;
      const double k = base * static_cast<double>(signed_q);
      wavenumbers_[axis][flat] = k;
      const double kd = (q == n / 2) ? 0.0 : k;
      derivative_wavenumbers_[axis][flat] = kd;
      kinetic_symbol_[flat] += k * k;
    }
  }

  std::vector<int> dims(points_.begin(), points_.end());
  std::vector<cdouble> scratch_in(size_), scratch_out(size_);
  plans_ = std::make_unique<Plans>();
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), as_fftw(scratch_in.data()),
                                  as_fftw(scratch_out.data()), FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), as_fftw(scratch_in.data()),
                                   as_fftw(scratch_out.data()), FFTW_BACKWARD, flags);
  if (!plans_->forward || !plans_->backward) {
    throw std::runtime_error("grid: FFT planning failed");
  }
}

Grid::~Grid() {
  if (!plans_) return;
  std::lock_guard lock(planner_mutex());
  if (plans_->forward) fftw_destroy_plan(plans_->forward);
  if (plans_->backward) fftw_destroy_plan(plans_->backward);
}

double Grid::volume() const {
  double v = 1.0;
  for (double l : lengths_) v *= l;
  return v;
}

double Grid::coordinate(std::size_t axis, std::size_t index) const {
  return -0.5 * lengths_.at(axis) + static_cast<double>(index) * spacing(axis);
}

std::size_t Grid::axis_index(std::size_t flat, std::size_t axis) const {
  return (flat / strides_[axis]) % points_[axis];
}

void Grid::point(std::size_t flat, std::span<double> out) const {
  for (std::size_t axis = 0; axis < points_.size(); ++axis) {
    out[axis] = coordinate(axis, axis_index(flat, axis));
  }
}

void Grid::forward(std::span<const cdouble> in, std::span<cdouble> out) const {
  if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("grid: transform size mismatch");
  fftw_execute_dft(plans_->forward, as_fftw(in.data()), as_fftw(out.data()));
}

void Grid::inverse(std::span<const cdouble> in, std::span<cdouble> out) const {
  if (in.size() != size_ || out.size() != size_) throw std::invalid_argument("grid: transform size mismatch");
  fftw_execute_dft(plans_->backward, as_fftw(in.data()), as_fftw(out.data()));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& v : out) v *= scale;
}

bool Grid::same_shape(const Grid& other) const {
  return points_ == other.points_ && lengths_ == other.lengths_;
}

// ---------------------------------------------------------------------------

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + ": non-finite value");
  }
}

void require_finite(std::span<const cdouble> values, const char* what) {
  for (const cdouble& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw std::invalid_argument(std::string(what) + ": non-finite value");
    }
  }
}

RealField::RealField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  values_.assign(grid_->size(), 0.0);
}

RealField::RealField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("field: value count does not match grid");
  require_finite(values_, "field");
}

ComplexField::ComplexField(GridPtr grid) : grid_(std::move(grid)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  values_.assign(grid_->size(), cdouble{});
}

ComplexField::ComplexField(GridPtr grid, std::vector<cdouble> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw std::invalid_argument("field: null grid");
  if (values_.size() != grid_->size()) throw std::invalid_argument("field: value count does not match grid");
  require_finite(values_, "field");
}

ComplexField::ComplexField(const RealField& real) : grid_(real.grid_ptr()) {
  values_.resize(real.size());
  std::ranges::transform(real.values(), values_.begin(), [](double v) { return cdouble(v, 0.0); });
}

RealField ComplexField::real_part() const {
  RealField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].real();
  return out;
}

RealField ComplexField::imag_part() const {
  RealField out(grid_);
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i].imag();
  return out;
}

bool ComplexField::is_real() const {
  return std::ranges::all_of(values_, [](const cdouble& v) { return v.imag() == 0.0; });
}

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_same_grid(*grid_, other.grid(), "field +=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_same_grid(*grid_, other.grid(), "field -=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ComplexField& ComplexField::operator*=(cdouble factor) {
  for (auto& v : values_) v *= factor;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(cdouble factor, ComplexField a) { return a *= factor; }

FieldVector::FieldVector(std::vector<ComplexField> components) : components_(std::move(components)) {
  if (components_.empty()) throw std::invalid_argument("field vector: need at least one component");
  for (const auto& c : components_) require_same_grid(components_.front().grid(), c.grid(), "field vector");
}

FieldVector FieldVector::zeros(GridPtr grid, std::size_t ell) {
  std::vector<ComplexField> comps;
  comps.reserve(ell);
  for (std::size_t j = 0; j < ell; ++j) comps.emplace_back(grid);
  return FieldVector(std::move(comps));
}

bool FieldVector::is_real() const {
  return std::ranges::all_of(components_, [](const ComplexField& c) { return c.is_real(); });
}

bool FieldVector::compatible(const FieldVector& other) const {
  return ell() == other.ell() && !empty() && grid().same_shape(other.grid());
}

FieldVector& FieldVector::operator+=(const FieldVector& other) {
  if (!compatible(other)) throw std::invalid_argument("field vector +=: shape mismatch");
  for (std::size_t j = 0; j < ell(); ++j) components_[j] += other[j];
  return *this;
}

FieldVector& FieldVector::operator-=(const FieldVector& other) {
  if (!compatible(other)) throw std::invalid_argument("field vector -=: shape mismatch");
  for (std::size_t j = 0; j < ell(); ++j) components_[j] -= other[j];
  return *this;
}

FieldVector& FieldVector::operator*=(cdouble factor) {
  for (auto& c : components_) c *= factor;
  return *this;
}

FieldVector operator+(FieldVector a, const FieldVector& b) { return a += b; }
FieldVector operator-(FieldVector a, const FieldVector& b) { return a -= b; }
FieldVector operator*(cdouble factor, FieldVector a) { return a *= factor; }

// ---------------------------------------------------------------------------

double integrate(const RealField& f) {
  require_finite(f.values(), "integrate");
  return pairwise_sum(f.values()) * f.grid().cell_volume();
}

double l2_norm_sq(const ComplexField& z) {
  std::vector<double> density(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) density[i] = std::norm(z[i]);
  return pairwise_sum(density) * z.grid().cell_volume();
}

ComplexField forward_transform(const ComplexField& z) {
  ComplexField out(z.grid_ptr());
  z.grid().forward(z.values(), out.values());
  return out;
}

ComplexField inverse_transform(const ComplexField& spectrum) {
  ComplexField out(spectrum.grid_ptr());
  spectrum.grid().inverse(spectrum.values(), out.values());
  return out;
}

double l2_norm_sq_spectral(const ComplexField& z) {
  const ComplexField spec = forward_transform(z);
  std::vector<double> density(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) density[i] = std::norm(spec[i]);
  const double n = static_cast<double>(z.size());
  return pairwise_sum(density) * z.grid().cell_volume() / n;
}

double gradient_sq_norm(const ComplexField& z) {
  const ComplexField spec = forward_transform(z);
  const auto symbol = z.grid().kinetic_symbol();
  std::vector<double> density(spec.size());
  for (std::size_t i = 0; i < spec.size(); ++i) density[i] = symbol[i] * std::norm(spec[i]);
  const double n = static_cast<double>(z.size());
  return pairwise_sum(density) * z.grid().cell_volume() / n;
}

double real_inner(const ComplexField& a, const ComplexField& b) {
  require_same_grid(a.grid(), b.grid(), "real_inner");
  std::vector<double> density(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    density[i] = a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
  }
  return pairwise_sum(density) * a.grid().cell_volume();
}

double real_inner(const FieldVector& a, const FieldVector& b) {
  if (!a.compatible(b)) throw std::invalid_argument("real_inner: shape mismatch");
  std::vector<double> parts(a.ell());
  for (std::size_t j = 0; j < a.ell(); ++j) parts[j] = real_inner(a[j], b[j]);
  return pairwise_sum(parts);
}

ComplexField spectral_derivative(const ComplexField& z, std::size_t axis) {
  if (axis >= z.grid().dims()) throw std::invalid_argument("spectral_derivative: axis out of range");
  ComplexField spec = forward_transform(z);
  const auto k = z.grid().derivative_wavenumbers(axis);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= cdouble(0.0, k[i]);
  return inverse_transform(spec);
}

ComplexField laplacian(const ComplexField& z) {
  ComplexField spec = forward_transform(z);
  const auto symbol = z.grid().kinetic_symbol();
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= -symbol[i];
  return inverse_transform(spec);
}

RealField modulus(const ComplexField& z) {
  RealField out(z.grid_ptr());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::abs(z[i]);
  return out;
}

RealField modulus_partial(const ComplexField& z, std::size_t axis) {
  const ComplexField dz = spectral_derivative(z, axis);
  RealField out(z.grid_ptr());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double m = std::abs(z[i]);
    if (m <= kModulusCutoff) continue;
    out[i] = (z[i].real() * dz[i].real() + z[i].imag() * dz[i].imag()) / m;
  }
  return out;
}

double h1_distance(const FieldVector& a, const FieldVector& b) {
  if (!a.compatible(b)) throw std::invalid_argument("h1_distance: grid or component count mismatch");
  std::vector<double> parts;
  parts.reserve(2 * a.ell());
  for (std::size_t j = 0; j < a.ell(); ++j) {
    const ComplexField diff = a[j] - b[j];
    parts.push_back(l2_norm_sq(diff));
    parts.push_back(gradient_sq_norm(diff));
  }
  return std::sqrt(pairwise_sum(parts));
}

}  // namespace cnls
