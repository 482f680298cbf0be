#include "cnls/energy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cnls/summation.hpp"

namespace cnls {

EnergyContext::EnergyContext(GridPtr grid, NonlinearityPtr spec) : grid_(std::move(grid)), spec_(std::move(spec)) {
  if (!grid_ || !spec_) throw std::invalid_argument("energy context: null grid or nonlinearity");
  require_consistent(*spec_, grid_->dims());
  if (spec_->x_dependent()) {
    const std::size_t dims = grid_->dims();
    coords_.resize(grid_->size() * dims);
    for (std::size_t p = 0; p < grid_->size(); ++p) {
      grid_->point(p, std::span<double>(coords_).subspan(p * dims, dims));
    }
  }
}

std::span<const double> EnergyContext::point(std::size_t flat) const {
  if (coords_.empty()) return {};
  const std::size_t dims = grid_->dims();
  return std::span<const double>(coords_).subspan(flat * dims, dims);
}

void EnergyContext::require_compatible(const FieldVector& z) const {
  if (z.empty() || z.ell() != ell()) throw std::invalid_argument("state has the wrong number of components");
  if (!z.grid().same_shape(*grid_)) throw std::invalid_argument("state lives on a different grid");
}

RealField EnergyContext::potential_density(const FieldVector& z) const {
  require_compatible(z);
  RealField out(grid_);
  std::vector<double> s(ell());
  for (std::size_t p = 0; p < grid_->size(); ++p) {
    for (std::size_t j = 0; j < ell(); ++j) s[j] = std::abs(z[j][p]);
    out[p] = spec_->potential(point(p), s);
  }
  return out;
}

RealField EnergyContext::coupling_field(const FieldVector& z, std::size_t j) const {
  require_compatible(z);
  if (j >= ell()) throw std::out_of_range("coupling_field: component out of range");
  RealField out(grid_);
  std::vector<double> s_sq(ell());
  for (std::size_t p = 0; p < grid_->size(); ++p) {
    for (std::size_t k = 0; k < ell(); ++k) s_sq[k] = std::norm(z[k][p]);
    out[p] = spec_->coupling(j, point(p), s_sq);
  }
  return out;
}

ConstraintSet::ConstraintSet(std::vector<double> c) : c_(std::move(c)) {
  if (c_.empty()) throw std::invalid_argument("constraint: need at least one mass");
  for (double v : c_) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("constraint: every c_j must be finite and > 0");
  }
}

double ConstraintSet::total_mass() const {
  double acc = 0.0;
  for (double v : c_) acc += v * v;
  return acc;
}

double energy_hat(const EnergyContext& ctx, const FieldVector& z) {
  ctx.require_compatible(z);
  std::vector<double> kinetic(z.ell());
  for (std::size_t j = 0; j < z.ell(); ++j) kinetic[j] = gradient_sq_norm(z[j]);
  return 0.5 * (pairwise_sum(kinetic) - integrate(ctx.potential_density(z)));
}

double energy_real(const EnergyContext& ctx, std::span<const RealField> u) {
  std::vector<ComplexField> comps;
  comps.reserve(u.size());
  for (const RealField& f : u) comps.emplace_back(f);
  return energy_hat(ctx, FieldVector(std::move(comps)));
}

double energy_real(const EnergyContext& ctx, const FieldVector& u) {
  if (!u.is_real()) throw std::invalid_argument("energy_real: components must be real");
  return energy_hat(ctx, u);
}

FieldVector energy_gradient(const EnergyContext& ctx, const FieldVector& z) {
  ctx.require_compatible(z);
  std::vector<ComplexField> out;
  out.reserve(z.ell());
  for (std::size_t j = 0; j < z.ell(); ++j) {
    ComplexField g = laplacian(z[j]);
    const RealField h = ctx.coupling_field(z, j);
    for (std::size_t p = 0; p < g.size(); ++p) g[p] = -g[p] - h[p] * z[j][p];
    out.push_back(std::move(g));
  }
  return FieldVector(std::move(out));
}

std::vector<double> charges(const FieldVector& z) {
  std::vector<double> q(z.ell());
  for (std::size_t j = 0; j < z.ell(); ++j) q[j] = l2_norm_sq(z[j]);
  return q;
}

std::vector<RealField> moduli(const FieldVector& z) {
  std::vector<RealField> out;
  out.reserve(z.ell());
  for (const ComplexField& c : z) out.push_back(modulus(c));
  return out;
}

DiamagneticDefect diamagnetic_defect(const EnergyContext& ctx, const FieldVector& z) {
  ctx.require_compatible(z);
  const Grid& grid = ctx.grid();
  std::vector<double> modulus_kinetic;
  std::vector<double> phase_terms;
  for (std::size_t j = 0; j < z.ell(); ++j) {
    for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
      const RealField partial = modulus_partial(z[j], axis);
      RealField sq(z.grid_ptr());
      for (std::size_t p = 0; p < sq.size(); ++p) sq[p] = partial[p] * partial[p];
      modulus_kinetic.push_back(integrate(sq));

      const ComplexField dz = spectral_derivative(z[j], axis);
      RealField quotient(z.grid_ptr());
      for (std::size_t p = 0; p < quotient.size(); ++p) {
        const double u = z[j][p].real();
        const double v = z[j][p].imag();
        const double m2 = u * u + v * v;
        if (std::sqrt(m2) <= kModulusCutoff) continue;
        const double cross = u * dz[p].imag() - v * dz[p].real();
        quotient[p] = cross * cross / m2;
      }
      phase_terms.push_back(integrate(quotient));
    }
  }
  const double potential = integrate(ctx.potential_density(z));
  const double modulus_energy = 0.5 * (pairwise_sum(modulus_kinetic) - potential);

  DiamagneticDefect d;
  d.direct = energy_hat(ctx, z) - modulus_energy;
  d.formula = 0.5 * pairwise_sum(phase_terms);
  d.discrepancy = std::abs(d.direct - d.formula);
  const double scale = std::max(std::abs(d.direct), std::abs(d.formula));
  d.relative_discrepancy = scale > 0.0 ? d.discrepancy / scale : 0.0;
  return d;
}

double coercivity_gamma(double ell1, std::size_t dims) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("coercivity_gamma: dimension must be 1..3");
  const double n = static_cast<double>(dims);
  if (!(ell1 > 0.0) || !(ell1 < 4.0 / n)) {
    throw std::invalid_argument("coercivity_gamma: need 0 < ell1 < 4/N");
  }
  const double gamma = 2.0 * (2.0 * ell1 + 4.0 - n * ell1) / (4.0 - n * ell1);
  if (!(gamma > 2.0)) throw std::logic_error("coercivity_gamma: gamma <= 2");
  return gamma;
}

CoercivityReport coercivity_check(const EnergyContext& ctx, std::span<const FieldVector> samples,
                                  std::optional<double> ell1) {
  CoercivityReport report;
  if (!ell1) {
    report.applicable = false;
    return report;
  }
  report.gamma = coercivity_gamma(*ell1, ctx.grid().dims());
  for (const FieldVector& z : samples) {
    CoercivityPoint pt;
    const auto q = charges(z);
    double total = 0.0;
    for (double v : q) total += v;
    pt.c = std::sqrt(total);
    std::vector<double> kin(z.ell());
    for (std::size_t j = 0; j < z.ell(); ++j) kin[j] = gradient_sq_norm(z[j]);
    pt.kinetic = pairwise_sum(kin);
    pt.energy = energy_hat(ctx, z);
    const double weight = total + std::pow(pt.c, report.gamma);
    pt.required_c = weight > 0.0 ? (0.25 * pt.kinetic - pt.energy) / weight : 0.0;
    report.points.push_back(pt);
  }
  report.constant = 0.0;
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    if (report.points[i].required_c > report.constant) {
      report.constant = report.points[i].required_c;
      report.witness = i;
    }
  }
  std::map<double, double> by_c;
  for (auto& pt : report.points) {
    const double weight = pt.c * pt.c + std::pow(pt.c, report.gamma);
    pt.margin = pt.energy - (0.25 * pt.kinetic - report.constant * weight);
    auto [it, inserted] = by_c.emplace(std::round(pt.c * 1e6) / 1e6, pt.required_c);
    if (!inserted) it->second = std::max(it->second, pt.required_c);
  }
  if (by_c.size() >= 2) {
    const double first = std::max(by_c.begin()->second, 0.0);
    const double last = std::max(by_c.rbegin()->second, 0.0);
    report.growth_flag = last > 0.0 && last > 10.0 * first;
  }
  return report;
}

}  // namespace cnls
