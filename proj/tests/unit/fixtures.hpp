#pragma once

#include <cmath>
#include <vector>

#include "cnls/grid.hpp"

namespace cnls::testing {

/// sqrt(2) eta sech(eta x): the scalar cubic ground state of mass c^2 = 4 eta.
inline FieldVector soliton(const GridPtr& grid, double eta, double shift = 0.0) {
  ComplexField u(grid);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double x = grid->coordinate(0, i) - shift;
    u[i] = std::sqrt(2.0) * eta / std::cosh(eta * x);
  }
  return FieldVector({u});
}

inline ComplexField gaussian(const GridPtr& grid, double width, double amplitude = 1.0) {
  ComplexField g(grid);
  std::vector<double> x(grid->dims());
  for (std::size_t p = 0; p < grid->size(); ++p) {
    grid->point(p, x);
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    g[p] = amplitude * std::exp(-0.5 * r2 / (width * width));
  }
  return g;
}

}  // namespace cnls::testing
