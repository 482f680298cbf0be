#include "cnls/random_fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace cnls {

ComplexField random_smooth_field(const GridPtr& grid, Rng& rng, const RandomFieldOptions& options) {
  ComplexField spectrum(grid);
  const std::size_t dims = grid->dims();
  double k_nyquist_min = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < dims; ++a) {
    k_nyquist_min = std::min(k_nyquist_min, std::numbers::pi / grid->spacing(a));
  }
  const double k0 = options.smoothing_fraction * k_nyquist_min;
  for (std::size_t p = 0; p < grid->size(); ++p) {
    // Draw for every mode so the stream does not depend on the cutoff.
    const double re = rng.normal();
    const double im = rng.normal();
    bool keep = true;
    double k2 = 0.0;
    for (std::size_t a = 0; a < dims; ++a) {
      const double k = grid->wavenumbers(a)[p];
      const double nyquist = std::numbers::pi / grid->spacing(a);
      if (std::abs(k) > options.cutoff_fraction * nyquist) keep = false;
      k2 += k * k;
    }
    if (!keep) continue;
    double amplitude = 1.0;
    if (k0 > 0.0) amplitude = std::exp(-0.5 * k2 / (k0 * k0));
    spectrum[p] = amplitude * cdouble(re, im);
  }
  ComplexField field = inverse_transform(spectrum);
  if (!options.complex_values) {
    for (auto& v : field.values()) v = cdouble(v.real(), 0.0);
  }
  return field;
}

}  // namespace cnls
