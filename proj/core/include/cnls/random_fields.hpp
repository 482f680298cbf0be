#pragma once

#include "cnls/grid.hpp"
#include "cnls/random.hpp"

namespace cnls {

struct RandomFieldOptions {
  /// Modes with |k_i| above this fraction of the axis Nyquist wavenumber are zeroed.
  double cutoff_fraction = 2.0 / 3.0;
  /// When > 0, spectral amplitudes are damped by exp(-|k|^2 / (2 k0^2)) with
  /// k0 = smoothing_fraction * (smallest Nyquist wavenumber).
  double smoothing_fraction = 0.0;
  bool complex_values = true;
};

/// Seeded random band-limited field: independent normal spectral coefficients
/// below the cutoff. Real fields are obtained by taking the real part.
ComplexField random_smooth_field(const GridPtr& grid, Rng& rng, const RandomFieldOptions& options = {});

}  // namespace cnls
