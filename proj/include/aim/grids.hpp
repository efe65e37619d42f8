#pragma once

#include <cmath>

#include "aim/errors.hpp"

namespace aim {

// Discretized spatial-frequency raster. Coordinates are dimensionless u-v
// (baseline over wavelength); bins are centered on integer multiples of
// bin_size, so the origin bin always exists and the raster has an odd
// number of bins per axis: 2*half_extent + 1.
struct UVGrid {
  double bin_size = 0.5;  // u-v bin width in wavelengths (0.5 = lambda/2 sampling)
  int half_extent = 0;    // bins per axis on either side of the origin

  int size() const { return 2 * half_extent + 1; }

  // Nearest-bin index with ties rounded toward +infinity on each axis.
  int index_of(double t) const { return static_cast<int>(std::floor(t / bin_size + 0.5)); }

  bool contains(int i) const { return i >= -half_extent && i <= half_extent; }
  double coord(int i) const { return i * bin_size; }

  void require_valid() const {
    if (!(bin_size > 0.0)) throw InvalidArgument("UVGrid: bin_size must be > 0");
    if (half_extent < 0) throw InvalidArgument("UVGrid: half_extent must be >= 0");
  }

  bool operator==(const UVGrid&) const = default;
};

// Direction-cosine raster for scene and image planes. Samples follow the
// standard DFT layout: alpha_i = (i - n/2) * (2*half_span/n), so an exact
// alpha = 0 sample exists for both parities of n.
struct DirectionGrid {
  int n_alpha = 0;
  int n_beta = 0;
  double alpha_half_span = 0.0;  // samples lie in [-a, a], |a| <= 1
  double beta_half_span = 0.0;

  double alpha_step() const { return 2.0 * alpha_half_span / n_alpha; }
  double beta_step() const { return 2.0 * beta_half_span / n_beta; }
  double alpha(int i) const { return (i - n_alpha / 2) * alpha_step(); }
  double beta(int j) const { return (j - n_beta / 2) * beta_step(); }
  double cell_area() const { return alpha_step() * beta_step(); }

  void require_valid() const {
    if (n_alpha < 2 || n_beta < 2)
      throw InvalidArgument("DirectionGrid: need at least 2 samples per axis");
    if (!(alpha_half_span > 0.0) || alpha_half_span > 1.0 || !(beta_half_span > 0.0) ||
        beta_half_span > 1.0)
      throw InvalidArgument("DirectionGrid: half spans must lie in (0, 1]");
  }

  bool operator==(const DirectionGrid&) const = default;
};

// Direction grid that makes the discrete forward/inverse transform pair an
// exact inversion for visibilities on `uv`: one direction sample per u-v
// bin and alpha_step * bin_size * n == 1.
inline DirectionGrid matched_direction_grid(const UVGrid& uv) {
  uv.require_valid();
  const int n = uv.size();
  const double half_span = 1.0 / (2.0 * uv.bin_size);
  return DirectionGrid{n, n, half_span, half_span};
}

}  // namespace aim
