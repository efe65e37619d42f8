#pragma once

#include <vector>

#include "aim/grids.hpp"
#include "aim/scene_model.hpp"
#include "aim/spatial_sampling.hpp"
#include "aim/types.hpp"

namespace aim {

// Transform sign convention, used consistently across the library:
// forward (intensity -> visibility) carries exp(+j 2 pi (u a + v b)),
// inverse (visibility -> image) carries exp(-j 2 pi (u a + v b)).
// The time-domain simulator uses the matching envelope convention
// exp(+j 2 pi f c tau) so that pairwise correlations estimate the same
// visibility the forward transform defines.

enum class VisibilityKind { full, sampled, additive };

// Complex spatial-frequency samples on a u-v raster. For sampled/additive
// kinds `support` marks the occupied bins (1/0); values are exactly zero
// outside the support.
template <typename T>
struct VisibilityGrid {
  UVGrid grid;
  ArrayXXc<T> values;  // (2H+1) x (2H+1); row = u index + H, col = v index + H
  VisibilityKind kind = VisibilityKind::full;
  ArrayXXi support;  // empty for kind == full

  std::complex<T>& at(int iu, int iv) {
    return values(iu + grid.half_extent, iv + grid.half_extent);
  }
  std::complex<T> at(int iu, int iv) const {
    return values(iu + grid.half_extent, iv + grid.half_extent);
  }
};

// Riemann sum of the visibility integral over the scene raster:
// V(u_n, v_m) = sum_ij I(a_i, b_j) exp(+j 2 pi (u_n a_i + v_m b_j)) da db,
// evaluated separably as two complex matrix products.
template <typename T>
VisibilityGrid<T> visibility_of(const IntensityGrid<T>& intensity, const UVGrid& grid) {
  grid.require_valid();
  intensity.grid.require_valid();
  const DirectionGrid& dg = intensity.grid;
  if (intensity.values.rows() != dg.n_alpha || intensity.values.cols() != dg.n_beta)
    throw DimensionMismatch("visibility_of: intensity raster does not match its grid");
  const double umax = grid.bin_size * grid.half_extent;
  if (umax * dg.alpha_step() > 0.5 + 1e-12 || umax * dg.beta_step() > 0.5 + 1e-12)
    throw DimensionMismatch(
        "visibility_of: u-v grid exceeds the Nyquist limit of the direction raster");

  using C = std::complex<T>;
  const int nu = grid.size();
  MatrixXc<T> eu(nu, dg.n_alpha), ev(nu, dg.n_beta);
  for (int n = 0; n < nu; ++n) {
    const double u = grid.coord(n - grid.half_extent);
    for (int i = 0; i < dg.n_alpha; ++i) {
      const double ph = 2.0 * std::numbers::pi * u * dg.alpha(i);
      eu(n, i) = C(static_cast<T>(std::cos(ph)), static_cast<T>(std::sin(ph)));
    }
    for (int j = 0; j < dg.n_beta; ++j) {
      const double ph = 2.0 * std::numbers::pi * u * dg.beta(j);
      ev(n, j) = C(static_cast<T>(std::cos(ph)), static_cast<T>(std::sin(ph)));
    }
  }
  VisibilityGrid<T> out;
  out.grid = grid;
  out.kind = VisibilityKind::full;
  const MatrixXc<T> img = intensity.values.template cast<C>().matrix();
  out.values = ((eu * img * ev.transpose()) * static_cast<T>(dg.cell_area())).array();
  return out;
}

// Mask a full visibility with the presence of a sampling function. Occupancy
// acts as a 0/1 mask by default; multiplicity weighting is available for
// redundancy experiments.
template <typename T>
VisibilityGrid<T> sample_visibility(const VisibilityGrid<T>& v, const SamplingFunction& s,
                                    bool weight_by_multiplicity = false) {
  if (v.grid != s.grid)
    throw IncompatibleGrid("sample_visibility: visibility and sampling grids differ");
  VisibilityGrid<T> out;
  out.grid = v.grid;
  out.kind = VisibilityKind::sampled;
  out.support = (s.occupancy >= 1).cast<int>();
  if (weight_by_multiplicity)
    out.values = v.values * s.occupancy.template cast<T>().template cast<std::complex<T>>();
  else
    out.values =
        v.values * out.support.template cast<T>().template cast<std::complex<T>>();
  return out;
}

// RMS of |V| over the occupied bins of a sampled visibility; the
// normalization divisor for additive combination.
template <typename T>
T measure_subband_power(const VisibilityGrid<T>& v) {
  if (v.kind != VisibilityKind::sampled)
    throw InvalidArgument("measure_subband_power: expects a sampled visibility");
  const long n = (v.support >= 1).count();
  if (n == 0) throw DegenerateInput("measure_subband_power: no occupied bins");
  const T ss = (v.values.abs2() * v.support.template cast<T>()).sum();
  return std::sqrt(ss / static_cast<T>(n));
}

// Bin-wise sum of sampled visibilities. With `normalize` each part is first
// scaled to unit RMS over its occupied bins so every subband contributes
// equally regardless of per-subband gain.
template <typename T>
VisibilityGrid<T> additive_visibility(const std::vector<VisibilityGrid<T>>& parts,
                                      bool normalize) {
  if (parts.empty()) throw InvalidArgument("additive_visibility: empty parts list");
  VisibilityGrid<T> out;
  out.grid = parts.front().grid;
  out.kind = VisibilityKind::additive;
  out.values = ArrayXXc<T>::Zero(out.grid.size(), out.grid.size());
  out.support = ArrayXXi::Zero(out.grid.size(), out.grid.size());
  for (const VisibilityGrid<T>& p : parts) {
    if (p.grid != out.grid)
      throw IncompatibleGrid("additive_visibility: parts use different u-v grids");
    if (p.kind != VisibilityKind::sampled)
      throw InvalidArgument("additive_visibility: parts must be sampled visibilities");
    T scale = T(1);
    if (normalize) scale = T(1) / measure_subband_power(p);
    out.values += p.values * scale;
    out.support = (out.support + p.support).min(1);
  }
  return out;
}

}  // namespace aim
