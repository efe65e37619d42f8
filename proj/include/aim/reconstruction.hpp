#pragma once

#include <deque>
#include <limits>

#include "aim/visibility.hpp"

namespace aim {

// Magnitude image of the inverse transform plus the raw complex map (kept
// for symmetry and Parseval checks). residual_imag = max|Im| / max|value|;
// ~0 whenever the input visibility is Hermitian-symmetric.
//
// Parseval on matched grids: sum |V|^2 = sum |complex image|^2 / (Mu * Mv)
// with Mu, Mv the u-v bin counts per axis.
template <typename T>
struct ReconstructedImage {
  DirectionGrid grid;
  ArrayXX<T> values;          // |complex_values|
  ArrayXXc<T> complex_values;
  T residual_imag = T(0);
};

enum class ReconstructionPath {
  automatic,  // direct over sparse support, separable otherwise
  direct,     // per-pixel sum over occupied bins (reference path)
  fast        // separable matrix-product evaluation over the full grid
};

struct LobeStatistics {
  double main_lobe_width = 0.0;     // -3 dB full width along alpha through the peak
  double peak_sidelobe_db = 0.0;    // relative to the main peak; -inf if none
};

template <typename T>
struct PsfReport {
  ReconstructedImage<T> psf;
  double main_lobe_width = 0.0;
  double peak_sidelobe_db = 0.0;
};

namespace detail {

template <typename T>
void finalize_image(ReconstructedImage<T>& img) {
  img.values = img.complex_values.abs();
  const T vmax = img.values.maxCoeff();
  const T imax = img.complex_values.imag().abs().maxCoeff();
  img.residual_imag = vmax > T(0) ? imax / vmax : T(0);
}

// I_r(a_i, b_j) = sum over occupied bins of V(u, v) exp(-j 2 pi (u a + v b)),
// regrouped per bin so each bin contributes a rank-1 outer product.
template <typename T>
ArrayXXc<T> inverse_direct(const VisibilityGrid<T>& v, const DirectionGrid& dg) {
  using C = std::complex<T>;
  MatrixXc<T> acc = MatrixXc<T>::Zero(dg.n_alpha, dg.n_beta);
  VectorXc<T> pa(dg.n_alpha), pb(dg.n_beta);
  const int H = v.grid.half_extent;
  for (int m = 0; m < v.grid.size(); ++m)
    for (int n = 0; n < v.grid.size(); ++n) {
      const C val = v.values(n, m);
      if (val == C(0)) continue;  // zero bins contribute nothing either way
      const double u = v.grid.coord(n - H);
      const double w = v.grid.coord(m - H);
      for (int i = 0; i < dg.n_alpha; ++i) {
        const double ph = -2.0 * std::numbers::pi * u * dg.alpha(i);
        pa(i) = C(static_cast<T>(std::cos(ph)), static_cast<T>(std::sin(ph)));
      }
      for (int j = 0; j < dg.n_beta; ++j) {
        const double ph = -2.0 * std::numbers::pi * w * dg.beta(j);
        pb(j) = C(static_cast<T>(std::cos(ph)), static_cast<T>(std::sin(ph)));
      }
      acc.noalias() += val * (pa * pb.transpose());
    }
  return acc.array();
}

template <typename T>
ArrayXXc<T> inverse_fast(const VisibilityGrid<T>& v, const DirectionGrid& dg) {
  using C = std::complex<T>;
  const int nu = v.grid.size();
  const int H = v.grid.half_extent;
  MatrixXc<T> ea(dg.n_alpha, nu), eb(dg.n_beta, nu);
  for (int n = 0; n < nu; ++n) {
    const double u = v.grid.coord(n - H);
    for (int i = 0; i < dg.n_alpha; ++i) {
      const double ph = -2.0 * std::numbers::pi * u * dg.alpha(i);
      ea(i, n) = C(static_cast<T>(std::cos(ph)), static_cast<T>(std::sin(ph)));
    }
    for (int j = 0; j < dg.n_beta; ++j) {
      const double ph = -2.0 * std::numbers::pi * u * dg.beta(j);
      eb(j, n) = C(static_cast<T>(std::cos(ph)), static_cast<T>(std::sin(ph)));
    }
  }
  return (ea * v.values.matrix() * eb.transpose()).array();
}

}  // namespace detail

// Inverse-transform a (sampled, additive or full) visibility onto a
// direction raster. Both evaluation paths compute the same sum; the direct
// path stays available as the reference.
template <typename T>
ReconstructedImage<T> reconstruct(const VisibilityGrid<T>& v, const DirectionGrid& dg,
                                  ReconstructionPath path = ReconstructionPath::automatic) {
  v.grid.require_valid();
  dg.require_valid();
  ReconstructedImage<T> img;
  img.grid = dg;
  if (path == ReconstructionPath::automatic) {
    const long total = static_cast<long>(v.grid.size()) * v.grid.size();
    const long occupied =
        v.support.size() > 0 ? (v.support >= 1).count() : total;
    path = occupied * 5 < total ? ReconstructionPath::direct : ReconstructionPath::fast;
  }
  img.complex_values = path == ReconstructionPath::direct ? detail::inverse_direct(v, dg)
                                                          : detail::inverse_fast(v, dg);
  detail::finalize_image(img);
  return img;
}

namespace detail {

// 8-connected flood fill over cells with value >= level; returns the mask.
template <typename T>
ArrayXXi flood_region(const ArrayXX<T>& a, int si, int sj, T level) {
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  ArrayXXi mask = ArrayXXi::Zero(rows, cols);
  std::deque<std::pair<int, int>> queue{{si, sj}};
  mask(si, sj) = 1;
  while (!queue.empty()) {
    auto [i, j] = queue.front();
    queue.pop_front();
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        const int ii = i + di, jj = j + dj;
        if (ii < 0 || ii >= rows || jj < 0 || jj >= cols) continue;
        if (mask(ii, jj) || a(ii, jj) < level) continue;
        mask(ii, jj) = 1;
        queue.emplace_back(ii, jj);
      }
  }
  return mask;
}

}  // namespace detail

// -3 dB main lobe extent and peak sidelobe of an image with a unique global
// peak (a connected ridge of tied maxima counts as one peak). The main lobe
// is the 8-connected region around the peak above the -3 dB (amplitude)
// threshold; the sidelobe search excludes that region.
template <typename T>
LobeStatistics lobe_statistics(const ReconstructedImage<T>& img) {
  const ArrayXX<T>& a = img.values;
  const int rows = static_cast<int>(a.rows());
  const int cols = static_cast<int>(a.cols());
  Eigen::Index pi = 0, pj = 0;
  const T peak = a.maxCoeff(&pi, &pj);
  if (!(peak > T(0))) throw DegenerateInput("lobe_statistics: image has no positive peak");
  const T tie_level = peak * (T(1) - T(1e-12));
  const ArrayXXi tie_region =
      detail::flood_region(a, static_cast<int>(pi), static_cast<int>(pj), tie_level);
  const long reachable = (tie_region * (a >= tie_level).template cast<int>()).sum();
  const long ties = (a >= tie_level).count();
  if (reachable != ties)
    throw DegenerateInput("lobe_statistics: image has multiple separated peaks");
  if (ties == static_cast<long>(rows) * cols)
    throw DegenerateInput("lobe_statistics: flat image has no lobe structure");

  const T threshold = peak * static_cast<T>(std::pow(10.0, -3.0 / 20.0));
  const ArrayXXi in_lobe =
      detail::flood_region(a, static_cast<int>(pi), static_cast<int>(pj), threshold);

  LobeStatistics stats;
  int lo = static_cast<int>(pi), hi = static_cast<int>(pi);
  while (lo - 1 >= 0 && a(lo - 1, pj) >= threshold) --lo;
  while (hi + 1 < rows && a(hi + 1, pj) >= threshold) ++hi;
  stats.main_lobe_width = (hi - lo + 1) * img.grid.alpha_step();

  T side = T(0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      if (!in_lobe(i, j)) side = std::max(side, a(i, j));
  stats.peak_sidelobe_db = side > T(0)
                               ? 20.0 * std::log10(static_cast<double>(side / peak))
                               : -std::numeric_limits<double>::infinity();
  return stats;
}

// PSF of a sampling function: inverse transform of unit visibility on the
// occupied bins, with lobe statistics. A single-bin (flat) PSF gets the
// degenerate report: full-span width, -inf sidelobe.
template <typename T = double>
PsfReport<T> psf(const SamplingFunction& s, const DirectionGrid& grid) {
  VisibilityGrid<T> v;
  v.grid = s.grid;
  v.kind = VisibilityKind::sampled;
  v.support = (s.occupancy >= 1).template cast<int>();
  v.values = v.support.template cast<T>().template cast<std::complex<T>>();
  PsfReport<T> report;
  report.psf = reconstruct(v, grid);
  const T vmax = report.psf.values.maxCoeff();
  const T vmin = report.psf.values.minCoeff();
  if (vmax <= T(0) || vmin >= vmax * (T(1) - T(1e-12))) {
    report.main_lobe_width = 2.0 * grid.alpha_half_span;
    report.peak_sidelobe_db = -std::numeric_limits<double>::infinity();
    return report;
  }
  const LobeStatistics stats = lobe_statistics(report.psf);
  report.main_lobe_width = stats.main_lobe_width;
  report.peak_sidelobe_db = stats.peak_sidelobe_db;
  return report;
}

}  // namespace aim
