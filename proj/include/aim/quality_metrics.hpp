#pragma once

#include <map>

#include "aim/reconstruction.hpp"

namespace aim {

// Standard SSIM parameterization: 11x11 Gaussian window, sigma 1.5,
// k1 = 0.01, k2 = 0.03 on unit dynamic range.
struct SsimParams {
  int window_size = 11;  // odd, >= 3
  double window_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  void require_valid() const {
    if (window_size < 3 || window_size % 2 == 0)
      throw InvalidArgument("SsimParams: window size must be odd and >= 3");
    if (!(window_sigma > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0))
      throw InvalidArgument("SsimParams: sigma, k1, k2 and dynamic range must be > 0");
  }
};

// Per-subband and additive SSIM of one scene.
// percent_increase = 100 * (added - mean(per_subband)) / mean(per_subband).
struct ImprovementReport {
  std::map<double, double> per_subband_ssim;  // carrier Hz -> SSIM
  double added_ssim = 0.0;
  double percent_increase = 0.0;
};

namespace detail {

// Valid-mode separable correlation with a normalized 1-D Gaussian kernel.
template <typename T>
ArrayXX<T> gaussian_filter_valid(const ArrayXX<T>& img, const Eigen::Vector<T, Eigen::Dynamic>& g) {
  const int w = static_cast<int>(g.size());
  const Eigen::Index rows = img.rows() - w + 1;
  const Eigen::Index cols = img.cols() - w + 1;
  ArrayXX<T> rowpass(rows, img.cols());
  for (Eigen::Index j = 0; j < img.cols(); ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      T acc = T(0);
      for (int k = 0; k < w; ++k) acc += g(k) * img(i + k, j);
      rowpass(i, j) = acc;
    }
  ArrayXX<T> out(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      T acc = T(0);
      for (int k = 0; k < w; ++k) acc += g(k) * rowpass(i, j + k);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace detail

// Mean local SSIM over windows fully inside the image (no padding). Inputs
// are expected already normalized to the params' dynamic range.
template <typename T>
T ssim(const IntensityGrid<T>& reference, const IntensityGrid<T>& test,
       const SsimParams& params = {}) {
  params.require_valid();
  if (reference.values.rows() != test.values.rows() ||
      reference.values.cols() != test.values.cols())
    throw DimensionMismatch("ssim: image dimensions differ");
  if (reference.values.rows() < params.window_size ||
      reference.values.cols() < params.window_size)
    throw DimensionMismatch("ssim: image smaller than the SSIM window");

  Eigen::Vector<T, Eigen::Dynamic> g(params.window_size);
  const int half = params.window_size / 2;
  for (int k = 0; k < params.window_size; ++k)
    g(k) = static_cast<T>(
        std::exp(-0.5 * std::pow((k - half) / params.window_sigma, 2.0)));
  g /= g.sum();

  const ArrayXX<T>& x = reference.values;
  const ArrayXX<T>& y = test.values;
  const ArrayXX<T> mx = detail::gaussian_filter_valid(x, g);
  const ArrayXX<T> my = detail::gaussian_filter_valid(y, g);
  const ArrayXX<T> sxx = detail::gaussian_filter_valid<T>(x * x, g) - mx * mx;
  const ArrayXX<T> syy = detail::gaussian_filter_valid<T>(y * y, g) - my * my;
  const ArrayXX<T> sxy = detail::gaussian_filter_valid<T>(x * y, g) - mx * my;

  const T c1 = static_cast<T>(std::pow(params.k1 * params.dynamic_range, 2.0));
  const T c2 = static_cast<T>(std::pow(params.k2 * params.dynamic_range, 2.0));
  const ArrayXX<T> score = ((T(2) * mx * my + c1) * (T(2) * sxy + c2)) /
                           ((mx * mx + my * my + c1) * (sxx + syy + c2));
  return score.mean();
}

// Affine map of image values onto [0, 1].
template <typename T>
IntensityGrid<T> normalize_unit(const IntensityGrid<T>& img) {
  const T lo = img.values.minCoeff();
  const T hi = img.values.maxCoeff();
  if (!(hi > lo)) throw DegenerateInput("normalize_unit: constant image");
  IntensityGrid<T> out;
  out.grid = img.grid;
  out.values = (img.values - lo) / (hi - lo);
  return out;
}

struct EvaluateOptions {
  bool normalize_parts = false;  // per-subband RMS normalization before the sum
  SsimParams ssim_params{};
  ReconstructionPath path = ReconstructionPath::automatic;
};

// Full analytic pipeline for one scene: per-subband sampled reconstructions,
// the additive reconstruction, and their SSIM against the normalized scene.
template <typename T>
ImprovementReport evaluate_scene(const IntensityGrid<T>& scene, const ArrayLayout& layout,
                                 const SubbandSet& subbands, const UVGrid& uv_grid,
                                 const EvaluateOptions& options = {}) {
  subbands.require_valid();
  const IntensityGrid<T> reference = normalize_unit(scene);
  const VisibilityGrid<T> full = visibility_of(scene, uv_grid);

  ImprovementReport report;
  std::vector<VisibilityGrid<T>> parts;
  parts.reserve(subbands.carrier_frequencies_hz.size());
  for (double f : subbands.carrier_frequencies_hz) {
    const SamplingFunction s = sampling_function(layout, f, uv_grid);
    parts.push_back(sample_visibility(full, s));
    const ReconstructedImage<T> rec = reconstruct(parts.back(), scene.grid, options.path);
    IntensityGrid<T> rec_img{rec.grid, rec.values};
    report.per_subband_ssim[f] =
        ssim(reference, normalize_unit(rec_img), options.ssim_params);
  }
  const VisibilityGrid<T> added = additive_visibility(parts, options.normalize_parts);
  const ReconstructedImage<T> rec = reconstruct(added, scene.grid, options.path);
  IntensityGrid<T> rec_img{rec.grid, rec.values};
  report.added_ssim = ssim(reference, normalize_unit(rec_img), options.ssim_params);

  double mean = 0.0;
  for (const auto& [f, s] : report.per_subband_ssim) mean += s;
  mean /= static_cast<double>(report.per_subband_ssim.size());
  report.percent_increase = 100.0 * (report.added_ssim - mean) / mean;
  return report;
}

}  // namespace aim
