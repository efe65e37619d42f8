#pragma once

#include <cmath>
#include <vector>

#include "aim/grids.hpp"
#include "aim/types.hpp"

namespace aim {

// Real non-negative scene intensity on a direction-cosine raster.
// values(i, j) = I(alpha_i, beta_j).
template <typename T>
struct IntensityGrid {
  DirectionGrid grid;
  ArrayXX<T> values;
};

// Point/disc scatterer collection at a nominal standoff range.
struct Scatterer {
  double x = 0.0;  // meters, transverse
  double y = 0.0;
  double z = 1.0;            // meters, boresight distance (> 0)
  double radius_m = 0.0;     // physical radius; 0 = point target
  double reflectivity = 1.0;  // power reflectivity, >= 0
};

struct ScattererScene {
  std::vector<Scatterer> scatterers;
  double range_m = 1.0;  // nominal standoff, > 0
};

namespace detail {

template <typename T>
IntensityGrid<T> make_intensity(const DirectionGrid& grid) {
  grid.require_valid();
  IntensityGrid<T> img;
  img.grid = grid;
  img.values = ArrayXX<T>::Zero(grid.n_alpha, grid.n_beta);
  return img;
}

template <typename T>
void fill_square(IntensityGrid<T>& img, double cx, double cy, double side) {
  const DirectionGrid& g = img.grid;
  for (int i = 0; i < g.n_alpha; ++i) {
    if (std::abs(g.alpha(i) - cx) > side / 2) continue;
    for (int j = 0; j < g.n_beta; ++j)
      if (std::abs(g.beta(j) - cy) <= side / 2) img.values(i, j) = T(1);
  }
}

}  // namespace detail

// Gaussian intensity profile, peak normalized to 1.
template <typename T = double>
IntensityGrid<T> scene_smooth_blob(const DirectionGrid& grid, double center_alpha,
                                   double center_beta, double width) {
  if (!(width > 0.0)) throw InvalidArgument("scene_smooth_blob: width must be > 0");
  IntensityGrid<T> img = detail::make_intensity<T>(grid);
  for (int i = 0; i < grid.n_alpha; ++i) {
    const double da = grid.alpha(i) - center_alpha;
    for (int j = 0; j < grid.n_beta; ++j) {
      const double db = grid.beta(j) - center_beta;
      img.values(i, j) = static_cast<T>(std::exp(-(da * da + db * db) / (2.0 * width * width)));
    }
  }
  const T peak = img.values.maxCoeff();
  if (peak > T(0)) img.values /= peak;
  return img;
}

// Recursive binary square pattern: a centered square spawns four diagonal
// children of half the side at each level, filling fresh area every level.
template <typename T = double>
IntensityGrid<T> scene_fractal_squares(const DirectionGrid& grid, int depth) {
  if (depth < 1) throw InvalidArgument("scene_fractal_squares: depth must be >= 1");
  IntensityGrid<T> img = detail::make_intensity<T>(grid);
  const double s0 = 0.25 * (2.0 * grid.alpha_half_span);
  struct Node {
    double cx, cy, s;
    int level;
  };
  std::vector<Node> stack{{0.0, 0.0, s0, 1}};
  while (!stack.empty()) {
    const Node n = stack.back();
    stack.pop_back();
    detail::fill_square(img, n.cx, n.cy, n.s);
    if (n.level < depth)
      for (int sx : {-1, 1})
        for (int sy : {-1, 1})
          stack.push_back({n.cx + sx * n.s, n.cy + sy * n.s, n.s / 2, n.level + 1});
  }
  return img;
}

// Row of axis-aligned binary squares along alpha with linearly decreasing
// sides s_k = s1 * (n+1-k)/n, s1 = span/5, centers evenly spread over the
// middle 80% of the span. Degenerates to overlap for n >= 6 at this sizing.
template <typename T = double>
IntensityGrid<T> scene_linear_squares(const DirectionGrid& grid, int n_squares) {
  if (n_squares < 1) throw InvalidArgument("scene_linear_squares: need at least one square");
  IntensityGrid<T> img = detail::make_intensity<T>(grid);
  const double span = 2.0 * grid.alpha_half_span;
  const double s1 = span / 5.0;
  std::vector<double> centers(n_squares, 0.0), sides(n_squares);
  for (int k = 0; k < n_squares; ++k) sides[k] = s1 * double(n_squares - k) / n_squares;
  if (n_squares > 1) {
    const double pitch = 0.8 * span / (n_squares - 1);
    for (int k = 0; k < n_squares; ++k) centers[k] = -0.4 * span + k * pitch;
    for (int k = 0; k + 1 < n_squares; ++k)
      if ((sides[k] + sides[k + 1]) / 2.0 > pitch)
        throw InvalidArgument("scene_linear_squares: consecutive squares overlap at n = " +
                              std::to_string(n_squares));
  }
  for (int k = 0; k < n_squares; ++k) detail::fill_square(img, centers[k], 0.0, sides[k]);
  return img;
}

// Mixed-content deterministic test scene: disc, annulus, two squares and a
// soft blob with diverse spatial-spectral content.
template <typename T = double>
IntensityGrid<T> scene_composite(const DirectionGrid& grid) {
  IntensityGrid<T> img = detail::make_intensity<T>(grid);
  const double s = 2.0 * grid.alpha_half_span;  // scale everything with the span
  for (int i = 0; i < grid.n_alpha; ++i) {
    const double a = grid.alpha(i);
    for (int j = 0; j < grid.n_beta; ++j) {
      const double b = grid.beta(j);
      T v = T(0);
      if (std::hypot(a + 0.15 * s, b - 0.12 * s) <= 0.09 * s) v = T(1);
      const double r2 = std::hypot(a - 0.18 * s, b + 0.10 * s);
      if (r2 <= 0.11 * s && r2 >= 0.07 * s) v = T(1);
      if (std::abs(a - 0.05 * s) <= 0.03 * s && std::abs(b - 0.30 * s) <= 0.03 * s) v = T(1);
      if (std::abs(a + 0.28 * s) <= 0.05 * s && std::abs(b + 0.22 * s) <= 0.05 * s) v = T(1);
      const double g = 0.8 * std::exp(-(a * a + (b + 0.05 * s) * (b + 0.05 * s)) /
                                      (2.0 * (0.05 * s) * (0.05 * s)));
      img.values(i, j) = std::max(v, static_cast<T>(g));
    }
  }
  return img;
}

// Map scatterers to direction cosines (x/R', y/R') with R' the Euclidean
// range, rendering each as a disc of angular radius
// max(footprint, radius_m / R'). Overlapping discs add; a zero-radius point
// deposits into the nearest raster cell.
template <typename T = double>
IntensityGrid<T> project_scatterers(const ScattererScene& scene, const DirectionGrid& grid,
                                    double footprint = 0.0) {
  if (footprint < 0.0) throw InvalidArgument("project_scatterers: footprint must be >= 0");
  if (!(scene.range_m > 0.0)) throw InvalidArgument("project_scatterers: range must be > 0");
  IntensityGrid<T> img = detail::make_intensity<T>(grid);
  for (const Scatterer& sc : scene.scatterers) {
    if (!(sc.z > 0.0))
      throw InvalidArgument("project_scatterers: scatterer lies behind the array plane");
    const double range = std::sqrt(sc.x * sc.x + sc.y * sc.y + sc.z * sc.z);
    const double ca = sc.x / range;
    const double cb = sc.y / range;
    const double ar = std::max(footprint, sc.radius_m / range);
    if (ar <= 0.0) {
      // nearest cell deposit
      int bi = 0, bj = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < grid.n_alpha; ++i)
        for (int j = 0; j < grid.n_beta; ++j) {
          const double d = std::hypot(grid.alpha(i) - ca, grid.beta(j) - cb);
          if (d < best) {
            best = d;
            bi = i;
            bj = j;
          }
        }
      img.values(bi, bj) += static_cast<T>(sc.reflectivity);
      continue;
    }
    for (int i = 0; i < grid.n_alpha; ++i)
      for (int j = 0; j < grid.n_beta; ++j)
        if (std::hypot(grid.alpha(i) - ca, grid.beta(j) - cb) <= ar)
          img.values(i, j) += static_cast<T>(sc.reflectivity);
  }
  return img;
}

}  // namespace aim
