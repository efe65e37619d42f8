#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "aim/errors.hpp"
#include "aim/types.hpp"

namespace aim {

// Planar receiver/transmitter element layout, positions in meters.
// One layout serves all subbands; division by wavelength happens at the
// spatial-frequency sampling stage.
struct ArrayLayout {
  std::vector<Vec2> receivers;
  std::vector<Vec2> transmitters;
  std::string label;
};

// Directed antenna-pair separation: dx = x_b - x_a, dy = y_b - y_a.
struct Baseline {
  double dx = 0.0;
  double dy = 0.0;
  int rx_a = 0;
  int rx_b = 0;
};

inline double receiver_bounding_radius(const ArrayLayout& layout) {
  double r = 0.0;
  for (const auto& p : layout.receivers) r = std::max(r, p.norm());
  return r;
}

// Smallest pairwise receiver separation; sets the unambiguous field of view.
inline double min_element_spacing(const ArrayLayout& layout) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a + 1 < layout.receivers.size(); ++a)
    for (std::size_t b = a + 1; b < layout.receivers.size(); ++b)
      d = std::min(d, (layout.receivers[b] - layout.receivers[a]).norm());
  return d;
}

// Grating-lobe-free half field of view in direction cosine at `frequency_hz`.
inline double unambiguous_fov(const ArrayLayout& layout, double frequency_hz) {
  return wavelength(frequency_hz) / (2.0 * min_element_spacing(layout));
}

inline void validate_layout(const ArrayLayout& layout) {
  if (layout.receivers.size() < 2)
    throw InvalidArgument("layout '" + layout.label + "': need at least 2 receivers");
  for (std::size_t a = 0; a + 1 < layout.receivers.size(); ++a)
    for (std::size_t b = a + 1; b < layout.receivers.size(); ++b)
      if (layout.receivers[a].x() == layout.receivers[b].x() &&
          layout.receivers[a].y() == layout.receivers[b].y())
        throw InvalidArgument("layout '" + layout.label + "': receivers " + std::to_string(a) +
                              " and " + std::to_string(b) + " share identical coordinates");
  const double rb = receiver_bounding_radius(layout);
  for (std::size_t t = 0; t < layout.transmitters.size(); ++t)
    if (layout.transmitters[t].norm() <= rb)
      throw ConstraintViolation("layout '" + layout.label + "': transmitter " +
                                std::to_string(t) + " lies inside the receiver bounding circle");
}

// n_elements receivers on a circle of `radius_m`, the k-th at angle
// start_angle_deg + k * 360/n.
inline ArrayLayout build_circular_array(double radius_m, int n_elements,
                                        double start_angle_deg) {
  if (!(radius_m > 0.0)) throw InvalidArgument("build_circular_array: radius must be > 0");
  if (n_elements < 2) throw InvalidArgument("build_circular_array: need at least 2 elements");
  ArrayLayout layout;
  layout.label = "circular-r" + std::to_string(radius_m) + "-n" + std::to_string(n_elements);
  layout.receivers.reserve(n_elements);
  const double step = 360.0 / n_elements;
  for (int k = 0; k < n_elements; ++k) {
    const double a = (start_angle_deg + k * step) * std::numbers::pi / 180.0;
    layout.receivers.emplace_back(radius_m * std::cos(a), radius_m * std::sin(a));
  }
  return layout;
}

// Place n_tx transmitters uniformly on a circle strictly wider than the
// receiver span.
inline ArrayLayout place_transmitters(ArrayLayout layout, double radius_m, int n_tx) {
  if (n_tx < 1) throw InvalidArgument("place_transmitters: need at least 1 transmitter");
  const double rb = receiver_bounding_radius(layout);
  if (!(radius_m > rb))
    throw ConstraintViolation("place_transmitters: radius " + std::to_string(radius_m) +
                              " m is not outside the receiver bounding radius " +
                              std::to_string(rb) + " m");
  layout.transmitters.clear();
  layout.transmitters.reserve(n_tx);
  for (int k = 0; k < n_tx; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n_tx;
    layout.transmitters.emplace_back(radius_m * std::cos(a), radius_m * std::sin(a));
  }
  return layout;
}

// Directed antenna-pair baselines. With conjugates both (a,b) and (b,a) are
// emitted; the zero-length self pair is excluded unless asked for (total
// power samples carry no fringe information, see enumerate/sampling tests).
inline std::vector<Baseline> enumerate_baselines(const ArrayLayout& layout,
                                                 bool include_conjugates = true,
                                                 bool include_zero = false) {
  validate_layout(layout);
  std::vector<Baseline> out;
  const int n = static_cast<int>(layout.receivers.size());
  out.reserve(static_cast<std::size_t>(n) * (n - 1) + (include_zero ? 1 : 0));
  if (include_zero) out.push_back(Baseline{0.0, 0.0, 0, 0});
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      if (!include_conjugates && b < a) continue;
      const Vec2 d = layout.receivers[b] - layout.receivers[a];
      out.push_back(Baseline{d.x(), d.y(), a, b});
    }
  return out;
}

}  // namespace aim
