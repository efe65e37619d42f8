#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aim/array_geometry.hpp"
#include "aim/grids.hpp"
#include "aim/types.hpp"

namespace aim {

// Carrier frequencies shared by one multi-subband measurement.
struct SubbandSet {
  std::vector<double> carrier_frequencies_hz;  // strictly increasing, > 0
  double noise_bandwidth_hz = 50e6;

  void require_valid() const {
    if (carrier_frequencies_hz.empty())
      throw InvalidArgument("SubbandSet: need at least one carrier frequency");
    double prev = 0.0;
    for (double f : carrier_frequencies_hz) {
      if (!(f > prev))
        throw InvalidArgument("SubbandSet: frequencies must be positive and strictly increasing");
      prev = f;
    }
    if (!(noise_bandwidth_hz > 0.0))
      throw InvalidArgument("SubbandSet: noise bandwidth must be > 0");
  }
};

// Occupancy (multiplicity) of discretized u-v bins for a single wavelength,
// or the bin-wise sum across wavelengths (wavelength_m empty). Multiplicity
// is retained rather than clipped so redundancy statistics stay available;
// unique_sample_count() gives the set-cardinality view.
struct SamplingFunction {
  UVGrid grid;
  ArrayXXi occupancy;                  // (2H+1) x (2H+1); row = u index + H, col = v index + H
  std::optional<double> wavelength_m;  // empty => additive union

  int& at(int iu, int iv) { return occupancy(iu + grid.half_extent, iv + grid.half_extent); }
  int at(int iu, int iv) const {
    return occupancy(iu + grid.half_extent, iv + grid.half_extent);
  }
  bool is_additive() const { return !wavelength_m.has_value(); }
};

// Bin every directed baseline at (Dx/lambda, Dy/lambda). Each baseline adds
// +1 multiplicity to the nearest bin; a baseline outside the grid extent is
// an error naming the offending pair.
inline SamplingFunction sampling_function(const ArrayLayout& layout, double frequency_hz,
                                          const UVGrid& grid,
                                          bool include_zero_baseline = false) {
  grid.require_valid();
  if (!(frequency_hz > 0.0)) throw InvalidArgument("sampling_function: frequency must be > 0");
  const double lambda = wavelength(frequency_hz);
  SamplingFunction s;
  s.grid = grid;
  s.occupancy = ArrayXXi::Zero(grid.size(), grid.size());
  s.wavelength_m = lambda;
  for (const Baseline& b : enumerate_baselines(layout, true, include_zero_baseline)) {
    const int iu = grid.index_of(b.dx / lambda);
    const int iv = grid.index_of(b.dy / lambda);
    if (!grid.contains(iu) || !grid.contains(iv))
      throw GridOverflow("sampling_function: baseline (" + std::to_string(b.rx_a) + "," +
                         std::to_string(b.rx_b) + ") maps to bin (" + std::to_string(iu) + "," +
                         std::to_string(iv) + ") outside half extent " +
                         std::to_string(grid.half_extent));
    ++s.at(iu, iv);
  }
  return s;
}

// Bin-wise multiplicity sum of per-wavelength sampling functions.
inline SamplingFunction additive_sampling(const std::vector<SamplingFunction>& parts) {
  if (parts.empty()) throw InvalidArgument("additive_sampling: empty parts list");
  SamplingFunction out;
  out.grid = parts.front().grid;
  out.occupancy = ArrayXXi::Zero(out.grid.size(), out.grid.size());
  out.wavelength_m = std::nullopt;
  for (const SamplingFunction& p : parts) {
    if (p.grid != out.grid)
      throw IncompatibleGrid("additive_sampling: parts use different u-v grids");
    out.occupancy += p.occupancy;
  }
  return out;
}

inline long unique_sample_count(const SamplingFunction& s) {
  return (s.occupancy >= 1).count();
}

// Histogram of occupancy values over occupied bins. Sum of
// multiplicity * bin-count equals the number of binned baselines.
inline std::map<int, long> redundancy_histogram(const SamplingFunction& s) {
  std::map<int, long> hist;
  for (Eigen::Index j = 0; j < s.occupancy.cols(); ++j)
    for (Eigen::Index i = 0; i < s.occupancy.rows(); ++i)
      if (s.occupancy(i, j) >= 1) ++hist[s.occupancy(i, j)];
  return hist;
}

// Smallest grid (with `guard` spare bins) containing every baseline of
// `layout` at the highest frequency of `subbands`.
inline UVGrid uv_grid_for(const ArrayLayout& layout, const SubbandSet& subbands,
                          double bin_size = 0.5, int guard = 2) {
  subbands.require_valid();
  const double lambda_min = wavelength(subbands.carrier_frequencies_hz.back());
  double dmax = 0.0;
  for (const Baseline& b : enumerate_baselines(layout))
    dmax = std::max(dmax, std::hypot(b.dx, b.dy));
  UVGrid g;
  g.bin_size = bin_size;
  g.half_extent = g.index_of(dmax / lambda_min) + guard;
  g.require_valid();
  return g;
}

}  // namespace aim
