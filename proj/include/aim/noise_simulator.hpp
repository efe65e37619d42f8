#pragma once

#include <cstdint>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "aim/array_geometry.hpp"
#include "aim/scene_model.hpp"
#include "aim/visibility.hpp"

namespace aim {

// Time-domain physics oracle: independent band-limited noise transmitters,
// point-scatterer reflection, reception with exact path-length carrier
// phases, and pairwise cross-correlation that converges to the forward
// visibility of the projected scene.
//
// Narrowband model: envelope delays are applied per transmitter-scatterer
// path with band-limited fractional-delay interpolation; the per-receiver
// geometric deltas (aperture << coherence length) enter as carrier phase
// exp(+j 2 pi f_c tau) only, matching the +j forward transform convention.
// Radiometry: unit average power per transmitter, no propagation loss, and
// `reflectivity` scales received power, so a scatterer contributes
// n_tx * reflectivity to every pair correlation magnitude.

struct NoiseConfig {
  int n_transmitters = 4;
  double bandwidth_hz = 50e6;
  double carrier_hz = 38e9;
  double duration_s = 1e-3;
  double sample_rate_hz = 100e6;  // default per the reference system (100 MS/s)
  std::uint64_t seed = 1;

  long sample_count() const { return std::lround(duration_s * sample_rate_hz); }

  void require_valid() const {
    if (n_transmitters < 1) throw InvalidArgument("NoiseConfig: need at least one transmitter");
    if (!(bandwidth_hz > 0.0) || !(carrier_hz > 0.0) || !(sample_rate_hz > 0.0))
      throw InvalidArgument("NoiseConfig: bandwidth, carrier and sample rate must be > 0");
    if (sample_rate_hz < 2.0 * bandwidth_hz)
      throw InvalidArgument("NoiseConfig: sample rate must be at least twice the bandwidth");
    if (sample_count() < 2) throw InvalidArgument("NoiseConfig: capture must span >= 2 samples");
  }
};

// Multichannel complex baseband capture, one row per receiver.
struct SignalCapture {
  Eigen::MatrixXcd channels;  // n_receivers x n_samples
  NoiseConfig config;
  std::string layout_label;
};

// Pairwise correlation estimates, values(a, b) = <ch_a conj(ch_b)>.
struct VisibilityEstimate {
  Eigen::MatrixXcd values;
  double integration_time_s = 0.0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t block) {
  std::uint64_t s = seed;
  s ^= 0xA24BAED4963EE407ULL + splitmix64(stream);
  std::uint64_t t = s + 0x9E3779B97F4A7C15ULL * (block + 1);
  return splitmix64(t);
}

// Uniform draw in (0, 1].
inline double uniform_pos(std::uint64_t& state) {
  return (static_cast<double>(splitmix64(state) >> 11) + 1.0) * 0x1p-53;
}

// One standard complex Gaussian via Box-Muller (independent re/im, var 1/2 each
// scaled by caller).
inline std::complex<double> gaussian_pair(std::uint64_t& state) {
  const double u1 = uniform_pos(state);
  const double u2 = uniform_pos(state);
  const double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
}

inline constexpr int kNoiseBlock = 4096;  // samples per independent synthesis block

// Band-limited unit-power complex Gaussian noise, synthesized per block in
// the frequency domain from a fixed (seed, stream, block) substream, so any
// prefix of a stream is independent of the requested length and blocks can
// be generated in any partitioning.
inline Eigen::VectorXcd noise_series(double bandwidth_hz, double sample_rate_hz,
                                     std::uint64_t seed, std::uint64_t stream, long n) {
  const int L = kNoiseBlock;
  std::vector<int> occupied;
  occupied.reserve(L);
  for (int k = 0; k < L; ++k) {
    const double f = (k <= L / 2 ? k : k - L) * sample_rate_hz / L;
    if (std::abs(f) <= bandwidth_hz / 2.0 + 1e-9) occupied.push_back(k);
  }
  const double amp = L / std::sqrt(2.0 * static_cast<double>(occupied.size()));
  Eigen::VectorXcd out(n);
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spec(L), block(L);
  const long blocks = (n + L - 1) / L;
  for (long b = 0; b < blocks; ++b) {
    std::uint64_t state = mix_seed(seed, stream, static_cast<std::uint64_t>(b));
    std::fill(spec.begin(), spec.end(), std::complex<double>(0.0, 0.0));
    for (int k : occupied) spec[k] = amp * gaussian_pair(state);
    fft.inv(block, spec);
    const long base = b * L;
    const long take = std::min<long>(L, n - base);
    for (long i = 0; i < take; ++i) out(base + i) = block[i];
  }
  return out;
}

// Windowed-sinc fractional-delay taps for y[i] = x(i - D) using
// x[i - floor(D) + h], h in [-half, half]. Exact pass-through at integer D.
inline std::vector<double> fractional_delay_taps(double mu, int half_width) {
  std::vector<double> taps(2 * half_width + 1);
  double sum = 0.0;
  for (int h = -half_width; h <= half_width; ++h) {
    const double t = mu + h;
    double sinc = t == 0.0 ? 1.0 : std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    const double x = t / (half_width + 1.0);
    const double window = std::abs(x) < 1.0 ? std::cos(0.5 * std::numbers::pi * x) *
                                                  std::cos(0.5 * std::numbers::pi * x)
                                            : 0.0;
    taps[h + half_width] = sinc * window;
    sum += taps[h + half_width];
  }
  for (double& c : taps) c /= sum;
  return taps;
}

inline constexpr int kDelayHalfWidth = 16;

// y[0..n) = x(offset_in_pad + i - D), band-limited interpolation into the
// padded source series.
inline Eigen::VectorXcd delayed_series(const Eigen::VectorXcd& padded, long pad_offset,
                                       double delay_samples, long n) {
  const long di = static_cast<long>(std::floor(delay_samples));
  const double mu = delay_samples - static_cast<double>(di);
  const std::vector<double> taps = fractional_delay_taps(mu, kDelayHalfWidth);
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  for (int h = -kDelayHalfWidth; h <= kDelayHalfWidth; ++h) {
    const long start = pad_offset - di + h;
    y += taps[h + kDelayHalfWidth] * padded.segment(start, n);
  }
  return y;
}

inline constexpr std::uint64_t kStreamTransmitter = 0x1000000;
inline constexpr std::uint64_t kStreamReceiverNoise = 0x2000000;
inline constexpr std::uint64_t kStreamBeaconNoise = 0x3000000;

}  // namespace detail

// Independent unit-power band-limited transmitter waveforms, reproducible
// from the seed; distinct transmitters use decorrelated substreams.
inline std::vector<Eigen::VectorXcd> generate_noise(const NoiseConfig& config) {
  config.require_valid();
  std::vector<Eigen::VectorXcd> out;
  out.reserve(config.n_transmitters);
  for (int t = 0; t < config.n_transmitters; ++t)
    out.push_back(detail::noise_series(config.bandwidth_hz, config.sample_rate_hz, config.seed,
                                       detail::kStreamTransmitter + t, config.sample_count()));
  return out;
}

// Receiver channels for a scatterer scene under noise illumination:
// ch_q = sum over (tx, scatterer) of sqrt(rho) n_tx(t - D) exp(+j2pi f_c tau)
// plus white receiver noise at `snr_db` (per-channel signal power over noise
// power; -inf turns the signal off, +inf the noise).
inline SignalCapture simulate_capture(const ArrayLayout& layout, const ScattererScene& scene,
                                      const NoiseConfig& config, double snr_db,
                                      const std::vector<double>& reflectivity_scale = {}) {
  config.require_valid();
  validate_layout(layout);
  if (layout.transmitters.empty())
    throw ConfigError("simulate_capture: layout has no transmitters");
  if (static_cast<int>(layout.transmitters.size()) != config.n_transmitters)
    throw ConfigError("simulate_capture: layout transmitter count disagrees with config");
  if (scene.scatterers.empty())
    throw InvalidArgument("simulate_capture: scene has no scatterers");
  if (!reflectivity_scale.empty() && reflectivity_scale.size() != scene.scatterers.size())
    throw InvalidArgument("simulate_capture: reflectivity_scale size mismatch");
  for (const Scatterer& s : scene.scatterers)
    if (!(s.z > 0.0))
      throw InvalidArgument("simulate_capture: scatterer lies behind the array plane");

  const int n_rx = static_cast<int>(layout.receivers.size());
  const int n_tx = static_cast<int>(layout.transmitters.size());
  const int n_sc = static_cast<int>(scene.scatterers.size());
  const long n = config.sample_count();
  const bool signal_off = std::isinf(snr_db) && snr_db < 0.0;
  const bool noise_off = std::isinf(snr_db) && snr_db > 0.0;

  SignalCapture cap;
  cap.config = config;
  cap.layout_label = layout.label;
  cap.channels = Eigen::MatrixXcd::Zero(n_rx, n);

  if (!signal_off) {
    // Coarse envelope delays per (tx, scatterer): transmitter -> scatterer ->
    // array origin, relative to the earliest arrival.
    Eigen::MatrixXd path(n_tx, n_sc);
    for (int t = 0; t < n_tx; ++t)
      for (int s = 0; s < n_sc; ++s) {
        const Scatterer& sc = scene.scatterers[s];
        const Vec3 p(sc.x, sc.y, sc.z);
        const Vec3 tx(layout.transmitters[t].x(), layout.transmitters[t].y(), 0.0);
        path(t, s) = (p - tx).norm() + p.norm();
      }
    const double path_min = path.minCoeff();
    Eigen::MatrixXd delay = (path.array() - path_min) / kSpeedOfLight * config.sample_rate_hz;
    const long max_di = static_cast<long>(std::ceil(delay.maxCoeff()));
    const long pad_offset = max_di + detail::kDelayHalfWidth + 1;
    const long n_pad = n + pad_offset + detail::kDelayHalfWidth + 1;

    Eigen::MatrixXcd delayed(n_tx * n_sc, n);
    for (int t = 0; t < n_tx; ++t) {
      const Eigen::VectorXcd padded =
          detail::noise_series(config.bandwidth_hz, config.sample_rate_hz, config.seed,
                               detail::kStreamTransmitter + t, n_pad);
      for (int s = 0; s < n_sc; ++s)
        delayed.row(t * n_sc + s) =
            detail::delayed_series(padded, pad_offset, delay(t, s), n).transpose();
    }

    // Carrier phase over the exact transmitter -> scatterer -> receiver path.
    Eigen::MatrixXcd coeff(n_rx, n_tx * n_sc);
    for (int q = 0; q < n_rx; ++q) {
      const Vec3 rx(layout.receivers[q].x(), layout.receivers[q].y(), 0.0);
      for (int t = 0; t < n_tx; ++t)
        for (int s = 0; s < n_sc; ++s) {
          const Scatterer& sc = scene.scatterers[s];
          const Vec3 p(sc.x, sc.y, sc.z);
          const Vec3 tx(layout.transmitters[t].x(), layout.transmitters[t].y(), 0.0);
          const double tau = ((p - tx).norm() + (p - rx).norm()) / kSpeedOfLight;
          const double rho =
              sc.reflectivity * (reflectivity_scale.empty() ? 1.0 : reflectivity_scale[s]);
          const double ph = 2.0 * std::numbers::pi * config.carrier_hz * tau;
          coeff(q, t * n_sc + s) =
              std::sqrt(rho) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
    }
    cap.channels = coeff * delayed;
  }

  if (!noise_off) {
    for (int q = 0; q < n_rx; ++q) {
      double sigma2 = 1.0;
      if (!signal_off) {
        const double p_signal = cap.channels.row(q).squaredNorm() / static_cast<double>(n);
        sigma2 = p_signal * std::pow(10.0, -snr_db / 10.0);
      }
      if (sigma2 <= 0.0) continue;
      const Eigen::VectorXcd w =
          detail::noise_series(config.sample_rate_hz, config.sample_rate_hz, config.seed,
                               detail::kStreamReceiverNoise + q, n);
      cap.channels.row(q) += std::sqrt(sigma2) * w.transpose();
    }
  }
  return cap;
}

// Time-averaged pairwise products <ch_a conj(ch_b)>; the conjugate mirror is
// written explicitly so estimate(b,a) == conj(estimate(a,b)) holds exactly.
inline VisibilityEstimate correlate_capture(const SignalCapture& capture) {
  const long n = capture.channels.cols();
  const int m = static_cast<int>(capture.channels.rows());
  if (m < 2) throw InvalidArgument("correlate_capture: need at least 2 channels");
  if (n < 1) throw DegenerateInput("correlate_capture: zero-length capture");
  VisibilityEstimate est;
  est.integration_time_s = n / capture.config.sample_rate_hz;
  est.values = Eigen::MatrixXcd::Zero(m, m);
  for (int a = 0; a < m; ++a) {
    est.values(a, a) = capture.channels.row(a).squaredNorm() / static_cast<double>(n);
    for (int b = a + 1; b < m; ++b) {
      const std::complex<double> v =
          (capture.channels.row(a).array() * capture.channels.row(b).array().conjugate())
              .sum() /
          static_cast<double>(n);
      est.values(a, b) = v;
      est.values(b, a) = std::conj(v);
    }
  }
  return est;
}

// Deposit each directed pair estimate at its (Dx/lambda, Dy/lambda) bin;
// estimates colliding in one bin are averaged. Self pairs (zero baseline)
// are not binned.
inline VisibilityGrid<double> estimate_to_grid(const VisibilityEstimate& est,
                                               const ArrayLayout& layout, double frequency_hz,
                                               const UVGrid& grid) {
  grid.require_valid();
  const int n_rx = static_cast<int>(layout.receivers.size());
  if (est.values.rows() != n_rx || est.values.cols() != n_rx)
    throw DimensionMismatch("estimate_to_grid: estimate size does not match layout");
  if (!(frequency_hz > 0.0)) throw InvalidArgument("estimate_to_grid: frequency must be > 0");
  const double lambda = wavelength(frequency_hz);
  VisibilityGrid<double> out;
  out.grid = grid;
  out.kind = VisibilityKind::sampled;
  out.values = ArrayXXc<double>::Zero(grid.size(), grid.size());
  out.support = ArrayXXi::Zero(grid.size(), grid.size());
  ArrayXXi hits = ArrayXXi::Zero(grid.size(), grid.size());
  for (int a = 0; a < n_rx; ++a)
    for (int b = 0; b < n_rx; ++b) {
      if (a == b) continue;
      const Vec2 d = layout.receivers[b] - layout.receivers[a];
      const int iu = grid.index_of(d.x() / lambda);
      const int iv = grid.index_of(d.y() / lambda);
      if (!grid.contains(iu) || !grid.contains(iv))
        throw GridOverflow("estimate_to_grid: pair (" + std::to_string(a) + "," +
                           std::to_string(b) + ") maps outside the grid");
      out.values(iu + grid.half_extent, iv + grid.half_extent) += est.values(a, b);
      ++hits(iu + grid.half_extent, iv + grid.half_extent);
    }
  for (Eigen::Index j = 0; j < hits.cols(); ++j)
    for (Eigen::Index i = 0; i < hits.rows(); ++i)
      if (hits(i, j) > 0) {
        out.values(i, j) /= static_cast<double>(hits(i, j));
        out.support(i, j) = 1;
      }
  return out;
}

}  // namespace aim
