#pragma once

#include <Eigen/Eigenvalues>

#include "aim/noise_simulator.hpp"

namespace aim {

// Per-receiver complex weights for one subband; the reference element is
// pinned to exactly 1 to fix the global gain/phase ambiguity.
struct WeightSet {
  Eigen::VectorXcd weights;
  double subband_hz = 0.0;
  int reference_index = 0;
  double residual = 0.0;  // rank-1 misfit of the channel covariance, in [0, 1]
};

// Continuous-wave beacon capture: every channel holds the geometry phasor
// exp(+j 2 pi f |beacon - r_q| / c) scaled by its channel gain, plus white
// receiver noise at `snr_db`. The spherical-wavefront distance is exact, so
// near-field beacons are modeled correctly.
inline SignalCapture simulate_beacon_capture(const ArrayLayout& layout, const Vec3& beacon,
                                             const NoiseConfig& config,
                                             const Eigen::VectorXcd& gains,
                                             double snr_db = 30.0) {
  config.require_valid();
  validate_layout(layout);
  const int n_rx = static_cast<int>(layout.receivers.size());
  if (gains.size() != n_rx)
    throw DimensionMismatch("simulate_beacon_capture: gain count does not match layout");
  if (beacon.z() == 0.0)
    throw InvalidArgument("simulate_beacon_capture: beacon lies in the array plane");
  const long n = config.sample_count();
  const double lambda = wavelength(config.carrier_hz);

  SignalCapture cap;
  cap.config = config;
  cap.layout_label = layout.label;
  cap.channels.resize(n_rx, n);
  const bool noise_off = std::isinf(snr_db) && snr_db > 0.0;
  for (int q = 0; q < n_rx; ++q) {
    const Vec3 rx(layout.receivers[q].x(), layout.receivers[q].y(), 0.0);
    const double dist = (beacon - rx).norm();
    const double ph = 2.0 * std::numbers::pi * dist / lambda;
    const std::complex<double> tone =
        gains(q) * std::complex<double>(std::cos(ph), std::sin(ph));
    cap.channels.row(q).setConstant(tone);
    if (!noise_off) {
      const double sigma2 = std::norm(tone) * std::pow(10.0, -snr_db / 10.0);
      const Eigen::VectorXcd w =
          detail::noise_series(config.sample_rate_hz, config.sample_rate_hz, config.seed,
                               detail::kStreamBeaconNoise + q, n);
      cap.channels.row(q) += std::sqrt(sigma2) * w.transpose();
    }
  }
  return cap;
}

// Solve per-receiver weights from a single-point-source capture. The
// measured per-channel phasor m is the principal eigenvector of the channel
// covariance; the per-channel least-squares solution of w_i m_i = p_i is
// then w_i = p_i / m_i, normalized so the reference weight is exactly 1.
inline WeightSet solve_weights(const SignalCapture& capture, const ArrayLayout& layout,
                               const Vec3& beacon, double subband_hz,
                               int reference_index = 0) {
  const int n_rx = static_cast<int>(capture.channels.rows());
  const long n = capture.channels.cols();
  if (n_rx != static_cast<int>(layout.receivers.size()))
    throw DimensionMismatch("solve_weights: capture channel count does not match layout");
  if (reference_index < 0 || reference_index >= n_rx)
    throw InvalidArgument("solve_weights: reference index out of range");
  if (n < 2) throw DegenerateInput("solve_weights: capture too short");
  if (!(subband_hz > 0.0)) throw InvalidArgument("solve_weights: subband must be > 0");

  const Eigen::MatrixXcd cov =
      capture.channels * capture.channels.adjoint() / static_cast<double>(n);
  const double total_power = cov.trace().real();
  for (int q = 0; q < n_rx; ++q)
    if (cov(q, q).real() < 1e-12 * total_power / n_rx)
      throw UnrecoverableChannel(q, "solve_weights: channel " + std::to_string(q) +
                                        " carries no usable power");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(cov);
  const Eigen::VectorXcd m = eig.eigenvectors().col(n_rx - 1);
  const double lambda_max = eig.eigenvalues()(n_rx - 1);

  const double wl = wavelength(subband_hz);
  WeightSet ws;
  ws.subband_hz = subband_hz;
  ws.reference_index = reference_index;
  ws.residual = total_power > 0.0 ? 1.0 - lambda_max / total_power : 1.0;
  ws.weights.resize(n_rx);
  for (int q = 0; q < n_rx; ++q) {
    if (std::abs(m(q)) < 1e-12)
      throw UnrecoverableChannel(q, "solve_weights: channel " + std::to_string(q) +
                                        " has a vanishing phasor estimate");
    const Vec3 rx(layout.receivers[q].x(), layout.receivers[q].y(), 0.0);
    const double ph = 2.0 * std::numbers::pi * (beacon - rx).norm() / wl;
    const std::complex<double> ideal(std::cos(ph), std::sin(ph));
    ws.weights(q) = ideal / m(q);
  }
  ws.weights /= ws.weights(reference_index);
  ws.weights(reference_index) = std::complex<double>(1.0, 0.0);
  return ws;
}

// Channel-level application: ch_i *= w_i.
inline SignalCapture apply_weights(const SignalCapture& capture, const WeightSet& ws) {
  if (capture.channels.rows() != ws.weights.size())
    throw DimensionMismatch("apply_weights: weight count does not match channels");
  SignalCapture out = capture;
  for (int q = 0; q < ws.weights.size(); ++q) out.channels.row(q) *= ws.weights(q);
  return out;
}

// Estimate-level application: pair (a,b) picks up w_a conj(w_b).
inline VisibilityEstimate apply_weights(const VisibilityEstimate& est, const WeightSet& ws) {
  if (est.values.rows() != ws.weights.size())
    throw DimensionMismatch("apply_weights: weight count does not match estimate");
  VisibilityEstimate out = est;
  out.values = ws.weights.asDiagonal() * est.values * ws.weights.conjugate().asDiagonal();
  return out;
}

}  // namespace aim
