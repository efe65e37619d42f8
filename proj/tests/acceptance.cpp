// Acceptance suite: runs every release criterion at its pinned tolerance and
// prints one PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <vector>

#include "aim/experiment.hpp"
#include "oracles.hpp"

using namespace aim;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Check {
  int id;
  std::string name;
  double time_limit_s;  // 0 = none
  std::function<Outcome()> run;
};

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// greedy local-maxima extraction with an exclusion radius (cells)
std::vector<std::pair<int, int>> top_peaks(const ArrayXX<double>& img, int count,
                                           int exclusion) {
  ArrayXX<double> work = img;
  std::vector<std::pair<int, int>> peaks;
  for (int k = 0; k < count; ++k) {
    Eigen::Index pi, pj;
    work.maxCoeff(&pi, &pj);
    peaks.emplace_back(static_cast<int>(pi), static_cast<int>(pj));
    for (Eigen::Index i = std::max<Eigen::Index>(0, pi - exclusion);
         i <= std::min<Eigen::Index>(work.rows() - 1, pi + exclusion); ++i)
      for (Eigen::Index j = std::max<Eigen::Index>(0, pj - exclusion);
           j <= std::min<Eigen::Index>(work.cols() - 1, pj + exclusion); ++j)
        work(i, j) = 0.0;
  }
  return peaks;
}

Outcome check_sampling_counts() {
  const ExperimentSpec spec = default_spec();
  const UVGrid grid = spec.uv_grid();
  const double published[4] = {289.0, 289.0, 281.0, 289.0};
  const double freqs[4] = {37e9, 38e9, 39e9, 40e9};
  std::vector<SamplingFunction> parts;
  Outcome out;
  std::string counts;
  double mean = 0.0;
  for (int k = 0; k < 4; ++k) {
    parts.push_back(sampling_function(spec.layout, freqs[k], grid));
    const double n = static_cast<double>(unique_sample_count(parts.back()));
    mean += n / 4.0;
    counts += fmt("%s%.0f", k ? "/" : "", n);
    if (std::abs(n - published[k]) > 0.02 * published[k]) {
      out.pass = false;
      out.detail += fmt("%g GHz count %.0f outside +-2%% of %g; ", freqs[k] / 1e9, n,
                        published[k]);
    }
  }
  const double added = static_cast<double>(unique_sample_count(additive_sampling(parts)));
  if (std::abs(added - 935.0) > 0.02 * 935.0) {
    out.pass = false;
    out.detail += fmt("additive count %.0f outside +-2%% of 935; ", added);
  }
  const double ratio = added / mean;
  if (std::abs(ratio - 3.24) > 0.05) {
    out.pass = false;
    out.detail += fmt("ratio %.4f outside 3.24+-0.05; ", ratio);
  }
  out.detail += fmt("counts %s additive %.0f ratio %.4f vs published 289/289/281/289, 935, 3.24",
                    counts.c_str(), added, ratio);
  return out;
}

Outcome check_weight_cardinality() {
  const ExperimentSpec spec = default_spec();
  long total = 0;
  std::uint64_t band = 0;
  for (double f : spec.subbands.carrier_frequencies_hz) {
    NoiseConfig cfg;
    cfg.n_transmitters = 4;
    cfg.carrier_hz = f;
    cfg.duration_s = spec.calibration.duration_s;
    cfg.seed = detail::mix_seed(spec.seed, 0xBEA, band++);
    const auto cap = simulate_beacon_capture(spec.layout, spec.calibration.beacon, cfg,
                                             Eigen::VectorXcd::Ones(24), 25.0);
    const WeightSet ws = solve_weights(cap, spec.layout, spec.calibration.beacon, f);
    total += ws.weights.size();
  }
  return {total == 96, fmt("4 subbands x 24 receivers -> %ld weights (need exactly 96)", total)};
}

Outcome check_round_trip() {
  const UVGrid uv{0.5, 64};  // 129 bins per axis, matched to a 129x129 raster
  const DirectionGrid g = matched_direction_grid(uv);
  const double scale = uv.bin_size * uv.bin_size;
  struct Scene {
    const char* name;
    IntensityGrid<double> img;
  };
  const std::vector<Scene> scenes = {
      {"blob", scene_smooth_blob(g, 0.0, 0.0, 0.15)},
      {"fractal", scene_fractal_squares(g, 3)},
      {"squares", scene_linear_squares(g, 4)},
      {"composite", scene_composite(g)},
  };
  Outcome out;
  double worst = 0.0;
  for (const auto& s : scenes) {
    const auto rec = reconstruct(visibility_of(s.img, uv), g);
    const double err = oracles::rel_rms((rec.values * scale).eval(), s.img.values);
    worst = std::max(worst, err);
    if (err > 1e-6) {
      out.pass = false;
      out.detail += fmt("%s err %.3g > 1e-6; ", s.name, err);
    }
  }
  out.detail += fmt("worst relative RMS %.3g (limit 1e-6, 129x129 matched grids)", worst);
  return out;
}

Outcome check_oracle_equivalence() {
  const ExperimentSpec spec = default_spec();
  const UVGrid uv = spec.uv_grid();
  const DirectionGrid g{32, 32, 0.15, 0.15};
  const auto scene = scene_composite(g);
  const auto full = visibility_of(scene, uv);
  std::vector<SamplingFunction> parts;
  std::vector<VisibilityGrid<double>> sampled;
  for (double f : spec.subbands.carrier_frequencies_hz) {
    parts.push_back(sampling_function(spec.layout, f, uv));
    sampled.push_back(sample_visibility(full, parts.back()));
  }
  sampled.push_back(additive_visibility(sampled, false));
  sampled.back().support = (additive_sampling(parts).occupancy >= 1).cast<int>();
  Outcome out;
  double worst = 0.0;
  for (const auto& vs : sampled) {
    const auto fast = reconstruct(vs, g, ReconstructionPath::fast);
    const auto brute = oracles::brute_reconstruct(vs, g);
    worst = std::max(worst, oracles::rel_rms(fast.complex_values, brute));
  }
  out.pass = worst <= 1e-8;
  out.detail = fmt("worst relative error %.3g across 5 sampling functions (limit 1e-8)", worst);
  return out;
}

Outcome check_convolution_identity() {
  const ArrayLayout layout = default_spec().layout;
  const SubbandSet low{{8e9}, 50e6};
  const UVGrid uv = uv_grid_for(layout, low);
  const DirectionGrid g{32, 32, 1.0, 1.0};  // full alpha period of the 0.5 bin grid
  const auto scene = scene_fractal_squares(g, 2);
  const SamplingFunction s = sampling_function(layout, 8e9, uv);
  const auto chain = reconstruct(sample_visibility(visibility_of(scene, uv), s), g);
  const auto kernel = psf(s, g);
  const auto conv =
      oracles::circular_convolution(scene.values, kernel.psf.complex_values, g.cell_area());
  const double err = oracles::rel_rms(chain.complex_values, conv);
  return {err <= 1e-8, fmt("chain vs scene*PSF relative error %.3g (limit 1e-8, 32x32)", err)};
}

Outcome check_radiometric_convergence() {
  const ExperimentSpec spec = default_spec();
  ScattererScene scene;
  scene.range_m = 1e4;
  scene.scatterers = {{0.02 * 1e4, -0.01 * 1e4, 1e4, 0.0, 1.0}};
  const int n_rx = 24;
  const double lambda = wavelength(38e9);
  Eigen::MatrixXcd oracle(n_rx, n_rx);
  for (int a = 0; a < n_rx; ++a)
    for (int b = 0; b < n_rx; ++b) {
      const Scatterer& sc = scene.scatterers[0];
      const double range = std::sqrt(sc.x * sc.x + sc.y * sc.y + sc.z * sc.z);
      const double u = (spec.layout.receivers[b].x() - spec.layout.receivers[a].x()) / lambda;
      const double v = (spec.layout.receivers[b].y() - spec.layout.receivers[a].y()) / lambda;
      oracle(a, b) = 4.0 * std::polar(1.0, 2.0 * std::numbers::pi *
                                               (u * sc.x / range + v * sc.y / range));
    }
  auto err_at = [&](double duration, std::uint64_t seed) {
    NoiseConfig cfg;
    cfg.n_transmitters = 4;
    cfg.bandwidth_hz = 50e6;
    cfg.carrier_hz = 38e9;
    cfg.duration_s = duration;
    cfg.seed = seed;
    const auto est = correlate_capture(
        simulate_capture(spec.layout, scene, cfg, std::numeric_limits<double>::infinity()));
    double num = 0.0, den = 0.0;
    for (int a = 0; a < n_rx; ++a)
      for (int b = 0; b < n_rx; ++b) {
        if (a == b) continue;
        num += std::norm(est.values(a, b) - oracle(a, b));
        den += std::norm(oracle(a, b));
      }
    return std::sqrt(num / den);
  };
  double e1 = 0.0, e2 = 0.0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    e1 += std::pow(err_at(1e-4, 900 + s), 2.0);
    e2 += std::pow(err_at(2e-4, 900 + s), 2.0);
  }
  const double ratio = std::sqrt(e1 / e2);
  const bool pass = ratio >= std::numbers::sqrt2 * 0.8 && ratio <= std::numbers::sqrt2 * 1.2;
  return {pass, fmt("error ratio %.3f for T -> 2T over %d seeds (need sqrt(2) +- 20%%)", ratio,
                    seeds)};
}

Outcome check_table_direction() {
  const ExperimentSpec spec = default_table_spec();
  const UVGrid grid = spec.uv_grid();
  Outcome out;
  for (const SceneSpec& scene_spec : builtin_scene_suite()) {
    const auto scene = scene_spec.build(spec.direction_grid);
    const ImprovementReport r = evaluate_scene(scene, spec.layout, spec.subbands, grid);
    out.detail += fmt("%s %+0.2f%% ", scene_spec.label.c_str(), r.percent_increase);
    if (r.percent_increase <= 0.0) out.pass = false;
    if (scene_spec.type == SceneSpec::Type::squares && r.percent_increase < 10.0)
      out.pass = false;
  }
  out.detail += "(all > 0, broad-spectrum squares >= 10%)";
  return out;
}

Outcome check_psf_sidelobe() {
  const ExperimentSpec spec = default_spec();
  const UVGrid grid = spec.uv_grid();
  std::vector<SamplingFunction> parts;
  double mean = 0.0;
  for (double f : spec.subbands.carrier_frequencies_hz) {
    parts.push_back(sampling_function(spec.layout, f, grid));
    mean += psf(parts.back(), spec.direction_grid).peak_sidelobe_db / 4.0;
  }
  const double added = psf(additive_sampling(parts), spec.direction_grid).peak_sidelobe_db;
  return {added < mean,
          fmt("additive peak sidelobe %.2f dB vs single-subband mean %.2f dB", added, mean)};
}

Outcome check_calibration_recovery() {
  const ExperimentSpec spec = default_spec();
  const UVGrid grid = spec.uv_grid();
  const DirectionGrid g{96, 96, 0.4, 0.4};
  const double f = 38e9;
  const double snr_db = 20.0;

  auto chain = [&](const Eigen::VectorXcd& gains, const WeightSet* ws, std::uint64_t seed) {
    NoiseConfig cfg;
    cfg.n_transmitters = 4;
    cfg.carrier_hz = f;
    cfg.duration_s = 2e-4;
    cfg.seed = seed;
    const auto cap =
        simulate_beacon_capture(spec.layout, spec.calibration.beacon, cfg, gains, snr_db);
    VisibilityEstimate est = correlate_capture(cap);
    if (ws) est = apply_weights(est, *ws);
    const auto img = reconstruct(estimate_to_grid(est, spec.layout, f, grid), g);
    Eigen::Index pi, pj;
    img.values.maxCoeff(&pi, &pj);
    return std::tuple{static_cast<int>(pi), static_cast<int>(pj),
                      lobe_statistics(img).peak_sidelobe_db};
  };

  const auto [ideal_i, ideal_j, ideal_sl] = chain(Eigen::VectorXcd::Ones(24), nullptr, 7000);
  Outcome out;
  double worst_delta = 0.0;
  for (int s = 0; s < 10; ++s) {
    Eigen::VectorXcd gains(24);
    std::uint64_t state = 5000 + s;
    for (int q = 0; q < 24; ++q) {
      const double mag = 0.5 + 1.5 * detail::uniform_pos(state);
      gains(q) = std::polar(mag, 2.0 * std::numbers::pi * detail::uniform_pos(state));
    }
    NoiseConfig cal_cfg;
    cal_cfg.n_transmitters = 4;
    cal_cfg.carrier_hz = f;
    cal_cfg.duration_s = 2e-4;
    cal_cfg.seed = 6000 + s;
    const auto cal_cap =
        simulate_beacon_capture(spec.layout, spec.calibration.beacon, cal_cfg, gains, snr_db);
    const WeightSet ws = solve_weights(cal_cap, spec.layout, spec.calibration.beacon, f);
    const auto [ci, cj, csl] = chain(gains, &ws, 7100 + s);
    worst_delta = std::max(worst_delta, std::abs(csl - ideal_sl));
    if (ci != ideal_i || cj != ideal_j) {
      out.pass = false;
      out.detail += fmt("seed %d peak moved to (%d,%d); ", s, ci, cj);
    }
  }
  if (worst_delta > 1.0) out.pass = false;
  out.detail += fmt("peak pinned at (%d,%d), worst sidelobe delta %.2f dB over 10 seeds "
                    "(limit 1 dB, SNR 20 dB)",
                    ideal_i, ideal_j, worst_delta);
  return out;
}

Outcome check_four_sphere_localization() {
  ExperimentSpec spec = default_spec();
  spec.direction_grid = DirectionGrid{128, 128, 0.2, 0.2};
  const UVGrid grid = spec.uv_grid();
  // four 10 cm spheres, 15 cm pitch, L formation, 1.5 m standoff
  ScattererScene scene;
  scene.range_m = 1.5;
  const double p = 0.15;
  scene.scatterers = {{-p, -p / 2, 1.5, 0.05, 1.0},
                      {0.0, -p / 2, 1.5, 0.05, 1.0},
                      {p, -p / 2, 1.5, 0.05, 1.0},
                      {-p, p / 2, 1.5, 0.05, 1.0}};
  std::vector<std::pair<double, double>> expected;
  for (const auto& sc : scene.scatterers) {
    const double r = std::sqrt(sc.x * sc.x + sc.y * sc.y + sc.z * sc.z);
    expected.emplace_back(sc.x / r, sc.y / r);
  }

  // one resolution cell = -3 dB main lobe width of the additive PSF
  std::vector<SamplingFunction> parts;
  for (double f : spec.subbands.carrier_frequencies_hz)
    parts.push_back(sampling_function(spec.layout, f, grid));
  const double cell =
      psf(additive_sampling(parts), spec.direction_grid).main_lobe_width;

  Outcome out;
  double worst = 0.0;
  for (int s = 0; s < 5; ++s) {
    std::vector<VisibilityGrid<double>> bands;
    std::uint64_t band = 0;
    for (double f : spec.subbands.carrier_frequencies_hz) {
      NoiseConfig cfg;
      cfg.n_transmitters = 4;
      cfg.bandwidth_hz = 50e6;
      cfg.carrier_hz = f;
      cfg.duration_s = 5e-4;
      cfg.seed = detail::mix_seed(8000 + s, 0x51C, band++);
      bands.push_back(estimate_to_grid(
          correlate_capture(simulate_capture(spec.layout, scene, cfg, 20.0)), spec.layout, f,
          grid));
    }
    const auto img = reconstruct(additive_visibility(bands, true), spec.direction_grid);
    const int exclusion =
        static_cast<int>(0.04 / spec.direction_grid.alpha_step());  // half sphere pitch
    const auto peaks = top_peaks(img.values, 4, exclusion);
    for (const auto& [ea, eb] : expected) {
      double best = 1e9;
      for (const auto& [pi, pj] : peaks)
        best = std::min(best, std::hypot(spec.direction_grid.alpha(pi) - ea,
                                         spec.direction_grid.beta(pj) - eb));
      worst = std::max(worst, best);
      if (best > cell) {
        out.pass = false;
        out.detail += fmt("seed %d: sphere at (%.3f,%.3f) missed by %.4f; ", s, ea, eb, best);
      }
    }
  }
  out.detail += fmt("worst peak offset %.4f vs resolution cell %.4f over 5 seeds", worst, cell);
  return out;
}

}  // namespace

int main() {
  std::vector<Check> checks = {
      {1, "sampling-function counts", 1.0, check_sampling_counts},
      {2, "calibration weight cardinality", 10.0, check_weight_cardinality},
      {3, "full-visibility round trip", 5.0, check_round_trip},
      {4, "fast path vs double-sum oracle", 30.0, check_oracle_equivalence},
      {5, "convolution identity", 0.0, check_convolution_identity},
      {6, "radiometric convergence", 120.0, check_radiometric_convergence},
      {7, "additive SSIM improvement", 300.0, check_table_direction},
      {8, "additive PSF sidelobe", 0.0, check_psf_sidelobe},
      {9, "calibration recovery", 0.0, check_calibration_recovery},
      {10, "four-sphere localization", 0.0, check_four_sphere_localization},
  };

  int failures = 0;
  for (const auto& check : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check.run();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (check.time_limit_s > 0.0 && seconds > check.time_limit_s) {
      outcome.pass = false;
      outcome.detail += fmt(" [exceeded %.0fs runtime limit]", check.time_limit_s);
    }
    std::printf("[%s] C%d %s: %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", check.id,
                check.name.c_str(), outcome.detail.c_str(), seconds);
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures)
    std::printf("%d of %zu criteria failed\n", failures, checks.size());
  else
    std::printf("all %zu criteria passed\n", checks.size());
  return failures == 0 ? 0 : 1;
}
