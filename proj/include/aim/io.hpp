#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "aim/array_geometry.hpp"
#include "aim/calibration.hpp"
#include "aim/quality_metrics.hpp"

// File formats. Everything here is deterministic: fixed field order
// (nlohmann ordered_json), fixed float formatting, no timestamps.
// Binary payloads are little-endian; PGM images use the standard big-endian
// 16-bit sample order. Rasters map values(i, j) to PGM row i, column j.

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace aim {

using json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

inline std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

template <typename T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T read_raw(std::ifstream& in, const char* what) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw IoError(std::string("unexpected end of file reading ") + what);
  return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Portable graymap

// 8-bit (maxval 255) or 16-bit (maxval 65535) binary PGM of `values`
// linearly scaled so the maximum maps to maxval. All-zero images write as
// all black.
template <typename T>
void write_pgm(const std::filesystem::path& path, const ArrayXX<T>& values, int maxval = 65535) {
  if (maxval != 255 && maxval != 65535) throw InvalidArgument("write_pgm: maxval must be 255 or 65535");
  auto out = detail::open_out(path, true);
  out << "P5\n" << values.cols() << " " << values.rows() << "\n" << maxval << "\n";
  const T hi = values.maxCoeff();
  const double scale = hi > T(0) ? maxval / static_cast<double>(hi) : 0.0;
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      const long raw = std::lround(static_cast<double>(values(i, j)) * scale);
      const unsigned v = static_cast<unsigned>(std::clamp<long>(raw, 0, maxval));
      if (maxval > 255) out.put(static_cast<char>(v >> 8));
      out.put(static_cast<char>(v & 0xFF));
    }
  if (!out) throw IoError("write failed: " + path.string());
}

// P2/P5 graymap with values scaled to [0, 1] by the file's maxval.
inline ArrayXX<double> read_pgm(const std::filesystem::path& path) {
  auto in = detail::open_in(path, true);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5") throw IoError("read_pgm: not a PGM file: " + path.string());
  auto next_token = [&in, &path]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("read_pgm: truncated header: " + path.string());
  };
  const int w = std::stoi(next_token());
  const int h = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (w < 1 || h < 1 || maxval < 1 || maxval > 65535)
    throw IoError("read_pgm: invalid dimensions in " + path.string());
  ArrayXX<double> values(h, w);
  if (magic == "P2") {
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        long v;
        if (!(in >> v)) throw IoError("read_pgm: truncated pixel data: " + path.string());
        values(i, j) = static_cast<double>(v) / maxval;
      }
  } else {
    in.get();  // single whitespace after maxval
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) {
        int hi2 = maxval > 255 ? in.get() : 0;
        int lo = in.get();
        if (lo == EOF || hi2 == EOF)
          throw IoError("read_pgm: truncated pixel data: " + path.string());
        values(i, j) = static_cast<double>((hi2 << 8) | lo) / maxval;
      }
  }
  return values;
}

// Raster import resampled (nearest neighbor) onto a direction grid; pixel
// values land in [0, 1] via the file's maxval, so black stays 0 and full
// white becomes 1.
inline IntensityGrid<double> scene_from_raster(const std::filesystem::path& path,
                                               const DirectionGrid& grid) {
  grid.require_valid();
  const ArrayXX<double> raster = read_pgm(path);
  IntensityGrid<double> img;
  img.grid = grid;
  img.values.resize(grid.n_alpha, grid.n_beta);
  for (int i = 0; i < grid.n_alpha; ++i) {
    const auto si = static_cast<Eigen::Index>((i + 0.5) * raster.rows() / grid.n_alpha);
    for (int j = 0; j < grid.n_beta; ++j) {
      const auto sj = static_cast<Eigen::Index>((j + 0.5) * raster.cols() / grid.n_beta);
      img.values(i, j) = raster(si, sj);
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Layout JSON: {"label":, "receivers": [[x,y],...], "transmitters": [[x,y],...]}

inline json layout_to_json(const ArrayLayout& layout) {
  json j;
  j["label"] = layout.label;
  j["receivers"] = json::array();
  for (const auto& p : layout.receivers) j["receivers"].push_back({p.x(), p.y()});
  j["transmitters"] = json::array();
  for (const auto& p : layout.transmitters) j["transmitters"].push_back({p.x(), p.y()});
  return j;
}

inline ArrayLayout layout_from_json(const json& j) {
  ArrayLayout layout;
  layout.label = j.at("label").get<std::string>();
  for (const auto& p : j.at("receivers")) layout.receivers.emplace_back(p.at(0), p.at(1));
  if (j.contains("transmitters"))
    for (const auto& p : j.at("transmitters")) layout.transmitters.emplace_back(p.at(0), p.at(1));
  validate_layout(layout);
  return layout;
}

inline void write_layout(const std::filesystem::path& path, const ArrayLayout& layout) {
  auto out = detail::open_out(path);
  out << layout_to_json(layout).dump(2) << "\n";
}

inline ArrayLayout read_layout(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw IoError("layout '" + path.string() + "': " + e.what());
  }
  return layout_from_json(j);
}

// ---------------------------------------------------------------------------
// Sampling function: CSV triplets plus grid-metadata sidecar

inline void write_sampling_csv(const std::filesystem::path& path, const SamplingFunction& s) {
  auto out = detail::open_out(path);
  out << "u_bin_index,v_bin_index,multiplicity\n";
  const int h = s.grid.half_extent;
  for (int iu = -h; iu <= h; ++iu)
    for (int iv = -h; iv <= h; ++iv)
      if (s.at(iu, iv) > 0) out << iu << "," << iv << "," << s.at(iu, iv) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

inline json sampling_metadata(const SamplingFunction& s) {
  json j;
  j["bin_size"] = s.grid.bin_size;
  j["half_extent"] = s.grid.half_extent;
  j["wavelength_tag"] =
      s.is_additive() ? json("additive") : json(*s.wavelength_m);
  j["unique_samples"] = unique_sample_count(s);
  return j;
}

inline void write_sampling(const std::filesystem::path& csv_path,
                           const std::filesystem::path& sidecar_path,
                           const SamplingFunction& s) {
  write_sampling_csv(csv_path, s);
  auto out = detail::open_out(sidecar_path);
  out << sampling_metadata(s).dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Visibility: CSV and the AIMVIS01 binary round-trip format

template <typename T>
void write_visibility_csv(const std::filesystem::path& path, const VisibilityGrid<T>& v) {
  auto out = detail::open_out(path);
  out << "u_bin,v_bin,re,im\n";
  const int h = v.grid.half_extent;
  for (int iu = -h; iu <= h; ++iu)
    for (int iv = -h; iv <= h; ++iv) {
      const std::complex<T> c = v.at(iu, iv);
      if (c == std::complex<T>(0) && v.kind != VisibilityKind::full) continue;
      out << iu << "," << iv << "," << format_double(static_cast<double>(c.real())) << ","
          << format_double(static_cast<double>(c.imag())) << "\n";
    }
  if (!out) throw IoError("write failed: " + path.string());
}

// Layout: magic "AIMVIS01", u32 kind, u32 has_support, f64 bin_size,
// i32 half_extent, then size^2 (re, im) f64 pairs with the u index as the
// outer loop, then size^2 support bytes when present.
inline void write_visibility(const std::filesystem::path& path,
                             const VisibilityGrid<double>& v) {
  auto out = detail::open_out(path, true);
  out.write("AIMVIS01", 8);
  detail::write_raw(out, static_cast<std::uint32_t>(v.kind));
  detail::write_raw(out, static_cast<std::uint32_t>(v.support.size() > 0 ? 1 : 0));
  detail::write_raw(out, v.grid.bin_size);
  detail::write_raw(out, static_cast<std::int32_t>(v.grid.half_extent));
  const int n = v.grid.size();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      detail::write_raw(out, v.values(i, j).real());
      detail::write_raw(out, v.values(i, j).imag());
    }
  if (v.support.size() > 0)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out.put(static_cast<char>(v.support(i, j) ? 1 : 0));
  if (!out) throw IoError("write failed: " + path.string());
}

inline VisibilityGrid<double> read_visibility(const std::filesystem::path& path) {
  auto in = detail::open_in(path, true);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "AIMVIS01", 8) != 0)
    throw IoError("read_visibility: bad magic in " + path.string());
  VisibilityGrid<double> v;
  const auto kind = detail::read_raw<std::uint32_t>(in, "kind");
  if (kind > 2) throw IoError("read_visibility: unknown kind in " + path.string());
  v.kind = static_cast<VisibilityKind>(kind);
  const auto has_support = detail::read_raw<std::uint32_t>(in, "support flag");
  v.grid.bin_size = detail::read_raw<double>(in, "bin size");
  v.grid.half_extent = detail::read_raw<std::int32_t>(in, "half extent");
  v.grid.require_valid();
  const int n = v.grid.size();
  v.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double re = detail::read_raw<double>(in, "value");
      const double im = detail::read_raw<double>(in, "value");
      v.values(i, j) = {re, im};
    }
  if (has_support) {
    v.support.resize(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const int c = in.get();
        if (c == EOF) throw IoError("read_visibility: truncated support");
        v.support(i, j) = c ? 1 : 0;
      }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Capture: AIMCAP01 binary, channel-major float32 I/Q pairs

inline void write_capture(const std::filesystem::path& path, const SignalCapture& cap) {
  auto out = detail::open_out(path, true);
  out.write("AIMCAP01", 8);
  detail::write_raw(out, static_cast<std::uint32_t>(cap.channels.rows()));
  detail::write_raw(out, static_cast<std::uint64_t>(cap.channels.cols()));
  detail::write_raw(out, cap.config.sample_rate_hz);
  detail::write_raw(out, cap.config.carrier_hz);
  for (Eigen::Index q = 0; q < cap.channels.rows(); ++q)
    for (Eigen::Index i = 0; i < cap.channels.cols(); ++i) {
      detail::write_raw(out, static_cast<float>(cap.channels(q, i).real()));
      detail::write_raw(out, static_cast<float>(cap.channels(q, i).imag()));
    }
  if (!out) throw IoError("write failed: " + path.string());
}

inline SignalCapture read_capture(const std::filesystem::path& path) {
  auto in = detail::open_in(path, true);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "AIMCAP01", 8) != 0)
    throw IoError("read_capture: bad magic in " + path.string());
  SignalCapture cap;
  const auto n_ch = detail::read_raw<std::uint32_t>(in, "channel count");
  const auto n_s = detail::read_raw<std::uint64_t>(in, "sample count");
  cap.config.sample_rate_hz = detail::read_raw<double>(in, "sample rate");
  cap.config.carrier_hz = detail::read_raw<double>(in, "carrier");
  cap.config.duration_s = static_cast<double>(n_s) / cap.config.sample_rate_hz;
  cap.channels.resize(n_ch, static_cast<Eigen::Index>(n_s));
  for (std::uint32_t q = 0; q < n_ch; ++q)
    for (std::uint64_t i = 0; i < n_s; ++i) {
      const float re = detail::read_raw<float>(in, "sample");
      const float im = detail::read_raw<float>(in, "sample");
      cap.channels(q, static_cast<Eigen::Index>(i)) = {re, im};
    }
  return cap;
}

// ---------------------------------------------------------------------------
// Images, reports, weights

template <typename T>
void write_image_csv(const std::filesystem::path& path, const ArrayXX<T>& values) {
  auto out = detail::open_out(path);
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j) out << ",";
      out << format_double(static_cast<double>(values(i, j)));
    }
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path.string());
}

template <typename T>
json psf_report_to_json(const PsfReport<T>& report) {
  json j;
  j["main_lobe_width"] = report.main_lobe_width;
  if (std::isinf(report.peak_sidelobe_db))
    j["peak_sidelobe_db"] = nullptr;  // no sidelobe structure
  else
    j["peak_sidelobe_db"] = report.peak_sidelobe_db;
  j["residual_imag"] = static_cast<double>(report.psf.residual_imag);
  return j;
}

inline json weights_to_json(const WeightSet& ws) {
  json j;
  j["subband_hz"] = ws.subband_hz;
  j["reference"] = ws.reference_index;
  j["weights"] = json::array();
  for (Eigen::Index i = 0; i < ws.weights.size(); ++i)
    j["weights"].push_back({ws.weights(i).real(), ws.weights(i).imag()});
  j["residual"] = ws.residual;
  return j;
}

inline WeightSet weights_from_json(const json& j) {
  WeightSet ws;
  ws.subband_hz = j.at("subband_hz").get<double>();
  ws.reference_index = j.at("reference").get<int>();
  const auto& arr = j.at("weights");
  ws.weights.resize(static_cast<Eigen::Index>(arr.size()));
  for (Eigen::Index i = 0; i < ws.weights.size(); ++i)
    ws.weights(i) = {arr.at(i).at(0).get<double>(), arr.at(i).at(1).get<double>()};
  if (j.contains("residual")) ws.residual = j.at("residual").get<double>();
  return ws;
}

inline json improvement_to_json(const ImprovementReport& report) {
  json j;
  j["per_subband_ssim"] = json::array();
  for (const auto& [f, s] : report.per_subband_ssim) j["per_subband_ssim"].push_back({f, s});
  j["added_ssim"] = report.added_ssim;
  j["percent_increase"] = report.percent_increase;
  return j;
}

// One Table-style CSV row: label, per-frequency SSIM, Added, Increase%.
inline std::string improvement_csv_row(const std::string& label,
                                       const ImprovementReport& report) {
  std::ostringstream out;
  out << label;
  for (const auto& [f, s] : report.per_subband_ssim) {
    (void)f;
    out << "," << format_double(s);
  }
  out << "," << format_double(report.added_ssim) << ","
      << format_double(report.percent_increase);
  return out.str();
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  auto out = detail::open_out(path);
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace aim
