#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "aim/io.hpp"
#include "oracles.hpp"

using namespace aim;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("aim_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("pgm round trip at both depths") {
  TempDir tmp;
  ArrayXX<double> img(3, 4);
  img << 0.0, 0.25, 0.5, 0.75, 1.0, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 0.9;

  for (int maxval : {255, 65535}) {
    const auto p = tmp.path / ("img_" + std::to_string(maxval) + ".pgm");
    write_pgm(p, img, maxval);
    const auto back = read_pgm(p);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 4);
    CHECK((back - img).abs().maxCoeff() <= 1.0 / maxval);
  }
}

TEST_CASE("plain-text P2 graymaps parse") {
  TempDir tmp;
  const auto p = tmp.path / "plain.pgm";
  {
    std::ofstream out(p);
    out << "P2\n# a comment\n2 2\n255\n0 255\n128 64\n";
  }
  const auto img = read_pgm(p);
  CHECK(img(0, 0) == 0.0);
  CHECK(img(0, 1) == 1.0);
  CHECK(img(1, 0) == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("raster scenes normalize by the file maxval") {
  TempDir tmp;
  const DirectionGrid g{8, 8, 0.5, 0.5};

  ArrayXX<double> black = ArrayXX<double>::Zero(4, 4);
  write_pgm(tmp.path / "black.pgm", black, 255);
  CHECK(scene_from_raster(tmp.path / "black.pgm", g).values.maxCoeff() == 0.0);

  // all-white: full-scale everywhere
  {
    std::ofstream out(tmp.path / "white.pgm");
    out << "P2\n4 4\n255\n";
    for (int i = 0; i < 16; ++i) out << "255\n";
  }
  const auto white = scene_from_raster(tmp.path / "white.pgm", g);
  CHECK(white.values.minCoeff() == 1.0);

  // 2x2 checkerboard resampled to a 2x2 grid stays exact
  {
    std::ofstream out(tmp.path / "checker.pgm");
    out << "P2\n2 2\n255\n255 0\n0 255\n";
  }
  const DirectionGrid g2{2, 2, 0.5, 0.5};
  const auto checker = scene_from_raster(tmp.path / "checker.pgm", g2);
  CHECK(checker.values(0, 0) == 1.0);
  CHECK(checker.values(0, 1) == 0.0);
  CHECK(checker.values(1, 0) == 0.0);
  CHECK(checker.values(1, 1) == 1.0);

  CHECK_THROWS_AS(scene_from_raster(tmp.path / "missing.pgm", g), IoError);
  {
    std::ofstream out(tmp.path / "garbage.pgm");
    out << "NOTPGM";
  }
  CHECK_THROWS_AS(scene_from_raster(tmp.path / "garbage.pgm", g), IoError);
}

TEST_CASE("layout json round trip with fixed field order") {
  TempDir tmp;
  const ArrayLayout layout =
      place_transmitters(build_circular_array(0.101, 24, 0.0), 0.3, 4);
  const auto p = tmp.path / "layout.json";
  write_layout(p, layout);
  const std::string text = slurp(p);
  CHECK(text.find("\"label\"") < text.find("\"receivers\""));
  CHECK(text.find("\"receivers\"") < text.find("\"transmitters\""));

  const ArrayLayout back = read_layout(p);
  REQUIRE(back.receivers.size() == 24);
  REQUIRE(back.transmitters.size() == 4);
  for (int i = 0; i < 24; ++i)
    CHECK((back.receivers[i] - layout.receivers[i]).norm() == 0.0);

  std::ofstream(tmp.path / "bad.json") << "{\"label\": \"x\", \"receivers\": [[0,0]]}";
  CHECK_THROWS_AS(read_layout(tmp.path / "bad.json"), InvalidArgument);
  std::ofstream(tmp.path / "nonjson.json") << "not json";
  CHECK_THROWS_AS(read_layout(tmp.path / "nonjson.json"), IoError);
}

TEST_CASE("visibility binary round trip is bit exact") {
  TempDir tmp;
  const ArrayLayout layout = build_circular_array(0.101, 24, 0.0);
  const SubbandSet bands{{37e9, 38e9, 39e9, 40e9}, 50e6};
  const UVGrid uv = uv_grid_for(layout, bands);
  const DirectionGrid g{64, 64, 0.25, 0.25};
  const auto vs = sample_visibility(visibility_of(scene_composite(g), uv),
                                    sampling_function(layout, 38e9, uv));
  const auto p = tmp.path / "vis.bin";
  write_visibility(p, vs);
  const auto back = read_visibility(p);
  CHECK(back.kind == VisibilityKind::sampled);
  CHECK(back.grid == vs.grid);
  CHECK((back.values == vs.values).all());
  CHECK((back.support == vs.support).all());

  std::ofstream(tmp.path / "bad.bin", std::ios::binary) << "WRONGMAG and junk";
  CHECK_THROWS_AS(read_visibility(tmp.path / "bad.bin"), IoError);
}

TEST_CASE("visibility csv lists occupied bins") {
  TempDir tmp;
  VisibilityGrid<double> v;
  v.grid = UVGrid{0.5, 1};
  v.kind = VisibilityKind::sampled;
  v.values = ArrayXXc<double>::Zero(3, 3);
  v.support = ArrayXXi::Zero(3, 3);
  v.at(1, 0) = {1.5, -2.5};
  v.support(2, 1) = 1;
  const auto p = tmp.path / "vis.csv";
  write_visibility_csv(p, v);
  const std::string text = slurp(p);
  CHECK(text == "u_bin,v_bin,re,im\n1,0,1.5,-2.5\n");
}

TEST_CASE("capture binary round trip at float precision") {
  TempDir tmp;
  SignalCapture cap;
  cap.config.sample_rate_hz = 100e6;
  cap.config.carrier_hz = 38e9;
  cap.config.duration_s = 8.0 / 100e6;
  cap.channels.resize(3, 8);
  std::uint64_t state = 99;
  for (int q = 0; q < 3; ++q)
    for (int i = 0; i < 8; ++i) cap.channels(q, i) = aim::detail::gaussian_pair(state);
  const auto p = tmp.path / "cap.bin";
  write_capture(p, cap);
  const auto back = read_capture(p);
  REQUIRE(back.channels.rows() == 3);
  REQUIRE(back.channels.cols() == 8);
  CHECK(back.config.sample_rate_hz == cap.config.sample_rate_hz);
  CHECK(back.config.carrier_hz == cap.config.carrier_hz);
  for (int q = 0; q < 3; ++q)
    for (int i = 0; i < 8; ++i) {
      CHECK(back.channels(q, i).real() ==
            static_cast<double>(static_cast<float>(cap.channels(q, i).real())));
      CHECK(back.channels(q, i).imag() ==
            static_cast<double>(static_cast<float>(cap.channels(q, i).imag())));
    }

  // header layout: magic + u32 + u64 + 2 doubles, then 32-bit I/Q pairs
  CHECK(std::filesystem::file_size(p) == 8 + 4 + 8 + 8 + 8 + 3 * 8 * 2 * 4);
}

TEST_CASE("weight json round trip") {
  TempDir tmp;
  WeightSet ws;
  ws.subband_hz = 39e9;
  ws.reference_index = 5;
  ws.residual = 0.01;
  ws.weights.resize(4);
  ws.weights << std::complex<double>(1, 0), std::complex<double>(0.5, -0.5),
      std::complex<double>(-1.25, 2.0), std::complex<double>(0.0, 1.0);
  const auto p = tmp.path / "w.json";
  write_json(p, weights_to_json(ws));
  std::ifstream in(p);
  const WeightSet back = weights_from_json(json::parse(in));
  CHECK(back.subband_hz == ws.subband_hz);
  CHECK(back.reference_index == 5);
  CHECK(back.weights == ws.weights);
}

TEST_CASE("report serialization") {
  ImprovementReport report;
  report.per_subband_ssim = {{37e9, 0.5}, {38e9, 0.25}};
  report.added_ssim = 0.75;
  report.percent_increase = 100.0;
  const json j = improvement_to_json(report);
  CHECK(j.at("added_ssim") == 0.75);
  CHECK(j.at("per_subband_ssim").size() == 2);
  CHECK(improvement_csv_row("blob", report) == "blob,0.5,0.25,0.75,100");

  PsfReport<double> psf_report;
  psf_report.psf.residual_imag = 1e-12;
  psf_report.main_lobe_width = 0.02;
  psf_report.peak_sidelobe_db = -std::numeric_limits<double>::infinity();
  const json pj = psf_report_to_json(psf_report);
  CHECK(pj.at("peak_sidelobe_db").is_null());  // -inf has no JSON number
  psf_report.peak_sidelobe_db = -4.5;
  CHECK(psf_report_to_json(psf_report).at("peak_sidelobe_db") == -4.5);
}
