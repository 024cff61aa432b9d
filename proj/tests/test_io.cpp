#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"

using namespace phaseless;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phaseless_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

MeasurementSet small_set(bool oracle) {
  const SourceField s = SourceField::builtin(SourceKind::S1);
  const FrequencyLattice lat = build_lattice(Dimension::Two, 3, 1.0);
  SynthOptions o;
  o.quadrature = QuadratureSpec::defaults(Dimension::Two);
  o.eps = 0.02;
  o.seed = 12;
  o.keep_exact = oracle;
  return synthesize(s, lat, o);
}

}  // namespace

TEST_CASE("shortest round-trip doubles") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = u(rng) * std::pow(10.0, i % 40 - 20);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-4.0) == "-4");
  CHECK(parse_double(" +2.5 ") == 2.5);
  CHECK_THROWS_AS(parse_double("2.5x"), ConfigError);
  CHECK_THROWS_AS(parse_double(""), ConfigError);
}

TEST_CASE("sha256 known vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("sidecar path") { CHECK(sidecar_path("a/b/run.csv") == fs::path("a/b/run.json")); }

TEST_CASE("measurement round trip") {
  const fs::path dir = scratch("meas");
  for (bool oracle : {false, true}) {
    const MeasurementSet ms = small_set(oracle);
    write_measurements(dir / "m.csv", ms, "cafe");
    const std::string text = slurp(dir / "m.csv");
    CHECK(text.rfind("# manifest_sha256=cafe\n", 0) == 0);
    const MeasurementSet back = read_measurements(dir / "m.csv");
    CHECK(back.lattice.size() == ms.lattice.size());
    CHECK(back.lattice.kstar == ms.lattice.kstar);
    CHECK(back.noise_eps == ms.noise_eps);
    CHECK(back.seed == ms.seed);
    CHECK(back.quad_nodes == 64);
    CHECK(back.exact_u.size() == ms.exact_u.size());
    for (std::size_t i = 0; i < ms.data.size(); ++i) {
      CHECK(back.data[i].u_abs == ms.data[i].u_abs);
      CHECK(back.data[i].v2_abs == ms.data[i].v2_abs);
      CHECK(back.data[i].alpha2 == ms.data[i].alpha2);
      CHECK(back.data[i].c1 == ms.data[i].c1);
      if (oracle) CHECK(back.exact_u[i] == ms.exact_u[i]);
    }
    // writing again gives identical bytes
    write_measurements(dir / "m2.csv", back, "cafe");
    CHECK(slurp(dir / "m2.csv") == text);
  }
}

TEST_CASE("retrieved field round trip") {
  const fs::path dir = scratch("retr");
  const RetrievedField rf = retrieve_all(small_set(false));
  write_retrieved(dir / "r.csv", rf);
  const RetrievedField back = read_retrieved(dir / "r.csv");
  REQUIRE(back.points.size() == rf.points.size());
  for (std::size_t i = 0; i < rf.points.size(); ++i) {
    CHECK(back.points[i].u == rf.points[i].u);
    CHECK(back.points[i].det_a == rf.points[i].det_a);
  }
  CHECK(back.noise_eps == 0.02);
}

TEST_CASE("readers reject damaged files") {
  const fs::path dir = scratch("bad");
  const MeasurementSet ms = small_set(false);
  write_measurements(dir / "m.csv", ms);

  // rows out of lattice order
  {
    std::string text = slurp(dir / "m.csv");
    std::istringstream is(text);
    std::vector<std::string> lines;
    for (std::string l; std::getline(is, l);) lines.push_back(l);
    std::swap(lines[2], lines[3]);
    std::ofstream os(dir / "m.csv", std::ios::binary);
    for (const auto& l : lines) os << l << '\n';
  }
  CHECK_THROWS_AS(read_measurements(dir / "m.csv"), ConfigError);

  // missing row
  write_measurements(dir / "m.csv", ms);
  {
    std::string text = slurp(dir / "m.csv");
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    std::ofstream(dir / "m.csv", std::ios::binary) << text;
  }
  CHECK_THROWS_AS(read_measurements(dir / "m.csv"), ConfigError);

  // negative modulus
  MeasurementSet neg = ms;
  neg.data[3].v1_abs = -1;
  write_measurements(dir / "n.csv", neg);
  CHECK_THROWS_AS(read_measurements(dir / "n.csv"), ConfigError);

  // no sidecar, malformed sidecar
  fs::remove(dir / "n.json");
  CHECK_THROWS_AS(read_measurements(dir / "n.csv"), ConfigError);
  std::ofstream(dir / "n.json") << "{ not json";
  CHECK_THROWS_AS(read_measurements(dir / "n.csv"), ConfigError);
  CHECK_THROWS_AS(read_retrieved(dir / "absent.csv"), ConfigError);
}

TEST_CASE("model and grid writers") {
  const fs::path dir = scratch("model");
  const RetrievedField rf = retrieve_all(small_set(false));
  const FourierModel model = fourier_model(rf);
  write_model(dir / "model.csv", model, "ab");
  std::ifstream is(dir / "model.csv");
  std::string l;
  std::getline(is, l);
  CHECK(l == "# manifest_sha256=ab");
  std::getline(is, l);
  CHECK(l == "l1,l2,re_s,im_s");
  std::getline(is, l);
  CHECK(l.rfind("0,0,", 0) == 0);
  int rows = 1;
  while (std::getline(is, l)) ++rows;
  CHECK(rows == 49);
  CHECK(fs::exists(dir / "model.json"));

  const GridValues gv = evaluate_model(model, EvaluationGrid::over_domain(Dimension::Two, 1.0, 7));
  write_grid(dir / "grid.csv", gv);
  std::ifstream gs(dir / "grid.csv");
  int data_lines = 0;
  while (std::getline(gs, l)) {
    if (l[0] == '#') continue;
    ++data_lines;
    CHECK(std::count(l.begin(), l.end(), ',') == 6);
  }
  CHECK(data_lines == 7);
}

TEST_CASE("sampled grid file round trip") {
  const fs::path dir = scratch("grid");
  SampledGrid g{4, 1.5, Dimension::Two, {}};
  for (int i = 0; i < 16; ++i) g.values.push_back(0.1 * i - 0.3);
  write_sampled_grid(dir / "g.csv", g);
  const SampledGrid back = read_sampled_grid(dir / "g.csv");
  CHECK(back.resolution == 4);
  CHECK(back.a == 1.5);
  CHECK(back.m == Dimension::Two);
  CHECK(back.values == g.values);

  std::ofstream(dir / "ws.csv") << "# comment\nresolution,a,m\n2,1,2\n1 2\t3\n4\n";
  CHECK(read_sampled_grid(dir / "ws.csv").values == std::vector<double>{1, 2, 3, 4});
  std::ofstream(dir / "bad.csv") << "resolution,a\n2,1\n";
  CHECK_THROWS_AS(read_sampled_grid(dir / "bad.csv"), ConfigError);
  std::ofstream(dir / "dim.csv") << "resolution,a,m\n2,1,4\n1,2,3,4\n";
  CHECK_THROWS_AS(read_sampled_grid(dir / "dim.csv"), DomainError);
}
