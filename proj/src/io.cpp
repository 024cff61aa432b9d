#include "phaseless/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "phaseless/error.hpp"

namespace phaseless {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ConfigError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error("sha256 failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

namespace {

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + p.string());
  return os;
}

void write_json(const fs::path& p, const json& j) {
  auto os = open_out(p);
  os << j.dump(2) << '\n';
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read " + p.string());
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

void write_manifest_comment(std::ostream& os, std::string_view manifest) {
  if (!manifest.empty()) os << "# manifest_sha256=" << manifest << '\n';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

// Column-addressed CSV table with '#' comments skipped.
struct Table {
  std::map<std::string, std::size_t> columns;
  std::vector<std::vector<std::string>> rows;
  fs::path path;

  bool has(const std::string& c) const { return columns.count(c) > 0; }
  double num(std::size_t row, const std::string& c) const {
    auto it = columns.find(c);
    if (it == columns.end()) throw ConfigError(path.string() + ": missing column " + c);
    if (it->second >= rows[row].size()) throw ConfigError(path.string() + ": short row " + std::to_string(row));
    return parse_double(rows[row][it->second]);
  }
};

Table read_table(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read " + p.string());
  Table t;
  t.path = p;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line, ',');
    if (!header) {
      for (std::size_t i = 0; i < cells.size(); ++i) t.columns[cells[i]] = i;
      header = true;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  if (!header) throw ConfigError(p.string() + ": no header row");
  return t;
}

std::string lattice_columns(Dimension m) {
  std::string s;
  for (int j = 1; j <= dim(m); ++j) s += "l" + std::to_string(j) + ",";
  s += "k";
  for (int j = 1; j <= dim(m); ++j) s += ",xhat" + std::to_string(j);
  return s;
}

void write_lattice_cells(std::ostream& os, const LatticePoint& p, Dimension m) {
  for (int j = 0; j < dim(m); ++j) os << p.l[j] << ',';
  os << format_double(p.k);
  for (int j = 0; j < dim(m); ++j) os << ',' << format_double(p.xhat[j]);
}

FrequencyLattice lattice_from_json(const json& j) {
  try {
    return build_lattice(to_dimension(j.at("m").get<int>()), j.at("N").get<int>(), j.at("a").get<double>(),
                         j.at("lambda").get<double>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("sidecar is missing lattice metadata: ") + e.what());
  }
}

// Rows must list the lattice indices in canonical order.
void check_rows(const Table& t, const FrequencyLattice& lat) {
  if (t.rows.size() != lat.size()) {
    throw ConfigError(t.path.string() + ": " + std::to_string(t.rows.size()) + " rows, lattice has " +
                      std::to_string(lat.size()));
  }
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (int j = 0; j < dim(lat.m); ++j) {
      const double l = t.num(r, "l" + std::to_string(j + 1));
      if (l != lat.points[r].l[j]) {
        throw ConfigError(t.path.string() + ": row " + std::to_string(r) + " is not in lattice order");
      }
    }
  }
}

json lattice_json(const FrequencyLattice& lat) {
  return json{{"N", lat.N}, {"a", lat.a}, {"m", dim(lat.m)}, {"lambda", lat.lambda}, {"points", lat.size()}};
}

}  // namespace

void write_measurements(const fs::path& csv, const MeasurementSet& ms, std::string_view manifest) {
  const bool oracle = !ms.exact_u.empty();
  auto os = open_out(csv);
  write_manifest_comment(os, manifest);
  os << lattice_columns(ms.lattice.m) << ",u_abs,v1_abs,v2_abs,alpha1,alpha2,c1,c2";
  if (oracle) os << ",exact_re,exact_im";
  os << '\n';
  for (std::size_t i = 0; i < ms.data.size(); ++i) {
    const Measurement& d = ms.data[i];
    write_lattice_cells(os, ms.lattice.points[i], ms.lattice.m);
    for (double v : {d.u_abs, d.v1_abs, d.v2_abs, d.alpha1, d.alpha2, d.c1, d.c2}) os << ',' << format_double(v);
    if (oracle) os << ',' << format_double(ms.exact_u[i].real()) << ',' << format_double(ms.exact_u[i].imag());
    os << '\n';
  }
  json j = lattice_json(ms.lattice);
  j["seed"] = ms.seed;
  j["eps"] = ms.noise_eps;
  j["quad_nodes"] = ms.quad_nodes;
  j["noise_channels"] = to_string(ms.channels);
  j["oracle"] = oracle;
  if (!manifest.empty()) j["manifest_sha256"] = std::string(manifest);
  write_json(sidecar_path(csv), j);
}

MeasurementSet read_measurements(const fs::path& csv) {
  const json meta = read_json(sidecar_path(csv));
  MeasurementSet ms;
  ms.lattice = lattice_from_json(meta);
  ms.noise_eps = meta.value("eps", 0.0);
  ms.seed = meta.value("seed", std::uint64_t{0});
  ms.quad_nodes = meta.value("quad_nodes", 0);
  ms.channels = parse_noise_channels(meta.value("noise_channels", std::string("all")));

  const Table t = read_table(csv);
  check_rows(t, ms.lattice);
  const bool oracle = t.has("exact_re") && t.has("exact_im");
  ms.data.resize(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Measurement& d = ms.data[r];
    d.u_abs = t.num(r, "u_abs");
    d.v1_abs = t.num(r, "v1_abs");
    d.v2_abs = t.num(r, "v2_abs");
    d.alpha1 = t.num(r, "alpha1");
    d.alpha2 = t.num(r, "alpha2");
    d.c1 = t.num(r, "c1");
    d.c2 = t.num(r, "c2");
    if (d.u_abs < 0 || d.v1_abs < 0 || d.v2_abs < 0) {
      throw ConfigError(csv.string() + ": negative modulus in row " + std::to_string(r));
    }
    if (oracle) ms.exact_u.emplace_back(t.num(r, "exact_re"), t.num(r, "exact_im"));
  }
  return ms;
}

void write_retrieved(const fs::path& csv, const RetrievedField& rf, std::string_view manifest) {
  auto os = open_out(csv);
  write_manifest_comment(os, manifest);
  os << lattice_columns(rf.lattice.m) << ",re_u,im_u,det_a,condition\n";
  for (std::size_t i = 0; i < rf.points.size(); ++i) {
    const RetrievedPoint& p = rf.points[i];
    write_lattice_cells(os, rf.lattice.points[i], rf.lattice.m);
    os << ',' << format_double(p.u.real()) << ',' << format_double(p.u.imag()) << ',' << format_double(p.det_a)
       << ',' << format_double(p.condition) << '\n';
  }
  json j = lattice_json(rf.lattice);
  j["seed"] = rf.seed;
  j["eps"] = rf.noise_eps;
  if (!manifest.empty()) j["manifest_sha256"] = std::string(manifest);
  write_json(sidecar_path(csv), j);
}

RetrievedField read_retrieved(const fs::path& csv) {
  const json meta = read_json(sidecar_path(csv));
  RetrievedField rf;
  rf.lattice = lattice_from_json(meta);
  rf.noise_eps = meta.value("eps", 0.0);
  rf.seed = meta.value("seed", std::uint64_t{0});
  const Table t = read_table(csv);
  check_rows(t, rf.lattice);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    RetrievedPoint p;
    p.u = Complex(t.num(r, "re_u"), t.num(r, "im_u"));
    if (t.has("det_a")) p.det_a = t.num(r, "det_a");
    if (t.has("condition")) p.condition = t.num(r, "condition");
    rf.points.push_back(p);
  }
  return rf;
}

void write_model(const fs::path& csv, const FourierModel& model, std::string_view manifest) {
  auto os = open_out(csv);
  write_manifest_comment(os, manifest);
  for (int j = 1; j <= dim(model.m); ++j) os << 'l' << j << ',';
  os << "re_s,im_s\n";
  auto row = [&](const IVec& l, Complex v) {
    for (int j = 0; j < dim(model.m); ++j) os << l[j] << ',';
    os << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
  };
  row(IVec{0, 0, 0}, model.s0);
  for (const auto& c : model.coeffs) row(c.l, c.value);
  json j{{"N", model.N}, {"a", model.a}, {"m", dim(model.m)}, {"lambda", model.lambda},
         {"coefficients", model.coeffs.size() + 1}};
  if (!manifest.empty()) j["manifest_sha256"] = std::string(manifest);
  write_json(sidecar_path(csv), j);
}

void write_grid(const fs::path& csv, const GridValues& g, std::string_view manifest) {
  auto os = open_out(csv);
  write_manifest_comment(os, manifest);
  os << "# m=" << dim(g.grid.m) << " resolution=" << g.grid.resolution << " lo=" << format_double(g.grid.lo)
     << " hi=" << format_double(g.grid.hi) << " order=row-major(first axis slowest)\n";
  const std::size_t n = std::size_t(g.grid.resolution);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    os << format_double(g.values[i]) << ((i + 1) % n == 0 ? '\n' : ',');
  }
}

SampledGrid read_sampled_grid(const fs::path& csv) {
  std::ifstream is(csv);
  if (!is) throw ConfigError("cannot read " + csv.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    lines.push_back(line);
  }
  if (lines.size() < 2) throw ConfigError(csv.string() + ": missing sampled-grid header");
  const auto names = split(lines[0], ',');
  const auto vals = split(lines[1], ',');
  if (names.size() != 3 || vals.size() != 3) throw ConfigError(csv.string() + ": header must be resolution,a,m");
  SampledGrid g;
  g.resolution = int(parse_double(vals[0]));
  g.a = parse_double(vals[1]);
  g.m = to_dimension(int(parse_double(vals[2])));
  for (std::size_t i = 2; i < lines.size(); ++i) {
    std::string s = lines[i];
    for (char& c : s)
      if (c == ',' || c == '\t') c = ' ';
    std::istringstream ls(s);
    std::string tok;
    while (ls >> tok) g.values.push_back(parse_double(tok));
  }
  return g;
}

void write_sampled_grid(const fs::path& csv, const SampledGrid& grid) {
  auto os = open_out(csv);
  os << "resolution,a,m\n" << grid.resolution << ',' << format_double(grid.a) << ',' << dim(grid.m) << '\n';
  const std::size_t n = std::size_t(grid.resolution);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    os << format_double(grid.values[i]) << ((i + 1) % n == 0 ? '\n' : ',');
  }
}

}  // namespace phaseless
