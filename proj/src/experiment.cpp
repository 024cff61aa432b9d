#include "phaseless/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"
#include "phaseless/error.hpp"
#include "phaseless/io.hpp"
#include "phaseless/recon.hpp"
#include "phaseless/retrieval.hpp"

namespace phaseless {

namespace fs = std::filesystem;

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::Full: return "full";
    case RunMode::RetrievalOnly: return "retrieval-only";
    case RunMode::ReconstructionOnly: return "reconstruction-only";
  }
  return "full";
}

RunMode parse_run_mode(std::string_view s) {
  if (s == "full") return RunMode::Full;
  if (s == "retrieval-only") return RunMode::RetrievalOnly;
  if (s == "reconstruction-only") return RunMode::ReconstructionOnly;
  throw ConfigError("unknown mode '" + std::string(s) + "' (full | retrieval-only | reconstruction-only)");
}

namespace {

std::string to_string(GridOutput g) {
  switch (g) {
    case GridOutput::None: return "none";
    case GridOutput::FirstSeed: return "first-seed";
    case GridOutput::All: return "all";
  }
  return "first-seed";
}

GridOutput parse_grid_output(std::string_view s) {
  if (s == "none") return GridOutput::None;
  if (s == "first-seed") return GridOutput::FirstSeed;
  if (s == "all") return GridOutput::All;
  throw ConfigError("unknown grids value '" + std::string(s) + "' (none | first-seed | all)");
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> list_items(std::string_view v) {
  std::string s(v);
  for (char& c : s)
    if (c == ',') c = ' ';
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

int parse_int(std::string_view key, const std::string& v) {
  const double d = parse_double(v);
  if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(std::string(key) + ": expected an integer");
  return int(d);
}

bool parse_bool(std::string_view key, const std::string& v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false");
}

std::vector<std::uint64_t> parse_seeds(const std::string& v) {
  std::vector<std::uint64_t> out;
  for (const auto& item : list_items(v)) {
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const auto lo = std::stoull(item.substr(0, dots));
      const auto hi = std::stoull(item.substr(dots + 2));
      if (hi < lo) throw ConfigError("seeds: empty range " + item);
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      out.push_back(std::stoull(item));
    }
  }
  return out;
}

}  // namespace

Dimension ExperimentConfig::dimension() const {
  if (m != 0) return to_dimension(m);
  if (source == "S1" || source == "S2") return Dimension::Two;
  if (source == "S3" || source == "S4") return Dimension::Three;
  if (source == "grid") return read_sampled_grid(grid_file).m;
  throw ConfigError("unknown source '" + source + "'");
}

void ExperimentConfig::validate() const {
  if (source != "S1" && source != "S2" && source != "S3" && source != "S4" && source != "grid") {
    throw ConfigError("source must be one of S1, S2, S3, S4, grid");
  }
  if (source == "grid" && grid_file.empty()) throw ConfigError("source = grid needs grid_file");
  if (m != 0) {
    to_dimension(m);
    const bool two = source == "S1" || source == "S2";
    const bool three = source == "S3" || source == "S4";
    if ((two && m != 2) || (three && m != 3)) throw ConfigError("m does not match the built-in source");
  }
  if (!(a > 0)) throw ConfigError("a must be positive");
  if (!(lambda > 0) || !(lambda < 1)) throw ConfigError("lambda must lie in (0, 1)");
  if (N < 0) throw ConfigError("N must be positive or auto");
  if (eps.empty()) throw ConfigError("eps list is empty");
  for (double e : eps) {
    if (!(e >= 0) || !(e < 1)) throw ConfigError("every eps must lie in [0, 1)");
    if (e == 0 && N == 0) throw ConfigError("eps = 0 requires an explicit N");
  }
  if (seeds.empty()) throw ConfigError("seeds list is empty");
  if (quad_nodes != 0 && quad_nodes < 16) throw ConfigError("quad_nodes must be >= 16");
  if (boundary_nodes < 64) throw ConfigError("boundary_nodes must be >= 64");
  if (grid_resolution != 0 && grid_resolution < 2) throw ConfigError("grid_resolution must be >= 2");
  if (window_lo > window_hi) throw ConfigError("window lower bound exceeds upper bound");
  if (mode == RunMode::ReconstructionOnly && phased_input.empty()) {
    throw ConfigError("reconstruction-only mode needs phased_input");
  }
  if (out.empty()) throw ConfigError("out directory is empty");
}

int ExperimentConfig::truncation(double eps_value) const {
  return N > 0 ? N : truncation_from_noise(eps_value);
}

QuadratureSpec ExperimentConfig::quadrature() const {
  QuadratureSpec q = source == "S3" ? QuadratureSpec::defaults(SourceField::builtin(SourceKind::S3, a))
                                     : QuadratureSpec::defaults(dimension());
  if (quad_nodes) q.nodes_per_axis = quad_nodes;
  q.boundary_nodes = boundary_nodes;
  return q;
}

SourceField ExperimentConfig::make_source() const {
  if (source == "grid") {
    SampledGrid g = read_sampled_grid(grid_file);
    if (m != 0 && to_dimension(m) != g.m) throw ConfigError("grid file dimension does not match m");
    if (std::abs(g.a - a) > 1e-12 * a) throw ConfigError("grid file side length does not match a");
    return SourceField::sampled(std::move(g));
  }
  return SourceField::builtin(source, a);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream is{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    try {
      if (key == "source") c.source = val;
      else if (key == "grid_file") c.grid_file = val;
      else if (key == "m") c.m = parse_int(key, val);
      else if (key == "a") c.a = parse_double(val);
      else if (key == "lambda") c.lambda = parse_double(val);
      else if (key == "N") c.N = val == "auto" ? 0 : parse_int(key, val);
      else if (key == "eps") {
        c.eps.clear();
        for (const auto& item : list_items(val)) c.eps.push_back(parse_double(item));
      } else if (key == "seeds") c.seeds = parse_seeds(val);
      else if (key == "quad_nodes") c.quad_nodes = val == "auto" ? 0 : parse_int(key, val);
      else if (key == "boundary_nodes") c.boundary_nodes = parse_int(key, val);
      else if (key == "grid_resolution") c.grid_resolution = val == "auto" ? 0 : parse_int(key, val);
      else if (key == "window") {
        if (val == "domain") {
          c.window_lo = c.window_hi = 0;
        } else {
          const auto items = list_items(val);
          if (items.size() != 2) throw ConfigError("window: expected 'lo, hi' or 'domain'");
          c.window_lo = parse_double(items[0]);
          c.window_hi = parse_double(items[1]);
        }
      } else if (key == "out") c.out = val;
      else if (key == "keep_exact") c.keep_exact = parse_bool(key, val);
      else if (key == "mode") c.mode = parse_run_mode(val);
      else if (key == "grids") c.grids = parse_grid_output(val);
      else if (key == "phased_input") c.phased_input = val;
      else if (key == "noise_channels") c.noise_channels = parse_noise_channels(val);
      else throw ConfigError("unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::logic_error&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for " + key);
    }
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string to_text(const ExperimentConfig& c, bool include_out) {
  std::ostringstream os;
  auto join = [](const auto& v, auto fmt) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
    return s;
  };
  os << "source = " << c.source << '\n';
  if (!c.grid_file.empty()) os << "grid_file = " << c.grid_file.string() << '\n';
  os << "m = " << c.m << "  # 0: implied by the source\n";
  os << "a = " << format_double(c.a) << "  # side length of D (length units)\n";
  os << "lambda = " << format_double(c.lambda) << "  # k* = 2 pi lambda / a\n";
  os << "N = " << (c.N ? std::to_string(c.N) : std::string("auto")) << "  # truncation |l|_inf <= N\n";
  os << "eps = " << join(c.eps, [](double e) { return format_double(e); }) << "  # relative noise levels\n";
  os << "seeds = " << join(c.seeds, [](std::uint64_t s) { return std::to_string(s); }) << '\n';
  os << "quad_nodes = " << (c.quad_nodes ? std::to_string(c.quad_nodes) : std::string("auto"))
     << "  # Gauss-Legendre nodes per axis\n";
  os << "boundary_nodes = " << c.boundary_nodes << "  # trapezoid nodes per boundary curve\n";
  os << "grid_resolution = " << (c.grid_resolution ? std::to_string(c.grid_resolution) : std::string("auto"))
     << "  # evaluation nodes per axis\n";
  if (c.window_lo == c.window_hi) {
    os << "window = domain\n";
  } else {
    os << "window = " << format_double(c.window_lo) << ", " << format_double(c.window_hi)
       << "  # evaluation window per axis (length units)\n";
  }
  if (include_out) os << "out = " << c.out.string() << '\n';
  os << "noise_channels = " << to_string(c.noise_channels) << "  # all | modulus-only\n";
  os << "keep_exact = " << (c.keep_exact ? "true" : "false") << '\n';
  os << "mode = " << to_string(c.mode) << '\n';
  os << "grids = " << to_string(c.grids) << '\n';
  if (!c.phased_input.empty()) os << "phased_input = " << c.phased_input.string() << '\n';
  return os.str();
}

double stability_ratio(const FrequencyLattice& lat, std::span<const Complex> retrieved,
                       std::span<const Complex> exact) {
  if (retrieved.size() != lat.size() || exact.size() != lat.size()) {
    throw DomainError("stability_ratio: data size does not match lattice");
  }
  std::map<std::int64_t, std::pair<double, double>> groups;  // key -> (max diff, max exact)
  for (std::size_t i = 0; i < lat.size(); ++i) {
    auto& g = groups[lat.points[i].wavenumber_key()];
    g.first = std::max(g.first, std::abs(retrieved[i] - exact[i]));
    g.second = std::max(g.second, std::abs(exact[i]));
  }
  double worst = 0;
  for (const auto& [key, g] : groups) {
    if (g.second > 0) worst = std::max(worst, g.first / g.second);
  }
  return worst;
}

namespace {

Aggregate aggregate(const std::vector<double>& v) {
  Aggregate a;
  if (v.empty()) return a;
  a.min = *std::min_element(v.begin(), v.end());
  a.max = *std::max_element(v.begin(), v.end());
  double s = 0;
  for (double x : v) s += x;
  a.mean = s / double(v.size());
  return a;
}

std::string run_dir_name(double eps, std::uint64_t seed) {
  return "eps" + format_double(eps) + "_seed" + std::to_string(seed);
}

EvaluationGrid evaluation_grid(const ExperimentConfig& c, Dimension m) {
  const int res = c.grid_resolution ? c.grid_resolution : (m == Dimension::Two ? 201 : 101);
  if (c.window_lo == c.window_hi) return EvaluationGrid::over_domain(m, c.a, res);
  return EvaluationGrid{res, c.window_lo, c.window_hi, m};
}

std::string percent(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << 100.0 * v << '%';
  return os.str();
}

void write_reports(const fs::path& path, const std::vector<RunRecord>& records, const std::string& hash) {
  std::ofstream os(path, std::ios::binary);
  os << "# manifest_sha256=" << hash << '\n';
  os << "eps,seed,N,farfield_rel_l2,farfield_rel_linf,farfield_count,stability_ratio,source_rel_l2,"
        "source_rel_linf,source_count\n";
  for (const auto& r : records) {
    os << format_double(r.eps) << ',' << r.seed << ',' << r.N << ',' << format_double(r.farfield.rel_l2) << ','
       << format_double(r.farfield.rel_linf) << ',' << r.farfield.count << ',' << format_double(r.stability_ratio)
       << ',';
    if (r.has_source_error) {
      os << format_double(r.source.rel_l2) << ',' << format_double(r.source.rel_linf) << ',' << r.source.count;
    } else {
      os << ",,";
    }
    os << '\n';
  }
}

void write_summary(const fs::path& dir, const ExperimentConfig& c, const std::vector<SummaryRow>& rows,
                   const std::string& hash) {
  {
    std::ofstream os(dir / "summary.csv", std::ios::binary);
    os << "# manifest_sha256=" << hash << '\n';
    os << "eps,N,seeds,farfield_l2_mean,farfield_l2_min,farfield_l2_max,farfield_linf_mean,farfield_linf_min,"
          "farfield_linf_max,source_l2_mean,source_l2_min,source_l2_max,source_linf_mean,source_linf_min,"
          "source_linf_max,stability_ratio_max,stability_bound\n";
    for (const auto& r : rows) {
      os << format_double(r.eps) << ',' << r.N << ',' << r.seeds;
      for (const Aggregate* a : {&r.farfield_l2, &r.farfield_linf}) {
        os << ',' << format_double(a->mean) << ',' << format_double(a->min) << ',' << format_double(a->max);
      }
      for (const Aggregate* a : {&r.source_l2, &r.source_linf}) {
        if (r.has_source_error) {
          os << ',' << format_double(a->mean) << ',' << format_double(a->min) << ',' << format_double(a->max);
        } else {
          os << ",,,";
        }
      }
      os << ',' << format_double(r.stability_ratio.max) << ',' << format_double(r.stability_bound) << '\n';
    }
  }
  std::ofstream os(dir / "summary.txt", std::ios::binary);
  os << "# manifest_sha256=" << hash << '\n';
  os << "source " << c.source << ", mean over seeds (min - max)\n\n";
  os << std::left << std::setw(16) << "";
  for (const auto& r : rows) os << std::setw(30) << ("eps=" + percent(r.eps) + " N=" + std::to_string(r.N));
  os << '\n';
  auto line = [&](const std::string& label, auto pick, bool source) {
    os << std::setw(16) << label;
    for (const auto& r : rows) {
      if (source && !r.has_source_error) {
        os << std::setw(30) << "-";
        continue;
      }
      const Aggregate& a = pick(r);
      os << std::setw(30) << (percent(a.mean) + " (" + percent(a.min) + " - " + percent(a.max) + ")");
    }
    os << '\n';
  };
  line("far-field L2", [](const SummaryRow& r) -> const Aggregate& { return r.farfield_l2; }, false);
  line("far-field Linf", [](const SummaryRow& r) -> const Aggregate& { return r.farfield_linf; }, false);
  line("source L2", [](const SummaryRow& r) -> const Aggregate& { return r.source_l2; }, true);
  line("source Linf", [](const SummaryRow& r) -> const Aggregate& { return r.source_linf; }, true);
}

}  // namespace

RunSummary run_experiment(const ExperimentConfig& config) {
  config.validate();
  const Dimension m = config.dimension();
  const SourceField source = config.make_source();
  const QuadratureSpec quad = config.quadrature();

  RunSummary summary;
  summary.directory = config.out;
  // The output location is not part of the experiment: two directories produced from the
  // same settings carry the same hash and identical bytes.
  const std::string canonical = to_text(config, false);
  summary.manifest_sha256 = sha256_hex(canonical);
  const std::string& hash = summary.manifest_sha256;
  fs::create_directories(config.out);
  {
    std::ofstream os(config.out / "config.txt", std::ios::binary);
    os << canonical;
  }

  const EvaluationGrid grid = evaluation_grid(config, m);
  std::vector<double> exact_grid;
  if (config.mode != RunMode::RetrievalOnly) {
    exact_grid = sample_on_grid([&source](const Vec& x) { return source(x); }, grid);
    if (config.grids != GridOutput::None) write_grid(config.out / "source_exact.csv", GridValues{grid, exact_grid, 0}, hash);
  }

  if (config.mode == RunMode::ReconstructionOnly) {
    const RetrievedField rf = read_retrieved(config.phased_input);
    const FourierModel model = fourier_model(rf);
    const fs::path dir = config.out / "reconstruction";
    write_model(dir / "model.csv", model, hash);
    const GridValues gv = evaluate_model(model, grid);
    if (config.grids != GridOutput::None) write_grid(dir / "grid.csv", gv, hash);
    RunRecord rec;
    rec.eps = rf.noise_eps;
    rec.seed = rf.seed;
    rec.N = rf.lattice.N;
    rec.has_source_error = true;
    rec.source = relative_errors(gv.values, exact_grid);
    summary.records.push_back(rec);
  } else {
    std::map<int, std::pair<FrequencyLattice, std::vector<Complex>>> exact_by_N;
    for (double eps : config.eps) {
      const int N = config.truncation(eps);
      auto it = exact_by_N.find(N);
      if (it == exact_by_N.end()) {
        FrequencyLattice lat = build_lattice(m, N, config.a, config.lambda);
        std::vector<Complex> u = farfield_lattice(source, lat, quad);
        it = exact_by_N.emplace(N, std::make_pair(std::move(lat), std::move(u))).first;
      }
      const FrequencyLattice& lat = it->second.first;
      const std::vector<Complex>& exact = it->second.second;

      for (std::size_t si = 0; si < config.seeds.size(); ++si) {
        const std::uint64_t seed = config.seeds[si];
        const fs::path dir = config.out / run_dir_name(eps, seed);
        MeasurementSet ms = measure(exact, lat, eps, seed, config.keep_exact, config.noise_channels);
        ms.quad_nodes = quad.nodes_per_axis;
        write_measurements(dir / "measurements.csv", ms, hash);
        const RetrievedField rf = retrieve_all(ms);
        write_retrieved(dir / "retrieved.csv", rf, hash);

        RunRecord rec;
        rec.eps = eps;
        rec.seed = seed;
        rec.N = N;
        const std::vector<Complex> u = rf.values();
        rec.farfield = relative_errors(u, exact);
        rec.stability_ratio = stability_ratio(lat, u, exact);

        if (config.mode == RunMode::Full) {
          const FourierModel model = fourier_model(rf);
          write_model(dir / "model.csv", model, hash);
          const GridValues gv = evaluate_model(model, grid);
          rec.has_source_error = true;
          rec.source = relative_errors(gv.values, exact_grid);
          if (config.grids == GridOutput::All || (config.grids == GridOutput::FirstSeed && si == 0)) {
            write_grid(dir / "grid.csv", gv, hash);
          }
        }
        summary.records.push_back(rec);
      }
    }
  }

  // Aggregate per noise level, in configuration order.
  std::vector<double> levels;
  for (const auto& r : summary.records) {
    if (std::find(levels.begin(), levels.end(), r.eps) == levels.end()) levels.push_back(r.eps);
  }
  for (double eps : levels) {
    SummaryRow row;
    row.eps = eps;
    std::vector<double> fl2, flinf, sl2, slinf, ratio;
    for (const auto& r : summary.records) {
      if (r.eps != eps) continue;
      row.N = r.N;
      ++row.seeds;
      fl2.push_back(r.farfield.rel_l2);
      flinf.push_back(r.farfield.rel_linf);
      ratio.push_back(r.stability_ratio);
      if (r.has_source_error) {
        row.has_source_error = true;
        sl2.push_back(r.source.rel_l2);
        slinf.push_back(r.source.rel_linf);
      }
    }
    row.farfield_l2 = aggregate(fl2);
    row.farfield_linf = aggregate(flinf);
    row.source_l2 = aggregate(sl2);
    row.source_linf = aggregate(slinf);
    row.stability_ratio = aggregate(ratio);
    row.stability_bound = eps > 0 ? stability_constant(eps) : 0.0;
    summary.rows.push_back(row);
  }

  write_reports(config.out / "reports.csv", summary.records, hash);
  write_summary(config.out, config, summary.rows, hash);

  std::vector<std::string> outputs;
  for (const auto& entry : fs::recursive_directory_iterator(config.out)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.json") {
      outputs.push_back(fs::relative(entry.path(), config.out).generic_string());
    }
  }
  std::sort(outputs.begin(), outputs.end());
  nlohmann::json manifest{{"manifest_sha256", hash}, {"config_text", canonical}, {"outputs", outputs}};
  std::ofstream os(config.out / "manifest.json", std::ios::binary);
  os << manifest.dump(2) << '\n';
  return summary;
}

}  // namespace phaseless
