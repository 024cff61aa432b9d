// Command-line driver: synth, retrieve, reconstruct, run, verify.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phaseless/error.hpp"
#include "phaseless/experiment.hpp"
#include "phaseless/io.hpp"
#include "phaseless/metrics.hpp"
#include "phaseless/recon.hpp"
#include "phaseless/retrieval.hpp"

namespace fs = std::filesystem;
using namespace phaseless;

namespace {

// Flags mirroring ExperimentConfig; unset flags leave the config untouched.
struct ConfigFlags {
  std::optional<std::string> source, grid_file, mode, grids, phased_input, out, noise_channels;
  std::optional<int> m, N, quad_nodes, boundary_nodes, grid_resolution;
  std::optional<double> a, lambda;
  std::vector<double> eps;
  std::vector<std::uint64_t> seeds;
  std::vector<double> window;
  bool keep_exact = false;

  void add_to(CLI::App* app, bool experiment) {
    app->add_option("--source", source, "S1, S2, S3, S4 or grid");
    app->add_option("--grid-file", grid_file, "sampled-grid source CSV (with --source grid)");
    app->add_option("--m", m, "dimension (2 or 3)");
    app->add_option("--a", a, "side length of D");
    app->add_option("--lambda", lambda, "low-frequency parameter, k* = 2 pi lambda / a");
    app->add_option("--N", N, "truncation |l|_inf <= N (default: from eps)");
    app->add_option("--quad-nodes", quad_nodes, "Gauss-Legendre nodes per axis");
    app->add_option("--boundary-nodes", boundary_nodes, "trapezoid nodes per boundary curve");
    app->add_option("--noise-channels", noise_channels, "all | modulus-only");
    app->add_flag("--keep-exact", keep_exact, "retain oracle far-field values in measurement files");
    if (experiment) {
      app->add_option("--eps", eps, "noise levels");
      app->add_option("--seeds", seeds, "seeds");
      app->add_option("--grid-resolution", grid_resolution, "evaluation nodes per axis");
      app->add_option("--window", window, "evaluation window lo hi")->expected(2);
      app->add_option("--mode", mode, "full | retrieval-only | reconstruction-only");
      app->add_option("--grids", grids, "none | first-seed | all");
      app->add_option("--phased-input", phased_input, "retrieved-field CSV for reconstruction-only");
      app->add_option("--out", out, "output directory");
    }
  }

  void apply(ExperimentConfig& c) const {
    if (source) c.source = *source;
    if (grid_file) c.grid_file = *grid_file;
    if (m) c.m = *m;
    if (a) c.a = *a;
    if (lambda) c.lambda = *lambda;
    if (N) c.N = *N;
    if (quad_nodes) c.quad_nodes = *quad_nodes;
    if (boundary_nodes) c.boundary_nodes = *boundary_nodes;
    if (grid_resolution) c.grid_resolution = *grid_resolution;
    if (!eps.empty()) c.eps = eps;
    if (!seeds.empty()) c.seeds = seeds;
    if (window.size() == 2) {
      c.window_lo = window[0];
      c.window_hi = window[1];
    }
    if (mode) c.mode = parse_run_mode(*mode);
    if (grids) {
      ExperimentConfig tmp = parse_config("grids = " + *grids);
      c.grids = tmp.grids;
    }
    if (phased_input) c.phased_input = *phased_input;
    if (out) c.out = *out;
    if (keep_exact) c.keep_exact = true;
    if (noise_channels) c.noise_channels = parse_noise_channels(*noise_channels);
  }
};

void print_report(const std::string& label, const ErrorReport& e) {
  std::cout << label << ": rel L2 = " << e.rel_l2 << ", rel Linf = " << e.rel_linf << " over " << e.count
            << " values\n";
}

int cmd_synth(const ConfigFlags& flags, double eps, std::uint64_t seed, const fs::path& out) {
  ExperimentConfig c;
  flags.apply(c);
  c.eps = {eps};
  c.seeds = {seed};
  c.validate();
  const SourceField s = c.make_source();
  const FrequencyLattice lat = build_lattice(c.dimension(), c.truncation(eps), c.a, c.lambda);
  QuadratureReport qr;
  const std::vector<Complex> u = farfield_lattice(s, lat, c.quadrature(), &qr);
  MeasurementSet ms = measure(u, lat, eps, seed, c.keep_exact, c.noise_channels);
  ms.quad_nodes = c.quadrature().nodes_per_axis;
  write_measurements(out / "measurements.csv", ms);
  std::cout << "wrote " << (out / "measurements.csv").string() << " (" << lat.size()
            << " lattice points, quadrature node-doubling error " << qr.relative_error << ")\n";
  return 0;
}

int cmd_retrieve(const fs::path& in, const fs::path& out) {
  const MeasurementSet ms = read_measurements(in);
  const RetrievedField rf = retrieve_all(ms);
  write_retrieved(out / "retrieved.csv", rf);
  std::cout << "wrote " << (out / "retrieved.csv").string() << '\n';
  if (!ms.exact_u.empty()) {
    const std::vector<Complex> u = rf.values();
    print_report("far field vs oracle", relative_errors(u, ms.exact_u));
    if (ms.noise_eps > 0) {
      std::cout << "stability ratio " << stability_ratio(ms.lattice, u, ms.exact_u) << " <= C_eps "
                << stability_constant(ms.noise_eps) << '\n';
    }
  }
  return 0;
}

int cmd_reconstruct(const fs::path& in, const fs::path& out, int resolution, const std::vector<double>& window,
                    const std::optional<std::string>& source) {
  const RetrievedField rf = read_retrieved(in);
  const FourierModel model = fourier_model(rf);
  write_model(out / "model.csv", model);
  const int res = resolution ? resolution : (rf.lattice.m == Dimension::Two ? 201 : 101);
  EvaluationGrid grid = EvaluationGrid::over_domain(rf.lattice.m, rf.lattice.a, res);
  if (window.size() == 2) {
    grid.lo = window[0];
    grid.hi = window[1];
  }
  const GridValues gv = evaluate_model(model, grid);
  write_grid(out / "grid.csv", gv);
  std::cout << "wrote " << (out / "model.csv").string() << " and " << (out / "grid.csv").string()
            << " (imaginary residual " << gv.max_imag_relative << ")\n";
  if (source) {
    const SourceField s = SourceField::builtin(*source, rf.lattice.a);
    const auto exact = sample_on_grid([&s](const Vec& x) { return s(x); }, grid);
    print_report("source vs " + *source, relative_errors(gv.values, exact));
  }
  return 0;
}

int cmd_run(const std::optional<std::string>& config_path, const ConfigFlags& flags) {
  ExperimentConfig c = config_path ? load_config(*config_path) : ExperimentConfig{};
  flags.apply(c);
  const RunSummary s = run_experiment(c);
  std::cout << "run directory " << s.directory.string() << " (manifest " << s.manifest_sha256.substr(0, 12)
            << ")\n";
  for (const auto& row : s.rows) {
    std::cout << "eps " << row.eps << " N " << row.N << " seeds " << row.seeds << ": far-field L2 mean "
              << row.farfield_l2.mean << ", Linf mean " << row.farfield_linf.mean;
    if (row.has_source_error) std::cout << ", source L2 mean " << row.source_l2.mean;
    if (row.eps > 0) std::cout << ", stability " << row.stability_ratio.max << " <= " << row.stability_bound;
    std::cout << '\n';
  }
  return 0;
}

int cmd_verify(const VerifyOptions& opts) {
  const VerifyReport rep = verify_suite(opts);
  for (const auto& c : rep.checks) {
    std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << " -- " << c.detail << '\n';
  }
  const bool ok = rep.all_passed();
  std::cout << (ok ? "all checks passed\n" : "some checks failed\n");
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Source reconstruction from multi-frequency phaseless far-field data"};
  app.require_subcommand(1);

  ConfigFlags synth_flags;
  double synth_eps = 0;
  std::uint64_t synth_seed = 0;
  std::string synth_out = ".";
  auto* synth = app.add_subcommand("synth", "synthesize phaseless measurements for a source");
  synth_flags.add_to(synth, false);
  synth->add_option("--eps", synth_eps, "noise level");
  synth->add_option("--seed", synth_seed, "noise seed");
  synth->add_option("--out", synth_out, "output directory");

  std::string retrieve_in, retrieve_out = ".";
  auto* retrieve = app.add_subcommand("retrieve", "recover phased far-field values from measurements");
  retrieve->add_option("--in", retrieve_in, "measurements CSV")->required();
  retrieve->add_option("--out", retrieve_out, "output directory");

  std::string recon_in, recon_out = ".";
  int recon_res = 0;
  std::vector<double> recon_window;
  std::optional<std::string> recon_source;
  auto* recon = app.add_subcommand("reconstruct", "Fourier reconstruction from a retrieved far field");
  recon->add_option("--in", recon_in, "retrieved-field CSV")->required();
  recon->add_option("--out", recon_out, "output directory");
  recon->add_option("--grid-resolution", recon_res, "evaluation nodes per axis");
  recon->add_option("--window", recon_window, "evaluation window lo hi")->expected(2);
  recon->add_option("--source", recon_source, "built-in source to compare against");

  std::optional<std::string> run_config;
  ConfigFlags run_flags;
  auto* run = app.add_subcommand("run", "end-to-end experiment over noise levels and seeds");
  run->add_option("--config", run_config, "configuration file");
  run_flags.add_to(run, true);

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "run the invariant checks");
  verify->add_option("--fault-alpha2", verify_opts.alpha2_perturbation, "perturb alpha2 (fault injection)");
  verify->add_option("--stability-seeds", verify_opts.stability_seeds, "seeds per noise level");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_flags, synth_eps, synth_seed, synth_out);
    if (*retrieve) return cmd_retrieve(retrieve_in, retrieve_out);
    if (*recon) return cmd_reconstruct(recon_in, recon_out, recon_res, recon_window, recon_source);
    if (*run) return cmd_run(run_config, run_flags);
    if (*verify) return cmd_verify(verify_opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
