#pragma once

// Experiment driver: configuration, the synth -> noise -> retrieval -> reconstruction ->
// metrics pipeline over noise levels and seeds, and the invariant verification suite.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "phaseless/metrics.hpp"
#include "phaseless/sources.hpp"
#include "phaseless/synth.hpp"

namespace phaseless {

enum class RunMode { Full, RetrievalOnly, ReconstructionOnly };

std::string to_string(RunMode mode);
RunMode parse_run_mode(std::string_view s);

enum class GridOutput { None, FirstSeed, All };

struct ExperimentConfig {
  std::string source = "S1";  // S1..S4 or "grid"
  std::filesystem::path grid_file;
  int m = 0;                   // 0: implied by the source
  double a = 1.0;
  double lambda = kDefaultLambda;
  int N = 0;                   // 0: N = 2 ceil(eps^{-1/3}) per noise level
  std::vector<double> eps{0.001};
  std::vector<std::uint64_t> seeds{0};
  int quad_nodes = 0;          // 0: 64, or 96 for S3
  int boundary_nodes = 4096;
  int grid_resolution = 0;     // 0: 201 in 2D, 101 in 3D
  double window_lo = 0;        // window_lo == window_hi: the whole domain
  double window_hi = 0;
  std::filesystem::path out = "run";
  bool keep_exact = false;
  NoiseChannels noise_channels = NoiseChannels::All;
  RunMode mode = RunMode::Full;
  GridOutput grids = GridOutput::FirstSeed;
  std::filesystem::path phased_input;  // reconstruction-only input (retrieved-field CSV)

  // Throws ConfigError describing the first problem found.
  void validate() const;
  Dimension dimension() const;
  int truncation(double eps_value) const;
  QuadratureSpec quadrature() const;
  SourceField make_source() const;
};

// Flat "key = value" text, '#' starts a comment. Unknown keys are errors.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical text; parse_config(to_text(c)) reproduces c. Without `out` it is the text that
// gets hashed into the run manifest.
std::string to_text(const ExperimentConfig& c, bool include_out = true);

struct RunRecord {
  double eps = 0;
  std::uint64_t seed = 0;
  int N = 0;
  ErrorReport farfield;
  double stability_ratio = 0;  // ||u_eps - u||_inf / ||u||_inf, worst wavenumber
  bool has_source_error = false;
  ErrorReport source;
};

struct Aggregate {
  double mean = 0, min = 0, max = 0;
};

struct SummaryRow {
  double eps = 0;
  int N = 0;
  std::size_t seeds = 0;
  Aggregate farfield_l2, farfield_linf, source_l2, source_linf, stability_ratio;
  double stability_bound = 0;  // C_eps, 0 when eps = 0
  bool has_source_error = false;
};

struct RunSummary {
  std::filesystem::path directory;
  std::string manifest_sha256;
  std::vector<RunRecord> records;
  std::vector<SummaryRow> rows;
};

RunSummary run_experiment(const ExperimentConfig& config);

// Per-wavenumber worst case of ||u_eps - u||_inf / ||u||_inf over the lattice.
double stability_ratio(const FrequencyLattice& lat, std::span<const Complex> retrieved,
                       std::span<const Complex> exact);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyOptions {
  // Added to alpha2 in the determinant checks; nonzero values must make them fail.
  double alpha2_perturbation = 0;
  int stability_seeds = 10;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_passed() const;
};

VerifyReport verify_suite(const VerifyOptions& options = {});

}  // namespace phaseless
