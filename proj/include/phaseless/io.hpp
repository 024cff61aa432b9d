#pragma once

// File formats: measurement sets, retrieved fields, Fourier models, evaluated grids and
// sampled-grid sources. Every CSV may start with '#' comment lines; writers put the run's
// manifest hash there.

#include <filesystem>
#include <string>
#include <string_view>

#include "phaseless/recon.hpp"
#include "phaseless/retrieval.hpp"
#include "phaseless/sources.hpp"
#include "phaseless/synth.hpp"

namespace phaseless {

// Shortest round-trip decimal representation.
std::string format_double(double v);
double parse_double(std::string_view s);

std::string sha256_hex(std::string_view data);

// The JSON sidecar of foo.csv is foo.json.
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

// Columns: l1..lm, k, xhat1..xhatm, u_abs, v1_abs, v2_abs, alpha1, alpha2, c1, c2
// [, exact_re, exact_im in oracle mode]. Sidecar: seed, eps, N, a, m, lambda, quad_nodes.
void write_measurements(const std::filesystem::path& csv, const MeasurementSet& ms, std::string_view manifest = "");
MeasurementSet read_measurements(const std::filesystem::path& csv);

// Columns: l1..lm, k, xhat1..xhatm, re_u, im_u, det_a, condition.
void write_retrieved(const std::filesystem::path& csv, const RetrievedField& rf, std::string_view manifest = "");
RetrievedField read_retrieved(const std::filesystem::path& csv);

// Columns: l1..lm, re_s, im_s; l = 0 first. Sidecar: N, a, m, lambda.
void write_model(const std::filesystem::path& csv, const FourierModel& model, std::string_view manifest = "");

// Comment header with window metadata, then resolution^(m-1) lines of `resolution` values
// (last axis fastest).
void write_grid(const std::filesystem::path& csv, const GridValues& g, std::string_view manifest = "");

// First non-comment line "resolution,a,m", second line their values, then resolution^m
// values in row-major order separated by commas or whitespace.
SampledGrid read_sampled_grid(const std::filesystem::path& csv);
void write_sampled_grid(const std::filesystem::path& csv, const SampledGrid& grid);

}  // namespace phaseless
