#pragma once

// Forward model: far-field data by quadrature of the source integral, reference-source
// augmentation of the moduli, and multiplicative noise.

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phaseless/core.hpp"
#include "phaseless/sources.hpp"

namespace phaseless {

struct QuadratureSpec {
  // Gauss-Legendre nodes per axis on D. Sampled-grid sources use a composite rule with
  // one panel per grid cell and ceil(nodes_per_axis / cells) (at least 6) nodes per panel;
  // S3 is split at its cusp at the origin into two panels per axis.
  int nodes_per_axis = 64;
  // Trapezoid nodes per boundary curve for piecewise-constant sources.
  int boundary_nodes = 4096;
  // Bound on |I_n - I_2n| / int |S| at the validation points.
  double tolerance = 1e-10;

  static QuadratureSpec defaults(Dimension m);
  // As above, but 96 nodes for S3 (its origin cusp limits convergence).
  static QuadratureSpec defaults(const SourceField& s);
  void check() const;
};

struct QuadratureReport {
  double relative_error = 0;   // max |I_n - I_2n| / int |S|
  double reference_scale = 0;  // int_D |S|
  int nodes_per_axis = 0;
  int boundary_nodes = 0;
  std::size_t points_checked = 0;
};

// Gauss-Legendre rule on [-a/2, a/2] split into equal panels.
struct AxisRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
AxisRule gauss_legendre_axis(double a, int panels, int nodes_per_panel);

using ComplexIntegrand = std::function<Complex(const Vec&)>;

// int_D f(y) exp(-i xi.y) dy with a single-panel tensor Gauss-Legendre rule.
Complex tensor_transform(const ComplexIntegrand& f, const BoxDomain& box, const Vec& xi, int nodes_per_axis);

// int_D S(y) exp(-i xi.y) dy by the route appropriate for the source: boundary integral
// for piecewise-constant sources, tensor Gauss-Legendre otherwise.
Complex source_transform(const SourceField& s, const Vec& xi, const QuadratureSpec& q);

// u_inf(xhat, k) = -gamma_m int_D S(y) exp(-i k xhat.y) dy at one lattice point, by direct
// summation over quadrature nodes. Does not validate the rule.
Complex farfield_exact(const SourceField& s, const LatticePoint& p, const QuadratureSpec& q);

// Node-doubling check at the largest lattice wavenumber and at k*. Throws ConfigError with
// the measured error when it exceeds q.tolerance.
QuadratureReport validate_quadrature(const SourceField& s, const FrequencyLattice& lat, const QuadratureSpec& q);

// Far field over the whole lattice (validated first). Tensor rules are contracted one axis
// at a time, which is exact reassociation of the direct sum.
std::vector<Complex> farfield_lattice(const SourceField& s, const FrequencyLattice& lat, const QuadratureSpec& q,
                                      QuadratureReport* report = nullptr);

struct ReferenceOffsets {
  double alpha1 = 0.5;
  double alpha2 = 0;
};

// alpha1 = 1/2; alpha2 = 1/2 - pi/(2k), or -4 at k*. The k* branch is chosen by the caller's
// lattice flag, never by comparing wavenumbers.
ReferenceOffsets reference_offsets(double k, bool is_kstar);

// c_j = max over the lattice directions sharing a wavenumber of |u_inf| / |gamma_m|, one value
// per lattice point. Throws DegenerateDataError when some wavenumber has identically zero data.
std::vector<double> scaling_factors(std::span<const double> u_abs, const FrequencyLattice& lat);

// v_inf = u - c gamma_m exp(-i k alpha): far field with a reference source at z = alpha xhat.
Complex augmented_farfield(Complex u, double c, double k, double alpha, Dimension m);

// Multiplicative noise (1 + eps r)|.|, r ~ U[-1, 1], one draw per call.
class NoiseModel {
 public:
  NoiseModel(double eps, std::uint64_t seed);
  double perturb(double modulus);
  double eps() const { return eps_; }

 private:
  double eps_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> dist_{-1.0, 1.0};
};

std::vector<double> add_noise(std::span<const double> moduli, double eps, std::uint64_t seed);

// Which modulus channels carry noise. All: |u|, |v1| and |v2| independently. ModulusOnly:
// just |u| (the reference-augmented moduli stay exact).
enum class NoiseChannels { All, ModulusOnly };

std::string to_string(NoiseChannels channels);
NoiseChannels parse_noise_channels(std::string_view s);

struct Measurement {
  double u_abs = 0;
  double v1_abs = 0;
  double v2_abs = 0;
  double alpha1 = 0;
  double alpha2 = 0;
  double c1 = 0;
  double c2 = 0;
};

struct MeasurementSet {
  FrequencyLattice lattice;
  std::vector<Measurement> data;  // lattice order
  double noise_eps = 0;
  std::uint64_t seed = 0;
  NoiseChannels channels = NoiseChannels::All;
  int quad_nodes = 0;
  std::vector<Complex> exact_u;  // filled only in oracle mode
};

// Simulates the measurement protocol from exact far-field values: |u| is perturbed, the
// scaling factors come from the perturbed |u|, and the reference-augmented moduli are
// perturbed in turn. Draws are taken in lattice order, all |u| first, then (|v1|, |v2|)
// per point (no |v| draws under ModulusOnly).
MeasurementSet measure(std::span<const Complex> exact_u, const FrequencyLattice& lat, double eps,
                       std::uint64_t seed, bool keep_exact = false, NoiseChannels channels = NoiseChannels::All);

struct SynthOptions {
  QuadratureSpec quadrature;
  double eps = 0;
  std::uint64_t seed = 0;
  bool keep_exact = false;
  NoiseChannels channels = NoiseChannels::All;
};

MeasurementSet synthesize(const SourceField& s, const FrequencyLattice& lat, const SynthOptions& opts);

}  // namespace phaseless
