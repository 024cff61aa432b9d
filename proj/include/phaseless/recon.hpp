#pragma once

// Fourier-method reconstruction: coefficients from phased far-field values, the
// low-frequency correction for the zeroth coefficient, and series evaluation.

#include <functional>
#include <span>
#include <vector>

#include "phaseless/core.hpp"
#include "phaseless/retrieval.hpp"

namespace phaseless {

struct FourierCoefficient {
  IVec l{};
  Complex value;
};

struct FourierModel {
  std::vector<FourierCoefficient> coeffs;  // every 1 <= |l|_inf <= N once, lattice order
  Complex s0;
  int N = 0;
  double a = 1.0;
  Dimension m = Dimension::Two;
  double lambda = kDefaultLambda;

  // s0 for l = 0; throws DomainError outside the truncation.
  Complex coefficient(const IVec& l) const;
};

// s_l = -u / (a^m gamma_m(k_l)) for l != 0.
Complex coeff_from_farfield(Complex u, double a, Dimension m, double k);

// int_D phi_l(y) conj(phi_{l0}(y)) dy = prod_j a sinc(pi (l_j - l0_j)); real on the symmetric box.
double mode_overlap(const IVec& l, const Vec& l0, double a, Dimension m);

// s0 ~ -(lambda pi / (a^m sin(lambda pi))) (u0 / gamma_m(k*) + sum_l s_l overlap(l, l0)),
// l0 = (lambda, 0, 0).
Complex coeff_zero(Complex u0, const std::vector<FourierCoefficient>& coeffs, double a, Dimension m, double lambda);

// N = 2 ceil(eps^{-1/3}); exact integer powers are not rounded up. Throws ConfigError for
// eps = 0 and DomainError outside (0, 1).
int truncation_from_noise(double eps);

// Fourier-method reconstruction from a phased far field over a lattice.
FourierModel fourier_model(const FrequencyLattice& lat, std::span<const Complex> u);
FourierModel fourier_model(const RetrievedField& rf);

// Cubic tensor grid: `resolution` nodes per axis spanning [lo, hi] inclusive.
struct EvaluationGrid {
  int resolution = 201;
  double lo = -0.5;
  double hi = 0.5;
  Dimension m = Dimension::Two;

  static EvaluationGrid over_domain(Dimension m, double a, int resolution);
  std::vector<double> axis() const;
  std::size_t size() const;
  Vec node(std::size_t flat) const;
};

struct GridValues {
  EvaluationGrid grid;
  std::vector<double> values;    // row-major, first axis slowest
  double max_imag_relative = 0;  // max |Im| / max |Re| of the discarded imaginary part
};

// Re of the truncated series at every grid node, summed one axis at a time.
GridValues evaluate_model(const FourierModel& model, const EvaluationGrid& grid);

// Direct complex sum of the truncated series at a single point.
Complex evaluate_model_at(const FourierModel& model, const Vec& x);

std::vector<double> sample_on_grid(const std::function<double(const Vec&)>& f, const EvaluationGrid& grid);

}  // namespace phaseless
