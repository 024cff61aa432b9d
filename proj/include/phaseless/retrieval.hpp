#pragma once

// Phase retrieval from three far-field moduli with two reference point sources, and the
// closed-form determinant and stability constants that go with it.

#include <array>
#include <vector>

#include "phaseless/core.hpp"
#include "phaseless/synth.hpp"

namespace phaseless {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline double det(const Mat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

// The 2x2 system  A (Re u, Im u)^T = (f1, f2)^T  and its Cramer numerators.
struct RetrievalMatrices {
  Mat2 A{};
  Mat2 AR{};
  Mat2 AI{};
  double f1 = 0;
  double f2 = 0;
  double t1 = 0;  // k * alpha1
  double t2 = 0;  // k * alpha2
};

// f = (|v|^2 - |u|^2 - c^2 |gamma_m|^2) / (2c). Throws DegenerateDataError for c <= 0.
double rhs_f(double v_abs, double u_abs, double c, Dimension m, double k);

// A, A^R, A^I with zero right-hand side; use with_rhs() to fill f.
RetrievalMatrices retrieval_matrices(double k, double alpha1, double alpha2, Dimension m);
RetrievalMatrices with_rhs(RetrievalMatrices mats, double f1, double f2);

struct RetrievedPoint {
  Complex u;
  double det_a = 0;
  double condition = 0;  // 2-norm condition number of A
};

// Re u = det A^R / det A, Im u = det A^I / det A.
RetrievedPoint retrieve_point(const LatticePoint& p, const Measurement& meas, Dimension m);

struct RetrievedField {
  FrequencyLattice lattice;
  std::vector<RetrievedPoint> points;  // lattice order
  double noise_eps = 0;
  std::uint64_t seed = 0;

  std::vector<Complex> values() const;
};

// Applies retrieve_point across the lattice; errors carry the failing lattice index.
RetrievedField retrieve_all(const MeasurementSet& ms);

// C_eps = 2 eps ((eps+3)(eps+2)^2 + 6) / (1 - eps), for 0 < eps < 1.
double stability_constant(double eps);
// eta_eps = C_eps / 4.
double eta_constant(double eps);

}  // namespace phaseless
