#pragma once

// Dimension-aware constants, point-source far fields and the admissible
// frequency/direction lattice.

#include <array>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

namespace phaseless {

using Complex = std::complex<double>;
inline constexpr double kPi = std::numbers::pi;

// Default low-frequency parameter; gives k* = pi / (9a).
inline constexpr double kDefaultLambda = 1.0 / 18.0;

enum class Dimension : int { Two = 2, Three = 3 };

// Throws DomainError unless m is 2 or 3.
Dimension to_dimension(int m);
constexpr int dim(Dimension m) { return static_cast<int>(m); }

// Points and lattice indices live in fixed 3-arrays; components past dim(m) are zero.
using Vec = std::array<double, 3>;
using IVec = std::array<int, 3>;

double dot(const Vec& x, const Vec& y, Dimension m);
double norm(const Vec& x, Dimension m);

struct BoxDomain {
  double a = 1.0;
  Dimension m = Dimension::Two;

  // D = (-a/2, a/2)^m, closed here so that boundary nodes count as inside.
  bool contains(const Vec& x) const;
};

// Throws ConfigError for a <= 0.
BoxDomain make_box(double a, Dimension m);

struct LatticePoint {
  IVec l{};       // lattice index, l = 0 marks the k* measurement
  double k = 0;   // wavenumber
  Vec xhat{};     // observation direction

  bool is_zero() const { return l[0] == 0 && l[1] == 0 && l[2] == 0; }
  // |l|^2 for l != 0, -1 for the k* point. Points sharing a key share a wavenumber.
  std::int64_t wavenumber_key() const;
};

struct FrequencyLattice {
  std::vector<LatticePoint> points;  // l = 0 first, then lexicographic in l
  int N = 0;
  double a = 1.0;
  Dimension m = Dimension::Two;
  double lambda = kDefaultLambda;
  double kstar = 0;

  std::size_t size() const { return points.size(); }
  double max_wavenumber() const;
  // Wave vector k * xhat expressed in units of 2*pi/a; equals l for l != 0 and l0 = (lambda, 0, 0) at l = 0.
  Vec frequency_multiples(const LatticePoint& p) const;
  // Position of index l in `points`, or -1.
  std::ptrdiff_t index_of(const IVec& l) const;
};

// Position of l in the canonical lattice order (l = 0 first, then lexicographic), or -1
// when |l|_inf > N.
std::ptrdiff_t lattice_position(const IVec& l, int N, Dimension m);

// gamma_m: e^{i pi/4} / sqrt(8 pi k) in 2D, 1/(4 pi) in 3D. Throws DomainError for k <= 0.
Complex gamma(Dimension m, double k);

// Far-field pattern gamma_m * exp(-i k xhat.z) of a point source at z.
Complex pointsource_farfield(Dimension m, double k, const Vec& xhat, const Vec& z);

// All l with 1 <= |l|_inf <= N plus the l = 0 entry; (2N+1)^m points in total.
FrequencyLattice build_lattice(Dimension m, int N, double a, double lambda = kDefaultLambda);

}  // namespace phaseless
