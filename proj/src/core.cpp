#include "phaseless/core.hpp"

#include <cmath>
#include <string>

#include "phaseless/error.hpp"

namespace phaseless {

Dimension to_dimension(int m) {
  if (m == 2) return Dimension::Two;
  if (m == 3) return Dimension::Three;
  throw DomainError("dimension must be 2 or 3, got " + std::to_string(m));
}

double dot(const Vec& x, const Vec& y, Dimension m) {
  double s = 0;
  for (int j = 0; j < dim(m); ++j) s += x[j] * y[j];
  return s;
}

double norm(const Vec& x, Dimension m) { return std::sqrt(dot(x, x, m)); }

bool BoxDomain::contains(const Vec& x) const {
  for (int j = 0; j < dim(m); ++j) {
    if (!(std::abs(x[j]) <= 0.5 * a)) return false;
  }
  return true;
}

BoxDomain make_box(double a, Dimension m) {
  if (!(a > 0) || !std::isfinite(a)) throw ConfigError("domain side length a must be positive");
  return BoxDomain{a, m};
}

std::int64_t LatticePoint::wavenumber_key() const {
  if (is_zero()) return -1;
  return std::int64_t{l[0]} * l[0] + std::int64_t{l[1]} * l[1] + std::int64_t{l[2]} * l[2];
}

double FrequencyLattice::max_wavenumber() const {
  double kmax = 0;
  for (const auto& p : points) kmax = std::max(kmax, p.k);
  return kmax;
}

Vec FrequencyLattice::frequency_multiples(const LatticePoint& p) const {
  if (p.is_zero()) return Vec{lambda, 0.0, 0.0};
  return Vec{double(p.l[0]), double(p.l[1]), double(p.l[2])};
}

std::ptrdiff_t FrequencyLattice::index_of(const IVec& l) const { return lattice_position(l, N, m); }

std::ptrdiff_t lattice_position(const IVec& l, int N, Dimension m) {
  const int md = dim(m);
  std::ptrdiff_t lex = 0;
  for (int j = 0; j < 3; ++j) {
    if (j >= md) {
      if (l[j] != 0) return -1;
      continue;
    }
    if (l[j] < -N || l[j] > N) return -1;
    lex = lex * (2 * N + 1) + (l[j] + N);
  }
  std::ptrdiff_t total = 1;
  for (int j = 0; j < md; ++j) total *= 2 * N + 1;
  const std::ptrdiff_t zero_lex = (total - 1) / 2;
  if (lex == zero_lex) return 0;
  return lex < zero_lex ? lex + 1 : lex;
}

Complex gamma(Dimension m, double k) {
  if (!(k > 0) || !std::isfinite(k)) throw DomainError("gamma: wavenumber must be positive");
  if (m == Dimension::Three) return Complex(1.0 / (4.0 * kPi), 0.0);
  return std::polar(1.0 / std::sqrt(8.0 * kPi * k), kPi / 4.0);
}

Complex pointsource_farfield(Dimension m, double k, const Vec& xhat, const Vec& z) {
  return gamma(m, k) * std::polar(1.0, -k * dot(xhat, z, m));
}

FrequencyLattice build_lattice(Dimension m, int N, double a, double lambda) {
  if (N < 1) throw ConfigError("lattice truncation N must be >= 1");
  if (!(lambda > 0) || !(lambda < 1)) throw ConfigError("lambda must lie in (0, 1)");
  make_box(a, m);

  FrequencyLattice lat;
  lat.N = N;
  lat.a = a;
  lat.m = m;
  lat.lambda = lambda;
  lat.kstar = 2.0 * kPi * lambda / a;

  const int md = dim(m);
  std::size_t total = 1;
  for (int j = 0; j < md; ++j) total *= std::size_t(2 * N + 1);
  lat.points.reserve(total);

  // l0 / |l0| is the first unit vector.
  lat.points.push_back(LatticePoint{IVec{0, 0, 0}, lat.kstar, Vec{1.0, 0.0, 0.0}});

  const int hi2 = md >= 2 ? N : 0;
  const int hi3 = md >= 3 ? N : 0;
  for (int l1 = -N; l1 <= N; ++l1) {
    for (int l2 = -hi2; l2 <= hi2; ++l2) {
      for (int l3 = -hi3; l3 <= hi3; ++l3) {
        if (l1 == 0 && l2 == 0 && l3 == 0) continue;
        const double len = std::sqrt(double(l1) * l1 + double(l2) * l2 + double(l3) * l3);
        LatticePoint p;
        p.l = IVec{l1, l2, l3};
        p.k = 2.0 * kPi * len / a;
        p.xhat = Vec{l1 / len, l2 / len, l3 / len};
        lat.points.push_back(p);
      }
    }
  }
  return lat;
}

}  // namespace phaseless
