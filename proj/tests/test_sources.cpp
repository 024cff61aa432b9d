#include <cmath>
#include <random>
#include <map>
#include <set>

#include "doctest.h"
#include "phaseless/error.hpp"
#include "phaseless/sources.hpp"

using namespace phaseless;
using doctest::Approx;

namespace {

Vec grad_s1(const Vec& x) {
  const double x1 = x[0], x2 = x[1];
  const double g = 1.1 * std::exp(-200 * ((x1 - 0.01) * (x1 - 0.01) + (x2 - 0.12) * (x2 - 0.12)));
  const double e = std::exp(-90 * (x1 * x1 + x2 * x2));
  const double q = x2 * x2 - x1 * x1;
  return {g * -400 * (x1 - 0.01) - 100 * (-2 * x1 * e + q * e * -180 * x1),
          g * -400 * (x2 - 0.12) - 100 * (2 * x2 * e + q * e * -180 * x2), 0};
}

Vec grad_s4(const Vec& x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2];
  const double g = 1.1 * std::exp(-200 * ((x1 - 0.01) * (x1 - 0.01) + (x2 - 0.12) * (x2 - 0.12) + x3 * x3));
  const double e = std::exp(-90 * (x1 * x1 + x2 * x2 + x3 * x3));
  const double q = x1 * x1 - x2 * x2;
  return {g * -400 * (x1 - 0.01) + 100 * (2 * x1 * e + q * e * -180 * x1),
          g * -400 * (x2 - 0.12) + 100 * (-2 * x2 * e + q * e * -180 * x2),
          g * -400 * x3 + 100 * q * e * -180 * x3};
}

void check_gradient(const SourceField& s, Vec (*grad)(const Vec&), int md) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-0.45, 0.45);
  const double h = 1e-6;
  for (int n = 0; n < 50; ++n) {
    Vec x{u(rng), u(rng), md == 3 ? u(rng) : 0.0};
    const Vec g = grad(x);
    for (int j = 0; j < md; ++j) {
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      const double fd = (s(xp) - s(xm)) / (2 * h);
      CHECK(std::abs(fd - g[j]) <= 1e-6 * std::max(1.0, std::abs(g[j])));
    }
  }
}

}  // namespace

TEST_CASE("S1 point values") {
  const SourceField s = SourceField::builtin(SourceKind::S1);
  // 1.1 - 100 (0.12^2 - 0.01^2) exp(-90 (0.01^2 + 0.12^2)), evaluated independently
  CHECK(s(Vec{0.01, 0.12, 0}) == Approx(0.712223274885).epsilon(1e-11));
  CHECK(s.dim() == Dimension::Two);
}

TEST_CASE("S4 point values") {
  const SourceField s = SourceField::builtin("S4");
  CHECK(s(Vec{0, 0, 0}) == Approx(0.060525542062).epsilon(1e-11));
  CHECK(s.dim() == Dimension::Three);
}

TEST_CASE("S3 values and origin convention") {
  const SourceField s = SourceField::builtin(SourceKind::S3);
  CHECK(s(Vec{0, 0, 0}) == 1.0);
  // theta = 0 on the positive x3 axis: exp(-20 r / (0.6 + sqrt(6.25)))
  CHECK(s(Vec{0, 0, 0.2}) == Approx(std::exp(-4.0 / 3.1)).epsilon(1e-14));
  // theta = pi/2 in the x1-x2 plane: sqrt(4.25 + 2 cos(3 pi/2)) = sqrt(4.25)
  CHECK(s(Vec{0.3, 0, 0}) == Approx(std::exp(-6.0 / (0.6 + std::sqrt(4.25)))).epsilon(1e-14));
  // rotation about the x3 axis leaves S3 unchanged
  CHECK(s(Vec{0.1, 0.2, 0.15}) == Approx(s(Vec{-0.2, 0.1, 0.15})).epsilon(1e-14));
}

TEST_CASE("compact support") {
  for (const char* name : {"S1", "S2", "S3", "S4"}) {
    const SourceField s = SourceField::builtin(name);
    CHECK(s(Vec{0.5001, 0, 0}) == 0.0);
    CHECK(s(Vec{0, -0.6, 0}) == 0.0);
    CHECK(s(Vec{0, 0, s.dim() == Dimension::Three ? 0.7 : 0.0}) == (s.dim() == Dimension::Three ? 0.0 : s(Vec{})));
  }
  const SourceField wide = SourceField::builtin(SourceKind::S1, 2.0);
  CHECK(wide(Vec{0.7, 0, 0}) != 0.0);
}

TEST_CASE("S1 and S4 gradients agree with finite differences") {
  check_gradient(SourceField::builtin(SourceKind::S1), grad_s1, 2);
  check_gradient(SourceField::builtin(SourceKind::S4), grad_s4, 3);
}

TEST_CASE("S2 regions") {
  const auto regions = s2_regions();
  REQUIRE(regions.size() == 3);
  CHECK(regions[0].value() == 1.5);
  CHECK(regions[1].value() == 2.0);
  CHECK(regions[2].value() == 1.0);

  for (const auto& r : regions) {
    const Point2 a = r.at(0), b = r.at(2 * kPi);
    CHECK(std::hypot(a[0] - b[0], a[1] - b[1]) < 1e-12);
    CHECK(r.polyline().size() >= 720);
    // analytic derivative against a central difference
    for (double t : {0.3, 1.7, 4.0}) {
      const double h = 1e-6;
      const Point2 p = r.at(t + h), m = r.at(t - h), d = r.tangent(t);
      CHECK(std::abs((p[0] - m[0]) / (2 * h) - d[0]) < 1e-7);
      CHECK(std::abs((p[1] - m[1]) / (2 * h) - d[1]) < 1e-7);
    }
  }
  // winding numbers computed independently on a 2e5-point boundary sampling
  CHECK(inside_region(regions[2], Point2{0.135, -0.2}));
  CHECK_FALSE(inside_region(regions[2], Point2{0.0, -0.2}));
  CHECK_FALSE(inside_region(regions[2], Point2{0.2, 0.0}));
  for (const auto& r : regions) CHECK_FALSE(inside_region(r, Point2{10, 10}));
  CHECK(inside_region(regions[0], Point2{-0.1, 0.2}));
  CHECK(inside_region(regions[1], Point2{-0.2, -0.2}));
}

TEST_CASE("S2 takes only its four values and the pieces are disjoint") {
  const SourceField s = SourceField::builtin(SourceKind::S2);
  const auto regions = s2_regions();
  std::set<double> values;
  int overlaps = 0;
  for (int i = 0; i < 121; ++i)
    for (int j = 0; j < 121; ++j) {
      const Point2 p{-0.5 + i / 120.0, -0.5 + j / 120.0};
      values.insert(s(Vec{p[0], p[1], 0}));
      int hits = 0;
      for (const auto& r : regions) hits += inside_region(r, p);
      overlaps += hits > 1;
    }
  CHECK(overlaps == 0);
  CHECK(values == std::set<double>{0.0, 1.0, 1.5, 2.0});
}

TEST_CASE("boundary distance") {
  const auto regions = s2_regions();
  // polyline vertices lie on the curve; points between them are within the chord sag
  const Point2 v = regions[2].polyline()[17];
  CHECK(regions[2].boundary_distance(v) < 1e-15);
  CHECK(regions[2].boundary_distance(regions[2].at(1.0)) < 1e-5);
  // (0.135, -0.2): nearest boundary point is (0.1, -0.2) at t = pi (dense numpy sampling gives 0.035)
  CHECK(regions[2].boundary_distance(Point2{0.135, -0.2}) == Approx(0.035).epsilon(1e-6));
}

TEST_CASE("sampled grid interpolation") {
  SampledGrid g;
  g.resolution = 5;
  g.a = 1.0;
  g.m = Dimension::Two;
  // linear function 2 + 3x - y is reproduced exactly by multilinear interpolation
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) g.values.push_back(2 + 3 * (-0.5 + 0.25 * i) - (-0.5 + 0.25 * j));
  const SourceField s = SourceField::sampled(g);
  CHECK(s.kind() == SourceKind::SampledGrid);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int n = 0; n < 100; ++n) {
    const double x = u(rng), y = u(rng);
    CHECK(s(Vec{x, y, 0}) == Approx(2 + 3 * x - y).epsilon(1e-13));
  }
  CHECK(s(Vec{0.25, -0.5, 0}) == Approx(2 + 0.75 + 0.5));
  CHECK(s(Vec{0.6, 0, 0}) == 0.0);

  SampledGrid bad = g;
  bad.values.pop_back();
  CHECK_THROWS_AS(SourceField::sampled(bad), ConfigError);
  bad.resolution = 1;
  CHECK_THROWS_AS(SourceField::sampled(bad), ConfigError);
}

TEST_CASE("3D sampled grid reproduces trilinear functions") {
  SampledGrid g{3, 2.0, Dimension::Three, {}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) {
        const double x = -1 + i, y = -1 + j, z = -1 + k;
        g.values.push_back(x * y * z + z);
      }
  const SourceField s = SourceField::sampled(g);
  CHECK(s(Vec{0.5, 0.5, 0.5}) == Approx(0.125 + 0.5));
  CHECK(s(Vec{-0.3, 0.7, -0.2}) == Approx(-0.3 * 0.7 * -0.2 - 0.2));
}

TEST_CASE("random band-limited series") {
  const SourceField s = random_trig_series(Dimension::Two, 3, 1.0, 42);
  CHECK(s.kind() == SourceKind::TrigSeries);
  CHECK(s.modes().size() == 49);
  std::map<IVec, Complex> c;
  for (const auto& m : s.modes()) {
    CHECK(std::abs(m.coeff) >= 0.1);
    CHECK(std::abs(m.coeff) <= 1.0);
    CHECK(c.emplace(m.l, m.coeff).second);
  }
  for (const auto& [l, v] : c) {
    const Complex w = c.at(IVec{-l[0], -l[1], -l[2]});
    CHECK(std::abs(w - std::conj(v)) == 0.0);
  }
  CHECK(c.at(IVec{0, 0, 0}).imag() == 0.0);

  // deterministic in the seed; different seeds differ
  const SourceField again = random_trig_series(Dimension::Two, 3, 1.0, 42);
  const SourceField other = random_trig_series(Dimension::Two, 3, 1.0, 43);
  CHECK(s(Vec{0.1, 0.2, 0}) == again(Vec{0.1, 0.2, 0}));
  CHECK(s(Vec{0.1, 0.2, 0}) != other(Vec{0.1, 0.2, 0}));

  // value against a direct sum over the coefficients
  const Vec x{0.13, -0.27, 0};
  Complex sum = 0;
  for (const auto& [l, v] : c) sum += v * std::polar(1.0, 2 * kPi * (l[0] * x[0] + l[1] * x[1]));
  CHECK(std::abs(sum.imag()) < 1e-12);
  CHECK(s(x) == Approx(sum.real()).epsilon(1e-12));
}

TEST_CASE("built-in errors") {
  CHECK_THROWS_AS(SourceField::builtin("S5"), ConfigError);
  CHECK_THROWS_AS(SourceField::builtin(SourceKind::SampledGrid), ConfigError);
  CHECK_THROWS_AS(SourceField::builtin(SourceKind::S1, 0.0), ConfigError);
  CHECK(to_string(SourceKind::S3) == "S3");
}
