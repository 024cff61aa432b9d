#include "phaseless/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "phaseless/error.hpp"

namespace phaseless {

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::S1: return "S1";
    case SourceKind::S2: return "S2";
    case SourceKind::S3: return "S3";
    case SourceKind::S4: return "S4";
    case SourceKind::SampledGrid: return "sampled-grid";
    case SourceKind::TrigSeries: return "trig-series";
  }
  return "unknown";
}

ParametricRegion::ParametricRegion(Curve curve, Curve derivative, double value, int samples)
    : curve_(std::move(curve)), derivative_(std::move(derivative)), value_(value) {
  if (samples < 3) throw ConfigError("region polyline needs at least 3 samples");
  polyline_.reserve(samples);
  for (int i = 0; i < samples; ++i) polyline_.push_back(curve_(2.0 * kPi * i / samples));
}

double ParametricRegion::boundary_distance(const Point2& x) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polyline_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& p = polyline_[i];
    const Point2& q = polyline_[(i + 1) % n];
    const double dx = q[0] - p[0], dy = q[1] - p[1];
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0 ? ((x[0] - p[0]) * dx + (x[1] - p[1]) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::hypot(x[0] - (p[0] + t * dx), x[1] - (p[1] + t * dy)));
  }
  return best;
}

bool inside_region(const ParametricRegion& region, const Point2& x) {
  const auto& poly = region.polyline();
  bool inside = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2& pi = poly[i];
    const Point2& pj = poly[j];
    if ((pi[1] > x[1]) != (pj[1] > x[1]) &&
        x[0] < (pj[0] - pi[0]) * (x[1] - pi[1]) / (pj[1] - pi[1]) + pi[0]) {
      inside = !inside;
    }
  }
  return inside;
}

namespace {

// r(t) (cos t, sin t) + center, with r and r' supplied.
ParametricRegion star_region(std::function<double(double)> r, std::function<double(double)> dr,
                             Point2 center, double value) {
  auto curve = [r, center](double t) {
    const double rt = r(t);
    return Point2{rt * std::cos(t) + center[0], rt * std::sin(t) + center[1]};
  };
  auto derivative = [r, dr](double t) {
    const double rt = r(t), drt = dr(t);
    return Point2{drt * std::cos(t) - rt * std::sin(t), drt * std::sin(t) + rt * std::cos(t)};
  };
  return ParametricRegion(curve, derivative, value);
}

double s1(const Vec& x) {
  const double x1 = x[0], x2 = x[1];
  const double d1 = x1 - 0.01, d2 = x2 - 0.12;
  return 1.1 * std::exp(-200.0 * (d1 * d1 + d2 * d2)) -
         100.0 * (x2 * x2 - x1 * x1) * std::exp(-90.0 * (x1 * x1 + x2 * x2));
}

double s3(const Vec& x) {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  // theta is undefined at the origin; the formula's limit there is exp(0).
  const double theta = r > 0 ? std::acos(std::clamp(x[2] / r, -1.0, 1.0)) : 0.0;
  return std::exp(-20.0 * r / (0.6 + std::sqrt(4.25 + 2.0 * std::cos(3.0 * theta))));
}

double s4(const Vec& x) {
  const double x1 = x[0], x2 = x[1], x3 = x[2];
  const double d1 = x1 - 0.01, d2 = x2 - 0.12;
  return 1.1 * std::exp(-200.0 * (d1 * d1 + d2 * d2 + x3 * x3)) +
         100.0 * (x1 * x1 - x2 * x2) * std::exp(-90.0 * (x1 * x1 + x2 * x2 + x3 * x3));
}

double interpolate(const SampledGrid& g, const Vec& x) {
  const int md = dim(g.m);
  const double h = g.a / (g.resolution - 1);
  std::array<int, 3> base{};
  std::array<double, 3> frac{};
  for (int j = 0; j < md; ++j) {
    const double t = (x[j] + 0.5 * g.a) / h;
    int i = static_cast<int>(std::floor(t));
    i = std::clamp(i, 0, g.resolution - 2);
    base[j] = i;
    frac[j] = std::clamp(t - i, 0.0, 1.0);
  }
  double sum = 0;
  const int corners = 1 << md;
  for (int c = 0; c < corners; ++c) {
    double w = 1;
    std::size_t flat = 0;
    for (int j = 0; j < md; ++j) {
      const int bit = (c >> j) & 1;
      w *= bit ? frac[j] : 1.0 - frac[j];
      flat = flat * g.resolution + std::size_t(base[j] + bit);
    }
    if (w != 0) sum += w * g.values[flat];
  }
  return sum;
}

}  // namespace

std::vector<ParametricRegion> s2_regions() {
  std::vector<ParametricRegion> out;
  out.push_back(star_region([](double t) { return (2.0 + 0.3 * std::cos(3 * t)) / 15.0; },
                            [](double t) { return -0.9 * std::sin(3 * t) / 15.0; },
                            Point2{-0.1, 0.2}, 1.5));
  out.push_back(star_region(
      [](double t) {
        return (0.1 + 0.08 * std::cos(t) + 0.02 * std::sin(2 * t)) / (1.0 + 0.7 * std::cos(t));
      },
      [](double t) {
        const double num = 0.1 + 0.08 * std::cos(t) + 0.02 * std::sin(2 * t);
        const double den = 1.0 + 0.7 * std::cos(t);
        const double dnum = -0.08 * std::sin(t) + 0.04 * std::cos(2 * t);
        const double dden = -0.7 * std::sin(t);
        return (dnum * den - num * dden) / (den * den);
      },
      Point2{-0.2, -0.2}, 2.0));
  out.emplace_back(
      [](double t) {
        return Point2{0.1 * std::cos(t) + 0.065 * std::cos(2 * t) + 0.135, 0.15 * std::sin(t) - 0.2};
      },
      [](double t) { return Point2{-0.1 * std::sin(t) - 0.13 * std::sin(2 * t), 0.15 * std::cos(t)}; },
      1.0);
  return out;
}

SourceField SourceField::builtin(SourceKind kind, double a) {
  switch (kind) {
    case SourceKind::S1:
      return SourceField(kind, make_box(a, Dimension::Two));
    case SourceKind::S2: {
      SourceField s(kind, make_box(a, Dimension::Two));
      s.regions_ = s2_regions();
      return s;
    }
    case SourceKind::S3:
    case SourceKind::S4:
      return SourceField(kind, make_box(a, Dimension::Three));
    default:
      throw ConfigError("not a built-in source: " + to_string(kind));
  }
}

SourceField SourceField::builtin(std::string_view name, double a) {
  if (name == "S1") return builtin(SourceKind::S1, a);
  if (name == "S2") return builtin(SourceKind::S2, a);
  if (name == "S3") return builtin(SourceKind::S3, a);
  if (name == "S4") return builtin(SourceKind::S4, a);
  throw ConfigError("unknown built-in source '" + std::string(name) + "' (expected S1..S4)");
}

SourceField SourceField::sampled(SampledGrid grid) {
  if (grid.resolution < 2) throw ConfigError("sampled grid needs resolution >= 2");
  std::size_t expected = 1;
  for (int j = 0; j < phaseless::dim(grid.m); ++j) expected *= std::size_t(grid.resolution);
  if (grid.values.size() != expected) {
    throw ConfigError("sampled grid has " + std::to_string(grid.values.size()) + " values, expected " +
                      std::to_string(expected));
  }
  SourceField s(SourceKind::SampledGrid, make_box(grid.a, grid.m));
  s.grid_ = std::move(grid);
  return s;
}

SourceField SourceField::trig_series(Dimension m, double a, std::vector<FourierMode> modes) {
  SourceField s(SourceKind::TrigSeries, make_box(a, m));
  s.modes_ = std::move(modes);
  return s;
}

SourceField random_trig_series(Dimension m, int N, double a, std::uint64_t seed) {
  if (N < 0) throw ConfigError("band limit must be nonnegative");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> modulus(0.1, 1.0), angle(-kPi, kPi);
  const int hi2 = N, hi3 = m == Dimension::Three ? N : 0;
  std::vector<FourierMode> modes;
  for (int l1 = -N; l1 <= N; ++l1)
    for (int l2 = -hi2; l2 <= hi2; ++l2)
      for (int l3 = -hi3; l3 <= hi3; ++l3) {
        const IVec l{l1, l2, l3};
        const IVec neg{-l1, -l2, -l3};
        if (l == IVec{0, 0, 0}) {
          modes.push_back(FourierMode{l, Complex(modulus(rng), 0.0)});
        } else if (neg < l) {
          // Each +/- pair is drawn once, when the positive representative is reached.
          const Complex c = std::polar(modulus(rng), angle(rng));
          modes.push_back(FourierMode{l, c});
          modes.push_back(FourierMode{neg, std::conj(c)});
        }
      }
  return SourceField::trig_series(m, a, std::move(modes));
}

double SourceField::operator()(const Vec& x) const {
  if (!box_.contains(x)) return 0.0;
  switch (kind_) {
    case SourceKind::S1:
      return s1(x);
    case SourceKind::S2:
      for (const auto& r : regions_) {
        if (inside_region(r, Point2{x[0], x[1]})) return r.value();
      }
      return 0.0;
    case SourceKind::S3:
      return s3(x);
    case SourceKind::S4:
      return s4(x);
    case SourceKind::SampledGrid:
      return interpolate(*grid_, x);
    case SourceKind::TrigSeries: {
      const double w = 2.0 * kPi / box_.a;
      double sum = 0;
      for (const auto& mode : modes_) {
        double phase = 0;
        for (int j = 0; j < phaseless::dim(box_.m); ++j) phase += mode.l[j] * x[j];
        sum += (mode.coeff * std::polar(1.0, w * phase)).real();
      }
      return sum;
    }
  }
  return 0.0;
}

}  // namespace phaseless
