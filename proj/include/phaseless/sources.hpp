#pragma once

// Ground-truth source functions on the box D.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "phaseless/core.hpp"

namespace phaseless {

enum class SourceKind { S1, S2, S3, S4, SampledGrid, TrigSeries };

std::string to_string(SourceKind kind);

using Point2 = std::array<double, 2>;

// A closed curve t in [0, 2pi] -> R^2 bounding one constant piece of a source.
// Membership uses a dense polyline; far-field integrals use the smooth curve and
// its derivative directly.
class ParametricRegion {
 public:
  using Curve = std::function<Point2(double)>;

  ParametricRegion(Curve curve, Curve derivative, double value, int samples = kDefaultSamples);

  static constexpr int kDefaultSamples = 2048;

  Point2 at(double t) const { return curve_(t); }
  Point2 tangent(double t) const { return derivative_(t); }
  double value() const { return value_; }
  const std::vector<Point2>& polyline() const { return polyline_; }

  // Unsigned distance from x to the sampled boundary.
  double boundary_distance(const Point2& x) const;

 private:
  Curve curve_;
  Curve derivative_;
  double value_;
  std::vector<Point2> polyline_;
};

// Even-odd crossing test against the region's polyline. Points within roundoff of
// the boundary may resolve either way.
bool inside_region(const ParametricRegion& region, const Point2& x);

// The three pieces of the discontinuous 2D example, in the order (D1 = 1.5, D2 = 2, D3 = 1).
std::vector<ParametricRegion> s2_regions();

// Uniform tensor grid with `resolution` nodes per axis spanning [-a/2, a/2], row-major
// (first axis slowest).
struct SampledGrid {
  int resolution = 0;
  double a = 1.0;
  Dimension m = Dimension::Two;
  std::vector<double> values;
};

struct FourierMode {
  IVec l{};
  Complex coeff;
};

class SourceField {
 public:
  // Built-in examples. S1 and S2 are two-dimensional, S3 and S4 three-dimensional.
  static SourceField builtin(SourceKind kind, double a = 1.0);
  static SourceField builtin(std::string_view name, double a = 1.0);
  static SourceField sampled(SampledGrid grid);
  // Re sum_l c_l exp(i (2pi/a) l.x) on D; real when the coefficients are conjugate-symmetric.
  static SourceField trig_series(Dimension m, double a, std::vector<FourierMode> modes);

  SourceKind kind() const { return kind_; }
  Dimension dim() const { return box_.m; }
  double a() const { return box_.a; }
  const BoxDomain& box() const { return box_; }

  // Piecewise-constant sources expose their regions; empty otherwise.
  const std::vector<ParametricRegion>& regions() const { return regions_; }
  const std::optional<SampledGrid>& grid() const { return grid_; }
  const std::vector<FourierMode>& modes() const { return modes_; }

  double operator()(const Vec& x) const;

 private:
  SourceField(SourceKind kind, BoxDomain box) : kind_(kind), box_(box) {}

  SourceKind kind_;
  BoxDomain box_;
  std::vector<ParametricRegion> regions_;
  std::optional<SampledGrid> grid_;
  std::vector<FourierMode> modes_;
};

// Random real band-limited source: conjugate-symmetric coefficients c_l for |l|_inf <= N with
// moduli in [0.1, 1] and c_0 real. Deterministic in the seed.
SourceField random_trig_series(Dimension m, int N, double a, std::uint64_t seed);

// eval_source; zero outside D.
inline double eval_source(const SourceField& s, const Vec& x) { return s(x); }

}  // namespace phaseless
