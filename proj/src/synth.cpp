#include "phaseless/synth.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "phaseless/error.hpp"

namespace phaseless {

QuadratureSpec QuadratureSpec::defaults(Dimension) {
  QuadratureSpec q;
  q.nodes_per_axis = 64;  // also in 3D: 48 leaves S4 at ~2e-8 for N = 20
  return q;
}

QuadratureSpec QuadratureSpec::defaults(const SourceField& s) {
  QuadratureSpec q = defaults(s.dim());
  if (s.kind() == SourceKind::S3) q.nodes_per_axis = 96;
  return q;
}

void QuadratureSpec::check() const {
  if (nodes_per_axis < 16) throw ConfigError("quadrature needs at least 16 nodes per axis");
  if (boundary_nodes < 64) throw ConfigError("boundary quadrature needs at least 64 nodes");
  if (!(tolerance > 0)) throw ConfigError("quadrature tolerance must be positive");
}

AxisRule gauss_legendre_axis(double a, int panels, int nodes_per_panel) {
  if (panels < 1 || nodes_per_panel < 1) throw ConfigError("invalid Gauss-Legendre rule size");
  using Table = std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)>;
  Table table(gsl_integration_glfixed_table_alloc(std::size_t(nodes_per_panel)),
              &gsl_integration_glfixed_table_free);
  if (!table) throw ConfigError("failed to allocate Gauss-Legendre table");

  AxisRule rule;
  rule.nodes.reserve(std::size_t(panels) * nodes_per_panel);
  rule.weights.reserve(std::size_t(panels) * nodes_per_panel);
  const double h = a / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = -0.5 * a + p * h;
    const double hi = p + 1 == panels ? 0.5 * a : lo + h;
    for (int i = 0; i < nodes_per_panel; ++i) {
      double x = 0, w = 0;
      gsl_integration_glfixed_point(lo, hi, std::size_t(i), &x, &w, table.get());
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

namespace {

// Weighted source samples on a tensor rule. Two-dimensional sources use a trivial third axis.
struct TensorSamples {
  std::array<AxisRule, 3> axes;
  std::vector<double> weighted;  // w_i w_j w_k S(y_ijk), axis 0 slowest
  double abs_integral = 0;

  std::size_t size(int axis) const { return axes[axis].nodes.size(); }
};

AxisRule trivial_axis() { return AxisRule{{0.0}, {1.0}}; }

TensorSamples sample_tensor(const std::function<double(const Vec&)>& f, const BoxDomain& box, const AxisRule& rule) {
  TensorSamples ts;
  ts.axes[0] = rule;
  ts.axes[1] = rule;
  ts.axes[2] = box.m == Dimension::Three ? rule : trivial_axis();
  const std::size_t n0 = ts.size(0), n1 = ts.size(1), n2 = ts.size(2);
  ts.weighted.resize(n0 * n1 * n2);
  for (std::size_t i = 0; i < n0; ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      for (std::size_t k = 0; k < n2; ++k) {
        const Vec y{ts.axes[0].nodes[i], ts.axes[1].nodes[j], ts.axes[2].nodes[k]};
        const double w = ts.axes[0].weights[i] * ts.axes[1].weights[j] * ts.axes[2].weights[k];
        const double v = w * f(y);
        ts.weighted[(i * n1 + j) * n2 + k] = v;
        ts.abs_integral += std::abs(v);
      }
    }
  }
  return ts;
}

AxisRule source_axis_rule(const SourceField& s, int nodes_per_axis) {
  if (s.grid()) {
    const int panels = s.grid()->resolution - 1;
    const int per_panel = std::max(6, (nodes_per_axis + panels - 1) / panels);
    return gauss_legendre_axis(s.a(), panels, per_panel);
  }
  if (s.kind() == SourceKind::S3) return gauss_legendre_axis(s.a(), 2, (nodes_per_axis + 1) / 2);
  return gauss_legendre_axis(s.a(), 1, nodes_per_axis);
}

TensorSamples sample_source(const SourceField& s, int nodes_per_axis) {
  return sample_tensor([&s](const Vec& y) { return s(y); }, s.box(), source_axis_rule(s, nodes_per_axis));
}

std::vector<Complex> phase_table(const AxisRule& axis, double xi) {
  std::vector<Complex> e(axis.nodes.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = std::polar(1.0, -xi * axis.nodes[i]);
  return e;
}

Complex direct_sum(const TensorSamples& ts, const Vec& xi) {
  const auto e0 = phase_table(ts.axes[0], xi[0]);
  const auto e1 = phase_table(ts.axes[1], xi[1]);
  const auto e2 = phase_table(ts.axes[2], xi[2]);
  const std::size_t n1 = e1.size(), n2 = e2.size();
  Complex sum = 0;
  for (std::size_t i = 0; i < e0.size(); ++i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const Complex e01 = e0[i] * e1[j];
      for (std::size_t k = 0; k < n2; ++k) sum += ts.weighted[(i * n1 + j) * n2 + k] * (e01 * e2[k]);
    }
  }
  return sum;
}

// Boundary samples of one region on a uniform trapezoid rule.
struct BoundarySamples {
  std::vector<Point2> points;
  std::vector<Point2> tangents;
  double orientation = 1;  // sign of the enclosed signed area
  double area = 0;
  double value = 0;
};

std::vector<BoundarySamples> sample_boundaries(const std::vector<ParametricRegion>& regions, int nodes) {
  std::vector<BoundarySamples> out;
  const double dt = 2.0 * kPi / nodes;
  for (const auto& r : regions) {
    BoundarySamples b;
    b.value = r.value();
    b.points.reserve(nodes);
    b.tangents.reserve(nodes);
    double signed_area = 0;
    for (int i = 0; i < nodes; ++i) {
      const double t = i * dt;
      const Point2 p = r.at(t), d = r.tangent(t);
      b.points.push_back(p);
      b.tangents.push_back(d);
      signed_area += 0.5 * (p[0] * d[1] - p[1] * d[0]) * dt;
    }
    b.orientation = signed_area >= 0 ? 1.0 : -1.0;
    b.area = std::abs(signed_area);
    out.push_back(std::move(b));
  }
  return out;
}

// Divergence theorem: int_R exp(-i xi.y) dy = (i/|xi|^2) oint (xi.n) exp(-i xi.y) ds.
Complex boundary_sum(const std::vector<BoundarySamples>& bs, const Vec& xi) {
  const double xi2 = xi[0] * xi[0] + xi[1] * xi[1];
  Complex total = 0;
  for (const auto& b : bs) {
    if (xi2 == 0) {
      total += b.value * b.area;
      continue;
    }
    const double dt = 2.0 * kPi / double(b.points.size());
    Complex sum = 0;
    for (std::size_t i = 0; i < b.points.size(); ++i) {
      const Point2& p = b.points[i];
      const Point2& d = b.tangents[i];
      const double flux = xi[0] * d[1] - xi[1] * d[0];
      sum += flux * std::polar(1.0, -(xi[0] * p[0] + xi[1] * p[1]));
    }
    total += b.value * b.orientation * Complex(0.0, 1.0) * sum * dt / xi2;
  }
  return total;
}

double boundary_abs_integral(const std::vector<BoundarySamples>& bs) {
  double s = 0;
  for (const auto& b : bs) s += std::abs(b.value) * b.area;
  return s;
}

Vec wave_vector(const FrequencyLattice& lat, const LatticePoint& p) {
  const Vec q = lat.frequency_multiples(p);
  const double w = 2.0 * kPi / lat.a;
  return Vec{w * q[0], w * q[1], w * q[2]};
}

// Separable evaluation of the transform at all lattice wave vectors.
std::vector<Complex> separable_lattice(const TensorSamples& ts, const FrequencyLattice& lat) {
  const int N = lat.N;
  const double w = 2.0 * kPi / lat.a;
  const bool three = lat.m == Dimension::Three;

  // Axis frequency multiples: -N..N on every active axis plus lambda on axis 0.
  std::array<std::vector<double>, 3> freqs;
  for (int q = -N; q <= N; ++q) {
    freqs[0].push_back(q);
    freqs[1].push_back(q);
    if (three) freqs[2].push_back(q);
  }
  freqs[0].push_back(lat.lambda);
  if (!three) freqs[2].push_back(0.0);

  std::array<std::vector<std::vector<Complex>>, 3> tables;
  for (int ax = 0; ax < 3; ++ax) {
    for (double q : freqs[ax]) tables[ax].push_back(phase_table(ts.axes[ax], w * q));
  }

  const std::size_t n0 = ts.size(0), n1 = ts.size(1), n2 = ts.size(2);
  const std::size_t Q0 = freqs[0].size(), Q1 = freqs[1].size(), Q2 = freqs[2].size();

  std::vector<Complex> t1(n0 * n1 * Q2);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n1; ++j)
      for (std::size_t q2 = 0; q2 < Q2; ++q2) {
        Complex s = 0;
        const auto& e = tables[2][q2];
        for (std::size_t k = 0; k < n2; ++k) s += ts.weighted[(i * n1 + j) * n2 + k] * e[k];
        t1[(i * n1 + j) * Q2 + q2] = s;
      }

  std::vector<Complex> t2(n0 * Q1 * Q2);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t q1 = 0; q1 < Q1; ++q1) {
      const auto& e = tables[1][q1];
      for (std::size_t q2 = 0; q2 < Q2; ++q2) {
        Complex s = 0;
        for (std::size_t j = 0; j < n1; ++j) s += e[j] * t1[(i * n1 + j) * Q2 + q2];
        t2[(i * Q1 + q1) * Q2 + q2] = s;
      }
    }

  auto axis_index = [N](double q) { return std::size_t(int(q) + N); };
  std::vector<Complex> out(lat.size());
  for (std::size_t p = 0; p < lat.size(); ++p) {
    const LatticePoint& pt = lat.points[p];
    const std::size_t q0 = pt.is_zero() ? Q0 - 1 : axis_index(pt.l[0]);
    const std::size_t q1 = axis_index(pt.l[1]);
    const std::size_t q2 = three ? axis_index(pt.l[2]) : 0;
    const auto& e = tables[0][q0];
    Complex s = 0;
    for (std::size_t i = 0; i < n0; ++i) s += e[i] * t2[(i * Q1 + q1) * Q2 + q2];
    out[p] = s;
  }
  return out;
}

std::vector<std::size_t> validation_points(const FrequencyLattice& lat) {
  std::int64_t kmax = 0;
  for (const auto& p : lat.points) kmax = std::max(kmax, p.wavenumber_key());
  std::vector<std::size_t> idx{0};
  for (std::size_t i = 1; i < lat.size(); ++i) {
    if (lat.points[i].wavenumber_key() == kmax) idx.push_back(i);
  }
  return idx;
}

}  // namespace

Complex tensor_transform(const ComplexIntegrand& f, const BoxDomain& box, const Vec& xi, int nodes_per_axis) {
  const AxisRule rule = gauss_legendre_axis(box.a, 1, nodes_per_axis);
  const AxisRule third = box.m == Dimension::Three ? rule : trivial_axis();
  Complex sum = 0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      for (std::size_t k = 0; k < third.nodes.size(); ++k) {
        const Vec y{rule.nodes[i], rule.nodes[j], third.nodes[k]};
        const double w = rule.weights[i] * rule.weights[j] * third.weights[k];
        sum += w * f(y) * std::polar(1.0, -dot(xi, y, box.m));
      }
  return sum;
}

Complex source_transform(const SourceField& s, const Vec& xi, const QuadratureSpec& q) {
  q.check();
  if (!s.regions().empty()) return boundary_sum(sample_boundaries(s.regions(), q.boundary_nodes), xi);
  return direct_sum(sample_source(s, q.nodes_per_axis), xi);
}

Complex farfield_exact(const SourceField& s, const LatticePoint& p, const QuadratureSpec& q) {
  const Vec xi{p.k * p.xhat[0], p.k * p.xhat[1], p.k * p.xhat[2]};
  return -gamma(s.dim(), p.k) * source_transform(s, xi, q);
}

QuadratureReport validate_quadrature(const SourceField& s, const FrequencyLattice& lat, const QuadratureSpec& q) {
  q.check();
  if (s.dim() != lat.m) throw ConfigError("source and lattice dimensions differ");
  if (std::abs(s.a() - lat.a) > 1e-12 * lat.a) throw ConfigError("source and lattice domains differ");

  QuadratureReport rep;
  rep.nodes_per_axis = q.nodes_per_axis;
  rep.boundary_nodes = q.boundary_nodes;
  const auto pts = validation_points(lat);
  rep.points_checked = pts.size();

  double max_diff = 0;
  if (!s.regions().empty()) {
    const auto coarse = sample_boundaries(s.regions(), q.boundary_nodes);
    const auto fine = sample_boundaries(s.regions(), 2 * q.boundary_nodes);
    rep.reference_scale = boundary_abs_integral(fine);
    for (std::size_t i : pts) {
      const Vec xi = wave_vector(lat, lat.points[i]);
      max_diff = std::max(max_diff, std::abs(boundary_sum(coarse, xi) - boundary_sum(fine, xi)));
    }
  } else {
    const auto coarse = sample_source(s, q.nodes_per_axis);
    const auto fine = sample_source(s, 2 * q.nodes_per_axis);
    rep.reference_scale = fine.abs_integral;
    for (std::size_t i : pts) {
      const Vec xi = wave_vector(lat, lat.points[i]);
      max_diff = std::max(max_diff, std::abs(direct_sum(coarse, xi) - direct_sum(fine, xi)));
    }
  }
  rep.relative_error = rep.reference_scale > 0 ? max_diff / rep.reference_scale : 0.0;
  if (!(rep.relative_error <= q.tolerance)) {
    std::ostringstream os;
    os << "quadrature validation failed: node-doubling error " << rep.relative_error << " exceeds "
       << q.tolerance << " at k = " << lat.max_wavenumber() << " (nodes per axis " << q.nodes_per_axis
       << ", boundary nodes " << q.boundary_nodes << ")";
    throw ConfigError(os.str());
  }
  return rep;
}

std::vector<Complex> farfield_lattice(const SourceField& s, const FrequencyLattice& lat, const QuadratureSpec& q,
                                      QuadratureReport* report) {
  const QuadratureReport rep = validate_quadrature(s, lat, q);
  if (report) *report = rep;

  std::vector<Complex> transform;
  if (!s.regions().empty()) {
    const auto bs = sample_boundaries(s.regions(), q.boundary_nodes);
    transform.reserve(lat.size());
    for (const auto& p : lat.points) transform.push_back(boundary_sum(bs, wave_vector(lat, p)));
  } else {
    transform = separable_lattice(sample_source(s, q.nodes_per_axis), lat);
  }
  for (std::size_t i = 0; i < lat.size(); ++i) transform[i] *= -gamma(lat.m, lat.points[i].k);
  return transform;
}

ReferenceOffsets reference_offsets(double k, bool is_kstar) {
  if (is_kstar) return ReferenceOffsets{0.5, -4.0};
  if (!(k > 0)) throw DomainError("reference_offsets: wavenumber must be positive");
  return ReferenceOffsets{0.5, 0.5 - kPi / (2.0 * k)};
}

std::vector<double> scaling_factors(std::span<const double> u_abs, const FrequencyLattice& lat) {
  if (u_abs.size() != lat.size()) throw DomainError("scaling_factors: data size does not match lattice");
  std::map<std::int64_t, double> sup;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    double& s = sup[lat.points[i].wavenumber_key()];
    s = std::max(s, u_abs[i]);
  }
  std::vector<double> c(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const LatticePoint& p = lat.points[i];
    const double s = sup[p.wavenumber_key()];
    if (!(s > 0)) {
      std::ostringstream os;
      os << "degenerate data: far field vanishes at every direction for k = " << p.k << " (l = (" << p.l[0]
         << "," << p.l[1] << "," << p.l[2] << "))";
      throw DegenerateDataError(os.str());
    }
    c[i] = s / std::abs(gamma(lat.m, p.k));
  }
  return c;
}

Complex augmented_farfield(Complex u, double c, double k, double alpha, Dimension m) {
  return u - c * gamma(m, k) * std::polar(1.0, -k * alpha);
}

NoiseModel::NoiseModel(double eps, std::uint64_t seed) : eps_(eps), rng_(seed) {
  if (!(eps >= 0) || !(eps < 1)) throw ConfigError("noise level eps must lie in [0, 1)");
}

double NoiseModel::perturb(double modulus) {
  const double r = dist_(rng_);
  return std::max(0.0, (1.0 + eps_ * r) * modulus);
}

std::vector<double> add_noise(std::span<const double> moduli, double eps, std::uint64_t seed) {
  NoiseModel noise(eps, seed);
  std::vector<double> out;
  out.reserve(moduli.size());
  for (double v : moduli) out.push_back(noise.perturb(v));
  return out;
}

std::string to_string(NoiseChannels channels) {
  return channels == NoiseChannels::All ? "all" : "modulus-only";
}

NoiseChannels parse_noise_channels(std::string_view s) {
  if (s == "all") return NoiseChannels::All;
  if (s == "modulus-only") return NoiseChannels::ModulusOnly;
  throw ConfigError("noise channels must be 'all' or 'modulus-only', got '" + std::string(s) + "'");
}

MeasurementSet measure(std::span<const Complex> exact_u, const FrequencyLattice& lat, double eps,
                       std::uint64_t seed, bool keep_exact, NoiseChannels channels) {
  if (exact_u.size() != lat.size()) throw DomainError("measure: data size does not match lattice");
  NoiseModel noise(eps, seed);

  MeasurementSet ms;
  ms.lattice = lat;
  ms.noise_eps = eps;
  ms.seed = seed;
  ms.channels = channels;
  ms.data.resize(lat.size());

  std::vector<double> u_abs(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) u_abs[i] = noise.perturb(std::abs(exact_u[i]));
  const std::vector<double> c = scaling_factors(u_abs, lat);

  for (std::size_t i = 0; i < lat.size(); ++i) {
    const LatticePoint& p = lat.points[i];
    const ReferenceOffsets off = reference_offsets(p.k, p.is_zero());
    Measurement& d = ms.data[i];
    d.u_abs = u_abs[i];
    d.alpha1 = off.alpha1;
    d.alpha2 = off.alpha2;
    d.c1 = c[i];
    d.c2 = c[i];
    d.v1_abs = std::abs(augmented_farfield(exact_u[i], d.c1, p.k, d.alpha1, lat.m));
    d.v2_abs = std::abs(augmented_farfield(exact_u[i], d.c2, p.k, d.alpha2, lat.m));
    if (channels == NoiseChannels::All) {
      d.v1_abs = noise.perturb(d.v1_abs);
      d.v2_abs = noise.perturb(d.v2_abs);
    }
  }
  if (keep_exact) ms.exact_u.assign(exact_u.begin(), exact_u.end());
  return ms;
}

MeasurementSet synthesize(const SourceField& s, const FrequencyLattice& lat, const SynthOptions& opts) {
  const std::vector<Complex> u = farfield_lattice(s, lat, opts.quadrature);
  MeasurementSet ms = measure(u, lat, opts.eps, opts.seed, opts.keep_exact, opts.channels);
  ms.quad_nodes = opts.quadrature.nodes_per_axis;
  return ms;
}

}  // namespace phaseless
