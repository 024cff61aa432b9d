#include "phaseless/recon.hpp"

#include <algorithm>
#include <cmath>

#include "phaseless/error.hpp"

namespace phaseless {

Complex FourierModel::coefficient(const IVec& l) const {
  const std::ptrdiff_t pos = lattice_position(l, N, m);
  if (pos < 0) throw DomainError("coefficient index outside the truncation");
  return pos == 0 ? s0 : coeffs[std::size_t(pos - 1)].value;
}

Complex coeff_from_farfield(Complex u, double a, Dimension m, double k) {
  return -u / (std::pow(a, dim(m)) * gamma(m, k));
}

double mode_overlap(const IVec& l, const Vec& l0, double a, Dimension m) {
  double prod = 1;
  for (int j = 0; j < dim(m); ++j) {
    const double d = l[j] - l0[j];
    if (d == 0) {
      prod *= a;
    } else if (d == std::round(d)) {
      return 0.0;
    } else {
      prod *= a * std::sin(kPi * d) / (kPi * d);
    }
  }
  return prod;
}

Complex coeff_zero(Complex u0, const std::vector<FourierCoefficient>& coeffs, double a, Dimension m, double lambda) {
  const double kstar = 2.0 * kPi * lambda / a;
  const Vec l0{lambda, 0.0, 0.0};
  Complex sum = 0;
  for (const auto& c : coeffs) sum += c.value * mode_overlap(c.l, l0, a, m);
  const double prefactor = -lambda * kPi / (std::pow(a, dim(m)) * std::sin(lambda * kPi));
  return prefactor * (u0 / gamma(m, kstar) + sum);
}

int truncation_from_noise(double eps) {
  if (eps == 0) throw ConfigError("noise-free runs need an explicit truncation N");
  if (!(eps > 0) || !(eps < 1)) throw DomainError("truncation rule needs 0 < eps < 1");
  double x = std::pow(eps, -1.0 / 3.0);
  // 0.001^{-1/3} evaluates to 9.999999999999998; snap such values to the integer.
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * r) x = r;
  return 2 * static_cast<int>(std::ceil(x));
}

FourierModel fourier_model(const FrequencyLattice& lat, std::span<const Complex> u) {
  if (u.size() != lat.size()) throw DomainError("far-field data does not match the lattice");
  FourierModel model;
  model.N = lat.N;
  model.a = lat.a;
  model.m = lat.m;
  model.lambda = lat.lambda;
  model.coeffs.reserve(lat.size() - 1);
  for (std::size_t i = 1; i < lat.size(); ++i) {
    const LatticePoint& p = lat.points[i];
    model.coeffs.push_back(FourierCoefficient{p.l, coeff_from_farfield(u[i], lat.a, lat.m, p.k)});
  }
  model.s0 = coeff_zero(u[0], model.coeffs, lat.a, lat.m, lat.lambda);
  return model;
}

FourierModel fourier_model(const RetrievedField& rf) {
  const std::vector<Complex> u = rf.values();
  return fourier_model(rf.lattice, u);
}

EvaluationGrid EvaluationGrid::over_domain(Dimension m, double a, int resolution) {
  return EvaluationGrid{resolution, -0.5 * a, 0.5 * a, m};
}

std::vector<double> EvaluationGrid::axis() const {
  if (resolution < 2) throw ConfigError("evaluation grid needs at least 2 nodes per axis");
  std::vector<double> x(static_cast<std::size_t>(resolution));
  for (int i = 0; i < resolution; ++i) x[std::size_t(i)] = lo + (hi - lo) * i / (resolution - 1);
  return x;
}

std::size_t EvaluationGrid::size() const {
  std::size_t n = 1;
  for (int j = 0; j < dim(m); ++j) n *= std::size_t(resolution);
  return n;
}

Vec EvaluationGrid::node(std::size_t flat) const {
  const auto x = axis();
  Vec v{};
  for (int j = dim(m) - 1; j >= 0; --j) {
    v[j] = x[flat % std::size_t(resolution)];
    flat /= std::size_t(resolution);
  }
  return v;
}

GridValues evaluate_model(const FourierModel& model, const EvaluationGrid& grid) {
  if (grid.m != model.m) throw DomainError("grid and model dimensions differ");
  const int N = model.N;
  const std::size_t Q = std::size_t(2 * N + 1);
  const bool three = model.m == Dimension::Three;
  const std::size_t Q2 = three ? Q : 1;
  const auto x = grid.axis();
  const std::size_t n = x.size();
  const std::size_t n2 = three ? n : 1;
  const double w = 2.0 * kPi / model.a;

  // Dense coefficient block C[q0][q1][q2], q = l + N.
  std::vector<Complex> c(Q * Q * Q2);
  auto slot = [&](const IVec& l) {
    return (std::size_t(l[0] + N) * Q + std::size_t(l[1] + N)) * Q2 + (three ? std::size_t(l[2] + N) : 0);
  };
  c[slot(IVec{0, 0, 0})] = model.s0;
  for (const auto& fc : model.coeffs) c[slot(fc.l)] = fc.value;

  // phase[q][i] = exp(i w (q - N) x_i)
  std::vector<Complex> phase(Q * n);
  for (std::size_t q = 0; q < Q; ++q)
    for (std::size_t i = 0; i < n; ++i) phase[q * n + i] = std::polar(1.0, w * (double(q) - N) * x[i]);
  auto ph2 = [&](std::size_t q, std::size_t i) { return three ? phase[q * n + i] : Complex(1.0); };

  std::vector<Complex> g1(Q * Q * n2);
  for (std::size_t q0 = 0; q0 < Q; ++q0)
    for (std::size_t q1 = 0; q1 < Q; ++q1)
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        Complex s = 0;
        for (std::size_t q2 = 0; q2 < Q2; ++q2) s += c[(q0 * Q + q1) * Q2 + q2] * ph2(q2, i2);
        g1[(q0 * Q + q1) * n2 + i2] = s;
      }

  std::vector<Complex> g2(Q * n * n2);
  for (std::size_t q0 = 0; q0 < Q; ++q0)
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        Complex s = 0;
        for (std::size_t q1 = 0; q1 < Q; ++q1) s += phase[q1 * n + i1] * g1[(q0 * Q + q1) * n2 + i2];
        g2[(q0 * n + i1) * n2 + i2] = s;
      }

  GridValues out;
  out.grid = grid;
  out.values.resize(n * n * n2);
  double max_re = 0, max_im = 0;
  for (std::size_t i0 = 0; i0 < n; ++i0)
    for (std::size_t i1 = 0; i1 < n; ++i1)
      for (std::size_t i2 = 0; i2 < n2; ++i2) {
        Complex s = 0;
        for (std::size_t q0 = 0; q0 < Q; ++q0) s += phase[q0 * n + i0] * g2[(q0 * n + i1) * n2 + i2];
        out.values[(i0 * n + i1) * n2 + i2] = s.real();
        max_re = std::max(max_re, std::abs(s.real()));
        max_im = std::max(max_im, std::abs(s.imag()));
      }
  out.max_imag_relative = max_re > 0 ? max_im / max_re : max_im;
  return out;
}

Complex evaluate_model_at(const FourierModel& model, const Vec& x) {
  const double w = 2.0 * kPi / model.a;
  Complex sum = model.s0;
  for (const auto& fc : model.coeffs) {
    double phase = 0;
    for (int j = 0; j < dim(model.m); ++j) phase += fc.l[j] * x[j];
    sum += fc.value * std::polar(1.0, w * phase);
  }
  return sum;
}

std::vector<double> sample_on_grid(const std::function<double(const Vec&)>& f, const EvaluationGrid& grid) {
  const auto x = grid.axis();
  const std::size_t n = x.size();
  std::vector<double> out;
  out.reserve(grid.size());
  if (grid.m == Dimension::Two) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out.push_back(f(Vec{x[i], x[j], 0.0}));
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) out.push_back(f(Vec{x[i], x[j], x[k]}));
  }
  return out;
}

}  // namespace phaseless
