#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "phaseless/error.hpp"
#include "phaseless/experiment.hpp"
#include "phaseless/recon.hpp"
#include "phaseless/retrieval.hpp"

namespace phaseless {

bool VerifyReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// Gaussian elimination with partial pivoting; deliberately not Cramer's rule.
std::array<double, 2> solve2(Mat2 a, std::array<double, 2> b) {
  if (std::abs(a[1][0]) > std::abs(a[0][0])) {
    std::swap(a[0], a[1]);
    std::swap(b[0], b[1]);
  }
  const double f = a[1][0] / a[0][0];
  const double a11 = a[1][1] - f * a[0][1];
  const double b1 = b[1] - f * b[0];
  const double y = b1 / a11;
  return {(b[0] - a[0][1] * y) / a[0][0], y};
}

// Two-dimensional lattice on the unit box.
double max_det_deviation(const FrequencyLattice& lat, double perturbation) {
  double worst = 0;
  for (const auto& p : lat.points) {
    ReferenceOffsets off = reference_offsets(p.k, p.is_zero());
    off.alpha2 += perturbation;
    const double d = std::abs(det(retrieval_matrices(p.k, off.alpha1, off.alpha2, lat.m).A));
    const double expected = p.is_zero() ? 9.0 / (8.0 * kPi * kPi) : 1.0 / (8.0 * kPi * p.k);
    worst = std::max(worst, std::abs(d - expected) / expected);
  }
  return worst;
}

}  // namespace

VerifyReport verify_suite(const VerifyOptions& options) {
  VerifyReport rep;
  auto check = [&rep](std::string name, auto&& body) {
    CheckResult r{std::move(name), false, {}};
    try {
      body(r);
    } catch (const std::exception& e) {
      r.passed = false;
      r.detail = std::string("exception: ") + e.what();
    }
    rep.checks.push_back(std::move(r));
  };

  const FrequencyLattice lat2 = build_lattice(Dimension::Two, 20, 1.0);
  const SourceField s1 = SourceField::builtin(SourceKind::S1);
  const QuadratureSpec q2 = QuadratureSpec::defaults(Dimension::Two);
  const std::vector<Complex> exact_s1 = farfield_lattice(s1, lat2, q2);

  check("lattice cardinality and wavenumbers", [&](CheckResult& r) {
    const FrequencyLattice lat3 = build_lattice(Dimension::Three, 6, 1.0);
    double worst = 0;
    for (const auto* lat : {&lat2, &lat3}) {
      for (const auto& p : lat->points) {
        if (p.is_zero()) continue;
        const double len = norm(Vec{double(p.l[0]), double(p.l[1]), double(p.l[2])}, lat->m);
        worst = std::max(worst, std::abs(p.k * lat->a / (2 * kPi) - len) / len);
      }
    }
    r.passed = lat2.size() == 1681 && lat3.size() == 2197 && worst <= 1e-12;
    r.detail = "sizes " + std::to_string(lat2.size()) + ", " + std::to_string(lat3.size()) + "; max rel dev " + fmt(worst);
  });

  check("det A closed form on random parameters", [&](CheckResult& r) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> k(0.1, 200.0), alpha(-5.0, 5.0);
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const double kk = k(rng), a1 = alpha(rng), a2 = alpha(rng);
      for (Dimension m : {Dimension::Two, Dimension::Three}) {
        const double g2 = std::norm(gamma(m, kk));
        const double d = std::abs(det(retrieval_matrices(kk, a1, a2 + options.alpha2_perturbation, m).A));
        worst = std::max(worst, std::abs(d - g2 * std::abs(std::sin(kk * (a1 - a2)))) / g2);
      }
    }
    r.passed = worst <= 1e-12;
    r.detail = "max deviation / |gamma|^2 = " + fmt(worst);
  });

  check("det A closed-form values on the lattice", [&](CheckResult& r) {
    const double worst = max_det_deviation(lat2, options.alpha2_perturbation);
    r.passed = worst <= 1e-12;
    r.detail = "max rel deviation from 1/(8 pi k), 9/(8 pi^2): " + fmt(worst);
  });

  check("Cramer solution matches elimination and reproduces f", [&](CheckResult& r) {
    const MeasurementSet ms = measure(exact_s1, lat2, 0.01, 3);
    double worst_solve = 0, worst_residual = 0;
    for (std::size_t i = 0; i < lat2.size(); ++i) {
      const auto& p = lat2.points[i];
      const auto& d = ms.data[i];
      const RetrievedPoint rp = retrieve_point(p, d, lat2.m);
      const double f1 = rhs_f(d.v1_abs, d.u_abs, d.c1, lat2.m, p.k);
      const double f2 = rhs_f(d.v2_abs, d.u_abs, d.c2, lat2.m, p.k);
      const Mat2 A = retrieval_matrices(p.k, d.alpha1, d.alpha2, lat2.m).A;
      const auto x = solve2(A, {f1, f2});
      const double scale = std::max({std::abs(x[0]), std::abs(x[1]), 1e-300});
      worst_solve = std::max(worst_solve, std::abs(Complex(x[0], x[1]) - rp.u) / scale);
      const double fscale = std::max({std::abs(f1), std::abs(f2), 1e-300});
      const double r1 = A[0][0] * rp.u.real() + A[0][1] * rp.u.imag() - f1;
      const double r2 = A[1][0] * rp.u.real() + A[1][1] * rp.u.imag() - f2;
      worst_residual = std::max(worst_residual, std::max(std::abs(r1), std::abs(r2)) / fscale);
    }
    r.passed = worst_solve <= 1e-12 && worst_residual <= 1e-12;
    r.detail = "solve " + fmt(worst_solve) + ", residual " + fmt(worst_residual);
  });

  check("noiseless retrieval is exact (S1, N = 20)", [&](CheckResult& r) {
    const RetrievedField rf = retrieve_all(measure(exact_s1, lat2, 0.0, 0));
    const std::vector<Complex> u = rf.values();
    const ErrorReport e = relative_errors(u, exact_s1);
    r.passed = e.rel_linf <= 1e-9;
    r.detail = "relative sup error " + fmt(e.rel_linf);
  });

  check("noise bound", [&](CheckResult& r) {
    std::vector<double> moduli;
    for (const auto& u : exact_s1) moduli.push_back(std::abs(u));
    const double ref = *std::max_element(moduli.begin(), moduli.end());
    bool ok = true;
    for (double eps : {0.001, 0.01, 0.1, 0.5}) {
      const auto noisy = add_noise(moduli, eps, 11);
      for (std::size_t i = 0; i < moduli.size(); ++i) ok = ok && std::abs(noisy[i] - moduli[i]) <= eps * ref;
    }
    r.passed = ok;
    r.detail = ok ? "holds" : "violated";
  });

  check("stability bound C_eps across seeds (S1, N = 20)", [&](CheckResult& r) {
    double worst = 0;
    for (double eps : {0.001, 0.01, 0.05, 0.1}) {
      for (int seed = 0; seed < options.stability_seeds; ++seed) {
        const std::vector<Complex> u = retrieve_all(measure(exact_s1, lat2, eps, std::uint64_t(seed))).values();
        worst = std::max(worst, stability_ratio(lat2, u, exact_s1) / stability_constant(eps));
      }
    }
    r.passed = worst <= 1.0;
    r.detail = "max ratio / C_eps = " + fmt(worst);
  });

  check("conjugate symmetry of the unscaled far field", [&](CheckResult& r) {
    double worst = 0, scale = 0;
    for (std::size_t i = 1; i < lat2.size(); ++i) {
      const auto& p = lat2.points[i];
      const auto j = lat2.index_of(IVec{-p.l[0], -p.l[1], -p.l[2]});
      const Complex wi = exact_s1[i] / gamma(lat2.m, p.k);
      const Complex wj = exact_s1[std::size_t(j)] / gamma(lat2.m, p.k);
      worst = std::max(worst, std::abs(wj - std::conj(wi)));
      scale = std::max(scale, std::abs(wi));
    }
    r.passed = worst <= 1e-10 * scale;
    r.detail = "max |w(-x) - conj w(x)| / max |w| = " + fmt(worst / scale);
  });

  check("band-limited source is recovered exactly (N = 8)", [&](CheckResult& r) {
    const SourceField bl = random_trig_series(Dimension::Two, 8, 1.0, 42);
    const FrequencyLattice lat = build_lattice(Dimension::Two, 8, 1.0);
    const std::vector<Complex> u = farfield_lattice(bl, lat, q2);
    const FourierModel model = fourier_model(retrieve_all(measure(u, lat, 0.0, 0)));
    double worst = 0, s0err = 0;
    for (const auto& mode : bl.modes()) {
      if (mode.l == IVec{0, 0, 0}) {
        s0err = std::abs(model.s0 - mode.coeff) / std::abs(mode.coeff);
      } else {
        worst = std::max(worst, std::abs(model.coefficient(mode.l) - mode.coeff) / std::abs(mode.coeff));
      }
    }
    r.passed = worst <= 1e-8 && s0err <= 1e-2;
    r.detail = "modes " + fmt(worst) + ", s0 " + fmt(s0err);
  });

  check("separable evaluation matches direct summation; Parseval", [&](CheckResult& r) {
    const SourceField bl = random_trig_series(Dimension::Two, 5, 1.0, 9);
    FourierModel model;
    model.N = 5;
    model.a = 1.0;
    model.m = Dimension::Two;
    const FrequencyLattice lat = build_lattice(Dimension::Two, 5, 1.0);
    for (const auto& mode : bl.modes()) {
      if (mode.l == IVec{0, 0, 0}) model.s0 = mode.coeff;
    }
    for (std::size_t i = 1; i < lat.size(); ++i) {
      for (const auto& mode : bl.modes()) {
        if (mode.l == lat.points[i].l) model.coeffs.push_back({mode.l, mode.coeff});
      }
    }
    const int n = 32;
    const EvaluationGrid grid{n, -0.5, 0.5 - 1.0 / n, Dimension::Two};
    const GridValues gv = evaluate_model(model, grid);
    double worst = 0, grid_norm2 = 0, coeff_norm2 = std::norm(model.s0);
    for (std::size_t i = 0; i < gv.values.size(); ++i) {
      worst = std::max(worst, std::abs(gv.values[i] - evaluate_model_at(model, grid.node(i)).real()));
      grid_norm2 += gv.values[i] * gv.values[i] / double(n * n);
    }
    for (const auto& c : model.coeffs) coeff_norm2 += std::norm(c.value);
    const double parseval = std::abs(std::sqrt(grid_norm2) - std::sqrt(coeff_norm2)) / std::sqrt(coeff_norm2);
    r.passed = worst <= 1e-10 && parseval <= 1e-12;
    r.detail = "direct " + fmt(worst) + ", Parseval " + fmt(parseval);
  });

  check("truncation rule and C_eps = 4 eta_eps", [&](CheckResult& r) {
    bool ok = truncation_from_noise(0.001) == 20 && truncation_from_noise(0.01) == 10 &&
              truncation_from_noise(0.05) == 6;
    for (double eps : {0.001, 0.01, 0.1, 0.5}) {
      ok = ok && std::abs(stability_constant(eps) - 4 * eta_constant(eps)) <= 1e-14 * stability_constant(eps);
    }
    r.passed = ok;
    r.detail = ok ? "holds" : "violated";
  });

  return rep;
}

}  // namespace phaseless
