#include "phaseless/retrieval.hpp"

#include <cmath>
#include <sstream>

#include "phaseless/error.hpp"

namespace phaseless {

double rhs_f(double v_abs, double u_abs, double c, Dimension m, double k) {
  if (!(c > 0)) throw DegenerateDataError("retrieval needs a positive scaling factor c");
  const double g = std::abs(gamma(m, k));
  const double cg = c * g;
  return ((v_abs - u_abs) * (v_abs + u_abs) - cg * cg) / (2.0 * c);
}

RetrievalMatrices retrieval_matrices(double k, double alpha1, double alpha2, Dimension m) {
  const Complex g = gamma(m, k);
  RetrievalMatrices r;
  r.t1 = k * alpha1;
  r.t2 = k * alpha2;
  const double t[2] = {r.t1, r.t2};
  for (int j = 0; j < 2; ++j) {
    const double s = std::sin(t[j]), c = std::cos(t[j]);
    r.A[j][0] = -g.imag() * s - g.real() * c;
    r.A[j][1] = g.real() * s - g.imag() * c;
  }
  return with_rhs(r, 0.0, 0.0);
}

RetrievalMatrices with_rhs(RetrievalMatrices mats, double f1, double f2) {
  mats.f1 = f1;
  mats.f2 = f2;
  mats.AR = Mat2{{{f1, mats.A[0][1]}, {f2, mats.A[1][1]}}};
  mats.AI = Mat2{{{mats.A[0][0], f1}, {mats.A[1][0], f2}}};
  return mats;
}

namespace {

double condition_number(const Mat2& a) {
  const double fro2 = a[0][0] * a[0][0] + a[0][1] * a[0][1] + a[1][0] * a[1][0] + a[1][1] * a[1][1];
  const double d = std::abs(det(a));
  if (d == 0) return INFINITY;
  const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * d * d));
  return std::max(1.0, (fro2 + disc) / (2.0 * d));  // roundoff can dip just below 1
}

}  // namespace

RetrievedPoint retrieve_point(const LatticePoint& p, const Measurement& meas, Dimension m) {
  const double f1 = rhs_f(meas.v1_abs, meas.u_abs, meas.c1, m, p.k);
  const double f2 = rhs_f(meas.v2_abs, meas.u_abs, meas.c2, m, p.k);
  const RetrievalMatrices mats = with_rhs(retrieval_matrices(p.k, meas.alpha1, meas.alpha2, m), f1, f2);
  const double d = det(mats.A);
  if (!(std::abs(d) >= 1e-14)) {
    std::ostringstream os;
    os << "|det A| = " << std::abs(d) << " below 1e-14 at k = " << p.k;
    throw InvariantError(os.str());
  }
  return RetrievedPoint{Complex(det(mats.AR) / d, det(mats.AI) / d), d, condition_number(mats.A)};
}

std::vector<Complex> RetrievedField::values() const {
  std::vector<Complex> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(p.u);
  return out;
}

RetrievedField retrieve_all(const MeasurementSet& ms) {
  if (ms.data.size() != ms.lattice.size()) throw DomainError("measurement set does not cover the lattice");
  RetrievedField rf;
  rf.lattice = ms.lattice;
  rf.noise_eps = ms.noise_eps;
  rf.seed = ms.seed;
  rf.points.reserve(ms.data.size());
  for (std::size_t i = 0; i < ms.data.size(); ++i) {
    const LatticePoint& p = ms.lattice.points[i];
    auto where = [&] {
      std::ostringstream os;
      os << "lattice point " << i << " l = (" << p.l[0] << "," << p.l[1] << "," << p.l[2] << "): ";
      return os.str();
    };
    try {
      rf.points.push_back(retrieve_point(p, ms.data[i], ms.lattice.m));
    } catch (const DegenerateDataError& e) {
      throw DegenerateDataError(where() + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError(where() + e.what());
    }
  }
  return rf;
}

double stability_constant(double eps) {
  if (!(eps > 0) || !(eps < 1)) throw DomainError("stability constant needs 0 < eps < 1");
  return 2.0 * eps * ((eps + 3.0) * (eps + 2.0) * (eps + 2.0) + 6.0) / (1.0 - eps);
}

double eta_constant(double eps) {
  if (!(eps > 0) || !(eps < 1)) throw DomainError("eta constant needs 0 < eps < 1");
  return eps * ((eps + 3.0) * (eps + 2.0) * (eps + 2.0) + 6.0) / (2.0 * (1.0 - eps));
}

}  // namespace phaseless
