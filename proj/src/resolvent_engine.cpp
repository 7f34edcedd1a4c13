#include "momx/resolvent_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "momx/errors.hpp"

namespace momx {

namespace {

CMatrix solve_or_throw(const CMatrix& m, const CMatrix& rhs, const char* what) {
  Eigen::PartialPivLU<CMatrix> lu(m);
  if (m.size() > 0 && !(lu.rcond() > 1e-14)) {
    raise(ErrorKind::SingularMatrix, std::string(what) + " is numerically singular");
  }
  return lu.solve(rhs);
}

// [E - z W]^{-1} for |z| < 1 and the reflected value E - ([E - W / conj z]^{-1})^* outside.
CMatrix chumakin_core(const CMatrix& w, Complex z) {
  const auto n = w.rows();
  const CMatrix e = CMatrix::Identity(n, n);
  if (std::abs(z) < 1.0) return solve_or_throw(e - z * w, e, "E - zW");
  const Complex zr = 1.0 / std::conj(z);
  return e - solve_or_throw(e - zr * w, e, "E - zW").adjoint();
}

std::vector<std::vector<std::pair<int, int>>> trig_chains(int order_j, int order_k) {
  std::vector<std::vector<std::pair<int, int>>> chains(4);
  for (int j = 0; j <= order_j; ++j) chains[0].emplace_back(j, 0);
  for (int k = 0; k <= order_k; ++k) chains[1].emplace_back(0, k);
  for (int i = 0; i <= std::min(order_j, order_k); ++i) chains[2].emplace_back(i, i);
  int j = 0;
  int k = 0;
  chains[3].emplace_back(0, 0);
  for (;;) {
    if (j == k && j + 1 <= order_j) {
      ++j;
    } else if (j > k && k + 1 <= order_k) {
      ++k;
    } else {
      break;
    }
    chains[3].emplace_back(j, k);
  }
  return chains;
}

}  // namespace

Complex to_disk(Complex lambda) { return (lambda - kI) / (lambda + kI); }

Complex from_disk(Complex z) { return kI * (1.0 + z) / (1.0 - z); }

void check_lambda(Complex lambda, double radius) {
  if (std::abs(lambda.imag()) <= radius) {
    raise(ErrorKind::ExcludedPoint, "point lies on (or too close to) the real axis");
  }
  if (std::abs(lambda - kI) <= radius || std::abs(lambda + kI) <= radius) {
    raise(ErrorKind::ExcludedPoint, "point lies in the excluded disk around +i or -i");
  }
}

CMatrix chumakin_resolvent(const IsometricPair& iso, const ContractionParameter& phi, Complex z,
                           const Tolerances& tol) {
  if (!(std::abs(z) < 1.0)) {
    raise(ErrorKind::SingularMatrix, "the isometry resolvent formula needs |z| < 1");
  }
  return chumakin_core(extend_isometry(iso, phi, z, tol), z);
}

CMatrix unitary_moebius(const CMatrix& u, Complex z) {
  const auto n = u.rows();
  const CMatrix e = CMatrix::Identity(n, n);
  return solve_or_throw(e - z * u, e + z * u, "E - zU");
}

CMatrix pair_resolvent_unitary(const CMatrix& u1, const CMatrix& u2, const CMatrix& p, Complex z1,
                               Complex z2, const Tolerances& tol) {
  if (linalg::max_abs(u1 * u2 - u2 * u1) > tol.operator_tol) {
    raise(ErrorKind::CommutationViolated, "U1 and U2 do not commute");
  }
  return p.adjoint() * unitary_moebius(u1, z1) * unitary_moebius(u2, z2) * p;
}

PairResolvent::PairResolvent(IsometricPair iso, ContractionParameter phi, const Tolerances& tol)
    : iso_(std::move(iso)), phi_(std::move(phi)), tol_(tol) {
  if (phi_.is_constant()) {
    if (!commutation_check(iso_, phi_, 0.0, tol_)) {
      raise(ErrorKind::CommutationViolated, "V + Phi does not commute with U");
    }
  }
  if (!admissibility_check(iso_, phi_, tol_)) {
    raise(ErrorKind::AdmissibilityFailed, "parameter is not admissible for A1");
  }
}

CMatrix PairResolvent::upper(Complex lambda1, Complex lambda2) const {
  const Complex z1 = to_disk(lambda1);
  const Complex z2 = to_disk(lambda2);
  if (!phi_.is_constant() && !commutation_check(iso_, phi_, z1, tol_)) {
    raise(ErrorKind::CommutationViolated, "V + Phi(z1) does not commute with U");
  }
  const CMatrix g = chumakin_resolvent(iso_, phi_, z1, tol_);
  const auto n = iso_.dim;
  return (CMatrix::Identity(n, n) - 2.0 * g) * unitary_moebius(iso_.u, z2);
}

CMatrix PairResolvent::operator()(Complex lambda1, Complex lambda2) const {
  check_lambda(lambda1, tol_.excluded_radius);
  check_lambda(lambda2, tol_.excluded_radius);
  if (lambda1.imag() > 0.0) return upper(lambda1, lambda2);
  return upper(std::conj(lambda1), std::conj(lambda2)).adjoint();
}

CMatrix PairResolvent::unitary_form(Complex z1, Complex z2) const {
  if (std::abs(std::abs(z1) - 1.0) <= tol_.excluded_radius ||
      std::abs(std::abs(z2) - 1.0) <= tol_.excluded_radius) {
    raise(ErrorKind::ExcludedPoint, "disk points must stay off the unit circle");
  }
  const Complex zw = std::abs(z1) < 1.0 ? z1 : 1.0 / std::conj(z1);
  const CMatrix w = extend_isometry(iso_, phi_, zw, tol_);
  const auto n = iso_.dim;
  return (-CMatrix::Identity(n, n) + 2.0 * chumakin_core(w, z1)) * unitary_moebius(iso_.u, z2);
}

Complex PairResolvent::scalar(Complex lambda1, Complex lambda2, const CVector& h) const {
  return h.dot((*this)(lambda1, lambda2) * h);
}

CMatrix pair_resolvent_symmetric(const IsometricPair& iso, const ContractionParameter& phi,
                                 Complex lambda1, Complex lambda2, const Tolerances& tol) {
  return PairResolvent(iso, phi, tol)(lambda1, lambda2);
}

CMatrix brute_force_pair_resolvent(const CMatrix& b1, const CMatrix& b2, Complex lambda1,
                                   Complex lambda2) {
  const auto n = b1.rows();
  const CMatrix e = CMatrix::Identity(n, n);
  const CMatrix f1 = (e + lambda1 * b1) * solve_or_throw(b1 - lambda1 * e, e, "B1 - l1");
  const CMatrix f2 = (e + lambda2 * b2) * solve_or_throw(b2 - lambda2 * e, e, "B2 - l2");
  return f1 * f2;
}

Complex kernel_integral(const AtomicMeasure& measure, Complex lambda1, Complex lambda2) {
  Complex sum = 0.0;
  for (const Atom& a : measure.atoms) {
    sum += a.w * ((1.0 + lambda1 * a.t1) / (a.t1 - lambda1)) *
           ((1.0 + lambda2 * a.t2) / (a.t2 - lambda2));
  }
  return sum;
}

bool correspondence_check(const ResolventSample& sample_u, const ResolventSample& sample_s,
                          double tol, double excluded_radius) {
  if (sample_u.kind != PointKind::Z || sample_s.kind != PointKind::Lambda) {
    raise(ErrorKind::PointMismatch, "expected a disk sample and a half-plane sample");
  }
  try {
    check_lambda(sample_s.p1, excluded_radius);
    check_lambda(sample_s.p2, excluded_radius);
  } catch (const Error& e) {
    raise(ErrorKind::PointMismatch, std::string("half-plane sample is excluded: ") + e.what());
  }
  const Complex z1 = to_disk(sample_s.p1);
  const Complex z2 = to_disk(sample_s.p2);
  const double point_tol = 1e-12;
  if (std::abs(z1 - sample_u.p1) > point_tol * std::max(1.0, std::abs(z1)) ||
      std::abs(z2 - sample_u.p2) > point_tol * std::max(1.0, std::abs(z2))) {
    raise(ErrorKind::PointMismatch, "samples are not related by z = (l - i)/(l + i)");
  }
  if (sample_u.matrix.rows() != sample_s.matrix.rows() ||
      sample_u.matrix.cols() != sample_s.matrix.cols()) {
    raise(ErrorKind::PointMismatch, "sample matrices have different shapes");
  }
  return linalg::max_abs(sample_u.matrix + sample_s.matrix) <= tol;
}

double TrigMomentTable::min_toeplitz_eigenvalue() const {
  double result = std::numeric_limits<double>::infinity();
  for (const auto& chain : trig_chains(order_j, order_k)) {
    const auto n = static_cast<Eigen::Index>(chain.size());
    CMatrix t(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      for (Eigen::Index b = a; b < n; ++b) {
        const Complex v = c(chain[b].first - chain[a].first, chain[b].second - chain[a].second);
        t(b, a) = v;
        t(a, b) = std::conj(v);
      }
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(t, Eigen::EigenvaluesOnly);
    result = std::min(result, eig.eigenvalues()(0));
  }
  return result;
}

bool TrigMomentTable::is_psd(double tol) const {
  const double c00 = c(0, 0).real();
  if (!(c00 > 0.0) || std::abs(c(0, 0).imag()) > tol * std::max(1.0, c00)) return false;
  if (c.cwiseAbs().maxCoeff() > c00 * (1.0 + tol)) return false;
  return min_toeplitz_eigenvalue() >= -tol * std::max(1.0, c00);
}

TrigMomentTable trig_moments_from_resolvent(const IsometricPair& iso,
                                            const ContractionParameter& phi, const CVector& h00,
                                            int order_j, int order_k, const Tolerances& tol) {
  if (!phi.is_constant()) {
    raise(ErrorKind::NotSupported, "trigonometric moments need a constant parameter");
  }
  const CMatrix w = extend_isometry(iso, phi.matrix(), tol);
  // coefficient of z1^j z2^k in -F is w_j w_k (h, W^j U^k h)
  std::vector<CVector> left(static_cast<std::size_t>(order_j) + 1);
  left[0] = h00;
  for (int j = 1; j <= order_j; ++j) left[j] = w.adjoint() * left[j - 1];
  TrigMomentTable table;
  table.order_j = order_j;
  table.order_k = order_k;
  table.c = CMatrix(order_j + 1, order_k + 1);
  CVector right = h00;
  for (int k = 0; k <= order_k; ++k) {
    if (k > 0) right = iso.u * right;
    for (int j = 0; j <= order_j; ++j) table.c(j, k) = left[j].dot(right);
  }
  return table;
}

TrigMomentTable trig_moments_of_measure(const AtomicMeasure& measure, int order_j, int order_k) {
  TrigMomentTable table;
  table.order_j = order_j;
  table.order_k = order_k;
  table.c = CMatrix::Zero(order_j + 1, order_k + 1);
  for (const Atom& a : measure.atoms) {
    const double th1 = std::arg((a.t1 + kI) / (a.t1 - kI));
    const double th2 = std::arg((a.t2 + kI) / (a.t2 - kI));
    for (int j = 0; j <= order_j; ++j) {
      for (int k = 0; k <= order_k; ++k) {
        table.c(j, k) += a.w * std::exp(kI * (j * th1 + k * th2));
      }
    }
  }
  return table;
}

}  // namespace momx
