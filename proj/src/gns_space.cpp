#include "momx/gns_space.hpp"

#include <algorithm>
#include <cmath>

#include "momx/errors.hpp"

namespace momx {

namespace {

// Orthonormal domain basis and action of the shift (m,n) -> (m+dm, n+dn) on
// the classes whose shift stays inside the box.
PartialOperator fit_shift(const GnsSpace& gns, int dm, int dn, const Tolerances& tol,
                          bool* hermitian_full, const char* name) {
  std::vector<Eigen::Index> dom;
  std::vector<Eigen::Index> shifted;
  for (std::size_t j = 0; j < gns.monomial_index.size(); ++j) {
    const auto [m, n] = gns.monomial_index[j];
    if (m + dm <= gns.d_m && n + dn <= gns.d_n) {
      dom.push_back(static_cast<Eigen::Index>(j));
      shifted.push_back(gns.column_of(m + dm, n + dn));
    }
  }
  const Eigen::Index r = gns.rank;
  RMatrix cd(r, static_cast<Eigen::Index>(dom.size()));
  RMatrix cs(r, static_cast<Eigen::Index>(dom.size()));
  for (std::size_t c = 0; c < dom.size(); ++c) {
    cd.col(static_cast<Eigen::Index>(c)) = gns.coords.col(dom[c]);
    cs.col(static_cast<Eigen::Index>(c)) = gns.coords.col(shifted[c]);
  }

  PartialOperator op;
  *hermitian_full = false;
  if (r == 0 || cd.cols() == 0) {
    op.domain = CMatrix(r, 0);
    op.action = CMatrix(r, 0);
    return op;
  }
  Eigen::JacobiSVD<RMatrix> svd(cd, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& sv = svd.singularValues();
  const double cut = std::sqrt(gns.rank_tol * gns.lambda_max);
  Eigen::Index k = 0;
  while (k < sv.size() && sv(k) > cut) ++k;
  const RMatrix q = svd.matrixU().leftCols(k);
  const RMatrix w = svd.matrixV().leftCols(k);
  const RVector sinv = sv.head(k).cwiseInverse();
  RMatrix t = cs * w * sinv.asDiagonal();

  const RMatrix y = sinv.cwiseInverse().asDiagonal() * w.transpose();
  const double residual = (t * y - cs).squaredNorm();
  if (residual > tol.shift_residual * gns.lambda_max) {
    raise(ErrorKind::InconsistentShift,
          std::string(name) + " shift fit residual " + std::to_string(residual) +
              " exceeds the gate; shifted classes are not representable in the quotient");
  }

  // Keep the operator exactly symmetric on its domain: replace Q^T T by its
  // symmetric part and leave the component leaving the domain untouched.
  const RMatrix b = q.transpose() * t;
  if (k == r) {
    const RMatrix full = t * q.transpose();
    *hermitian_full = (full - full.transpose()).cwiseAbs().maxCoeff() <=
                      tol.operator_tol * std::max(1.0, full.cwiseAbs().maxCoeff());
  }
  t += q * (0.5 * (b.transpose() - b));
  if (k == r) {
    const RMatrix full = t * q.transpose();
    op.domain = CMatrix::Identity(r, r);
    op.action = (0.5 * (full + full.transpose())).cast<Complex>();
  } else {
    op.domain = q.cast<Complex>();
    op.action = t.cast<Complex>();
  }
  return op;
}

double hermitian_defect(const CMatrix& b) {
  return b.size() == 0 ? 0.0 : linalg::max_abs(b - b.adjoint());
}

}  // namespace

Eigen::Index GnsSpace::column_of(int m, int n) const {
  for (std::size_t j = 0; j < monomial_index.size(); ++j) {
    if (monomial_index[j].first == m && monomial_index[j].second == n) {
      return static_cast<Eigen::Index>(j);
    }
  }
  raise(ErrorKind::IndexOutOfRange,
        "class h_{" + std::to_string(m) + "," + std::to_string(n) + "} outside the GNS box");
}

CVector PartialOperator::apply(const CVector& x) const {
  return action * (domain.adjoint() * x);
}

bool PartialOperator::contains(const CVector& x, double tol) const {
  return linalg::distance_to_span(domain, x) <= tol * std::max(1.0, x.norm());
}

CMatrix SymmetricPair::a2_full() const {
  if (a2.domain.cols() != dim) {
    raise(ErrorKind::NotSelfAdjointA2, "A2 is not defined on the whole space");
  }
  return a2.action * a2.domain.adjoint();
}

void SymmetricPair::validate(const Tolerances& tol) const {
  const double t = tol.operator_tol;
  auto fail = [](const std::string& what) { raise(ErrorKind::InputError, what); };
  for (const auto* op : {&a1, &a2}) {
    const char* name = op == &a1 ? "A1" : "A2";
    if (op->domain.rows() != dim || op->action.rows() != dim ||
        op->domain.cols() != op->action.cols()) {
      fail(std::string(name) + " has inconsistent shapes");
    }
    if (op->domain.cols() > 0 && linalg::unitarity_defect(op->domain) > t) {
      fail(std::string(name) + " domain basis is not orthonormal");
    }
    const CMatrix b = op->domain.adjoint() * op->action;
    if (hermitian_defect(b) > t * std::max(1.0, linalg::max_abs(b))) {
      fail(std::string(name) + " is not symmetric on its domain");
    }
  }
  if (h00.size() != dim) fail("h00 has the wrong length");
  if (j_matrix.rows() != dim || j_matrix.cols() != dim) fail("J_matrix has the wrong shape");
  if (!linalg::is_conjugation(j(), t)) fail("J_matrix does not define a conjugation");
  if ((j().apply(h00) - h00).norm() > t * std::max(1.0, h00.norm())) fail("J h00 != h00");

  // common iterated domain {x in D1 ∩ D2 : A1 x in D2, A2 x in D1}, in D1 coordinates
  const CMatrix p1 = CMatrix::Identity(dim, dim) - a1.domain * a1.domain.adjoint();
  const CMatrix p2 = CMatrix::Identity(dim, dim) - a2.domain * a2.domain.adjoint();
  const CMatrix x_to_a2 = a2.action * (a2.domain.adjoint() * a1.domain);
  CMatrix constraints(3 * dim, a1.domain.cols());
  constraints << p2 * a1.domain, p2 * a1.action, p1 * x_to_a2;
  const CMatrix common = linalg::null_space(constraints, tol.subspace_tol);
  if (common.cols() > 0) {
    const CMatrix a2a1 = a2.action * (a2.domain.adjoint() * (a1.action * common));
    const CMatrix a1a2 = a1.action * (a1.domain.adjoint() * (x_to_a2 * common));
    const double scale = std::max(1.0, linalg::max_abs(a1.action) * linalg::max_abs(a2.action));
    if (linalg::max_abs(a1a2 - a2a1) > t * scale) fail("A1 and A2 do not commute");
  }

  if (a2_selfadjoint) {
    if (a2.domain.cols() != dim) fail("a2_selfadjoint set but D(A2) != H");
    const CMatrix full = a2_full();
    if (!linalg::is_hermitian(full, t)) fail("a2_selfadjoint set but A2 is not Hermitian");
  }
}

GnsSpace build_gns(const MomentTable& table, int d_m, int d_n, double rank_tol) {
  GnsSpace gns;
  gns.d_m = d_m;
  gns.d_n = d_n;
  gns.rank_tol = rank_tol;
  gns.monomial_index = monomial_index(d_m, d_n);
  gns.gram = moment_matrix(table, d_m, d_n);

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(gns.gram);
  const RVector& ev = eig.eigenvalues();
  const Eigen::Index size = ev.size();
  gns.lambda_max = std::max(0.0, ev(size - 1));
  if (ev(0) < -rank_tol * gns.lambda_max || (gns.lambda_max == 0.0 && ev(0) < 0.0)) {
    raise(ErrorKind::NotPsd, "Gram matrix has eigenvalue " + std::to_string(ev(0)) +
                                 " below -rank_tol * lambda_max");
  }
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = size - 1; i >= 0; --i) {
    if (ev(i) > rank_tol * gns.lambda_max && ev(i) > 0.0) kept.push_back(i);
  }
  gns.rank = static_cast<int>(kept.size());
  gns.coords = RMatrix::Zero(gns.rank, size);
  for (int row = 0; row < gns.rank; ++row) {
    RVector e = eig.eigenvectors().col(kept[row]);
    // sign convention: h00 coordinate >= 0, tie broken by the first nonzero entry
    Eigen::Index pivot = 0;
    const double tiny = 1e-12 * e.cwiseAbs().maxCoeff();
    while (pivot < size - 1 && std::abs(e(pivot)) <= tiny) ++pivot;
    if (e(pivot) < 0.0) e = -e;
    gns.coords.row(row) = std::sqrt(ev(kept[row])) * e.transpose();
  }
  return gns;
}

SymmetricPair build_operators(const GnsSpace& gns, const Tolerances& tol) {
  if (gns.d_m < 1 || gns.d_n < 1) {
    raise(ErrorKind::InputError, "operators need GNS degrees d_m, d_n >= 1");
  }
  SymmetricPair pair;
  pair.dim = gns.rank;
  bool a1_full = false;
  bool a2_full = false;
  pair.a1 = fit_shift(gns, 1, 0, tol, &a1_full, "A1");
  pair.a2 = fit_shift(gns, 0, 1, tol, &a2_full, "A2");
  if (pair.a1.domain.cols() == 0) {
    raise(ErrorKind::DomainCollapse, "D(A1) = {0} in the quotient space");
  }
  pair.h00 = gns.class_of(0, 0).cast<Complex>();
  pair.j_matrix = CMatrix::Identity(pair.dim, pair.dim);
  pair.a2_selfadjoint = a2_full;
  return pair;
}

QuasianalyticReport quasianalytic_vector_check(const SymmetricPair& pair, const MomentTable& table,
                                               int m, int K, const CarlemanOptions& options) {
  QuasianalyticReport report;
  CarlemanOptions opts = options;
  opts.single_row_variant = false;
  report.carleman = carleman_diagnostic(table, m, K, opts);

  const double in_tol = 1e-9;
  CVector h = pair.h00;
  for (int j = 0; j < m; ++j) {
    if (!pair.a1.contains(h, in_tol)) return report;
    h = pair.a1.apply(h);
  }
  if (!pair.a1.contains(h, in_tol)) return report;
  CVector x = pair.a1.apply(h) - kI * h;
  const double tol = 1e-8;
  for (int k = 0; k <= K; ++k) {
    if (k >= 1) {
      if (!pair.a2.contains(x, in_tol)) break;
      x = pair.a2.apply(x);
    }
    const double expected = table(2 * m, 2 * k) + table(2 * m + 2, 2 * k);
    const double err = std::abs(x.squaredNorm() - expected) / (1.0 + std::abs(expected));
    report.max_identity_error = std::max(report.max_identity_error, err);
    ++report.checked_terms;
    if (err > tol) report.identity_holds = false;
  }
  return report;
}

}  // namespace momx
