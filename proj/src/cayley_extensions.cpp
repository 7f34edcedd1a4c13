#include "momx/cayley_extensions.hpp"

#include <algorithm>
#include <cmath>

#include "momx/errors.hpp"

namespace momx {

namespace {

using linalg::max_abs;

double scale_of(const CMatrix& m) { return std::max(1.0, max_abs(m)); }

void require_unitary(const CMatrix& u, const Tolerances& tol, const char* what) {
  if (u.rows() != u.cols() || linalg::unitarity_defect(u) > tol.operator_tol) {
    raise(ErrorKind::NotUnitary, std::string(what) + " is not unitary");
  }
}

// Defect data of an isometry given through its domain and action.
struct DefectData {
  CMatrix v_domain;
  CMatrix v_action;
  CMatrix n0;
  CMatrix ninf;
};

ForbiddenOperator forbidden_from(const DefectData& d, const Tolerances& tol) {
  ForbiddenOperator out;
  const Eigen::Index r = d.v_domain.rows();
  const Eigen::Index p0 = d.n0.cols();
  const Eigen::Index pinf = d.ninf.cols();
  out.domain = CMatrix(p0, 0);
  out.values = CMatrix(pinf, 0);
  out.ambient_domain = CMatrix(r, 0);
  if (p0 == 0) return out;

  // D(A) = (V - E) D(V)
  const CMatrix dom_a = linalg::orthonormal_basis(d.v_action - d.v_domain, tol.subspace_tol);
  CMatrix decomposer(r, pinf + dom_a.cols());
  decomposer << d.ninf, dom_a;
  if (decomposer.cols() > 0 && linalg::null_space(decomposer, tol.subspace_tol).cols() > 0) {
    raise(ErrorKind::NotDirectSum, "N_{-i} and D(A) intersect nontrivially");
  }

  CMatrix stacked(r, p0 + decomposer.cols());
  stacked << d.n0, -decomposer;
  const CMatrix z = linalg::null_space(stacked, tol.subspace_tol);
  if (z.cols() == 0) return out;
  out.domain = linalg::orthonormal_basis(z.topRows(p0), tol.subspace_tol);
  out.ambient_domain = d.n0 * out.domain;
  out.values = CMatrix(pinf, out.domain.cols());
  if (decomposer.cols() == 0) return out;

  Eigen::JacobiSVD<CMatrix> ls(decomposer, Eigen::ComputeThinU | Eigen::ComputeThinV);
  for (Eigen::Index c = 0; c < out.domain.cols(); ++c) {
    const CVector psi = out.ambient_domain.col(c);
    const CVector parts = ls.solve(psi);
    const double residual = (decomposer * parts - psi).norm();
    out.max_residual = std::max(out.max_residual, residual);
    if (residual > tol.operator_tol) {
      raise(ErrorKind::NoDecomposition,
            "psi = phi + d decomposition residual " + std::to_string(residual));
    }
    out.values.col(c) = parts.head(pinf);
  }
  return out;
}

DefectData defect_of(const IsometryData& v, Eigen::Index dim, const Tolerances& tol) {
  return {v.domain, v.action, linalg::orthogonal_complement(v.domain, dim, tol.subspace_tol),
          linalg::orthogonal_complement(v.range, dim, tol.subspace_tol)};
}

bool admissible_from(const DefectData& d, const ContractionParameter& phi,
                     const Tolerances& tol) {
  if (d.n0.cols() == 0) return true;
  if (!phi.is_constant()) {
    raise(ErrorKind::NotSupported,
          "admissibility of a pointwise parameter is only decided for densely defined operators");
  }
  const CMatrix& f = phi.matrix();
  if (f.rows() != d.ninf.cols() || f.cols() != d.n0.cols()) {
    raise(ErrorKind::InputError, "parameter shape does not match the defect spaces");
  }
  const ForbiddenOperator x = forbidden_from(d, tol);
  if (x.domain.cols() == 0) return true;
  const Eigen::Index p0 = f.cols();
  CMatrix m(f.rows() + p0, x.domain.cols());
  m << f * x.domain - x.values, (CMatrix::Identity(p0, p0) - f.adjoint() * f) * x.domain;
  return linalg::null_space(m, tol.subspace_tol).cols() == 0;
}

}  // namespace

ContractionParameter ContractionParameter::constant(CMatrix phi) {
  ContractionParameter p;
  p.kind_ = Kind::Constant;
  p.matrix_ = std::move(phi);
  return p;
}

ContractionParameter ContractionParameter::pointwise(std::function<CMatrix(Complex)> phi) {
  ContractionParameter p;
  p.kind_ = Kind::Pointwise;
  p.evaluator_ = std::move(phi);
  return p;
}

const CMatrix& ContractionParameter::matrix() const {
  if (kind_ != Kind::Constant) raise(ErrorKind::NotSupported, "parameter is not constant");
  return matrix_;
}

CMatrix ContractionParameter::at(Complex z) const {
  return kind_ == Kind::Constant ? matrix_ : evaluator_(z);
}

IsometryData cayley(const PartialOperator& op, Eigen::Index dim, const Tolerances& tol) {
  const Eigen::Index k = op.domain.cols();
  IsometryData out;
  if (k == 0) {
    out.domain = out.action = out.range = CMatrix(dim, 0);
    return out;
  }
  const CMatrix minus = op.action - kI * op.domain;
  const CMatrix plus = op.action + kI * op.domain;
  Eigen::HouseholderQR<CMatrix> qr(minus);
  const CMatrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  const double diag_max = r.diagonal().cwiseAbs().maxCoeff();
  if (r.diagonal().cwiseAbs().minCoeff() <= tol.subspace_tol * std::max(1.0, diag_max)) {
    raise(ErrorKind::SingularShift, "A - i is not injective on the domain");
  }
  out.domain = qr.householderQ() * CMatrix::Identity(dim, k);
  out.action = r.triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(plus);
  if (linalg::unitarity_defect(out.action) > tol.operator_tol) {
    raise(ErrorKind::InputError, "Cayley transform is not isometric; operator is not symmetric");
  }
  out.range = linalg::orthonormal_basis(out.action, tol.subspace_tol);
  return out;
}

IsometryData cayley(const SymmetricPair& pair, int which, const Tolerances& tol) {
  if (which != 1 && which != 2) raise(ErrorKind::InputError, "operator index must be 1 or 2");
  return cayley(which == 1 ? pair.a1 : pair.a2, pair.dim, tol);
}

CMatrix cayley_full(const CMatrix& a) {
  if (a.size() == 0) return a;
  const CMatrix herm = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
  CVector mu(eig.eigenvalues().size());
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double t = eig.eigenvalues()(i);
    mu(i) = (t + kI) / (t - kI);
  }
  return eig.eigenvectors() * mu.asDiagonal() * eig.eigenvectors().adjoint();
}

CMatrix inverse_cayley(const CMatrix& u, const Tolerances& tol) {
  require_unitary(u, tol, "inverse Cayley input");
  if (u.size() == 0) return u;
  const linalg::NormalEigen ne = linalg::normal_eigen(u);
  CVector t(ne.values.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const Complex lambda = ne.values(i);
    if (std::abs(lambda - 1.0) <= tol.fixed_point_tol) {
      raise(ErrorKind::FixedPoint, "unitary has eigenvalue " + std::to_string(lambda.real()) +
                                       (lambda.imag() < 0 ? "" : "+") +
                                       std::to_string(lambda.imag()) + "i near 1");
    }
    t(i) = (kI * (lambda + 1.0) / (lambda - 1.0)).real();
  }
  const CMatrix a = ne.vectors * t.asDiagonal() * ne.vectors.adjoint();
  return 0.5 * (a + a.adjoint());
}

IsometricPair make_isometric_pair(const SymmetricPair& pair, const Tolerances& tol) {
  if (!pair.a2_selfadjoint) {
    raise(ErrorKind::NotSelfAdjointA2, "the isometric pair needs a self-adjoint A2");
  }
  IsometricPair iso;
  iso.dim = pair.dim;
  const IsometryData v = cayley(pair.a1, pair.dim, tol);
  iso.v_domain = v.domain;
  iso.v_action = v.action;
  iso.v_range = v.range;
  iso.n0 = linalg::orthogonal_complement(v.domain, pair.dim, tol.subspace_tol);
  iso.ninf = linalg::orthogonal_complement(v.range, pair.dim, tol.subspace_tol);
  iso.u = cayley_full(pair.a2_full());

  require_unitary(iso.u, tol, "U = Cayley(A2)");
  const linalg::NormalEigen ne = linalg::normal_eigen(iso.u);
  for (Eigen::Index i = 0; i < ne.values.size(); ++i) {
    if (std::abs(ne.values(i) - 1.0) <= tol.fixed_point_tol) {
      raise(ErrorKind::FixedPoint, "Cayley transform of A2 has eigenvalue 1");
    }
  }
  const char* names[] = {"H1 = D(V)", "H2 = N0", "H3 = R(V)", "H4 = Ninf"};
  const CMatrix* spaces[] = {&iso.v_domain, &iso.n0, &iso.v_range, &iso.ninf};
  for (int s = 0; s < 4; ++s) {
    if (linalg::distance_to_span(*spaces[s], iso.u * *spaces[s]) > tol.operator_tol) {
      raise(ErrorKind::StructureViolation, std::string("U does not reduce ") + names[s]);
    }
  }
  return iso;
}

CMatrix extend_isometry(const IsometricPair& iso, const CMatrix& phi, const Tolerances& tol) {
  if (phi.rows() != iso.ninf.cols() || phi.cols() != iso.n0.cols()) {
    raise(ErrorKind::InputError, "parameter must map N0 coordinates (" +
                                     std::to_string(iso.n0.cols()) + ") to Ninf coordinates (" +
                                     std::to_string(iso.ninf.cols()) + ")");
  }
  if (phi.size() > 0) {
    const double smax = Eigen::JacobiSVD<CMatrix>(phi).singularValues()(0);
    if (smax > 1.0 + tol.contraction_slack) {
      raise(ErrorKind::ContractionViolated,
            "parameter has singular value " + std::to_string(smax) + " > 1");
    }
  }
  CMatrix w = iso.v_partial();
  if (phi.size() > 0) w += iso.ninf * phi * iso.n0.adjoint();
  return w;
}

CMatrix extend_isometry(const IsometricPair& iso, const ContractionParameter& phi, Complex z,
                        const Tolerances& tol) {
  return extend_isometry(iso, phi.at(z), tol);
}

ConjugationFactorization godich_lutsenko(const CMatrix& w, const Tolerances& tol) {
  require_unitary(w, tol, "Godich-Lutsenko input");
  const linalg::NormalEigen ne = linalg::normal_eigen(w);
  // L fixes the eigenbasis vectors; K = W L.
  const CMatrix l = ne.vectors * ne.vectors.transpose();
  return {linalg::Antilinear{w * l}, linalg::Antilinear{l}};
}

CMatrix fixed_subspace(const CMatrix& w, double tol) {
  const linalg::NormalEigen ne = linalg::normal_eigen(w);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ne.values.size(); ++i) {
    if (std::abs(ne.values(i) - 1.0) <= tol) keep.push_back(i);
  }
  CMatrix basis(w.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis.col(static_cast<Eigen::Index>(c)) = ne.vectors.col(keep[c]);
  }
  return basis;
}

StrippedPair strip_fixed_elements(const CMatrix& w1, const CMatrix& w2, const CMatrix& h_embed,
                                  const Tolerances& tol) {
  require_unitary(w1, tol, "W1");
  require_unitary(w2, tol, "W2");
  if (max_abs(w1 * w2 - w2 * w1) > tol.operator_tol) {
    raise(ErrorKind::CommutationViolated, "W1 and W2 do not commute");
  }
  const Eigen::Index n = w1.rows();
  const CMatrix f1 = fixed_subspace(w1, tol.fixed_point_tol);
  const CMatrix k1 = linalg::orthogonal_complement(f1, n, tol.subspace_tol);
  const CMatrix w2_hat = k1.adjoint() * w2 * k1;
  const CMatrix f2 = fixed_subspace(w2_hat, tol.fixed_point_tol);
  const CMatrix k2 = k1 * linalg::orthogonal_complement(f2, k1.cols(), tol.subspace_tol);
  if (linalg::distance_to_span(k2, h_embed) > tol.operator_tol) {
    raise(ErrorKind::EmbeddingLost, "embedded subspace meets the fixed elements");
  }
  return {k2, k2.adjoint() * w1 * k2, k2.adjoint() * w2 * k2};
}

ForbiddenOperator forbidden_operator(const SymmetricPair& pair, int which,
                                     const Tolerances& tol) {
  return forbidden_from(defect_of(cayley(pair, which, tol), pair.dim, tol), tol);
}

ForbiddenOperator forbidden_operator(const IsometricPair& iso, const Tolerances& tol) {
  return forbidden_from({iso.v_domain, iso.v_action, iso.n0, iso.ninf}, tol);
}

bool admissibility_check(const SymmetricPair& pair, const ContractionParameter& phi,
                         const Tolerances& tol) {
  return admissible_from(defect_of(cayley(pair, 1, tol), pair.dim, tol), phi, tol);
}

bool admissibility_check(const IsometricPair& iso, const ContractionParameter& phi,
                         const Tolerances& tol) {
  return admissible_from({iso.v_domain, iso.v_action, iso.n0, iso.ninf}, phi, tol);
}

bool commutation_check(const IsometricPair& iso, const ContractionParameter& phi, Complex z,
                       const Tolerances& tol) {
  const CMatrix w = extend_isometry(iso, phi, z, tol);
  return max_abs(w * iso.u - iso.u * w) <= tol.operator_tol * scale_of(iso.u);
}

CMatrix minimal_subspace(const CMatrix& u, const CMatrix& h_embed, double tol) {
  CMatrix basis = linalg::orthonormal_basis(h_embed, tol);
  for (;;) {
    CMatrix grown(u.rows(), 3 * basis.cols());
    grown << basis, u * basis, u.adjoint() * basis;
    CMatrix next = linalg::orthonormal_basis(grown, tol);
    if (next.cols() == basis.cols()) return next;
    basis = std::move(next);
  }
}

}  // namespace momx
