#include "momx/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace momx::linalg {

namespace {

Eigen::JacobiSVD<CMatrix> svd_of(const CMatrix& m, unsigned int options) {
  return Eigen::JacobiSVD<CMatrix>(m, options);
}

}  // namespace

CMatrix orthonormal_basis(const CMatrix& m, double tol) {
  if (m.cols() == 0 || m.rows() == 0) return CMatrix(m.rows(), 0);
  const auto svd = svd_of(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > cut) ++k;
  return svd.matrixU().leftCols(k);
}

CMatrix null_space(const CMatrix& m, double tol) {
  const Eigen::Index n = m.cols();
  if (n == 0) return CMatrix(0, 0);
  if (m.rows() == 0) return CMatrix::Identity(n, n);
  const auto svd = svd_of(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index k = 0;
  while (k < s.size() && s(k) > cut) ++k;
  return svd.matrixV().rightCols(n - k);
}

CMatrix orthogonal_complement(const CMatrix& basis, Eigen::Index n, double tol) {
  if (basis.cols() == 0) return CMatrix::Identity(n, n);
  return null_space(basis.adjoint(), tol);
}

double distance_to_span(const CMatrix& basis, const CMatrix& vectors) {
  if (vectors.cols() == 0) return 0.0;
  CMatrix residual = vectors;
  if (basis.cols() > 0) residual -= basis * (basis.adjoint() * vectors);
  return residual.colwise().norm().maxCoeff();
}

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double unitarity_defect(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  return max_abs(m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols()));
}

bool is_unitary(const CMatrix& m, double tol) {
  return m.rows() == m.cols() && unitarity_defect(m) <= tol;
}

bool is_hermitian(const CMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return max_abs(m - m.adjoint()) <= rel_tol * std::max(1.0, max_abs(m));
}

NormalEigen normal_eigen(const CMatrix& m) {
  if (m.size() == 0) return {CMatrix(0, 0), CVector(0)};
  Eigen::ComplexSchur<CMatrix> schur(m);
  return {schur.matrixU(), schur.matrixT().diagonal()};
}

std::vector<std::vector<Eigen::Index>> cluster_values(const CVector& values, double tol) {
  const Eigen::Index n = values.size();
  // union-find over pairs closer than tol
  std::vector<Eigen::Index> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](Eigen::Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(values(i) - values(j)) <= tol) parent[find(j)] = find(i);
    }
  }
  std::vector<std::vector<Eigen::Index>> clusters;
  std::vector<Eigen::Index> slot(n, -1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index root = find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<Eigen::Index>(clusters.size());
      clusters.emplace_back();
    }
    clusters[slot[root]].push_back(i);
  }
  return clusters;
}

CMatrix compose(const Antilinear& a, const Antilinear& b) { return a.m * b.m.conjugate(); }

Antilinear compose(const CMatrix& l, const Antilinear& a) { return {l * a.m}; }

Antilinear compose(const Antilinear& a, const CMatrix& l) { return {a.m * l.conjugate()}; }

bool is_conjugation(const Antilinear& a, double tol) {
  if (!is_unitary(a.m, tol)) return false;
  const CMatrix square = compose(a, a);
  return max_abs(square - CMatrix::Identity(a.m.rows(), a.m.cols())) <= tol;
}

}  // namespace momx::linalg
