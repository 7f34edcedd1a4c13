#pragma once

#include <vector>

#include "momx/types.hpp"

namespace momx::linalg {

// Orthonormal basis of the column span of `m`; singular values at or below
// tol * max(1, sigma_max) are discarded.
CMatrix orthonormal_basis(const CMatrix& m, double tol);

// Orthonormal basis of ker(m) (columns live in C^{m.cols()}).
CMatrix null_space(const CMatrix& m, double tol);

// Orthonormal basis of C^n minus span(basis); `basis` must be orthonormal.
CMatrix orthogonal_complement(const CMatrix& basis, Eigen::Index n, double tol);

// Largest distance from a column of `vectors` to span(basis), basis orthonormal.
double distance_to_span(const CMatrix& basis, const CMatrix& vectors);

double max_abs(const CMatrix& m);

// ||M^H M - I||_max
double unitarity_defect(const CMatrix& m);

bool is_unitary(const CMatrix& m, double tol);

bool is_hermitian(const CMatrix& m, double rel_tol);

// Eigen-decomposition of a normal matrix through the complex Schur form; for
// normal input the triangular factor is diagonal up to rounding, so the Schur
// vectors are an orthonormal eigenbasis.
struct NormalEigen {
  CMatrix vectors;
  CVector values;
};
NormalEigen normal_eigen(const CMatrix& m);

// Groups indices of `values` into clusters whose members are chained by gaps
// of at most tol. Indices within a cluster are ascending.
std::vector<std::vector<Eigen::Index>> cluster_values(const CVector& values, double tol);

// Antilinear maps x -> M * conj(x).
struct Antilinear {
  CMatrix m;

  CVector apply(const CVector& x) const { return m * x.conjugate(); }
};

// a(b(x)) is linear: a.m * conj(b.m).
CMatrix compose(const Antilinear& a, const Antilinear& b);
// l(a(x)) is antilinear.
Antilinear compose(const CMatrix& l, const Antilinear& a);
// a(l(x)) is antilinear.
Antilinear compose(const Antilinear& a, const CMatrix& l);

// Unitary M with M * conj(M) = I (tolerances applied entrywise).
bool is_conjugation(const Antilinear& a, double tol);

}  // namespace momx::linalg
