#pragma once

#include <utility>
#include <vector>

#include "momx/linalg.hpp"
#include "momx/moment_core.hpp"
#include "momx/tolerances.hpp"
#include "momx/types.hpp"

namespace momx {

// Quotient Hilbert space of polynomials in the box m <= d_m, n <= d_n under
// the form (p, q) = sum p_{m,n} q_{m',n'} s_{m+m', n+n'}.
struct GnsSpace {
  int d_m = 0;
  int d_n = 0;
  std::vector<std::pair<int, int>> monomial_index;
  RMatrix gram;
  int rank = 0;
  // Column j holds the coordinates of the class of monomial_index[j].
  RMatrix coords;
  double rank_tol = 1e-9;
  double lambda_max = 0.0;

  Eigen::Index column_of(int m, int n) const;
  RVector class_of(int m, int n) const { return coords.col(column_of(m, n)); }
};

// A symmetric operator given by an orthonormal basis of its domain (columns
// of `domain`, r x k) and its action on that basis (r x k).
struct PartialOperator {
  CMatrix domain;
  CMatrix action;

  Eigen::Index domain_dim() const { return domain.cols(); }
  CVector apply(const CVector& x) const;  // x must lie in the domain
  bool contains(const CVector& x, double tol) const;
};

struct SymmetricPair {
  Eigen::Index dim = 0;
  PartialOperator a1;
  PartialOperator a2;
  CVector h00;
  // Conjugation J x = J_matrix * conj(x).
  CMatrix j_matrix;
  bool a2_selfadjoint = false;

  linalg::Antilinear j() const { return {j_matrix}; }
  // Full matrix of A2 when a2_selfadjoint holds (domain coordinates undone).
  CMatrix a2_full() const;

  // Symmetry, commutation on the common domain, conjugation properties and
  // the self-adjoint flag consistency. Raises InputError describing the first
  // failed invariant.
  void validate(const Tolerances& tol) const;
};

GnsSpace build_gns(const MomentTable& table, int d_m, int d_n, double rank_tol = 1e-9);

SymmetricPair build_operators(const GnsSpace& gns, const Tolerances& tol = {});

struct QuasianalyticReport {
  CarlemanReport carleman;
  // Largest |computed norm^2 - (s_{2m,2k} + s_{2m+2,2k})| over the k reachable
  // inside the built space, relative to 1 + |s|; -1 when nothing was checkable.
  double max_identity_error = -1.0;
  int checked_terms = 0;
  bool identity_holds = true;
};

// Norms ||A2^k (h_{m+1,0} - i h_{m,0})|| computed through the moment identity,
// cross-checked against the operators of `pair` (h_{m,0} = A1^m h00) wherever
// the powers stay inside their domains.
QuasianalyticReport quasianalytic_vector_check(const SymmetricPair& pair, const MomentTable& table,
                                               int m, int K, const CarlemanOptions& options = {});

}  // namespace momx
