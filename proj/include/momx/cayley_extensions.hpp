#pragma once

#include <functional>

#include "momx/gns_space.hpp"
#include "momx/linalg.hpp"
#include "momx/tolerances.hpp"
#include "momx/types.hpp"

namespace momx {

// Cayley transform V = (A + i)(A - i)^{-1} of a symmetric partial operator.
struct IsometryData {
  CMatrix domain;  // orthonormal basis of D(V) = (A - i) D(A)
  CMatrix action;  // V applied to each domain basis vector (r x k)
  CMatrix range;   // orthonormal basis of R(V) = (A + i) D(A)
};

// V = Cayley(A1) and U = Cayley(A2), with the defect subspaces of V:
// H1 = D(V), H2 = N0 = H - D(V), H3 = R(V), H4 = Ninf = H - R(V).
struct IsometricPair {
  Eigen::Index dim = 0;
  CMatrix v_domain;
  CMatrix v_action;
  CMatrix v_range;
  CMatrix n0;
  CMatrix ninf;
  CMatrix u;

  // V on D(V) and zero on N0.
  CMatrix v_partial() const { return v_action * v_domain.adjoint(); }
  Eigen::Index defect() const { return n0.cols(); }
};

// Linear contraction N0 -> Ninf in the coordinates of the two bases.
class ContractionParameter {
 public:
  enum class Kind { Constant, Pointwise };

  static ContractionParameter constant(CMatrix phi);
  static ContractionParameter pointwise(std::function<CMatrix(Complex)> phi);

  Kind kind() const { return kind_; }
  bool is_constant() const { return kind_ == Kind::Constant; }
  const CMatrix& matrix() const;
  CMatrix at(Complex z) const;

 private:
  Kind kind_ = Kind::Constant;
  CMatrix matrix_;
  std::function<CMatrix(Complex)> evaluator_;
};

struct ConjugationFactorization {
  linalg::Antilinear k;
  linalg::Antilinear l;
};

IsometryData cayley(const SymmetricPair& pair, int which, const Tolerances& tol = {});
IsometryData cayley(const PartialOperator& op, Eigen::Index dim, const Tolerances& tol = {});

// Builds V, U and the four subspaces; requires a2_selfadjoint and checks that
// U is unitary, fixed-point free and reduces H1..H4 (StructureViolation).
IsometricPair make_isometric_pair(const SymmetricPair& pair, const Tolerances& tol = {});

CMatrix inverse_cayley(const CMatrix& u, const Tolerances& tol = {});

// Hermitian matrix to unitary (A + i)(A - i)^{-1}.
CMatrix cayley_full(const CMatrix& a);

CMatrix extend_isometry(const IsometricPair& iso, const ContractionParameter& phi, Complex z,
                        const Tolerances& tol = {});
CMatrix extend_isometry(const IsometricPair& iso, const CMatrix& phi, const Tolerances& tol = {});

ConjugationFactorization godich_lutsenko(const CMatrix& w, const Tolerances& tol = {});

CMatrix fixed_subspace(const CMatrix& w, double tol);

struct StrippedPair {
  CMatrix basis;  // orthonormal basis of the reduced space in the input space
  CMatrix w1;
  CMatrix w2;
};

StrippedPair strip_fixed_elements(const CMatrix& w1, const CMatrix& w2, const CMatrix& h_embed,
                                  const Tolerances& tol = {});

// Domain of X_i is N_i ∩ (N_{-i} + D(A)); both are expressed in the N0 / Ninf
// coordinates of the Cayley transform.
struct ForbiddenOperator {
  CMatrix domain;   // orthonormal columns in N0 coordinates (p x q)
  CMatrix values;   // X_i applied to each domain column, in Ninf coordinates
  CMatrix ambient_domain;
  double max_residual = 0.0;
};

ForbiddenOperator forbidden_operator(const SymmetricPair& pair, int which,
                                     const Tolerances& tol = {});
ForbiddenOperator forbidden_operator(const IsometricPair& iso, const Tolerances& tol = {});

bool admissibility_check(const SymmetricPair& pair, const ContractionParameter& phi,
                         const Tolerances& tol = {});
bool admissibility_check(const IsometricPair& iso, const ContractionParameter& phi,
                         const Tolerances& tol = {});

bool commutation_check(const IsometricPair& iso, const ContractionParameter& phi, Complex z,
                       const Tolerances& tol = {});

CMatrix minimal_subspace(const CMatrix& u, const CMatrix& h_embed, double tol = 1e-9);

}  // namespace momx
