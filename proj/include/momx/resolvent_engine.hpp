#pragma once

#include <optional>

#include "momx/cayley_extensions.hpp"
#include "momx/tolerances.hpp"
#include "momx/types.hpp"

namespace momx {

// z = (lambda - i) / (lambda + i)
Complex to_disk(Complex lambda);
// lambda = i (1 + z) / (1 - z)
Complex from_disk(Complex z);

enum class PointKind { Lambda, Z };

struct ResolventSample {
  PointKind kind = PointKind::Lambda;
  Complex p1;
  Complex p2;
  CMatrix matrix;
  std::optional<Complex> scalar;
};

struct TrigMomentTable {
  int order_j = 0;
  int order_k = 0;
  CMatrix c;  // (J+1) x (K+1)

  // Smallest eigenvalue over the Toeplitz matrices of the available chains.
  double min_toeplitz_eigenvalue() const;
  bool is_psd(double tol) const;
};

// Raises ExcludedPoint when lambda is real (|Im| <= r) or within r of +-i.
void check_lambda(Complex lambda, double radius);

CMatrix chumakin_resolvent(const IsometricPair& iso, const ContractionParameter& phi, Complex z,
                           const Tolerances& tol = {});

CMatrix unitary_moebius(const CMatrix& u, Complex z);

CMatrix pair_resolvent_unitary(const CMatrix& u1, const CMatrix& u2, const CMatrix& p, Complex z1,
                               Complex z2, const Tolerances& tol = {});

// Validates the parameter once and evaluates the symmetric pair resolvent at
// many points. Safe to share across threads after construction.
class PairResolvent {
 public:
  PairResolvent(IsometricPair iso, ContractionParameter phi, const Tolerances& tol = {});

  // lambda form; lower half-plane lambda1 is handled through the adjoint rule.
  CMatrix operator()(Complex lambda1, Complex lambda2) const;
  // Unitary pair form at disk points (equals -R_s at matching points).
  CMatrix unitary_form(Complex z1, Complex z2) const;
  Complex scalar(Complex lambda1, Complex lambda2, const CVector& h) const;

  const IsometricPair& iso() const { return iso_; }

 private:
  CMatrix upper(Complex lambda1, Complex lambda2) const;

  IsometricPair iso_;
  ContractionParameter phi_;
  Tolerances tol_;
};

CMatrix pair_resolvent_symmetric(const IsometricPair& iso, const ContractionParameter& phi,
                                 Complex lambda1, Complex lambda2, const Tolerances& tol = {});

// Brute-force value of (E + l1 B1)(B1 - l1)^{-1} (E + l2 B2)(B2 - l2)^{-1} for
// commuting Hermitian B1, B2.
CMatrix brute_force_pair_resolvent(const CMatrix& b1, const CMatrix& b2, Complex lambda1,
                                   Complex lambda2);

// Scalar integral of the product kernel against an atomic measure.
Complex kernel_integral(const AtomicMeasure& measure, Complex lambda1, Complex lambda2);

bool correspondence_check(const ResolventSample& sample_u, const ResolventSample& sample_s,
                          double tol = 1e-9, double excluded_radius = 1e-6);

TrigMomentTable trig_moments_from_resolvent(const IsometricPair& iso,
                                            const ContractionParameter& phi, const CVector& h00,
                                            int order_j, int order_k, const Tolerances& tol = {});

// Direct evaluation c_{j,k} = sum w exp(i (j th1 + k th2)) under t -> (t+i)/(t-i).
TrigMomentTable trig_moments_of_measure(const AtomicMeasure& measure, int order_j, int order_k);

}  // namespace momx
