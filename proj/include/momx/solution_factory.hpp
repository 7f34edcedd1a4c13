#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "momx/cayley_extensions.hpp"
#include "momx/gns_space.hpp"
#include "momx/moment_core.hpp"
#include "momx/tolerances.hpp"

namespace momx {

struct SamplerSpec {
  enum class Kind { IdentityOnly, HaarRandom, ExhaustivePhases };
  Kind kind = Kind::IdentityOnly;
  int count = 1;
  std::uint64_t seed = 0;
  int grid = 4;
};

struct CommutantSample {
  CMatrix u2;
  // Reproducibility tag: sample index for Haar draws, grid multi-index
  // flattened for phase grids, 0 for the identity.
  std::uint64_t tag = 0;
};

std::vector<CommutantSample> enumerate_commutant_unitaries(const CMatrix& w2,
                                                           const SamplerSpec& spec,
                                                           const Tolerances& tol = {});

struct CanonicalExtension {
  CMatrix a1_tilde;
  CMatrix u2_used;
  ConjugationFactorization factorization;
  CMatrix u24;
  CMatrix u_tilde;
};

CanonicalExtension canonical_extension(const SymmetricPair& pair, const IsometricPair& iso,
                                       const CMatrix& u2, const Tolerances& tol = {});

struct JointSpectralOptions {
  std::uint64_t seed = 12345;
  int max_retries = 5;
};

AtomicMeasure joint_spectral_measure(const CMatrix& a1, const CMatrix& a2, const CVector& h00,
                                     const Tolerances& tol = {},
                                     const JointSpectralOptions& options = {});

struct SolutionReport {
  AtomicMeasure measure;
  double max_abs_moment_error = 0.0;
  int degrees_m = 0;
  int degrees_n = 0;
  bool determinate = false;
  std::uint64_t u2_seed = 0;
  // Largest |pair resolvent scalar - kernel integral| over the probe points.
  double resolvent_check_error = 0.0;
  bool passed = false;
};

SolutionReport verify_solution(const AtomicMeasure& measure, const MomentTable& table,
                               double tol);

bool determinacy(const SymmetricPair& pair, const Tolerances& tol = {});

struct DefectIndices {
  Eigen::Index a1_domain = 0;
  Eigen::Index a2_domain = 0;
  Eigen::Index dim = 0;
  Eigen::Index a1_defect() const { return dim - a1_domain; }
  Eigen::Index a2_defect() const { return dim - a2_domain; }
};

DefectIndices defect_indices(const SymmetricPair& pair);

struct SolveOptions {
  SamplerSpec sampler;
  double verify_tol = 1e-8;
  std::uint64_t probe_seed = 2024;
  int probe_points = 5;
  double probe_tol = 1e-8;
  JointSpectralOptions spectral;
};

struct RejectedSample {
  std::uint64_t tag = 0;
  std::string reason;
};

struct SolveResult {
  std::vector<SolutionReport> reports;
  std::vector<RejectedSample> rejected;
};

// Operator-driven path; `table` (if given) is what reports are verified
// against, otherwise the moments implied by the pair are used.
SolveResult solve_canonical(const SymmetricPair& pair, const std::optional<MomentTable>& table,
                            const SolveOptions& options = {}, const Tolerances& tol = {});

// Table path: GNS at (d_m, d_n), operators, then the operator path. Raises
// NotSelfAdjointA2 with the defect indices in the message when A2 is not
// self-adjoint on the truncated space.
SolveResult solve_canonical(const MomentTable& table, int d_m, int d_n,
                            const SolveOptions& options = {}, const Tolerances& tol = {});

// s_{a+c, b+d} = (A1^a A2^b h00, A1^c A2^d h00) for every index where the
// powers stay inside the domains, on the largest such rectangle (<= max).
MomentTable moments_of_pair(const SymmetricPair& pair, int max_m, int max_n,
                            const Tolerances& tol = {});

}  // namespace momx
