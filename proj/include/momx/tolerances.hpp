#pragma once

namespace momx {

// All numerical thresholds in one place. Defaults are the documented ones;
// the CLI exposes each field as a flag and as a config-file key.
struct Tolerances {
  // Relative eigenvalue cut for the Gram quotient.
  double rank_tol = 1e-9;
  // PSD check uses psd_rel * (1 + max |s|) unless psd_abs > 0 is given.
  double psd_rel = 1e-10;
  double psd_abs = 0.0;
  // Shared threshold for orthonormal bases, intersections and decompositions.
  double subspace_tol = 1e-9;
  // Squared fit residual allowed per unit of ||gram|| when fitting A1, A2.
  double shift_residual = 1e-8;
  // Relative tolerance for Hermitian / commutation / unitarity style checks.
  double operator_tol = 1e-8;
  double fixed_point_tol = 1e-8;
  double contraction_slack = 1e-12;
  double cluster_tol = 1e-8;
  double atom_merge_tol = 1e-7;
  double weight_tol = 1e-12;
  // Radius of the excluded disks around +i and -i (and the strip |Im| <= r).
  double excluded_radius = 1e-6;
};

}  // namespace momx
