#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "momx/cayley_extensions.hpp"
#include "momx/gns_space.hpp"
#include "momx/moment_core.hpp"

namespace momx::scenarios {

// delta at (0,0).
AtomicMeasure e1_measure();
// 1/2 delta(1,1) + 1/2 delta(-1,-1).
AtomicMeasure e2_measure();

// Operator-driven setup in C^3: A2 = 0 and A1 = diag(-1, 0, 2) restricted to
// span{e1, (e2+e3)/sqrt 2}; one-dimensional defect spaces.
SymmetricPair e3_pair();

// Family of operator-driven setups with known defect index: commuting real
// symmetric B1, B2 in a random orthogonal basis, A2 = B2, A1 = B1 on a real
// B2-invariant subspace of codimension `defect`. B1 and B2 are returned for
// brute-force oracles.
struct OperatorSetup {
  SymmetricPair pair;
  RMatrix b1;
  RMatrix b2;
  int defect = 0;
};

OperatorSetup random_operator_setup(std::mt19937_64& rng, int dim, int defect);

// Unitary parameter N0 -> Ninf intertwining U on the two defect spaces, so
// that V + Phi commutes with U. Block-unitary across matched eigenvalue
// clusters; raises StructureViolation if the spectra of U on N0 and Ninf differ.
CMatrix random_commuting_unitary(const IsometricPair& iso, std::mt19937_64& rng,
                                 double cluster_tol = 1e-8);

AtomicMeasure random_measure(std::mt19937_64& rng, int min_atoms, int max_atoms, double box,
                             double w_lo, double w_hi);

}  // namespace momx::scenarios
