#pragma once

#include <string>
#include <utility>
#include <vector>

#include "momx/types.hpp"

namespace momx {

// Real moments s_{m,n} on the full rectangle 0 <= m <= max_m, 0 <= n <= max_n.
class MomentTable {
 public:
  MomentTable() = default;
  MomentTable(int max_m, int max_n);

  int max_m() const { return max_m_; }
  int max_n() const { return max_n_; }

  double operator()(int m, int n) const;
  double& operator()(int m, int n);

  // Same as operator() but raises IndexOutOfRange instead of asserting.
  double at(int m, int n) const;

  double max_abs() const;
  const RMatrix& values() const { return s_; }

  MomentTable& operator+=(const MomentTable& other);
  friend MomentTable operator*(double a, const MomentTable& t);

 private:
  int max_m_ = 0;
  int max_n_ = 0;
  RMatrix s_ = RMatrix::Zero(1, 1);
};

struct Atom {
  double t1 = 0.0;
  double t2 = 0.0;
  double w = 0.0;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;

  double total_mass() const;
  // Checks positivity of weights and pairwise separation (Chebyshev distance
  // larger than merge_tol); raises InputError otherwise.
  void validate(double merge_tol) const;
};

enum class CarlemanVerdict { DivergingTrend, ConvergingTrend, Inconclusive };

std::string to_string(CarlemanVerdict v);

struct CarlemanOptions {
  int window = 5;
  double epsilon = 1e-3;
  // Geometric decay means every consecutive ratio in the window is <= rho.
  double rho = 0.95;
  // Probe the variant built from s_{2m,2k} alone instead of the row pair.
  bool single_row_variant = false;
};

struct CarlemanReport {
  int m = 0;
  std::vector<double> terms;
  std::vector<double> partial_sums;
  CarlemanVerdict verdict = CarlemanVerdict::Inconclusive;
};

// Graded lexicographic order: by total degree m+n, then by m descending
// ((0,0), (1,0), (0,1), (2,0), (1,1), (0,2), ...), restricted to the box.
std::vector<std::pair<int, int>> monomial_index(int d_m, int d_n);

MomentTable moments_of_measure(const AtomicMeasure& measure, int max_m, int max_n);

RMatrix moment_matrix(const MomentTable& table, int d_m, int d_n);

struct PsdResult {
  bool is_psd = false;
  double min_eigenvalue = 0.0;
};

// tol < 0 selects the default 1e-10 * (1 + max |s| used).
PsdResult check_psd(const MomentTable& table, int d_m, int d_n, double tol = -1.0);

double default_psd_tol(const MomentTable& table, int d_m, int d_n, double rel = 1e-10);

// Terms are (s_{2m,2k} + s_{2m+2,2k})^{-1/(2k)} for k = 1..K.
CarlemanReport carleman_diagnostic(const MomentTable& table, int m, int K,
                                   const CarlemanOptions& options = {});

// Verdict rule shared with the quasi-analytic vector check.
CarlemanReport carleman_from_denominators(int m, const std::vector<double>& denominators,
                                          const CarlemanOptions& options);

}  // namespace momx
