#include "momx/moment_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "momx/errors.hpp"

namespace momx {

MomentTable::MomentTable(int max_m, int max_n) : max_m_(max_m), max_n_(max_n) {
  if (max_m < 0 || max_n < 0) raise(ErrorKind::InputError, "moment table bounds must be >= 0");
  s_ = RMatrix::Zero(max_m + 1, max_n + 1);
}

double MomentTable::operator()(int m, int n) const { return s_(m, n); }
double& MomentTable::operator()(int m, int n) { return s_(m, n); }

double MomentTable::at(int m, int n) const {
  if (m < 0 || n < 0 || m > max_m_ || n > max_n_) {
    raise(ErrorKind::IndexOutOfRange, "moment s_{" + std::to_string(m) + "," +
                                          std::to_string(n) + "} outside table " +
                                          std::to_string(max_m_) + "x" + std::to_string(max_n_));
  }
  return s_(m, n);
}

double MomentTable::max_abs() const { return s_.cwiseAbs().maxCoeff(); }

MomentTable& MomentTable::operator+=(const MomentTable& other) {
  if (other.max_m_ != max_m_ || other.max_n_ != max_n_) {
    raise(ErrorKind::InputError, "moment tables of different shape");
  }
  s_ += other.s_;
  return *this;
}

MomentTable operator*(double a, const MomentTable& t) {
  MomentTable out = t;
  out.s_ *= a;
  return out;
}

double AtomicMeasure::total_mass() const {
  double mass = 0.0;
  for (const Atom& a : atoms) mass += a.w;
  return mass;
}

void AtomicMeasure::validate(double merge_tol) const {
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const Atom& a = atoms[i];
    if (!std::isfinite(a.t1) || !std::isfinite(a.t2) || !std::isfinite(a.w)) {
      raise(ErrorKind::InputError, "atom " + std::to_string(i) + " has a non-finite field");
    }
    if (!(a.w > 0.0)) raise(ErrorKind::InputError, "atom " + std::to_string(i) + " weight <= 0");
    for (std::size_t j = 0; j < i; ++j) {
      const Atom& b = atoms[j];
      if (std::max(std::abs(a.t1 - b.t1), std::abs(a.t2 - b.t2)) <= merge_tol) {
        raise(ErrorKind::InputError, "atoms " + std::to_string(j) + " and " + std::to_string(i) +
                                         " coincide within the merge tolerance");
      }
    }
  }
}

std::string to_string(CarlemanVerdict v) {
  switch (v) {
    case CarlemanVerdict::DivergingTrend: return "diverging-trend";
    case CarlemanVerdict::ConvergingTrend: return "converging-trend";
    case CarlemanVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::vector<std::pair<int, int>> monomial_index(int d_m, int d_n) {
  std::vector<std::pair<int, int>> idx;
  idx.reserve(static_cast<std::size_t>((d_m + 1) * (d_n + 1)));
  for (int deg = 0; deg <= d_m + d_n; ++deg) {
    for (int m = std::min(deg, d_m); m >= 0 && deg - m <= d_n; --m) idx.emplace_back(m, deg - m);
  }
  return idx;
}

MomentTable moments_of_measure(const AtomicMeasure& measure, int max_m, int max_n) {
  MomentTable table(max_m, max_n);
  for (const Atom& a : measure.atoms) {
    // powers by repeated multiplication; 0^0 = 1 falls out of starting at 1
    double p1 = a.w;
    for (int m = 0; m <= max_m; ++m) {
      double p = p1;
      for (int n = 0; n <= max_n; ++n) {
        table(m, n) += p;
        p *= a.t2;
      }
      p1 *= a.t1;
    }
  }
  return table;
}

RMatrix moment_matrix(const MomentTable& table, int d_m, int d_n) {
  if (d_m < 0 || d_n < 0 || 2 * d_m > table.max_m() || 2 * d_n > table.max_n()) {
    raise(ErrorKind::IndexOutOfRange,
          "degrees (" + std::to_string(d_m) + "," + std::to_string(d_n) +
              ") need a table of at least " + std::to_string(2 * d_m) + "x" +
              std::to_string(2 * d_n));
  }
  const auto idx = monomial_index(d_m, d_n);
  const auto size = static_cast<Eigen::Index>(idx.size());
  RMatrix g(size, size);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) {
      g(i, j) = table(idx[i].first + idx[j].first, idx[i].second + idx[j].second);
    }
  }
  return g;
}

double default_psd_tol(const MomentTable& table, int d_m, int d_n, double rel) {
  const double used = table.values().topLeftCorner(2 * d_m + 1, 2 * d_n + 1).cwiseAbs().maxCoeff();
  return rel * (1.0 + used);
}

PsdResult check_psd(const MomentTable& table, int d_m, int d_n, double tol) {
  const RMatrix g = moment_matrix(table, d_m, d_n);
  if (tol < 0.0) tol = default_psd_tol(table, d_m, d_n);
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(g, Eigen::EigenvaluesOnly);
  const double min_ev = eig.eigenvalues()(0);
  return {min_ev >= -tol, min_ev};
}

CarlemanReport carleman_from_denominators(int m, const std::vector<double>& denominators,
                                          const CarlemanOptions& options) {
  CarlemanReport report;
  report.m = m;
  double sum = 0.0;
  for (std::size_t i = 0; i < denominators.size(); ++i) {
    const int k = static_cast<int>(i) + 1;
    const double d = denominators[i];
    if (d < 0.0) {
      raise(ErrorKind::NegativeDenominator,
            "carleman term k=" + std::to_string(k) + " for m=" + std::to_string(m) +
                " has a negative denominator (data is not positive semi-definite)");
    }
    const double term = d == 0.0 ? std::numeric_limits<double>::infinity()
                                 : std::pow(d, -1.0 / (2.0 * k));
    sum += term;
    report.terms.push_back(term);
    report.partial_sums.push_back(sum);
  }

  const auto n = static_cast<int>(report.terms.size());
  if (n == 0) return report;
  const int w = std::min(options.window, n);
  const auto first = report.terms.end() - w;
  bool geometric = w >= 2;
  for (auto it = first + 1; geometric && it != report.terms.end(); ++it) {
    const double prev = *(it - 1);
    geometric = std::isfinite(prev) && std::isfinite(*it) && prev > 0.0 &&
                *it / prev <= options.rho;
  }
  const double window_min = *std::min_element(first, report.terms.end());
  if (geometric) {
    report.verdict = CarlemanVerdict::ConvergingTrend;
  } else if (window_min >= options.epsilon) {
    report.verdict = CarlemanVerdict::DivergingTrend;
  } else {
    report.verdict = CarlemanVerdict::Inconclusive;
  }
  return report;
}

CarlemanReport carleman_diagnostic(const MomentTable& table, int m, int K,
                                   const CarlemanOptions& options) {
  const int rows_needed = options.single_row_variant ? 2 * m : 2 * m + 2;
  if (m < 0 || K < 1 || rows_needed > table.max_m() || 2 * K > table.max_n()) {
    raise(ErrorKind::IndexOutOfRange, "carleman probe m=" + std::to_string(m) +
                                          " K=" + std::to_string(K) + " exceeds the table");
  }
  std::vector<double> denominators;
  for (int k = 1; k <= K; ++k) {
    double d = table(2 * m, 2 * k);
    if (!options.single_row_variant) d += table(2 * m + 2, 2 * k);
    denominators.push_back(d);
  }
  return carleman_from_denominators(m, denominators, options);
}

}  // namespace momx
