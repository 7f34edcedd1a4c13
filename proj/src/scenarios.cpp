#include "momx/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "momx/errors.hpp"

namespace momx::scenarios {

namespace {

RMatrix random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  RMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<RMatrix> qr(z);
  return qr.householderQ() * RMatrix::Identity(n, n);
}

CMatrix random_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

}  // namespace

AtomicMeasure e1_measure() { return {{{0.0, 0.0, 1.0}}}; }

AtomicMeasure e2_measure() { return {{{1.0, 1.0, 0.5}, {-1.0, -1.0, 0.5}}}; }

SymmetricPair e3_pair() {
  const double r = 1.0 / std::sqrt(2.0);
  SymmetricPair pair;
  pair.dim = 3;
  pair.a1.domain = CMatrix::Zero(3, 2);
  pair.a1.domain(0, 0) = 1.0;
  pair.a1.domain(1, 1) = r;
  pair.a1.domain(2, 1) = r;
  // diag(-1, 0, 2) applied to the domain basis
  pair.a1.action = CMatrix::Zero(3, 2);
  pair.a1.action(0, 0) = -1.0;
  pair.a1.action(2, 1) = 2.0 * r;
  pair.a2.domain = CMatrix::Identity(3, 3);
  pair.a2.action = CMatrix::Zero(3, 3);
  pair.h00 = CVector(3);
  pair.h00 << r, 0.5, 0.5;
  pair.j_matrix = CMatrix::Identity(3, 3);
  pair.a2_selfadjoint = true;
  return pair;
}

OperatorSetup random_operator_setup(std::mt19937_64& rng, int dim, int defect) {
  if (dim < 2 || defect < 1 || defect >= dim) {
    raise(ErrorKind::InputError, "operator setup needs 1 <= defect < dim");
  }
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::normal_distribution<double> gauss;

  // eigenspaces of B2: groups of size >= 2 (one group of 3 if dim is odd)
  std::vector<int> sizes;
  int left = dim;
  while (left > 0) {
    int s = left <= 3 ? left : 2 + static_cast<int>(rng() % 2);
    if (left - s == 1) ++s;
    sizes.push_back(s);
    left -= s;
  }
  // spread the codimension over groups, keeping each D_mu nonzero
  std::vector<int> codim(sizes.size(), 0);
  for (int d = 0; d < defect; ++d) {
    std::vector<std::size_t> open;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      if (codim[g] + 1 < sizes[g]) open.push_back(g);
    }
    if (open.empty()) raise(ErrorKind::InputError, "defect too large for the group layout");
    ++codim[open[rng() % open.size()]];
  }

  const RMatrix o = random_orthogonal(dim, rng);
  RVector t1(dim);
  RVector t2(dim);
  for (int i = 0; i < dim; ++i) t1(i) = coord(rng);
  RMatrix q(dim, dim - defect);
  int col = 0;
  int row = 0;
  for (std::size_t g = 0; g < sizes.size(); ++g) {
    const double mu = coord(rng);
    for (int i = 0; i < sizes[g]; ++i) t2(row + i) = mu;
    const int keep = sizes[g] - codim[g];
    RMatrix coeff(sizes[g], keep);
    for (Eigen::Index j = 0; j < coeff.cols(); ++j) {
      for (Eigen::Index i = 0; i < coeff.rows(); ++i) coeff(i, j) = gauss(rng);
    }
    Eigen::HouseholderQR<RMatrix> qr(coeff);
    const RMatrix basis = qr.householderQ() * RMatrix::Identity(sizes[g], keep);
    q.middleCols(col, keep) = o.middleCols(row, sizes[g]) * basis;
    col += keep;
    row += sizes[g];
  }

  OperatorSetup setup;
  setup.defect = defect;
  setup.b1 = o * t1.asDiagonal() * o.transpose();
  setup.b2 = o * t2.asDiagonal() * o.transpose();
  setup.b1 = 0.5 * (setup.b1 + setup.b1.transpose());
  setup.b2 = 0.5 * (setup.b2 + setup.b2.transpose());

  SymmetricPair& pair = setup.pair;
  pair.dim = dim;
  pair.a1.domain = q.cast<Complex>();
  pair.a1.action = (setup.b1 * q).cast<Complex>();
  pair.a2.domain = CMatrix::Identity(dim, dim);
  pair.a2.action = setup.b2.cast<Complex>();
  RVector c(q.cols());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
  pair.h00 = (q * c.normalized()).cast<Complex>();
  pair.j_matrix = CMatrix::Identity(dim, dim);
  pair.a2_selfadjoint = true;
  return setup;
}

CMatrix random_commuting_unitary(const IsometricPair& iso, std::mt19937_64& rng,
                                 double cluster_tol) {
  const CMatrix w2 = iso.n0.adjoint() * iso.u * iso.n0;
  const CMatrix w4 = iso.ninf.adjoint() * iso.u * iso.ninf;
  const Eigen::Index p = w2.rows();
  if (w4.rows() != p) raise(ErrorKind::StructureViolation, "defect spaces differ in dimension");
  if (p == 0) return CMatrix(0, 0);
  const linalg::NormalEigen e2 = linalg::normal_eigen(w2);
  const linalg::NormalEigen e4 = linalg::normal_eigen(w4);
  std::vector<bool> used(static_cast<std::size_t>(p), false);
  CMatrix phi = CMatrix::Zero(p, p);
  for (const auto& cluster : linalg::cluster_values(e2.values, cluster_tol)) {
    const Complex lambda = e2.values(cluster.front());
    std::vector<Eigen::Index> match;
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!used[static_cast<std::size_t>(i)] && std::abs(e4.values(i) - lambda) <= cluster_tol) {
        match.push_back(i);
      }
    }
    if (match.size() != cluster.size()) {
      raise(ErrorKind::StructureViolation, "U has different spectra on N0 and Ninf");
    }
    const auto n = static_cast<Eigen::Index>(cluster.size());
    CMatrix p2(p, n);
    CMatrix p4(p, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p2.col(i) = e2.vectors.col(cluster[i]);
      p4.col(i) = e4.vectors.col(match[i]);
      used[static_cast<std::size_t>(match[i])] = true;
    }
    phi += p4 * random_unitary(n, rng) * p2.adjoint();
  }
  return phi;
}

AtomicMeasure random_measure(std::mt19937_64& rng, int min_atoms, int max_atoms, double box,
                             double w_lo, double w_hi) {
  std::uniform_int_distribution<int> count(min_atoms, max_atoms);
  std::uniform_real_distribution<double> coord(-box, box);
  std::uniform_real_distribution<double> weight(w_lo, w_hi);
  AtomicMeasure measure;
  const int n = count(rng);
  while (static_cast<int>(measure.atoms.size()) < n) {
    const Atom a{coord(rng), coord(rng), weight(rng)};
    // keep atoms well separated so polynomial degree limits are not the issue
    const bool close = std::any_of(measure.atoms.begin(), measure.atoms.end(), [&](const Atom& b) {
      return std::hypot(a.t1 - b.t1, a.t2 - b.t2) < 0.1;
    });
    if (!close) measure.atoms.push_back(a);
  }
  return measure;
}

}  // namespace momx::scenarios
