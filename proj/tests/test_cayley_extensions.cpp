#include <cmath>
#include <random>

#include "doctest.h"
#include "momx/cayley_extensions.hpp"
#include "momx/errors.hpp"
#include "momx/scenarios.hpp"

using namespace momx;

namespace {

CMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(g(rng), g(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
  return q;
}

CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(g(rng), g(rng));
  }
  return 0.5 * (z + z.adjoint());
}

CMatrix diag(std::initializer_list<Complex> values) {
  CVector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (Complex c : values) v(i++) = c;
  return v.asDiagonal();
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::InputError;
}

// dim-1 pair whose A1 has domain {0} and A2 = [0].
SymmetricPair empty_domain_pair() {
  SymmetricPair p;
  p.dim = 1;
  p.a1 = {CMatrix(1, 0), CMatrix(1, 0)};
  p.a2 = {CMatrix::Identity(1, 1), CMatrix::Zero(1, 1)};
  p.h00 = CVector::Ones(1);
  p.j_matrix = CMatrix::Identity(1, 1);
  p.a2_selfadjoint = true;
  return p;
}

SymmetricPair full_pair(const CMatrix& a1, const CMatrix& a2) {
  SymmetricPair p;
  p.dim = a1.rows();
  p.a1 = {CMatrix::Identity(p.dim, p.dim), a1};
  p.a2 = {CMatrix::Identity(p.dim, p.dim), a2};
  p.h00 = CVector::Unit(p.dim, 0);
  p.j_matrix = CMatrix::Identity(p.dim, p.dim);
  p.a2_selfadjoint = true;
  return p;
}

// Setup whose U has two distinct eigenvalues on the two-dimensional N0.
scenarios::OperatorSetup split_defect_setup(std::mt19937_64& rng) {
  for (;;) {
    scenarios::OperatorSetup s = scenarios::random_operator_setup(rng, 6, 2);
    const IsometricPair iso = make_isometric_pair(s.pair);
    const CMatrix w2 = iso.n0.adjoint() * iso.u * iso.n0;
    const linalg::NormalEigen e = linalg::normal_eigen(w2);
    if (std::abs(e.values(0) - e.values(1)) > 1e-2) return s;
  }
}

}  // namespace

TEST_CASE("cayley examples") {
  const IsometryData v0 = cayley(PartialOperator{CMatrix::Identity(1, 1), CMatrix::Zero(1, 1)}, 1);
  CHECK(std::abs((v0.action * v0.domain.adjoint())(0, 0) + 1.0) < 1e-14);
  CHECK(v0.range.cols() == 1);

  const CMatrix a = diag({0.0, 1.0});
  const IsometryData v1 = cayley(PartialOperator{CMatrix::Identity(2, 2), a}, 2);
  CHECK(linalg::max_abs(v1.action * v1.domain.adjoint() - diag({-1.0, kI})) < 1e-14);
  CHECK(linalg::max_abs(cayley_full(a) - diag({-1.0, kI})) < 1e-14);

  const SymmetricPair e3 = scenarios::e3_pair();
  const IsometryData v3 = cayley(e3, 1);
  CHECK(v3.domain.cols() == 2);
  CHECK(v3.range.cols() == 2);
  const IsometricPair iso = make_isometric_pair(e3);
  CHECK(iso.n0.cols() == 1);
  CHECK(iso.ninf.cols() == 1);
  CHECK(linalg::max_abs(iso.u + CMatrix::Identity(3, 3)) < 1e-14);

  // V (A - i) x = (A + i) x on the domain
  const CMatrix vp = iso.v_partial();
  const CMatrix lhs = vp * (e3.a1.action - kI * e3.a1.domain);
  CHECK(linalg::max_abs(lhs - (e3.a1.action + kI * e3.a1.domain)) < 1e-13);

  CHECK(kind_of([&] { cayley(e3, 3); }) == ErrorKind::InputError);
}

TEST_CASE("inverse_cayley examples and round trip") {
  CHECK(linalg::max_abs(inverse_cayley(-CMatrix::Identity(2, 2))) < 1e-14);
  CHECK(linalg::max_abs(inverse_cayley(diag({-1.0, kI})) - diag({0.0, 1.0})) < 1e-14);
  CHECK(kind_of([] { inverse_cayley(CMatrix::Identity(2, 2)); }) == ErrorKind::FixedPoint);
  CHECK(kind_of([] { inverse_cayley(2.0 * CMatrix::Identity(2, 2)); }) == ErrorKind::NotUnitary);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 8);
    const CMatrix h = random_hermitian(rng, n);
    const CMatrix u = cayley_full(h);
    CHECK(linalg::unitarity_defect(u) < 1e-12);
    CHECK(linalg::max_abs(inverse_cayley(u) - h) < 1e-10);
    const IsometryData v = cayley(PartialOperator{CMatrix::Identity(n, n), h}, n);
    CHECK(linalg::max_abs(v.action * v.domain.adjoint() - u) < 1e-10);
  }
}

TEST_CASE("extend_isometry") {
  const IsometricPair empty = make_isometric_pair(empty_domain_pair());
  CHECK(empty.n0.cols() == 1);
  const CMatrix w = extend_isometry(empty, CMatrix::Constant(1, 1, -1.0));
  CHECK(linalg::is_unitary(w, 1e-14));
  CHECK(std::abs(std::abs(w(0, 0)) - 1.0) < 1e-14);

  const IsometricPair iso = make_isometric_pair(scenarios::e3_pair());
  const CMatrix partial = extend_isometry(iso, CMatrix::Zero(1, 1));
  CHECK((partial * iso.n0).norm() < 1e-14);
  CHECK(linalg::max_abs(partial * iso.v_domain - iso.v_action) < 1e-14);

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  for (int k = 0; k < 10; ++k) {
    const CMatrix phi = CMatrix::Constant(1, 1, std::polar(1.0, angle(rng)));
    const CMatrix u = extend_isometry(iso, ContractionParameter::constant(phi), 0.3);
    CHECK(linalg::is_unitary(u, 1e-12));
    const CVector x = random_unitary(rng, 3).col(0) * 2.5;
    CHECK(std::abs((u * x).norm() - x.norm()) < 1e-12);
  }
  CHECK(kind_of([&] { extend_isometry(iso, CMatrix::Constant(1, 1, 1.01)); }) ==
        ErrorKind::ContractionViolated);
  CHECK(kind_of([&] { extend_isometry(iso, CMatrix::Zero(2, 1)); }) == ErrorKind::InputError);
}

TEST_CASE("godich_lutsenko examples") {
  const double theta = 0.7;
  const CMatrix w1 = CMatrix::Constant(1, 1, std::polar(1.0, theta));
  const ConjugationFactorization f1 = godich_lutsenko(w1);
  CHECK(linalg::is_conjugation(f1.k, 1e-12));
  CHECK(linalg::is_conjugation(f1.l, 1e-12));
  CHECK(linalg::max_abs(linalg::compose(f1.k, f1.l) - w1) < 1e-12);

  const CMatrix w2 = diag({kI, -kI});
  const ConjugationFactorization f2 = godich_lutsenko(w2);
  CHECK(linalg::max_abs(linalg::compose(f2.k, f2.k) - CMatrix::Identity(2, 2)) < 1e-12);
  CHECK(linalg::max_abs(linalg::compose(f2.k, f2.l) - w2) < 1e-12);

  const double alpha = 1.1;
  CMatrix rot(2, 2);
  rot << std::cos(alpha), -std::sin(alpha), std::sin(alpha), std::cos(alpha);
  const ConjugationFactorization f3 = godich_lutsenko(rot);
  CHECK(linalg::is_conjugation(f3.k, 1e-10));
  CHECK(linalg::is_conjugation(f3.l, 1e-10));
  CHECK(linalg::max_abs(linalg::compose(f3.k, f3.l) - rot) < 1e-10);

  CHECK(kind_of([] { godich_lutsenko(2.0 * CMatrix::Identity(2, 2)); }) == ErrorKind::NotUnitary);
}

TEST_CASE("godich_lutsenko on random unitaries") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(trial % 10);
    const CMatrix w = random_unitary(rng, n);
    const ConjugationFactorization f = godich_lutsenko(w);
    const CMatrix id = CMatrix::Identity(n, n);
    CHECK(linalg::max_abs(linalg::compose(f.k, f.k) - id) < 1e-10);
    CHECK(linalg::max_abs(linalg::compose(f.l, f.l) - id) < 1e-10);
    CHECK(linalg::is_unitary(f.k.m, 1e-10));
    CHECK(linalg::is_unitary(f.l.m, 1e-10));
    CHECK(linalg::max_abs(linalg::compose(f.k, f.l) - w) < 1e-10);
    // antilinear isometry: <Kx, Ky> = <y, x>
    const CVector x = random_unitary(rng, n).col(0);
    const CVector y = random_unitary(rng, n).col(0);
    CHECK(std::abs(f.k.apply(x).dot(f.k.apply(y)) - y.dot(x)) < 1e-10);
  }
}

TEST_CASE("antilinear composition rules") {
  std::mt19937_64 rng(29);
  const CMatrix a = random_unitary(rng, 4);
  const CMatrix b = random_unitary(rng, 4);
  const CMatrix l = random_unitary(rng, 4);
  const linalg::Antilinear ka{a};
  const linalg::Antilinear kb{b};
  const CVector x = random_unitary(rng, 4).col(1);
  CHECK((linalg::compose(ka, kb) * x - ka.apply(kb.apply(x))).norm() < 1e-12);
  CHECK((linalg::compose(l, ka).apply(x) - l * ka.apply(x)).norm() < 1e-12);
  CHECK((linalg::compose(ka, l).apply(x) - ka.apply(l * x)).norm() < 1e-12);
  CHECK(linalg::is_conjugation(linalg::Antilinear{CMatrix::Identity(3, 3)}, 1e-14));
  CHECK(linalg::is_conjugation(linalg::Antilinear{kI * CMatrix::Identity(3, 3)}, 1e-14));
  CHECK_FALSE(linalg::is_conjugation(linalg::Antilinear{a}, 1e-6));
}

TEST_CASE("fixed_subspace") {
  const CMatrix f1 = fixed_subspace(diag({1.0, std::polar(1.0, M_PI / 3)}), 1e-8);
  REQUIRE(f1.cols() == 1);
  CHECK(std::abs(std::abs(f1(0, 0)) - 1.0) < 1e-14);
  CHECK(fixed_subspace(-CMatrix::Identity(3, 3), 1e-8).cols() == 0);
  CHECK(fixed_subspace(CMatrix::Identity(3, 3), 1e-8).cols() == 3);
}

TEST_CASE("strip_fixed_elements") {
  const CMatrix w1 = diag({1.0, -1.0});
  const CMatrix w2 = diag({std::polar(1.0, 0.4), std::polar(1.0, 2.0)});
  const StrippedPair s = strip_fixed_elements(w1, w2, CVector::Unit(2, 1));
  REQUIRE(s.basis.cols() == 1);
  CHECK(std::abs(std::abs(s.basis(1, 0)) - 1.0) < 1e-14);
  CHECK(std::abs(s.w1(0, 0) + 1.0) < 1e-14);

  const CMatrix m = -CMatrix::Identity(3, 3);
  CHECK(strip_fixed_elements(m, m, CMatrix::Identity(3, 3)).basis.cols() == 3);

  CHECK(kind_of([] {
          strip_fixed_elements(CMatrix::Identity(2, 2), -CMatrix::Identity(2, 2),
                               CMatrix::Identity(2, 2));
        }) == ErrorKind::EmbeddingLost);
  CMatrix swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(kind_of([&] { strip_fixed_elements(w1, swap, CMatrix(2, 0)); }) ==
        ErrorKind::CommutationViolated);

  // random commuting unitaries with planted fixed vectors
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 6;
    const CMatrix q = random_unitary(rng, n);
    CVector d1(n);
    CVector d2(n);
    std::uniform_real_distribution<double> ang(0.3, 6.0);
    for (Eigen::Index i = 0; i < n; ++i) {
      d1(i) = i == 0 ? Complex(1.0) : std::polar(1.0, ang(rng));
      d2(i) = i == 1 ? Complex(1.0) : std::polar(1.0, ang(rng));
    }
    const CMatrix a = q * d1.asDiagonal() * q.adjoint();
    const CMatrix b = q * d2.asDiagonal() * q.adjoint();
    const StrippedPair out = strip_fixed_elements(a, b, q.rightCols(2));
    CHECK(out.basis.cols() == 4);
    CHECK(linalg::is_unitary(out.w1, 1e-10));
    CHECK(linalg::is_unitary(out.w2, 1e-10));
    CHECK(linalg::max_abs(out.w1 * out.w2 - out.w2 * out.w1) < 1e-10);
    CHECK(fixed_subspace(out.w1, 1e-8).cols() == 0);
    CHECK(fixed_subspace(out.w2, 1e-8).cols() == 0);
  }
}

TEST_CASE("forbidden operator") {
  const ForbiddenOperator x0 = forbidden_operator(empty_domain_pair(), 1);
  REQUIRE(x0.domain.cols() == 1);
  // X_i = identity between the coordinates of N0 and Ninf (both are all of C^1)
  const IsometricPair iso0 = make_isometric_pair(empty_domain_pair());
  const CVector psi = iso0.n0 * x0.domain.col(0);
  CHECK((iso0.ninf * x0.values.col(0) - psi).norm() < 1e-14);

  const SymmetricPair dense = full_pair(diag({0.5, -1.0}), diag({1.0, 2.0}));
  CHECK(forbidden_operator(dense, 1).domain.cols() == 0);

  const ForbiddenOperator x3 = forbidden_operator(scenarios::e3_pair(), 1);
  CHECK(x3.domain.cols() <= 1);
  CHECK(x3.max_residual < 1e-10);
  const IsometricPair iso3 = make_isometric_pair(scenarios::e3_pair());
  const ForbiddenOperator y3 = forbidden_operator(iso3);
  CHECK(y3.domain.cols() == x3.domain.cols());
}

TEST_CASE("admissibility") {
  const SymmetricPair p0 = empty_domain_pair();
  for (double arg : {0.5, 1.0, 2.0, 3.0, M_PI}) {
    CHECK(admissibility_check(
        p0, ContractionParameter::constant(CMatrix::Constant(1, 1, std::polar(1.0, arg)))));
  }
  CHECK_FALSE(admissibility_check(p0, ContractionParameter::constant(CMatrix::Ones(1, 1))));
  CHECK(admissibility_check(p0, ContractionParameter::constant(CMatrix::Constant(1, 1, 0.999))));
  CHECK(admissibility_check(p0, ContractionParameter::constant(CMatrix::Zero(1, 1))));

  const SymmetricPair dense = full_pair(diag({0.5, -1.0}), diag({1.0, 2.0}));
  CHECK(admissibility_check(dense, ContractionParameter::constant(CMatrix(0, 0))));
  CHECK(admissibility_check(
      dense, ContractionParameter::pointwise([](Complex) { return CMatrix(0, 0); })));
  CHECK(kind_of([&] {
          admissibility_check(p0, ContractionParameter::pointwise(
                                      [](Complex z) { return CMatrix::Constant(1, 1, z); }));
        }) == ErrorKind::NotSupported);

  // monotone under scaling into strict contractions
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const scenarios::OperatorSetup s = scenarios::random_operator_setup(rng, 6, 2);
    const IsometricPair iso = make_isometric_pair(s.pair);
    const CMatrix phi = scenarios::random_commuting_unitary(iso, rng);
    for (double c : {0.0, 0.3, 0.9, 0.999}) {
      CHECK(admissibility_check(iso, ContractionParameter::constant(c * phi)));
    }
  }
}

TEST_CASE("commutation check") {
  const IsometricPair e3 = make_isometric_pair(scenarios::e3_pair());
  for (double arg : {0.0, 1.0, 2.5}) {
    CHECK(commutation_check(
        e3, ContractionParameter::constant(CMatrix::Constant(1, 1, std::polar(1.0, arg))), 0.2));
  }

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    const scenarios::OperatorSetup s = split_defect_setup(rng);
    const IsometricPair iso = make_isometric_pair(s.pair);
    const CMatrix phi = scenarios::random_commuting_unitary(iso, rng);
    CHECK(commutation_check(iso, ContractionParameter::constant(phi), 0.0));

    const linalg::NormalEigen e2 = linalg::normal_eigen(iso.n0.adjoint() * iso.u * iso.n0);
    CMatrix mix(2, 2);
    mix << std::cos(0.5), -std::sin(0.5), std::sin(0.5), std::cos(0.5);
    const CMatrix coupled = phi * e2.vectors * mix * e2.vectors.adjoint();
    CHECK(linalg::is_unitary(coupled, 1e-12));
    CHECK_FALSE(commutation_check(iso, ContractionParameter::constant(coupled), 0.0));
  }
}

TEST_CASE("defect bookkeeping and structure of random setups") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    const int dim = 3 + static_cast<int>(rng() % 6);
    const int defect = 1 + static_cast<int>(rng() % 2);
    const scenarios::OperatorSetup s = scenarios::random_operator_setup(rng, dim, defect);
    CHECK_NOTHROW(s.pair.validate(Tolerances{}));
    const IsometricPair iso = make_isometric_pair(s.pair);
    CHECK(iso.n0.cols() == dim - s.pair.a1.domain.cols());
    CHECK(iso.ninf.cols() == dim - s.pair.a1.domain.cols());
    CHECK(iso.defect() == defect);
    CHECK(linalg::unitarity_defect(iso.v_action) < 1e-10);
    CHECK(linalg::max_abs(iso.n0.adjoint() * iso.v_domain) < 1e-10);
    CHECK(linalg::max_abs(iso.ninf.adjoint() * iso.v_range) < 1e-10);
  }

  SymmetricPair bad = scenarios::e3_pair();
  bad.a2_selfadjoint = false;
  CHECK(kind_of([&] { make_isometric_pair(bad); }) == ErrorKind::NotSelfAdjointA2);
}

TEST_CASE("minimal subspace") {
  CHECK(minimal_subspace(diag({1.0, -1.0}), CMatrix::Identity(2, 2)).cols() == 2);
  CVector h(2);
  h << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK(minimal_subspace(diag({1.0, -1.0}), h).cols() == 2);

  std::mt19937_64 rng(47);
  const CMatrix q = random_unitary(rng, 5);
  CMatrix u = q * diag({1.0, kI, -1.0, std::polar(1.0, 0.3), std::polar(1.0, 2.0)}) * q.adjoint();
  // H inside the invariant subspace spanned by the first three eigenvectors
  const CVector start = q.leftCols(3) * CVector::Ones(3);
  const CMatrix m = minimal_subspace(u, start);
  CHECK(m.cols() == 3);
  CHECK(linalg::distance_to_span(q.leftCols(3), m) < 1e-10);
  CHECK(linalg::distance_to_span(m, u * m) < 1e-10);
}
