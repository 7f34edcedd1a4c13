#include "momx/solution_factory.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "momx/errors.hpp"
#include "momx/resolvent_engine.hpp"

namespace momx {

namespace {

using linalg::max_abs;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CMatrix haar_unitary(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));
  CMatrix z(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(r(i, i));
    if (a > 0.0) q.col(i) *= r(i, i) / a;
  }
  return q;
}

std::string defect_message(const SymmetricPair& pair) {
  const DefectIndices d = defect_indices(pair);
  return "A2 is not self-adjoint on the truncated space (dim H = " + std::to_string(d.dim) +
         ", defect of A1 = " + std::to_string(d.a1_defect()) + ", defect of A2 = " +
         std::to_string(d.a2_defect()) + "); determinacy indicator unavailable";
}

Complex random_lambda(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-2.0, 2.0);
  std::uniform_real_distribution<double> im(0.5, 2.0);
  std::bernoulli_distribution lower(0.5);
  Complex l(re(rng), im(rng));
  if (lower(rng)) l = std::conj(l);
  return l;
}

}  // namespace

std::vector<CommutantSample> enumerate_commutant_unitaries(const CMatrix& w2,
                                                           const SamplerSpec& spec,
                                                           const Tolerances& tol) {
  std::vector<CommutantSample> out;
  const Eigen::Index p = w2.rows();
  if (p == 0) return out;
  if (linalg::unitarity_defect(w2) > tol.operator_tol) {
    raise(ErrorKind::NotUnitary, "W2 is not unitary");
  }
  const linalg::NormalEigen ne = linalg::normal_eigen(w2);
  const auto clusters = linalg::cluster_values(ne.values, tol.cluster_tol);

  // eigenvectors regrouped so each cluster occupies a contiguous block
  CMatrix q(p, p);
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks;
  Eigen::Index col = 0;
  for (const auto& c : clusters) {
    blocks.emplace_back(col, static_cast<Eigen::Index>(c.size()));
    for (Eigen::Index idx : c) q.col(col++) = ne.vectors.col(idx);
  }
  auto assemble = [&](const CMatrix& x, std::uint64_t tag) {
    out.push_back({q * x * q.adjoint(), tag});
  };

  switch (spec.kind) {
    case SamplerSpec::Kind::IdentityOnly:
      assemble(CMatrix::Identity(p, p), 0);
      break;
    case SamplerSpec::Kind::HaarRandom:
      for (int s = 0; s < spec.count; ++s) {
        const std::uint64_t seed = splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(s)));
        std::mt19937_64 rng(seed);
        CMatrix x = CMatrix::Zero(p, p);
        for (const auto& [start, size] : blocks) x.block(start, start, size, size) = haar_unitary(size, rng);
        assemble(x, seed);
      }
      break;
    case SamplerSpec::Kind::ExhaustivePhases: {
      if (spec.grid < 1) raise(ErrorKind::InputError, "phase grid must be >= 1");
      double total = std::pow(static_cast<double>(spec.grid), static_cast<double>(blocks.size()));
      if (total > 1e5) raise(ErrorKind::InputError, "phase grid product is too large");
      const auto count = static_cast<std::uint64_t>(total);
      const double pi = std::acos(-1.0);
      for (std::uint64_t idx = 0; idx < count; ++idx) {
        CMatrix x = CMatrix::Zero(p, p);
        std::uint64_t rest = idx;
        for (const auto& [start, size] : blocks) {
          const auto g = static_cast<double>(rest % static_cast<std::uint64_t>(spec.grid));
          rest /= static_cast<std::uint64_t>(spec.grid);
          const Complex phase = std::exp(kI * (2.0 * pi * g / spec.grid));
          x.block(start, start, size, size) = phase * CMatrix::Identity(size, size);
        }
        assemble(x, idx);
      }
      break;
    }
  }
  return out;
}

CanonicalExtension canonical_extension(const SymmetricPair& pair, const IsometricPair& iso,
                                       const CMatrix& u2, const Tolerances& tol) {
  if (!pair.a2_selfadjoint) raise(ErrorKind::NotSelfAdjointA2, defect_message(pair));
  const Eigen::Index p = iso.n0.cols();
  if (u2.rows() != p || u2.cols() != p) {
    raise(ErrorKind::InputError, "U2 must act on N0 (dimension " + std::to_string(p) + ")");
  }
  if (p > 0 && linalg::unitarity_defect(u2) > tol.operator_tol) {
    raise(ErrorKind::NotUnitary, "U2 is not unitary");
  }
  CanonicalExtension ext;
  ext.u2_used = u2;
  ext.u_tilde = iso.v_partial();
  if (p > 0) {
    const CMatrix w2 = iso.n0.adjoint() * iso.u * iso.n0;
    ext.factorization = godich_lutsenko(w2, tol);
    const CMatrix j_n0 = pair.j_matrix * iso.n0.conjugate();
    if (linalg::distance_to_span(iso.ninf, j_n0) > tol.operator_tol) {
      raise(ErrorKind::StructureViolation, "J does not map H2 into H4");
    }
    // J K in subspace coordinates: x -> Ninf^H C conj(N0 M_K conj(x))
    ext.u24 = iso.ninf.adjoint() * j_n0 * ext.factorization.k.m.conjugate();
    if (linalg::unitarity_defect(ext.u24) > tol.operator_tol) {
      raise(ErrorKind::StructureViolation, "U24 = J K is not an isometry of H2 onto H4");
    }
    ext.u_tilde += iso.ninf * ext.u24 * u2 * iso.n0.adjoint();
  } else {
    ext.factorization = {linalg::Antilinear{CMatrix(0, 0)}, linalg::Antilinear{CMatrix(0, 0)}};
    ext.u24 = CMatrix(0, 0);
  }
  ext.a1_tilde = inverse_cayley(ext.u_tilde, tol);

  const double scale = std::max(1.0, max_abs(ext.a1_tilde));
  const CMatrix extends =
      ext.a1_tilde * pair.a1.domain - pair.a1.action;
  if (max_abs(extends) > tol.operator_tol * scale) {
    raise(ErrorKind::StructureViolation, "canonical extension does not extend A1");
  }
  const CMatrix a2 = pair.a2_full();
  if (max_abs(ext.a1_tilde * a2 - a2 * ext.a1_tilde) >
      tol.operator_tol * scale * std::max(1.0, max_abs(a2))) {
    raise(ErrorKind::StructureViolation, "canonical extension does not commute with A2");
  }
  return ext;
}

AtomicMeasure joint_spectral_measure(const CMatrix& a1, const CMatrix& a2, const CVector& h00,
                                     const Tolerances& tol, const JointSpectralOptions& options) {
  const Eigen::Index n = a1.rows();
  const double scale = std::max({1.0, max_abs(a1), max_abs(a2)});
  if (max_abs(a1 * a2 - a2 * a1) > tol.operator_tol * scale * scale) {
    raise(ErrorKind::CommutationViolated, "joint spectral measure needs commuting operators");
  }
  AtomicMeasure measure;
  if (n == 0) return measure;
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::acos(-1.0));

  for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
    const double phi = angle(rng);
    const CMatrix mix = std::cos(phi) * a1 + std::sin(phi) * a2;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (mix + mix.adjoint()));
    const RVector& ev = eig.eigenvalues();
    std::vector<Atom> atoms;
    bool ok = true;
    Eigen::Index start = 0;
    while (ok && start < n) {
      Eigen::Index end = start + 1;
      while (end < n && ev(end) - ev(end - 1) <= tol.cluster_tol * scale) ++end;
      const CMatrix qc = eig.eigenvectors().middleCols(start, end - start);
      const CMatrix b1 = qc.adjoint() * a1 * qc;
      const CMatrix b2 = qc.adjoint() * a2 * qc;
      const auto size = static_cast<double>(end - start);
      const double t1 = b1.trace().real() / size;
      const double t2 = b2.trace().real() / size;
      const auto id = CMatrix::Identity(end - start, end - start);
      const double check = tol.operator_tol * scale;
      ok = max_abs(b1 - t1 * id) <= check && max_abs(b2 - t2 * id) <= check &&
           max_abs(a1 * qc - qc * b1) <= check && max_abs(a2 * qc - qc * b2) <= check;
      atoms.push_back({t1, t2, (qc.adjoint() * h00).squaredNorm()});
      start = end;
    }
    if (!ok) continue;

    std::sort(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
      return x.t1 != y.t1 ? x.t1 < y.t1 : x.t2 < y.t2;
    });
    for (const Atom& a : atoms) {
      if (a.w < tol.weight_tol) continue;
      auto same = std::find_if(measure.atoms.begin(), measure.atoms.end(), [&](const Atom& b) {
        return std::max(std::abs(a.t1 - b.t1), std::abs(a.t2 - b.t2)) <= tol.atom_merge_tol;
      });
      if (same == measure.atoms.end()) {
        measure.atoms.push_back(a);
      } else {
        const double w = same->w + a.w;
        same->t1 = (same->w * same->t1 + a.w * a.t1) / w;
        same->t2 = (same->w * same->t2 + a.w * a.t2) / w;
        same->w = w;
      }
    }
    return measure;
  }
  raise(ErrorKind::ClusterAmbiguity,
        "joint eigenspaces could not be separated after " +
            std::to_string(options.max_retries) + " retries");
}

SolutionReport verify_solution(const AtomicMeasure& measure, const MomentTable& table,
                               double tol) {
  SolutionReport report;
  report.measure = measure;
  report.degrees_m = table.max_m();
  report.degrees_n = table.max_n();
  const MomentTable oracle = moments_of_measure(measure, table.max_m(), table.max_n());
  report.max_abs_moment_error = (oracle.values() - table.values()).cwiseAbs().maxCoeff();
  report.passed = report.max_abs_moment_error <= tol;
  return report;
}

DefectIndices defect_indices(const SymmetricPair& pair) {
  return {pair.a1.domain.cols(), pair.a2.domain.cols(), pair.dim};
}

bool determinacy(const SymmetricPair& pair, const Tolerances& tol) {
  if (!pair.a2_selfadjoint) raise(ErrorKind::NotSelfAdjointA2, defect_message(pair));
  const IsometryData v = cayley(pair, 1, tol);
  const auto n0 = linalg::orthogonal_complement(v.domain, pair.dim, tol.subspace_tol).cols();
  const auto ninf = linalg::orthogonal_complement(v.range, pair.dim, tol.subspace_tol).cols();
  return n0 == 0 && ninf == 0;
}

MomentTable moments_of_pair(const SymmetricPair& pair, int max_m, int max_n,
                            const Tolerances& tol) {
  const int hm = (max_m + 1) / 2;
  const int hn = (max_n + 1) / 2;
  const double in_tol = tol.operator_tol;
  // x[a][b] = A1^a A2^b h00
  std::vector<std::vector<CVector>> x(static_cast<std::size_t>(hm) + 1);
  x[0].push_back(pair.h00);
  int bn = 0;
  while (bn < hn && pair.a2.contains(x[0][bn], in_tol)) {
    x[0].push_back(pair.a2.apply(x[0][bn]));
    ++bn;
  }
  int am = 0;
  while (am < hm) {
    bool all = true;
    for (int b = 0; b <= bn && all; ++b) all = pair.a1.contains(x[am][b], in_tol);
    if (!all) break;
    for (int b = 0; b <= bn; ++b) x[am + 1].push_back(pair.a1.apply(x[am][b]));
    ++am;
  }
  MomentTable table(std::min(max_m, 2 * am), std::min(max_n, 2 * bn));
  for (int m = 0; m <= table.max_m(); ++m) {
    for (int n = 0; n <= table.max_n(); ++n) {
      const int a = std::min(m, am);
      const int b = std::min(n, bn);
      table(m, n) = x[a][b].dot(x[m - a][n - b]).real();
    }
  }
  return table;
}

SolveResult solve_canonical(const SymmetricPair& pair, const std::optional<MomentTable>& table,
                            const SolveOptions& options, const Tolerances& tol) {
  if (!pair.a2_selfadjoint) raise(ErrorKind::NotSelfAdjointA2, defect_message(pair));
  pair.validate(tol);
  const IsometricPair iso = make_isometric_pair(pair, tol);
  const bool determinate = determinacy(pair, tol);
  const MomentTable reference = table ? *table : moments_of_pair(pair, 8, 8, tol);
  const CMatrix a2 = pair.a2_full();

  std::vector<CommutantSample> samples;
  if (iso.n0.cols() == 0) {
    samples.push_back({CMatrix(0, 0), 0});
  } else {
    samples = enumerate_commutant_unitaries(iso.n0.adjoint() * iso.u * iso.n0, options.sampler,
                                            tol);
  }

  SolveResult result;
  for (const CommutantSample& sample : samples) {
    CanonicalExtension ext;
    try {
      ext = canonical_extension(pair, iso, sample.u2, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::FixedPoint) throw;
      result.rejected.push_back({sample.tag, e.what()});
      continue;
    }
    const AtomicMeasure measure =
        joint_spectral_measure(ext.a1_tilde, a2, pair.h00, tol, options.spectral);
    SolutionReport report = verify_solution(measure, reference, options.verify_tol);
    report.determinate = determinate;
    report.u2_seed = sample.tag;

    std::mt19937_64 rng(options.probe_seed);
    for (int i = 0; i < options.probe_points; ++i) {
      const Complex l1 = random_lambda(rng);
      const Complex l2 = random_lambda(rng);
      const Complex direct =
          pair.h00.dot(brute_force_pair_resolvent(ext.a1_tilde, a2, l1, l2) * pair.h00);
      report.resolvent_check_error =
          std::max(report.resolvent_check_error, std::abs(direct - kernel_integral(measure, l1, l2)));
    }
    report.passed = report.passed && report.resolvent_check_error <= options.probe_tol;
    result.reports.push_back(std::move(report));
  }
  return result;
}

SolveResult solve_canonical(const MomentTable& table, int d_m, int d_n,
                            const SolveOptions& options, const Tolerances& tol) {
  const double psd_tol = tol.psd_abs > 0.0 ? tol.psd_abs : default_psd_tol(table, d_m, d_n, tol.psd_rel);
  const PsdResult psd = check_psd(table, d_m, d_n, psd_tol);
  if (!psd.is_psd) {
    raise(ErrorKind::NotPsd,
          "moment matrix has eigenvalue " + std::to_string(psd.min_eigenvalue));
  }
  const GnsSpace gns = build_gns(table, d_m, d_n, tol.rank_tol);
  const SymmetricPair pair = build_operators(gns, tol);
  if (!pair.a2_selfadjoint) raise(ErrorKind::NotSelfAdjointA2, defect_message(pair));
  return solve_canonical(pair, table, options, tol);
}

}  // namespace momx
