// Copyright 2026 The lindfit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lindfit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "lindfit/parallel.hpp"
#include "lindfit/rng.hpp"

namespace lindfit {

namespace {

CMat columns(const CMat& m, const IndexSet& idx) {
  CMat out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  return out;
}

CMat adjoint_columns(const CMat& w) {
  CMat out(w.rows(), w.cols());
  for (Eigen::Index k = 0; k < w.cols(); ++k) out.col(k) = vec_adjoint(w.col(k));
  return out;
}

CMat orthonormal(const CMat& w) {
  Eigen::HouseholderQR<CMat> qr(w);
  return qr.householderQ() * CMat::Identity(w.rows(), w.cols());
}

// Rotates w so that w^dagger = w whenever w^dagger is parallel to w.
CVec phase_aligned(const CVec& w) {
  const cplx c = w.dot(vec_adjoint(w));
  if (std::abs(c) < 1e-3) return w;
  return w * std::polar(1.0, std::arg(c) / 2.0);
}

// Orthonormal self-adjoint vectors spanning the self-adjoint parts of span(w).
// Self-adjoint vectors have real inner products, so real orthonormality in the
// stacked (Re, Im) coordinates is ordinary orthonormality.
CMat self_adjoint_basis(const CMat& w) {
  const Eigen::Index dim = w.rows(), n = w.cols();
  Eigen::MatrixXd real(2 * dim, 2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const CVec a = 0.5 * (w.col(k) + vec_adjoint(w.col(k)));
    const CVec b = cplx(0.0, 0.5) * (w.col(k) - vec_adjoint(w.col(k)));
    real.col(2 * k) << a.real(), a.imag();
    real.col(2 * k + 1) << b.real(), b.imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(real, Eigen::ComputeThinU);
  CMat out(dim, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::VectorXd u = svd.matrixU().col(k);
    out.col(k) = u.head(dim).cast<cplx>() + cplx(0.0, 1.0) * u.tail(dim).cast<cplx>();
  }
  return out;
}

struct Kernel {
  bool ok = false;
  CMat beta;  // w_i^dagger = sum_j beta(j, i) u_j
};

// Solutions of sum_i a_i^* F w_i^* = sum_j b_j u_j, normalized so a = e_i.
Kernel hermitian_kernel(const CMat& w, const CMat& u) {
  const Eigen::Index n = w.cols();
  CMat a(w.rows(), 2 * n);
  a << adjoint_columns(w), -u;
  Eigen::JacobiSVD<CMat> svd(a, Eigen::ComputeFullV);
  const RVec& sv = svd.singularValues();
  const double tol = 1e-7 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index nullity = 2 * n - sv.size();
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) <= tol) ++nullity;
  Kernel out;
  if (nullity != n) return out;
  const CMat k = svd.matrixV().rightCols(n);
  Eigen::FullPivLU<CMat> lu(k.topRows(n));
  if (!lu.isInvertible()) return out;
  const CMat canon = k * lu.inverse();
  out.beta = canon.bottomRows(n);
  out.ok = true;
  return out;
}

}  // namespace

double projector_distance(const CMat& a, const CMat& b) {
  const CMat qa = orthonormal(a), qb = orthonormal(b);
  return (qa * qa.adjoint() - qb * qb.adjoint()).norm();
}

ClusterPartition detect_clusters(const SpectralData& s, double p) {
  if (!(p > 0.0)) raise(ErrorKind::OutOfRange, "cluster precision must be positive");
  const int n = static_cast<int>(s.size());
  auto kind = [&](int i) {
    const cplx l = s.eigenvalues(i);
    if (std::abs(l.imag()) >= p) return 2;
    return l.real() > 0.0 ? 0 : 1;
  };
  std::vector<int> root(static_cast<std::size_t>(n));
  std::iota(root.begin(), root.end(), 0);
  auto find = [&](int i) {
    while (root[static_cast<std::size_t>(i)] != i) i = root[static_cast<std::size_t>(i)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(i)])];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (kind(i) == kind(j) && std::abs(s.eigenvalues(i) - s.eigenvalues(j)) < p) {
        const int a = find(i), b = find(j);
        root[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
      }

  ClusterPartition out;
  out.precision = p;
  for (int r = 0; r < n; ++r) {
    if (find(r) != r) continue;
    IndexSet set;
    for (int i = 0; i < n; ++i)
      if (find(i) == r) set.push_back(i);
    if (set.size() < 2) continue;
    const int k = kind(r);
    (k == 0 ? out.positive_sets : k == 1 ? out.negative_sets : out.complex_sets).push_back(set);
  }
  out.identity = out.positive_sets.size() == 1 && static_cast<int>(out.positive_sets[0].size()) == n;

  auto mean = [&](const IndexSet& set) {
    cplx acc = 0.0;
    for (int i : set) acc += s.eigenvalues(i);
    return acc / static_cast<double>(set.size());
  };
  std::vector<bool> used(out.complex_sets.size(), false);
  for (std::size_t a = 0; a < out.complex_sets.size(); ++a) {
    if (used[a]) continue;
    int best = -1;
    double best_gap = p;
    for (std::size_t b = a + 1; b < out.complex_sets.size(); ++b) {
      if (used[b] || out.complex_sets[b].size() != out.complex_sets[a].size()) continue;
      const double gap = std::abs(mean(out.complex_sets[a]) - std::conj(mean(out.complex_sets[b])));
      if (gap < best_gap) {
        best_gap = gap;
        best = static_cast<int>(b);
      }
    }
    if (best < 0) continue;
    used[a] = used[static_cast<std::size_t>(best)] = true;
    out.conjugate_pairs.emplace_back(static_cast<int>(a), best);
  }
  return out;
}

std::optional<HPBasis> conjugate_basis(const SpectralData& s, const IndexSet& set_a, const IndexSet& set_b,
                                       double approx_tol) {
  if (set_a.size() != set_b.size() || set_a.empty()) return std::nullopt;
  const CMat w = columns(s.right, set_a), u = columns(s.right, set_b);
  HPBasis out;
  out.kind = HPBasis::Kind::ConjugatePairs;
  out.indices = set_a;
  out.partner_indices = set_b;
  out.vectors = w;
  out.partners = adjoint_columns(w);
  const Kernel k = hermitian_kernel(w, u);
  if (k.ok) {
    out.beta = k.beta;
    return out;
  }
  if (approx_tol <= 0.0) return std::nullopt;
  out.residual = projector_distance(out.partners, u);
  if (out.residual >= approx_tol) return std::nullopt;
  out.approximate = true;
  return out;
}

std::optional<HPBasis> real_positive_basis(const SpectralData& s, const IndexSet& set_a, double p,
                                           double approx_tol) {
  if (!(p > 0.0)) raise(ErrorKind::OutOfRange, "cluster precision must be positive");
  if (set_a.empty()) return std::nullopt;
  const Eigen::Index n = static_cast<Eigen::Index>(set_a.size());
  CMat w = columns(s.right, set_a);
  for (Eigen::Index k = 0; k < n; ++k) w.col(k) = phase_aligned(w.col(k));

  HPBasis out;
  out.kind = HPBasis::Kind::SelfAdjointAndPairs;
  out.indices = set_a;
  out.real_basis = self_adjoint_basis(w);

  const Kernel k = hermitian_kernel(w, w);
  if (!k.ok) {
    if (approx_tol <= 0.0) return std::nullopt;
    out.residual = projector_distance(out.real_basis, w);
    if (out.residual >= approx_tol) return std::nullopt;
    out.approximate = true;
    out.vectors = out.real_basis;
    out.self_adjoint.resize(static_cast<std::size_t>(n));
    std::iota(out.self_adjoint.begin(), out.self_adjoint.end(), 0);
    return out;
  }
  out.beta = k.beta;

  std::vector<double> dev(static_cast<std::size_t>(n));
  std::vector<int> sa, rest;
  for (Eigen::Index i = 0; i < n; ++i) {
    dev[static_cast<std::size_t>(i)] = (k.beta.col(i) - CVec::Unit(n, i)).cwiseAbs().maxCoeff();
    (dev[static_cast<std::size_t>(i)] < p ? sa : rest).push_back(static_cast<int>(i));
  }
  if (rest.size() % 2 == 1) {
    auto closest = std::min_element(rest.begin(), rest.end(), [&](int a, int b) {
      return dev[static_cast<std::size_t>(a)] < dev[static_cast<std::size_t>(b)];
    });
    sa.push_back(*closest);
    rest.erase(closest);
    std::sort(sa.begin(), sa.end());
  }
  std::vector<std::pair<int, int>> pairs;
  while (!rest.empty()) {
    const int i = rest.front();
    auto partner = std::max_element(rest.begin() + 1, rest.end(), [&](int a, int b) {
      return std::abs(k.beta(a, i)) < std::abs(k.beta(b, i));
    });
    pairs.emplace_back(i, *partner);
    rest.erase(partner);
    rest.erase(rest.begin());
  }

  out.vectors.resize(w.rows(), n);
  int col = 0;
  for (int i : sa) {
    CVec h = 0.5 * (w.col(i) + vec_adjoint(w.col(i)));
    if (h.norm() < 1e-8) h = cplx(0.0, 0.5) * (w.col(i) - vec_adjoint(w.col(i)));
    out.vectors.col(col) = h.normalized();
    out.self_adjoint.push_back(col++);
  }
  for (const auto& pr : pairs) {
    const CVec v = w.col(pr.first);
    out.vectors.col(col) = v;
    out.vectors.col(col + 1) = vec_adjoint(v);
    out.pairs.emplace_back(col, col + 1);
    col += 2;
  }
  return out;
}

BasisSample random_hp_basis(const SpectralData& s, const ClusterPartition& partition, const ClusterBases& bases,
                            const RandomBasisConfig& cfg, int sample_index) {
  const std::size_t n_real = partition.positive_sets.size() + partition.negative_sets.size();
  std::size_t paired = 2 * partition.conjugate_pairs.size();
  if (bases.real.size() != n_real || bases.complex.size() != partition.conjugate_pairs.size() ||
      paired != partition.complex_sets.size())
    raise(ErrorKind::BasisUnavailable, "some cluster has no hermiticity-preserving basis");

  auto engine = keyed_engine(cfg.seed, stream::kBasis, static_cast<std::uint64_t>(sample_index));
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto complex_coeffs = [&](Eigen::Index m) {
    CVec c(m);
    for (Eigen::Index j = 0; j < m; ++j) c(j) = cplx(gauss(engine), gauss(engine));
    return c;
  };
  auto real_coeffs = [&](Eigen::Index m) {
    CVec c(m);
    for (Eigen::Index j = 0; j < m; ++j) c(j) = gauss(engine);
    return c;
  };

  const Eigen::Index dim = s.size();
  BasisSample out;
  for (out.attempts = 1; out.attempts <= 100; ++out.attempts) {
    out.S = s.right;
    out.conj_test.assign(static_cast<std::size_t>(dim), true);
    out.partner.assign(static_cast<std::size_t>(dim), -1);

    for (std::size_t b = 0; b < bases.real.size(); ++b) {
      const HPBasis& hb = bases.real[b];
      const IndexSet& idx = hb.indices;
      const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
      const bool negative = b < bases.negative.size() && bases.negative[b];
      const int max_pairs = static_cast<int>(m / 2);
      const int k = negative ? max_pairs : std::uniform_int_distribution<int>(0, max_pairs)(engine);
      std::size_t pos = 0;
      for (int t = 0; t < k; ++t) {
        const CVec v = (hb.real_basis * complex_coeffs(m)).normalized();
        const int i = idx[pos], j = idx[pos + 1];
        out.S.col(i) = v;
        out.S.col(j) = vec_adjoint(v);
        out.conj_test[static_cast<std::size_t>(j)] = false;
        out.partner[static_cast<std::size_t>(i)] = j;
        out.partner[static_cast<std::size_t>(j)] = i;
        pos += 2;
      }
      for (; pos < idx.size(); ++pos) out.S.col(idx[pos]) = (hb.real_basis * real_coeffs(m)).normalized();
    }

    for (const HPBasis& hb : bases.complex) {
      const Eigen::Index m = static_cast<Eigen::Index>(hb.indices.size());
      std::vector<bool> taken(hb.partner_indices.size(), false);
      for (Eigen::Index a = 0; a < m; ++a) {
        const int i = hb.indices[static_cast<std::size_t>(a)];
        const CVec v = (hb.vectors * complex_coeffs(m)).normalized();
        // Partner column goes to the eigenvalue closest to conj(lambda_i).
        int best = -1;
        double gap = 0.0;
        for (std::size_t b = 0; b < hb.partner_indices.size(); ++b) {
          if (taken[b]) continue;
          const double g = std::abs(s.eigenvalues(hb.partner_indices[b]) - std::conj(s.eigenvalues(i)));
          if (best < 0 || g < gap) {
            best = static_cast<int>(b);
            gap = g;
          }
        }
        taken[static_cast<std::size_t>(best)] = true;
        const int j = hb.partner_indices[static_cast<std::size_t>(best)];
        out.S.col(i) = v;
        out.S.col(j) = vec_adjoint(v);
        out.conj_test[static_cast<std::size_t>(j)] = false;
        out.partner[static_cast<std::size_t>(i)] = j;
        out.partner[static_cast<std::size_t>(j)] = i;
      }
    }

    Eigen::JacobiSVD<CMat> svd(out.S);
    const RVec& sv = svd.singularValues();
    if (sv(sv.size() - 1) > 0.0 && sv(0) / sv(sv.size() - 1) <= cfg.max_condition) return out;
  }
  raise(ErrorKind::NumericalFailure, "could not draw a well-conditioned basis");
}

CMat perturb_to_nd2(const CMat& m, double budget) {
  if (!(budget > 0.0)) raise(ErrorKind::OutOfRange, "perturbation budget must be positive");
  auto simple = [](const CMat& x) {
    try {
      eig_full(x);
      return true;
    } catch (const Error&) {
      return false;
    }
  };
  if (simple(m)) return m;

  const int d = sqrt_dim(m.rows());
  // Schur multiplier with e_kj = conj(e_jk): hermiticity preserving. The
  // quadratic term keeps (e_jj + e_kk) / 2 away from Re e_jk, which would
  // otherwise leave X-gate style eigenspaces unsplit.
  CVec e(d * d);
  int t = 0;
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k, ++t) {
      const double x = 1.0 + t + 0.37 * t * t;
      const double y = j == k ? 0.0 : 0.5 * std::sqrt(1.0 + t);
      e(j * d + k) = cplx(x, y);
      e(k * d + j) = cplx(x, -y);
    }
  e /= e.norm();
  const CMat emat = e.asDiagonal();

  double alpha = budget / (2.0 * (m.norm() + 1.0));
  for (int it = 0; it < 60; ++it, alpha *= 0.5) {
    const CMat cand = (1.0 - alpha) * m + alpha * emat;
    if (simple(cand)) return cand;
  }
  raise(ErrorKind::NumericalFailure, "no simple-spectrum perturbation found within the budget");
}

PreprocessOutcome preprocess_main(const TransferMatrix& m_snapshot, double p, double eps,
                                  const RandomBasisConfig& cfg, int jobs) {
  if (cfg.samples < 1) raise(ErrorKind::OutOfRange, "sample count must be positive");
  PreprocessOutcome out;
  const double budget = eps > 0.0 ? 1e-3 * eps : 1e-9;
  out.nd2 = perturb_to_nd2(m_snapshot.mat, budget);
  out.perturbed = !(out.nd2.array() == m_snapshot.mat.array()).all();
  const SpectralData s = eig_full(out.nd2);
  out.partition = detect_clusters(s, p);
  if (out.partition.identity) {
    out.kind = PreprocessOutcome::Kind::Identity;
    return out;
  }
  auto passthrough = [&](std::optional<std::string> why) {
    out.kind = PreprocessOutcome::Kind::Passthrough;
    out.samples = {out.nd2};
    out.basis_failure = std::move(why);
    return out;
  };
  if (out.partition.empty()) return passthrough(std::nullopt);

  auto describe = [](const IndexSet& set) {
    std::ostringstream os;
    os << "{";
    for (std::size_t k = 0; k < set.size(); ++k) os << (k ? "," : "") << set[k];
    os << "}";
    return os.str();
  };
  const double approx_tol = std::max(1e-6, eps);
  ClusterBases bases;
  for (int neg = 0; neg < 2; ++neg) {
    for (const IndexSet& set : neg ? out.partition.negative_sets : out.partition.positive_sets) {
      auto hb = real_positive_basis(s, set, p, approx_tol);
      if (!hb) return passthrough("no hermiticity-preserving basis for cluster " + describe(set));
      bases.real.push_back(std::move(*hb));
      bases.negative.push_back(neg == 1);
    }
  }
  if (2 * out.partition.conjugate_pairs.size() != out.partition.complex_sets.size()) {
    for (std::size_t c = 0; c < out.partition.complex_sets.size(); ++c) {
      bool paired = false;
      for (const auto& pr : out.partition.conjugate_pairs)
        paired = paired || pr.first == static_cast<int>(c) || pr.second == static_cast<int>(c);
      if (!paired) return passthrough("complex cluster " + describe(out.partition.complex_sets[c]) + " has no conjugate partner");
    }
  }
  for (const auto& pr : out.partition.conjugate_pairs) {
    const IndexSet& a = out.partition.complex_sets[static_cast<std::size_t>(pr.first)];
    const IndexSet& b = out.partition.complex_sets[static_cast<std::size_t>(pr.second)];
    auto hb = conjugate_basis(s, a, b, approx_tol);
    if (!hb) return passthrough("clusters " + describe(a) + " and " + describe(b) + " are not conjugate");
    bases.complex.push_back(std::move(*hb));
  }

  out.kind = PreprocessOutcome::Kind::Samples;
  out.samples.resize(static_cast<std::size_t>(cfg.samples));
  parallel_for(out.samples.size(), jobs, [&](std::size_t r) {
    const BasisSample bs = random_hp_basis(s, out.partition, bases, cfg, static_cast<int>(r));
    Eigen::PartialPivLU<CMat> lu(bs.S);
    out.samples[r] = bs.S * s.eigenvalues.asDiagonal() * lu.inverse();
  });
  return out;
}

}  // namespace lindfit
