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

#include <algorithm>
#include <numeric>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "lindfit/fit.hpp"
#include "lindfit/preprocess.hpp"

using namespace lindfit;

namespace {

const CMat& xx() {
  static const CMat m = unitary_transfer(gates::pauli_x()).mat;
  return m;
}

CMat cols(const CMat& m, const IndexSet& idx) {
  CMat out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(idx[k]);
  return out;
}

// Structural relations every basis declares about its own columns.
void check_structure(const HPBasis& b) {
  for (int c : b.self_adjoint) {
    const CVec v = b.vectors.col(c);
    CHECK((v - vec_adjoint(v)).norm() <= 1e-8);
  }
  for (const auto& [i, j] : b.pairs) CHECK((b.vectors.col(j) - vec_adjoint(b.vectors.col(i))).norm() <= 1e-8);
  for (Eigen::Index k = 0; k < b.partners.cols(); ++k)
    CHECK((b.partners.col(k) - vec_adjoint(b.vectors.col(k))).norm() <= 1e-8);
}

SpectralData from_columns(const CMat& s, const CVec& eigenvalues) {
  SpectralData out;
  out.eigenvalues = eigenvalues;
  out.right = s;
  out.left = s.inverse();
  return out;
}

}  // namespace

TEST_CASE("clusters of the X gate") {
  const SpectralData s = eig_any(xx());
  const ClusterPartition p = detect_clusters(s, 1e-6);
  REQUIRE(p.positive_sets.size() == 1);
  REQUIRE(p.negative_sets.size() == 1);
  CHECK(p.positive_sets[0] == IndexSet{0, 1});
  CHECK(p.negative_sets[0] == IndexSet{2, 3});
  CHECK(p.complex_sets.empty());
  CHECK_FALSE(p.identity);
}

TEST_CASE("clusters of depolarizing and identity channels") {
  const ClusterPartition dep = detect_clusters(eig_any(depolarizing_transfer(0.3).mat), 1e-3);
  REQUIRE(dep.positive_sets.size() == 1);
  CHECK(dep.positive_sets[0].size() == 3);
  CHECK_FALSE(dep.identity);
  CHECK(detect_clusters(eig_any(identity_transfer(2).mat), 0.1).identity);
  CHECK_THROWS_AS(detect_clusters(eig_any(xx()), 0.0), Error);
}

TEST_CASE("well separated unital snapshot has no clusters") {
  const TransferMatrix m = simulate_process_tomography(channel::UnitalPauli{-200, 201, 200.5, 1.0}, {10000, 8});
  CHECK(detect_clusters(eig_full(m.mat), 0.1).empty());
}

TEST_CASE("complex clusters pair with their conjugates") {
  const SpectralData s = eig_any(unitary_transfer(gates::iswap()).mat);
  const ClusterPartition p = detect_clusters(s, 1e-6);
  REQUIRE(p.complex_sets.size() == 2);
  REQUIRE(p.conjugate_pairs.size() == 1);
  CHECK(p.complex_sets[0].size() == 4);
  CHECK(p.complex_sets[1].size() == 4);
  for (int i : p.complex_sets[0]) CHECK(std::abs(s.eigenvalues(i) - cplx(0, 1)) < 1e-8);
}

TEST_CASE("cluster detection is permutation invariant") {
  std::mt19937_64 rng(89);
  const SpectralData s = eig_any(unitary_transfer(gates::iswap()).mat);
  const ClusterPartition ref = detect_clusters(s, 1e-6);
  std::vector<int> perm(16);
  std::iota(perm.begin(), perm.end(), 0);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(perm.begin(), perm.end(), rng);
    SpectralData t;
    t.eigenvalues.resize(16);
    t.right.resize(16, 16);
    for (int k = 0; k < 16; ++k) {
      t.eigenvalues(k) = s.eigenvalues(perm[static_cast<std::size_t>(k)]);
      t.right.col(k) = s.right.col(perm[static_cast<std::size_t>(k)]);
    }
    t.left = t.right.inverse();
    const ClusterPartition q = detect_clusters(t, 1e-6);
    auto canon = [&](std::vector<IndexSet> sets) {
      for (auto& set : sets) {
        for (int& i : set) i = perm[static_cast<std::size_t>(i)];
        std::sort(set.begin(), set.end());
      }
      std::sort(sets.begin(), sets.end());
      return sets;
    };
    auto sorted = [](std::vector<IndexSet> sets) {
      std::sort(sets.begin(), sets.end());
      return sets;
    };
    CHECK(canon(q.positive_sets) == sorted(ref.positive_sets));
    CHECK(canon(q.negative_sets) == sorted(ref.negative_sets));
    CHECK(canon(q.complex_sets) == sorted(ref.complex_sets));
  }
}

TEST_CASE("conjugate basis of the X gate -1 eigenspace") {
  const SpectralData s = eig_any(xx());
  const IndexSet neg{2, 3};
  const auto b = conjugate_basis(s, neg, neg);
  REQUIRE(b.has_value());
  check_structure(*b);
  CHECK(projector_distance(b->vectors, cols(s.right, neg)) < 1e-8);
  CHECK(projector_distance(b->partners, cols(s.right, neg)) < 1e-8);
  // The span contains the hermitian-related pair (1,1,-1,-1), (1,-1,1,-1).
  CMat pair(4, 2);
  pair.col(0) << 1, 1, -1, -1;
  pair.col(1) << 1, -1, 1, -1;
  CHECK((vec_adjoint(pair.col(0)) - pair.col(1)).norm() < 1e-15);
  CHECK(projector_distance(pair, b->vectors) < 1e-8);
}

TEST_CASE("conjugate basis of the ISWAP partner clusters") {
  const SpectralData s = eig_any(unitary_transfer(gates::iswap()).mat);
  const ClusterPartition p = detect_clusters(s, 1e-6);
  const IndexSet& a = p.complex_sets[static_cast<std::size_t>(p.conjugate_pairs[0].first)];
  const IndexSet& c = p.complex_sets[static_cast<std::size_t>(p.conjugate_pairs[0].second)];
  const auto b = conjugate_basis(s, a, c);
  REQUIRE(b.has_value());
  CHECK(b->vectors.cols() == 4);
  check_structure(*b);
  CHECK(projector_distance(b->partners, cols(s.right, c)) < 1e-8);
}

TEST_CASE("unrelated subspaces are not conjugate") {
  std::mt19937_64 rng(97);
  const CMat q = oracle::random_unitary(4, rng);
  CVec ev(4);
  ev << cplx(0.5, 0.3), cplx(0.5, 0.3), cplx(0.5, -0.3), cplx(0.5, -0.3);
  const SpectralData s = from_columns(q, ev);
  CHECK_FALSE(conjugate_basis(s, {0, 1}, {2, 3}).has_value());
  CHECK_FALSE(real_positive_basis(s, {0, 1}, 0.1).has_value());
}

TEST_CASE("real positive basis of the X gate +1 eigenspace") {
  const SpectralData s = eig_any(xx());
  const auto b = real_positive_basis(s, {0, 1}, 0.1);
  REQUIRE(b.has_value());
  check_structure(*b);
  CHECK(b->self_adjoint.size() == 2);
  CHECK(b->pairs.empty());
  CHECK(projector_distance(b->vectors, cols(s.right, {0, 1})) < 1e-8);
}

TEST_CASE("real positive basis of the depolarizing 0.6 eigenspace") {
  const SpectralData s = eig_any(depolarizing_transfer(0.3).mat);
  const IndexSet set = detect_clusters(s, 1e-3).positive_sets.at(0);
  const auto b = real_positive_basis(s, set, 0.1);
  REQUIRE(b.has_value());
  check_structure(*b);
  CHECK(b->vectors.cols() == 3);
  CHECK(b->self_adjoint.size() + 2 * b->pairs.size() == 3);
  CHECK(b->self_adjoint.size() % 2 == 1);
  CHECK(projector_distance(b->vectors, cols(s.right, set)) < 1e-8);
  CHECK(projector_distance(b->real_basis, cols(s.right, set)) < 1e-8);
}

TEST_CASE("a cluster spanned by a hermitian-related pair keeps the pair") {
  std::mt19937_64 rng(101);
  CVec v(4);
  v << cplx(1.0, 0.2), cplx(0.3, 0.7), cplx(-0.4, 0.1), cplx(0.2, -0.5);
  CMat sm = oracle::random_complex(4, rng);
  sm.col(1) = v;
  sm.col(2) = vec_adjoint(v);
  CVec ev(4);
  ev << 1.0, 0.5, 0.5, 0.2;
  const auto b = real_positive_basis(from_columns(sm, ev), {1, 2}, 0.1);
  REQUIRE(b.has_value());
  check_structure(*b);
  CHECK(b->self_adjoint.empty());
  CHECK(b->pairs.size() == 1);
}

TEST_CASE("perturb_to_nd2") {
  std::mt19937_64 rng(103);
  const auto l = oracle::random_lindbladian(2, rng, 1.0, 0.5);
  const CMat nd2 = oracle::taylor_expm(l.transfer);
  CHECK((perturb_to_nd2(nd2, 1e-6).array() == nd2.array()).all());

  const CMat p = perturb_to_nd2(xx(), 1e-6);
  CHECK((p - xx()).norm() < 1e-6);
  CHECK_NOTHROW(eig_full(p));
  const CMat g = gamma_involution(p);
  CHECK((g - g.adjoint()).norm() < 1e-12);

  // Jordan block on indices 0, 3 that is still Choi-hermitian.
  CMat j = CMat::Zero(4, 4);
  j(0, 0) = 1.0;
  j(3, 3) = 1.0;
  j(0, 3) = 0.5;
  j(1, 1) = 0.3;
  j(2, 2) = 0.3;
  const CMat jg = gamma_involution(j);
  REQUIRE((jg - jg.adjoint()).norm() < 1e-14);
  const CMat jp = perturb_to_nd2(j, 1e-6);
  CHECK((jp - j).norm() < 1e-6);
  CHECK_NOTHROW(eig_full(jp));
  const CMat jpg = gamma_involution(jp);
  CHECK((jpg - jpg.adjoint()).norm() < 1e-12);
  CHECK_THROWS_AS(perturb_to_nd2(j, 0.0), Error);
}

TEST_CASE("random bases honour the declared structure") {
  const TransferMatrix snap = simulate_process_tomography(channel::Unitary{gates::pauli_x()}, {10000, 3});
  RandomBasisConfig cfg;
  cfg.seed = 5;
  const CMat nd2 = perturb_to_nd2(snap.mat, 1e-6);
  const SpectralData s = eig_full(nd2);
  const ClusterPartition part = detect_clusters(s, 0.1);
  REQUIRE(part.positive_sets.size() == 1);
  REQUIRE(part.negative_sets.size() == 1);
  ClusterBases bases;
  bases.real.push_back(*real_positive_basis(s, part.positive_sets[0], 0.1, 0.1));
  bases.real.push_back(*real_positive_basis(s, part.negative_sets[0], 0.1, 0.1));
  bases.negative = {false, true};
  for (int r = 0; r < 20; ++r) {
    const BasisSample b = random_hp_basis(s, part, bases, cfg, r);
    for (int i = 0; i < 4; ++i) {
      const int j = b.partner[static_cast<std::size_t>(i)];
      if (j >= 0 && !b.conj_test[static_cast<std::size_t>(i)]) {
        const CVec expect = vec_adjoint(b.S.col(j));
        CHECK((b.S.col(i).array() == expect.array()).all());
      }
    }
    // The negative cluster always holds a pair.
    CHECK(b.partner[2] == 3);
  }
  const BasisSample again = random_hp_basis(s, part, bases, cfg, 7);
  CHECK((again.S - random_hp_basis(s, part, bases, cfg, 7).S).norm() == 0.0);

  ClusterBases missing;
  CHECK_THROWS_AS(random_hp_basis(s, part, missing, cfg, 0), Error);
}

TEST_CASE("without clusters the sample is the snapshot") {
  std::mt19937_64 rng(107);
  const CMat m = oracle::taylor_expm(oracle::random_lindbladian(2, rng, 1.0, 0.5).transfer);
  const SpectralData s = eig_full(m);
  const BasisSample b = random_hp_basis(s, ClusterPartition{}, ClusterBases{}, RandomBasisConfig{}, 0);
  const CMat r = b.S * s.eigenvalues.asDiagonal() * b.S.inverse();
  CHECK((r - m).norm() < 1e-10);
}

TEST_CASE("preprocess_main outcomes") {
  RandomBasisConfig cfg;
  cfg.samples = 10;
  const auto id = preprocess_main(simulate_process_tomography(channel::Identity{2}, {10000, 1}), 0.1, 0.1, cfg);
  CHECK(id.kind == PreprocessOutcome::Kind::Identity);

  const TransferMatrix unital = simulate_process_tomography(channel::UnitalPauli{-200, 201, 200.5, 1.0}, {10000, 8});
  const auto pass = preprocess_main(unital, 0.1, 0.1, cfg);
  CHECK(pass.kind == PreprocessOutcome::Kind::Passthrough);
  REQUIRE(pass.samples.size() == 1);
  CHECK((pass.samples[0] - unital.mat).norm() < 1e-6);

  const TransferMatrix x = simulate_process_tomography(channel::Unitary{gates::pauli_x()}, {10000, 2});
  const auto smp = preprocess_main(x, 0.1, 0.1, cfg, 2);
  REQUIRE(smp.kind == PreprocessOutcome::Kind::Samples);
  REQUIRE(smp.samples.size() == 10);
  const SpectralData ref = eig_full(smp.nd2);
  for (const CMat& r : smp.samples) {
    const CVec ev = eig_any(r).eigenvalues;
    CHECK((ev - ref.eigenvalues).norm() < 1e-8);
  }
  const auto smp1 = preprocess_main(x, 0.1, 0.1, cfg, 1);
  for (std::size_t k = 0; k < smp.samples.size(); ++k) CHECK((smp.samples[k] - smp1.samples[k]).norm() == 0.0);

  cfg.samples = 0;
  CHECK_THROWS_AS(preprocess_main(x, 0.1, 0.1, cfg), Error);
}

TEST_CASE("repaired X gate samples fit far better than the raw snapshot") {
  const TransferMatrix x = simulate_process_tomography(channel::Unitary{gates::pauli_x()}, {10000, 2});
  RandomBasisConfig cfg;
  cfg.samples = 50;
  const auto pre = preprocess_main(x, 0.1, 0.1, cfg);
  REQUIRE(pre.kind == PreprocessOutcome::Kind::Samples);
  double best = 1e9;
  for (const CMat& r : pre.samples) best = std::min(best, fit_search(x.mat, r, 1e9, BranchPolicy{}).min_distance);
  const double naive = fit_search(x.mat, perturb_to_nd2(x.mat, 1e-4), 1e9, BranchPolicy{}).min_distance;
  CHECK(best < 0.5);
  CHECK(best < naive);
}
