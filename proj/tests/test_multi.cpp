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

#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "lindfit/multi.hpp"

using namespace lindfit;

namespace {

TransferMatrix exact(const CMat& m) { return TransferMatrix{sqrt_dim(m.rows()), m, false}; }

SnapshotSeries series_of(const CMat& l, const std::vector<double>& times) {
  SnapshotSeries s;
  s.times = times;
  for (double t : times) s.snapshots.push_back(exact(oracle::taylor_expm(t * l)));
  return s;
}

}  // namespace

TEST_CASE("series validation") {
  std::mt19937_64 rng(109);
  const CMat l = oracle::random_lindbladian(2, rng, 1.0, 0.5).transfer;
  SnapshotSeries s = series_of(l, {0.5, 1.0});
  CHECK_NOTHROW(s.validate());
  s.times = {1.0, 0.5};
  CHECK_THROWS_AS(s.validate(), Error);
  s.times = {0.0, 0.5};
  CHECK_THROWS_AS(s.validate(), Error);
  s.times = {0.5};
  CHECK_THROWS_AS(s.validate(), Error);
  s = series_of(l, {0.5, 1.0});
  s.snapshots[1] = identity_transfer(3);
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("exact series recovers its generator") {
  std::mt19937_64 rng(113);
  for (int rep = 0; rep < 3; ++rep) {
    const CMat l = oracle::random_lindbladian(2, rng, 1.0, 0.5).transfer;
    const MultiFitSearch ms = best_fit_multi(series_of(l, {0.5, 1.0, 1.5}), 1e-3, BranchPolicy{});
    REQUIRE(ms.best.has_value());
    CHECK(ms.best->fit.distance <= 1e-5);
    CHECK((ms.best->fit.lindbladian - l).norm() <= 1e-5);
    CHECK(ms.best->snapshot_distances.size() == 3);
    CHECK(ms.best->branches.size() == 3);
    CHECK(is_lindbladian(ms.best->fit.lindbladian, 1e-6).ok);
  }
}

TEST_CASE("incompatible snapshots have no common generator") {
  std::mt19937_64 rng(127);
  const CMat l1 = oracle::random_lindbladian(2, rng, 1.0, 0.5).transfer;
  const CMat l2 = oracle::random_lindbladian(2, rng, 3.0, 1.0).transfer;
  SnapshotSeries s;
  s.times = {1.0, 2.0};
  s.snapshots = {exact(oracle::taylor_expm(l1)), exact(oracle::taylor_expm(2.0 * l2))};
  CHECK_FALSE(best_fit_multi(s, 1e-3, BranchPolicy{}).best.has_value());
}

TEST_CASE("a single snapshot reduces to the ordinary fit") {
  std::mt19937_64 rng(131);
  const auto l = oracle::random_lindbladian(2, rng, 1.0, 0.5);
  CMat m = oracle::taylor_expm(l.transfer);
  const CMat noise = oracle::random_hermitian(4, rng);
  m += 0.02 * gamma_involution(noise);
  SnapshotSeries s;
  s.times = {1.0};
  s.snapshots = {exact(m)};
  const MultiFitSearch ms = best_fit_multi(s, 0.2, BranchPolicy{});
  const FitSearch fs = fit_search(m, m, 0.2, BranchPolicy{});
  REQUIRE(ms.best.has_value());
  REQUIRE(fs.best.has_value());
  CHECK(std::abs(ms.best->fit.distance - fs.best->distance) < 1e-6);
  CHECK((ms.best->fit.lindbladian - fs.best->lindbladian).norm() < 1e-5);
}

TEST_CASE("subspace compatibility of real clusters") {
  const TransferMatrix xx = unitary_transfer(gates::pauli_x());
  SnapshotSeries s;
  s.snapshots = {xx, xx};
  s.times = {1.0, 3.0};
  CVec a(4), b(4), e(4);
  a << 1, 0, 0, 1;
  b << 0, 1, 1, 0;
  e << 1, 0, 0, -1;
  CandidateBasis cand;
  cand.v = CMat(4, 0);
  cand.s = CMat(4, 2);
  cand.s << a, b;
  const CompatibilityReport same = subspace_compatibility(s, cand, 1e-6, {}, CompatibilityKind::Real);
  CHECK(same.sum < 1e-10);
  CHECK(same.ok);

  double prev = -1.0;
  bool failed = false;
  for (double theta = 0.1; theta < 1.5; theta += 0.2) {
    cand.s.col(0) = std::cos(theta) * a + std::sin(theta) * e;
    const CompatibilityReport r = subspace_compatibility(s, cand, 1e-6, {}, CompatibilityKind::Real);
    CHECK(r.sum > prev);
    prev = r.sum;
    if (!r.ok) failed = true;
  }
  CHECK(failed);

  cand.s = CMat(4, 3);
  cand.s << a, b, e;
  CHECK_THROWS_AS(subspace_compatibility(s, cand, 1e-6, {}, CompatibilityKind::Real), Error);
}

TEST_CASE("subspace compatibility of conjugate clusters") {
  const TransferMatrix sw = unitary_transfer(gates::iswap());
  SnapshotSeries s;
  s.snapshots = {sw, sw, sw};
  s.times = {1.0, 2.0, 3.0};
  const SpectralData sd = eig_any(sw.mat);
  const ClusterPartition part = detect_clusters(sd, 1e-6);
  const IndexSet& a = part.complex_sets.at(0);
  CandidateBasis cand;
  cand.v = CMat(16, static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) cand.v.col(static_cast<Eigen::Index>(k)) = sd.right.col(a[k]);
  const CompatibilityReport r = subspace_compatibility(s, cand, 1e-6, {}, CompatibilityKind::Complex);
  CHECK(r.sum < 1e-8);
  CHECK(r.ok);
  cand.v = cand.v.leftCols(2);
  CHECK_THROWS_AS(subspace_compatibility(s, cand, 1e-6, {}, CompatibilityKind::Complex), Error);
}
