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
#include <set>

#include "doctest.h"
#include "oracles.hpp"

#include "lindfit/fit.hpp"

using namespace lindfit;

TEST_CASE("box enumeration order") {
  BranchPolicy p;
  const auto b = enumerate_branches(p, 4);
  CHECK(b.size() == 81);
  CHECK(b.front() == std::vector<int>{0, 0, 0, 0});
  CHECK(b[1] == std::vector<int>{-1, 0, 0, 0});
  for (std::size_t k = 1; k < b.size(); ++k) {
    int wa = 0, wb = 0;
    for (int x : b[k - 1]) wa += std::abs(x);
    for (int x : b[k]) wb += std::abs(x);
    CHECK(wa <= wb);
  }
  p.m_max = 2;
  CHECK(enumerate_branches(p, 2).size() == 25);
  p.m_max = -1;
  CHECK_THROWS_AS(enumerate_branches(p, 2), Error);
}

TEST_CASE("partners of a hermiticity preserving spectrum") {
  // exp of a Lindbladian with complex eigenvalues pairs conjugate eigenvectors.
  std::mt19937_64 rng(61);
  const auto l = oracle::random_lindbladian(2, rng, 2.0, 0.3);
  const SpectralData s = eig_full(oracle::taylor_expm(l.transfer));
  const auto partner = partner_indices(s);
  for (int i = 0; i < 4; ++i) {
    const int j = partner[static_cast<std::size_t>(i)];
    CHECK(partner[static_cast<std::size_t>(j)] == i);
    CHECK(std::abs(s.eigenvalues(j) - std::conj(s.eigenvalues(i))) < 1e-8);
  }
}

TEST_CASE("paired branches keep conjugate log eigenvalues conjugate") {
  std::mt19937_64 rng(67);
  const auto l = oracle::random_lindbladian(2, rng, 2.0, 0.3);
  const SpectralData s = eig_full(oracle::taylor_expm(l.transfer));
  BranchPolicy p;
  p.mode = BranchMode::Paired;
  const auto branches = enumerate_paired_branches(s, p);
  CHECK(!branches.empty());
  const auto partner = partner_indices(s);
  const CMat l0 = matrix_log_principal(s);
  for (const auto& m : branches) {
    const CMat lm = branch(l0, s, m);
    for (int i = 0; i < 4; ++i) {
      const int j = partner[static_cast<std::size_t>(i)];
      const cplx li = std::log(s.eigenvalues(i)) + cplx(0, 2 * M_PI * m[static_cast<std::size_t>(i)]);
      const cplx lj = std::log(s.eigenvalues(j)) + cplx(0, 2 * M_PI * m[static_cast<std::size_t>(j)]);
      CHECK(std::abs(li - std::conj(lj)) < 1e-8);
    }
    CHECK((gamma_involution(lm) - gamma_involution(lm).adjoint()).norm() < 1e-8);
  }
}

TEST_CASE("auto mode switches on box size") {
  std::mt19937_64 rng(71);
  const CMat m = oracle::taylor_expm(oracle::random_lindbladian(4, rng, 0.5, 0.2).transfer);
  const SpectralData s = eig_full(m);
  BranchPolicy p;
  const auto b = branches_for(s, p);
  CHECK(b.size() < 1000);
  p.exhaustive_limit = 0;
  const SpectralData s2 = eig_full(oracle::taylor_expm(oracle::random_lindbladian(2, rng, 0.5, 0.2).transfer));
  CHECK(branches_for(s2, p).size() < 81);
}

TEST_CASE("Markovian round trip") {
  std::mt19937_64 rng(73);
  for (int rep = 0; rep < 5; ++rep) {
    // Slow enough that the principal logarithm is the generator itself.
    const auto l = oracle::random_lindbladian(2, rng, 0.5, 0.3);
    const CMat m = oracle::taylor_expm(l.transfer);
    const FitSearch fs = fit_search(m, m, 1e-3, BranchPolicy{});
    REQUIRE(fs.best.has_value());
    CHECK(fs.best->distance < 1e-6);
    CHECK(fs.best->branch == std::vector<int>(4, 0));
    CHECK(fs.best->check.ok);
    CHECK((fs.best->lindbladian - l.transfer).norm() < 1e-5);
  }
}

TEST_CASE("fit result is independent of the thread count") {
  std::mt19937_64 rng(79);
  const auto l = oracle::random_lindbladian(2, rng, 1.0, 0.5);
  CMat m = oracle::taylor_expm(l.transfer);
  m += 0.01 * oracle::random_hermitian(4, rng);
  const FitSearch a = fit_search(m, m, 1.0, BranchPolicy{}, {}, 1);
  const FitSearch b = fit_search(m, m, 1.0, BranchPolicy{}, {}, 4);
  REQUIRE(a.best.has_value());
  REQUIRE(b.best.has_value());
  CHECK(a.best->distance == b.best->distance);
  CHECK(a.best->branch == b.best->branch);
  CHECK(a.min_distance == b.min_distance);
}

TEST_CASE("nothing inside a tiny epsilon") {
  std::mt19937_64 rng(137);
  CMat m = oracle::taylor_expm(oracle::random_lindbladian(2, rng, 1.0, 0.5).transfer);
  m += 0.05 * oracle::random_complex(4, rng);
  const FitSearch fs = fit_search(m, m, 1e-9, BranchPolicy{});
  CHECK_FALSE(fs.best.has_value());
  CHECK(fs.min_distance > 1e-3);
}
