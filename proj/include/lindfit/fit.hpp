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

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lindfit/channels.hpp"
#include "lindfit/solver.hpp"

namespace lindfit {

enum class BranchMode {
  Auto,        // Exhaustive while the box has at most `exhaustive_limit` points, else Paired
  Exhaustive,  // every m in {-m_max..m_max}^{n}
  Paired,      // only branches that keep conjugate eigenvalue pairs conjugate
};

struct BranchPolicy {
  int m_max = 1;
  BranchMode mode = BranchMode::Auto;
  int max_active_pairs = 1;
  std::size_t exhaustive_limit = 6561;
};

// Box enumeration sorted by sum |m_j|, then lexicographically.
std::vector<std::vector<int>> enumerate_branches(const BranchPolicy& policy, int n);

// partner[i] = j when r_i^dagger is (numerically) parallel to r_j; i for
// self-adjoint eigenvectors.
std::vector<int> partner_indices(const SpectralData& s);
std::vector<std::vector<int>> enumerate_paired_branches(const SpectralData& s, const BranchPolicy& policy);
std::vector<std::vector<int>> branches_for(const SpectralData& s, const BranchPolicy& policy);

struct FitResult {
  CMat lindbladian;
  double distance = 0.0;
  std::vector<int> branch;
  std::optional<int> basis_sample_id;
  double objective = 0.0;
  LindbladCheck check;
};

struct FitSearch {
  std::optional<FitResult> best;
  std::size_t branches_tried = 0;
  bool roundtrip_rejected = false;
  double min_distance = 0.0;  // over all verified branches, ignoring epsilon
};

FitSearch fit_search(const CMat& m_snapshot, const CMat& r, double eps, const BranchPolicy& policy,
                     const SolverSettings& settings = {}, int jobs = 1);

std::optional<FitResult> best_fit_lindbladian(const TransferMatrix& m_snapshot, const CMat& r, double eps,
                                              const BranchPolicy& policy, const SolverSettings& settings = {},
                                              int jobs = 1);

}  // namespace lindfit
