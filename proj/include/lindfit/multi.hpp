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

#include <optional>
#include <vector>

#include "lindfit/fit.hpp"
#include "lindfit/preprocess.hpp"

namespace lindfit {

struct SnapshotSeries {
  std::vector<TransferMatrix> snapshots;
  std::vector<double> times;

  std::size_t size() const { return snapshots.size(); }
  // Equal dimensions, matching lengths, positive strictly increasing times.
  void validate() const;
};

struct MultiFitResult {
  FitResult fit;  // distance is the sum over snapshots
  std::vector<double> snapshot_distances;
  std::vector<std::vector<int>> branches;  // one vector per snapshot
};

struct MultiFitSearch {
  std::optional<MultiFitResult> best;
  double delta = 0.0;
  std::size_t assignments_tried = 0;
};

// One generator L with ||M_c - exp(t_c L)|| < eps for every snapshot,
// minimizing sum_c ||t_c L - log_{m^c} M_c||. Branch assignments vary one
// snapshot at a time away from its first branch.
MultiFitSearch best_fit_multi(const SnapshotSeries& series, double eps, const BranchPolicy& policy,
                              const SolverSettings& settings = {}, int jobs = 1);

struct CompatibilityCheck {
  double sigma1 = 0.5;  // complex clusters
  double sigma2 = 0.5;  // real clusters
};

enum class CompatibilityKind { Complex, Real };

// Candidate structure for one cluster: pair vectors v (partners v^dagger) and
// self-adjoint vectors s.
struct CandidateBasis {
  CMat v;
  CMat s;
};

struct CompatibilityReport {
  bool ok = false;
  double sum = 0.0;
};

// Sums projector mismatches between every snapshot's matching cluster and the
// candidate. InconsistentClusters when a snapshot has no cluster of that size.
CompatibilityReport subspace_compatibility(const SnapshotSeries& series, const CandidateBasis& candidate,
                                           double p, const CompatibilityCheck& check, CompatibilityKind kind);

}  // namespace lindfit
