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

namespace lindfit {

struct DeltaSweep {
  double delta_step = 0.01;
};

// Solves eps = exp(delta) * delta * l0_norm.
double delta_min_for(double eps, double l0_norm);
// {delta_min + k * step} below 10 * delta_min. A step wider than the interval
// (delta_max - delta_min) yields no grid points at all.
std::vector<double> delta_grid(double delta_min, double step);

struct MuResult {
  CMat generator;  // H'
  double mu_min = 0.0;
  double delta_used = 0.0;
  std::vector<int> branch;
  double distance = 0.0;
  std::optional<int> basis_sample_id;
};

struct MuSearch {
  std::optional<MuResult> best;
  double delta_min = 0.0;
  std::size_t grid_points = 0;
  std::size_t solves = 0;
};

MuSearch mu_search(const CMat& m_snapshot, const CMat& r, double eps, const BranchPolicy& policy,
                   const DeltaSweep& sweep, const SolverSettings& settings = {}, int jobs = 1);

std::optional<MuResult> non_markovianity(const TransferMatrix& m_snapshot, const CMat& r, double eps,
                                         const BranchPolicy& policy, const DeltaSweep& sweep,
                                         const SolverSettings& settings = {}, int jobs = 1);

double markovianity_score(double mu_min, int d);

struct AnalyticalMu {
  CMat generator;
  double mu = 0.0;
  double eps = 0.0;
  int zeroed_index = -1;  // canonical index of the eigenvalue sent to log 0
};

// Filters hermiticity and trace preservation out of a one-qubit snapshot with
// simple, real, positive spectrum and measures the white noise it still needs.
AnalyticalMu analytical_mu_unital(const TransferMatrix& m_snapshot);

}  // namespace lindfit
