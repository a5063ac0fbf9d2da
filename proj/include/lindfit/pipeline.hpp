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
#include <string>
#include <vector>

#include "lindfit/mu.hpp"
#include "lindfit/preprocess.hpp"

namespace lindfit {

enum class Verdict { Markovian, NonMarkovian, Identity, NoResult };
const char* to_string(Verdict v);

struct PipelineConfig {
  double eps = 0.0;
  double precision = 0.1;
  RandomBasisConfig basis;
  BranchPolicy policy;
  DeltaSweep sweep;
  SolverSettings solver;
  int jobs = 1;
  bool preprocess = true;  // false: fit the snapshot's own logarithm only
  bool run_fit = true;
  bool run_mu = true;
  int mu_max_samples = 16;  // repaired samples handed to the mu search
};

struct PipelineResult {
  Verdict verdict = Verdict::NoResult;
  std::optional<FitResult> fit;
  std::optional<MuResult> mu;
  double score = 0.0;
  PreprocessOutcome::Kind preprocess_kind = PreprocessOutcome::Kind::Passthrough;
  bool perturbed = false;
  ClusterPartition partition;
  std::optional<std::string> basis_failure;
  // Smallest verified fit distance per sample, ignoring eps (inf if none).
  std::vector<double> sample_min_distance;
  // Same for the unrepaired ND^2 matrix, fitted alongside the samples.
  std::optional<double> unrepaired_min_distance;
  std::size_t branches_tried = 0;
  std::size_t roundtrip_rejected = 0;
};

PipelineResult run_pipeline(const TransferMatrix& m_snapshot, const PipelineConfig& cfg);

struct SweepRow {
  double eps = 0.0;
  Verdict verdict = Verdict::NoResult;
  std::optional<double> mu;
  double distance = 0.0;  // fit or mu distance; NaN when nothing was found
};

std::vector<SweepRow> sweep_epsilon(const TransferMatrix& m_snapshot, const std::vector<double>& eps_values,
                                    const PipelineConfig& cfg);

// eps values from `from` while <= `to` (inclusive within rounding).
std::vector<double> epsilon_range(double from, double to, double step);

}  // namespace lindfit
