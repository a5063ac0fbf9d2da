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

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lindfit/channels.hpp"

namespace lindfit {

using IndexSet = std::vector<int>;

struct ClusterPartition {
  std::vector<IndexSet> positive_sets;
  std::vector<IndexSet> negative_sets;
  std::vector<IndexSet> complex_sets;
  // Indices into complex_sets.
  std::vector<std::pair<int, int>> conjugate_pairs;
  double precision = 0.0;
  bool identity = false;  // all eigenvalues in one positive set

  bool empty() const { return positive_sets.empty() && negative_sets.empty() && complex_sets.empty(); }
};

// Close eigenvalues of the same kind (positive real, negative real, complex)
// are merged transitively. Sets hold canonical indices, sorted.
ClusterPartition detect_clusters(const SpectralData& s, double p);

struct HPBasis {
  enum class Kind { ConjugatePairs, SelfAdjointAndPairs };
  Kind kind = Kind::SelfAdjointAndPairs;
  IndexSet indices;          // the cluster
  IndexSet partner_indices;  // ConjugatePairs: the conjugate cluster
  // SelfAdjointAndPairs: columns listed as self-adjoint vectors, then v, v^dagger
  // for each pair. ConjugatePairs: one column per index of the first cluster.
  CMat vectors;
  CMat partners;  // ConjugatePairs only: vec_adjoint of each column
  std::vector<int> self_adjoint;             // column indices
  std::vector<std::pair<int, int>> pairs;    // column indices (v, v^dagger)
  // Orthonormal self-adjoint vectors spanning the cluster (real clusters).
  CMat real_basis;
  // Coefficients of w_i^dagger in the cluster eigenvectors, one column per i.
  CMat beta;
  bool approximate = false;
  double residual = 0.0;  // projector distance, nonzero only when approximate
};

// Kernel of [F w_1^*, ..., -u_1, ...]. With approx_tol > 0 a nearly conjugate
// pair of subspaces is accepted when their projectors differ by < approx_tol.
std::optional<HPBasis> conjugate_basis(const SpectralData& s, const IndexSet& set_a, const IndexSet& set_b,
                                       double approx_tol = 0.0);
std::optional<HPBasis> real_positive_basis(const SpectralData& s, const IndexSet& set_a, double p,
                                           double approx_tol = 0.0);

struct RandomBasisConfig {
  int samples = 1000;
  std::uint64_t seed = 0;
  double max_condition = 1e12;
};

struct ClusterBases {
  std::vector<HPBasis> real;                              // positive_sets then negative_sets
  std::vector<HPBasis> complex;                           // one per conjugate pair
  std::vector<bool> negative;                             // parallel to `real`
};

struct BasisSample {
  CMat S;
  // true where the column was drawn at random, false where it is the
  // vec_adjoint of its partner column.
  std::vector<bool> conj_test;
  std::vector<int> partner;  // column partner, -1 when none
  int attempts = 0;
};

BasisSample random_hp_basis(const SpectralData& s, const ClusterPartition& partition, const ClusterBases& bases,
                            const RandomBasisConfig& cfg, int sample_index);

// (1 - alpha) M + alpha E with E a normalized hermiticity-preserving diagonal
// map, halving alpha until the spectrum is simple.
CMat perturb_to_nd2(const CMat& m, double budget);

struct PreprocessOutcome {
  enum class Kind { Identity, Samples, Passthrough };
  Kind kind = Kind::Passthrough;
  CMat nd2;  // the ND^2 matrix the samples are built from
  bool perturbed = false;
  ClusterPartition partition;
  std::vector<CMat> samples;  // R matrices, or {nd2} for passthrough
  std::optional<std::string> basis_failure;
};

PreprocessOutcome preprocess_main(const TransferMatrix& m_snapshot, double p, double eps,
                                  const RandomBasisConfig& cfg, int jobs = 1);

double projector_distance(const CMat& a, const CMat& b);

}  // namespace lindfit
