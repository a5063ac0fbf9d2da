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

#include "lindfit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "lindfit/parallel.hpp"

namespace lindfit {

namespace {

int weight(const std::vector<int>& m) {
  int w = 0;
  for (int x : m) w += std::abs(x);
  return w;
}

void sort_branches(std::vector<std::vector<int>>& v) {
  std::sort(v.begin(), v.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    const int wa = weight(a), wb = weight(b);
    if (wa != wb) return wa < wb;
    return a < b;
  });
}

}  // namespace

std::vector<std::vector<int>> enumerate_branches(const BranchPolicy& policy, int n) {
  if (policy.m_max < 0) raise(ErrorKind::OutOfRange, "m_max must be nonnegative");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), -policy.m_max);
  while (true) {
    out.push_back(cur);
    int k = n - 1;
    while (k >= 0 && cur[static_cast<std::size_t>(k)] == policy.m_max) {
      cur[static_cast<std::size_t>(k)] = -policy.m_max;
      --k;
    }
    if (k < 0) break;
    ++cur[static_cast<std::size_t>(k)];
  }
  sort_branches(out);
  return out;
}

std::vector<int> partner_indices(const SpectralData& s) {
  const Eigen::Index n = s.size();
  std::vector<int> partner(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    // Expand r_i^dagger in the right eigenbasis and take the dominant term.
    const CVec coeffs = s.left * vec_adjoint(s.right.col(i));
    Eigen::Index best = 0;
    coeffs.cwiseAbs().maxCoeff(&best);
    partner[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = partner[static_cast<std::size_t>(i)];
    if (partner[static_cast<std::size_t>(j)] != i) partner[static_cast<std::size_t>(i)] = static_cast<int>(i);
  }
  return partner;
}

std::vector<std::vector<int>> enumerate_paired_branches(const SpectralData& s, const BranchPolicy& policy) {
  if (policy.m_max < 0) raise(ErrorKind::OutOfRange, "m_max must be nonnegative");
  const Eigen::Index n = s.size();
  const std::vector<int> partner = partner_indices(s);
  std::vector<int> base(static_cast<std::size_t>(n), 0);
  std::vector<std::pair<int, int>> pairs;
  auto arg = [&](Eigen::Index i) { return std::arg(s.eigenvalues(i)); };
  for (Eigen::Index i = 0; i < n; ++i) {
    const int j = partner[static_cast<std::size_t>(i)];
    if (j == i) {
      base[static_cast<std::size_t>(i)] = static_cast<int>(std::floor(-arg(i) / (2 * M_PI) + 0.5));
    } else if (j > i) {
      // Choose m_j so that the two log eigenvalues become conjugate.
      base[static_cast<std::size_t>(j)] = static_cast<int>(std::floor(-(arg(i) + arg(j)) / (2 * M_PI) + 0.5));
      pairs.emplace_back(static_cast<int>(i), j);
    }
  }
  std::set<std::vector<int>> uniq;
  auto in_box = [&](const std::vector<int>& m) {
    return std::all_of(m.begin(), m.end(), [&](int x) { return std::abs(x) <= policy.m_max; });
  };
  std::function<void(std::size_t, int, std::vector<int>&)> rec = [&](std::size_t p, int active,
                                                                     std::vector<int>& m) {
    if (p == pairs.size()) {
      if (in_box(m)) uniq.insert(m);
      return;
    }
    rec(p + 1, active, m);
    if (active >= policy.max_active_pairs) return;
    const auto [i, j] = pairs[p];
    const int mi = m[static_cast<std::size_t>(i)], mj = m[static_cast<std::size_t>(j)];
    for (int v = -policy.m_max; v <= policy.m_max; ++v) {
      if (v == 0) continue;
      m[static_cast<std::size_t>(i)] = mi + v;
      m[static_cast<std::size_t>(j)] = mj - v;
      rec(p + 1, active + 1, m);
    }
    m[static_cast<std::size_t>(i)] = mi;
    m[static_cast<std::size_t>(j)] = mj;
  };
  std::vector<int> m = base;
  rec(0, 0, m);
  std::vector<std::vector<int>> out(uniq.begin(), uniq.end());
  sort_branches(out);
  return out;
}

std::vector<std::vector<int>> branches_for(const SpectralData& s, const BranchPolicy& policy) {
  const int n = static_cast<int>(s.size());
  BranchMode mode = policy.mode;
  if (mode == BranchMode::Auto) {
    const double box = std::pow(2.0 * policy.m_max + 1.0, n);
    mode = box <= static_cast<double>(policy.exhaustive_limit) ? BranchMode::Exhaustive : BranchMode::Paired;
  }
  return mode == BranchMode::Exhaustive ? enumerate_branches(policy, n) : enumerate_paired_branches(s, policy);
}

FitSearch fit_search(const CMat& m_snapshot, const CMat& r, double eps, const BranchPolicy& policy,
                     const SolverSettings& settings, int jobs) {
  if (m_snapshot.rows() != r.rows() || m_snapshot.cols() != r.cols())
    raise(ErrorKind::DimensionMismatch, "snapshot and repaired matrix differ in size");
  const int d = sqrt_dim(r.rows());
  const SpectralData s = eig_full(r);
  const CMat l0 = matrix_log_principal(s);

  FitSearch out;
  out.min_distance = std::numeric_limits<double>::infinity();
  if ((expm(l0) - r).norm() > 1e-6) {
    out.roundtrip_rejected = true;
    return out;
  }

  const auto branches = branches_for(s, policy);
  struct Slot {
    bool valid = false;
    FitResult fit;
  };
  // Fixed chunks keep early termination independent of the thread count.
  constexpr std::size_t kChunk = 64;
  constexpr double kTie = 1e-9;
  double xi = eps;
  for (std::size_t start = 0; start < branches.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, branches.size() - start);
    std::vector<Slot> slots(count);
    parallel_for(count, jobs, [&](std::size_t k) {
      const auto& m = branches[start + k];
      const CMat target = gamma_involution(branch(l0, s, m));
      const SolveReport rep = solve_closest_lindbladian(target, d, settings);
      Slot& slot = slots[k];
      slot.fit.lindbladian = gamma_involution(rep.x_opt);
      slot.fit.check = is_lindbladian(slot.fit.lindbladian, 1e-7);
      if (!slot.fit.check.ok) return;
      slot.fit.distance = (m_snapshot - expm(slot.fit.lindbladian)).norm();
      slot.fit.branch = m;
      slot.fit.objective = rep.objective;
      slot.valid = std::isfinite(slot.fit.distance);
    });
    out.branches_tried += count;
    for (auto& slot : slots) {
      if (!slot.valid) continue;
      out.min_distance = std::min(out.min_distance, slot.fit.distance);
      // Later branches must win by more than solver noise.
      if (slot.fit.distance < (out.best ? xi - kTie : xi)) {
        xi = slot.fit.distance;
        out.best = std::move(slot.fit);
      }
    }
    if (out.best && out.best->distance < 1e-12) break;
  }
  return out;
}

std::optional<FitResult> best_fit_lindbladian(const TransferMatrix& m_snapshot, const CMat& r, double eps,
                                              const BranchPolicy& policy, const SolverSettings& settings,
                                              int jobs) {
  return fit_search(m_snapshot.mat, r, eps, policy, settings, jobs).best;
}

}  // namespace lindfit
