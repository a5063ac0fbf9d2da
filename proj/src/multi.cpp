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

#include "lindfit/multi.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "lindfit/mu.hpp"
#include "lindfit/parallel.hpp"

namespace lindfit {

void SnapshotSeries::validate() const {
  if (snapshots.empty()) raise(ErrorKind::InputError, "series has no snapshots");
  if (snapshots.size() != times.size()) raise(ErrorKind::InputError, "one time per snapshot is required");
  for (std::size_t c = 0; c < snapshots.size(); ++c) {
    if (snapshots[c].mat.rows() != snapshots[0].mat.rows() || snapshots[c].mat.cols() != snapshots[0].mat.cols())
      raise(ErrorKind::DimensionMismatch, "snapshots differ in dimension");
    if (!(times[c] > 0.0)) raise(ErrorKind::InputError, "times must be positive");
    if (c > 0 && !(times[c] > times[c - 1])) raise(ErrorKind::InputError, "times must be strictly increasing");
  }
  sqrt_dim(snapshots[0].mat.rows());
}

namespace {

struct JointSolve {
  CMat x;
  double objective = 0.0;
  bool converged = false;
};

// min sum_c ||t_c X - T_c|| over the Lindblad set with ||t_c X - T_c|| <= delta.
// Three-block ADMM: X in the affine set, Z in the cone, Y_c in the balls.
JointSolve solve_joint(const std::vector<CMat>& targets, const std::vector<double>& t, int d, double delta,
                       const SolverSettings& st) {
  const std::size_t q = targets.size();
  const Eigen::Index n = targets[0].rows();
  const double rho = st.rho;
  double tsq = 0.0;
  for (double tc : t) tsq += tc * tc;

  CMat z = CMat::Zero(n, n), w = CMat::Zero(n, n), x;
  for (std::size_t c = 0; c < q; ++c) z += t[c] * hermitian_part(targets[c]) / tsq;
  std::vector<CMat> y(targets), u(q, CMat::Zero(n, n));

  JointSolve out;
  for (int it = 1; it <= st.max_iters; ++it) {
    CMat acc = z - w;
    for (std::size_t c = 0; c < q; ++c) acc += t[c] * (y[c] - u[c]);
    x = proj::affine(acc / (1.0 + tsq), d);

    const CMat z_prev = z;
    z = proj::ccp_cone(x + w, d);
    w += x - z;

    double primal = (x - z).squaredNorm(), dual = (z - z_prev).squaredNorm();
    for (std::size_t c = 0; c < q; ++c) {
      const CMat v = t[c] * x + u[c] - targets[c];
      const double r = v.norm();
      const double radius = std::min(delta, std::max(0.0, r - 1.0 / rho));
      const CMat y_new = r > 0.0 ? CMat(targets[c] + v * (radius / r)) : targets[c];
      dual += (y_new - y[c]).squaredNorm();
      y[c] = y_new;
      const CMat gap = t[c] * x - y[c];
      u[c] += gap;
      primal += gap.squaredNorm();
    }
    if (std::sqrt(primal) <= st.primal_tol && rho * std::sqrt(dual) <= st.dual_tol) {
      out.converged = true;
      break;
    }
  }
  out.x = x;
  for (std::size_t c = 0; c < q; ++c) out.objective += (t[c] * x - targets[c]).norm();
  return out;
}

}  // namespace

MultiFitSearch best_fit_multi(const SnapshotSeries& series, double eps, const BranchPolicy& policy,
                              const SolverSettings& settings, int jobs) {
  series.validate();
  const std::size_t q = series.size();
  const int d = sqrt_dim(series.snapshots[0].mat.rows());

  std::vector<SpectralData> spectra;
  std::vector<CMat> logs;
  std::vector<std::vector<std::vector<int>>> branch_lists;
  for (const auto& snap : series.snapshots) {
    spectra.push_back(eig_full(snap.mat));
    logs.push_back(matrix_log_principal(spectra.back()));
    branch_lists.push_back(branches_for(spectra.back(), policy));
  }

  MultiFitSearch out;
  out.delta = delta_min_for(eps, logs[0].norm());

  std::set<std::vector<std::size_t>> seen;
  std::vector<std::vector<std::size_t>> assignments;
  auto add = [&](std::vector<std::size_t> a) {
    if (seen.insert(a).second) assignments.push_back(std::move(a));
  };
  add(std::vector<std::size_t>(q, 0));
  for (std::size_t c = 0; c < q; ++c)
    for (std::size_t k = 1; k < branch_lists[c].size(); ++k) {
      std::vector<std::size_t> a(q, 0);
      a[c] = k;
      add(std::move(a));
    }
  // Time-scaled assignments: each branch of the first snapshot, with every
  // other snapshot on the branch whose log is closest to (t_c / t_1) L.
  // Fast rotations push several snapshots off the principal branch at once.
  if (q > 1) {
    std::vector<std::vector<CMat>> branch_logs(q);
    for (std::size_t c = 1; c < q; ++c)
      for (const auto& m : branch_lists[c]) branch_logs[c].push_back(branch(logs[c], spectra[c], m));
    for (std::size_t k = 0; k < branch_lists[0].size(); ++k) {
      const CMat l1 = branch(logs[0], spectra[0], branch_lists[0][k]) / series.times[0];
      std::vector<std::size_t> a(q, 0);
      a[0] = k;
      for (std::size_t c = 1; c < q; ++c) {
        const CMat want = series.times[c] * l1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < branch_logs[c].size(); ++j) {
          const double gap = (branch_logs[c][j] - want).norm();
          if (gap < best) {
            best = gap;
            a[c] = j;
          }
        }
      }
      add(std::move(a));
    }
  }

  struct Slot {
    bool valid = false;
    MultiFitResult res;
  };
  std::vector<Slot> slots(assignments.size());
  parallel_for(assignments.size(), jobs, [&](std::size_t idx) {
    std::vector<CMat> targets(q);
    Slot& slot = slots[idx];
    for (std::size_t c = 0; c < q; ++c) {
      const auto& m = branch_lists[c][assignments[idx][c]];
      targets[c] = gamma_involution(branch(logs[c], spectra[c], m));
      slot.res.branches.push_back(m);
      // Nothing in the affine set comes within delta of this target.
      if ((targets[c] - proj::affine(targets[c], d)).norm() > out.delta) return;
    }
    const JointSolve js = solve_joint(targets, series.times, d, out.delta, settings);
    FitResult& fit = slot.res.fit;
    fit.lindbladian = gamma_involution(js.x);
    fit.check = is_lindbladian(fit.lindbladian, 1e-7);
    if (!fit.check.ok) return;
    fit.objective = js.objective;
    fit.branch = slot.res.branches[0];
    fit.distance = 0.0;
    for (std::size_t c = 0; c < q; ++c) {
      const double dist = (series.snapshots[c].mat - expm(series.times[c] * fit.lindbladian)).norm();
      slot.res.snapshot_distances.push_back(dist);
      fit.distance += dist;
      if (!(dist < eps)) return;
    }
    slot.valid = true;
  });
  out.assignments_tried = assignments.size();

  double xi = static_cast<double>(q) * eps;
  for (auto& slot : slots) {
    if (!slot.valid || !(slot.res.fit.distance < xi)) continue;
    xi = slot.res.fit.distance;
    out.best = std::move(slot.res);
  }
  return out;
}

namespace {

CMat span_projector(const CMat& v) {
  if (v.cols() == 0) return CMat::Zero(v.rows(), v.rows());
  Eigen::HouseholderQR<CMat> qr(v);
  const CMat q = qr.householderQ() * CMat::Identity(v.rows(), v.cols());
  return q * q.adjoint();
}

CMat cluster_projector(const SpectralData& s, const IndexSet& set) {
  CMat v(s.right.rows(), static_cast<Eigen::Index>(set.size()));
  for (std::size_t k = 0; k < set.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = s.right.col(set[k]);
  return span_projector(v);
}

}  // namespace

CompatibilityReport subspace_compatibility(const SnapshotSeries& series, const CandidateBasis& candidate,
                                           double p, const CompatibilityCheck& check, CompatibilityKind kind) {
  series.validate();
  if (!(check.sigma1 > 0.0) || !(check.sigma2 > 0.0)) raise(ErrorKind::OutOfRange, "tolerances must be positive");
  CMat vdag(candidate.v.rows(), candidate.v.cols());
  for (Eigen::Index k = 0; k < candidate.v.cols(); ++k) vdag.col(k) = vec_adjoint(candidate.v.col(k));
  const CMat pi_v = span_projector(candidate.v), pi_vdag = span_projector(vdag);
  const CMat pi_s = candidate.s.size() ? span_projector(candidate.s) : CMat::Zero(pi_v.rows(), pi_v.cols());

  CompatibilityReport out;
  for (const auto& snap : series.snapshots) {
    const SpectralData s = eig_any(snap.mat);
    const ClusterPartition part = detect_clusters(s, p);
    double best = std::numeric_limits<double>::infinity();
    if (kind == CompatibilityKind::Complex) {
      const std::size_t n = static_cast<std::size_t>(candidate.v.cols());
      for (const auto& pr : part.conjugate_pairs) {
        const IndexSet& a = part.complex_sets[static_cast<std::size_t>(pr.first)];
        const IndexSet& b = part.complex_sets[static_cast<std::size_t>(pr.second)];
        if (a.size() != n) continue;
        const CMat pa = cluster_projector(s, a), pb = cluster_projector(s, b);
        best = std::min({best, (pa - pi_v).norm() + (pb - pi_vdag).norm(),
                         (pb - pi_v).norm() + (pa - pi_vdag).norm()});
      }
    } else {
      const std::size_t n = static_cast<std::size_t>(2 * candidate.v.cols() + candidate.s.cols());
      const CMat target = pi_v + pi_vdag + pi_s;
      for (const auto* sets : {&part.positive_sets, &part.negative_sets})
        for (const IndexSet& set : *sets)
          if (set.size() == n) best = std::min(best, (cluster_projector(s, set) - target).norm());
    }
    if (!std::isfinite(best))
      raise(ErrorKind::InconsistentClusters, "a snapshot has no cluster matching the candidate size");
    out.sum += best;
  }
  out.ok = out.sum <= (kind == CompatibilityKind::Complex ? check.sigma1 : check.sigma2);
  return out;
}

}  // namespace lindfit
