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

#include "lindfit/mu.hpp"

#include <cmath>
#include <limits>

#include <boost/math/special_functions/lambert_w.hpp>

#include "lindfit/parallel.hpp"

namespace lindfit {

double delta_min_for(double eps, double l0_norm) {
  if (!(eps > 0.0) || !(l0_norm > 0.0)) return 0.0;
  return boost::math::lambert_w0(eps / l0_norm);
}

std::vector<double> delta_grid(double delta_min, double step) {
  std::vector<double> grid;
  if (!(delta_min > 0.0) || !(step > 0.0)) return grid;
  const double delta_max = 10.0 * delta_min;
  if (step > delta_max - delta_min) return grid;
  for (std::size_t k = 0;; ++k) {
    const double delta = delta_min + static_cast<double>(k) * step;
    // Relative slack so a grid point landing on delta_max by rounding is dropped.
    if (delta >= delta_max * (1.0 - 1e-12)) break;
    grid.push_back(delta);
  }
  return grid;
}

MuSearch mu_search(const CMat& m_snapshot, const CMat& r, double eps, const BranchPolicy& policy,
                   const DeltaSweep& sweep, const SolverSettings& settings, int jobs) {
  if (m_snapshot.rows() != r.rows() || m_snapshot.cols() != r.cols())
    raise(ErrorKind::DimensionMismatch, "snapshot and repaired matrix differ in size");
  const int d = sqrt_dim(r.rows());
  const SpectralData s = eig_full(r);
  const CMat l0 = matrix_log_principal(s);

  MuSearch out;
  if ((expm(l0) - r).norm() > 1e-6) return out;
  out.delta_min = delta_min_for(eps, l0.norm());
  const std::vector<double> grid = delta_grid(out.delta_min, sweep.delta_step);
  out.grid_points = grid.size();
  if (grid.empty()) return out;

  const auto branches = branches_for(s, policy);
  std::vector<CMat> targets;
  targets.reserve(branches.size());
  std::vector<double> floors;
  for (const auto& m : branches) {
    targets.push_back(gamma_involution(branch(l0, s, m)));
    // Distance to the affine set bounds every ball radius that can work.
    floors.push_back((targets.back() - proj::affine(targets.back(), d)).norm());
  }

  const MaxEntangled w = MaxEntangled::make(d);
  struct Slot {
    bool valid = false;
    MuResult res;
  };
  const std::size_t nb = branches.size();
  const std::size_t total = grid.size() * nb;
  constexpr std::size_t kChunk = 1024;
  double best_mu = 1e9;
  for (std::size_t start = 0; start < total; start += kChunk) {
    std::vector<Slot> slots(std::min(kChunk, total - start));
    parallel_for(slots.size(), jobs, [&](std::size_t k) {
      const std::size_t gi = (start + k) / nb, bi = (start + k) % nb;
      if (floors[bi] > grid[gi] + 1e-9) return;
      const SolveReport rep = solve_min_mu(targets[bi], d, grid[gi], settings);
      if (rep.status == SolveStatus::Infeasible) return;
      Slot& slot = slots[k];
      slot.res.generator = gamma_involution(rep.x_opt);
      slot.res.mu_min = rep.mu;
      slot.res.delta_used = grid[gi];
      slot.res.branch = branches[bi];
      slot.res.distance = (m_snapshot - expm(slot.res.generator)).norm();
      // Defining property of the measure, checked before the candidate counts.
      const LindbladCheck chk = is_lindbladian(slot.res.generator - rep.mu * w.omega_perp, 1e-6);
      slot.valid = chk.ok && std::isfinite(slot.res.distance);
    });
    // Sequential reduction in (delta, branch) order: ties keep the earlier one.
    for (auto& slot : slots) {
      if (!slot.valid || !(slot.res.distance < eps)) continue;
      if (slot.res.mu_min < best_mu) {
        best_mu = slot.res.mu_min;
        out.best = std::move(slot.res);
      }
    }
  }
  out.solves = total;
  return out;
}

std::optional<MuResult> non_markovianity(const TransferMatrix& m_snapshot, const CMat& r, double eps,
                                         const BranchPolicy& policy, const DeltaSweep& sweep,
                                         const SolverSettings& settings, int jobs) {
  return mu_search(m_snapshot.mat, r, eps, policy, sweep, settings, jobs).best;
}

double markovianity_score(double mu_min, int d) {
  return std::exp((1.0 - static_cast<double>(d) * d) * mu_min);
}

AnalyticalMu analytical_mu_unital(const TransferMatrix& m_snapshot) {
  const CMat& m = m_snapshot.mat;
  if (sqrt_dim(m.rows()) != 2) raise(ErrorKind::PreconditionViolated, "analytical measure is defined for one qubit");
  SpectralData s;
  try {
    s = eig_full(m);
  } catch (const Error& e) {
    raise(ErrorKind::PreconditionViolated, std::string("spectrum is not simple: ") + e.what());
  }
  for (Eigen::Index j = 0; j < 4; ++j) {
    const cplx l = s.eigenvalues(j);
    if (std::abs(l.imag()) > 1e-8 * std::max(1.0, std::abs(l)) || l.real() <= 0.0)
      raise(ErrorKind::PreconditionViolated, "spectrum must be real and positive");
  }

  const MaxEntangled w = MaxEntangled::make(2);
  Eigen::Index z = 0;
  double best = -1.0;
  for (Eigen::Index j = 0; j < 4; ++j) {
    const double overlap = std::abs(s.left.row(j).dot(w.omega.conjugate())) / s.left.row(j).norm();
    if (overlap > best) {
      best = overlap;
      z = j;
    }
  }

  CMat S(4, 4);
  CVec D(4);
  int col = 0;
  auto symmetrized = [&](Eigen::Index j) {
    CVec v = s.right.col(j);
    // Eigenvector phases are arbitrary; rotate so v^dagger = v when possible.
    const cplx c = v.dot(vec_adjoint(v));
    if (std::abs(c) > 0.0) v *= std::polar(1.0, std::arg(c) / 2.0);
    return CVec(0.5 * (v + vec_adjoint(v)));
  };
  for (Eigen::Index j = 0; j < 4; ++j) {
    if (j == z) continue;
    CVec v = symmetrized(j);
    const cplx a = 0.5 * (v(0) - v(3));
    v(0) = a;
    v(3) = -a;
    S.col(col) = v;
    D(col) = std::log(s.eigenvalues(j).real());
    ++col;
  }
  S.col(3) = symmetrized(z);
  D(3) = 0.0;

  Eigen::FullPivLU<CMat> lu(S);
  if (!lu.isInvertible()) raise(ErrorKind::PreconditionViolated, "filtered eigenvectors are linearly dependent");
  AnalyticalMu out;
  out.generator = S * D.asDiagonal() * lu.inverse();
  out.zeroed_index = static_cast<int>(z);
  const CMat compressed = w.omega_perp * hermitian_part(gamma_involution(out.generator)) * w.omega_perp;
  Eigen::SelfAdjointEigenSolver<CMat> es(compressed, Eigen::EigenvaluesOnly);
  out.mu = 2.0 * std::abs(es.eigenvalues()(0));
  out.eps = (m - expm(out.generator)).norm();
  return out;
}

}  // namespace lindfit
