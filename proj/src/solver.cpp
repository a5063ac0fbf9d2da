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

#include "lindfit/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace lindfit {

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIters: return "MaxIters";
    case SolveStatus::Infeasible: return "Infeasible";
  }
  return "Unknown";
}

namespace proj {

CMat affine(const CMat& x, int d) {
  CMat h = hermitian_part(x);
  const CMat tr = partial_trace_first(h) / static_cast<double>(d);
  for (int j = 0; j < d; ++j) h.block(j * d, j * d, d, d) -= tr;
  return h;
}

CMat ccp_cone(const CMat& x, int d) {
  const MaxEntangled w = MaxEntangled::make(d);
  const CMat c = w.omega_perp * x * w.omega_perp;
  Eigen::SelfAdjointEigenSolver<CMat> es(c);
  const RVec& ev = es.eigenvalues();
  if (ev(0) >= 0.0) return x;
  CMat neg = CMat::Zero(x.rows(), x.cols());
  for (Eigen::Index k = 0; k < ev.size() && ev(k) < 0.0; ++k)
    neg += ev(k) * es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  return x - neg;
}

CMat white_noise_direction(int d) {
  const MaxEntangled w = MaxEntangled::make(d);
  return CMat::Identity(d * d, d * d) - static_cast<double>(d * d) * w.omega * w.omega.adjoint();
}

}  // namespace proj

namespace {

double cone_violation(const CMat& x, int d, double mu) {
  const MaxEntangled w = MaxEntangled::make(d);
  Eigen::SelfAdjointEigenSolver<CMat> es(w.omega_perp * hermitian_part(x) * w.omega_perp, Eigen::EigenvaluesOnly);
  // The compressed block always has w in its kernel, so the full-identity
  // shift also demands mu >= 0.
  return std::max({0.0, -(es.eigenvalues()(0) + mu / d), -mu / d});
}

double affine_violation(const CMat& x) {
  return one_norm(partial_trace_first(x)) + (x - x.adjoint()).norm();
}

struct AdmmState {
  CMat x, z, u;
  int iterations = 0;
  bool converged = false;
};

// Projects the hermitian matrix `th` onto {Tr_1 = 0} n {w_perp X w_perp >= 0}.
AdmmState project_onto_lindblad_set(const CMat& th, int d, const SolverSettings& st, const AdmmState* warm) {
  AdmmState s;
  if (warm) {
    s.z = warm->z;
    s.u = warm->u;
  } else {
    s.z = th;
    s.u = CMat::Zero(th.rows(), th.cols());
  }
  const double rho = st.rho, alpha = st.over_relaxation;
  for (int it = 1; it <= st.max_iters; ++it) {
    s.x = proj::affine((th + rho * (s.z - s.u)) / (1.0 + rho), d);
    const CMat xh = alpha * s.x + (1.0 - alpha) * s.z;
    const CMat z_prev = s.z;
    s.z = proj::ccp_cone(xh + s.u, d);
    s.u += xh - s.z;
    s.iterations = it;
    const double r = (s.x - s.z).norm();
    const double dual = rho * (s.z - z_prev).norm();
    if (r <= st.primal_tol && dual <= st.dual_tol) {
      s.converged = true;
      break;
    }
  }
  return s;
}

}  // namespace

SolveReport solve_closest_lindbladian(const CMat& target, int d, const SolverSettings& st) {
  if (target.rows() != d * d || target.cols() != d * d)
    raise(ErrorKind::DimensionMismatch, "target must have dimension d^2");
  const CMat th = hermitian_part(target);
  const double anti2 = (target - th).squaredNorm();
  const AdmmState s = project_onto_lindblad_set(th, d, st, nullptr);

  SolveReport rep;
  rep.x_opt = s.x;
  rep.objective = std::sqrt((s.x - th).squaredNorm() + anti2);
  rep.iterations = s.iterations;
  rep.residuals.affine = affine_violation(s.x);
  rep.residuals.cone = cone_violation(s.x, d, 0.0);
  rep.status = s.converged && rep.residuals.cone <= st.cone_tol ? SolveStatus::Optimal : SolveStatus::MaxIters;
  if (s.converged && rep.residuals.cone > st.cone_tol) rep.status = SolveStatus::MaxIters;
  return rep;
}

SolveReport solve_min_mu(const CMat& target, int d, double delta, const SolverSettings& st) {
  if (target.rows() != d * d || target.cols() != d * d)
    raise(ErrorKind::DimensionMismatch, "target must have dimension d^2");
  if (!(delta >= 0.0)) raise(ErrorKind::OutOfRange, "delta must be nonnegative");

  // X is feasible for mu iff Y = X + (mu/d) K lies in the unshifted set, with
  // K the white-noise direction. So mu_min solves phi(mu) = delta where
  // phi(mu) = dist(target + (mu/d) K, set), convex and nonincreasing in mu.
  const CMat th = hermitian_part(target);
  const double anti2 = (target - th).squaredNorm();
  const CMat k_dir = proj::white_noise_direction(d);
  const double ball_tol = std::max(st.primal_tol, 1e-12);

  SolveReport rep;
  const double floor = std::sqrt(anti2 + (th - proj::affine(th, d)).squaredNorm());
  if (floor > delta + ball_tol) {
    rep.status = SolveStatus::Infeasible;
    rep.x_opt = proj::affine(th, d);
    rep.mu = std::numeric_limits<double>::infinity();
    rep.objective = rep.mu;
    rep.residuals.ball = floor - delta;
    return rep;
  }

  struct Eval {
    double mu, f, slope;
    AdmmState s;
  };
  int total_iters = 0;
  bool all_converged = true;
  auto evaluate = [&](double mu, const AdmmState* warm) {
    Eval e;
    e.mu = mu;
    const CMat shifted = th + (mu / d) * k_dir;
    e.s = project_onto_lindblad_set(shifted, d, st, warm);
    total_iters += e.s.iterations;
    all_converged = all_converged && e.s.converged;
    const CMat gap = shifted - e.s.x;
    const double dist = std::sqrt(gap.squaredNorm() + anti2);
    e.f = dist - delta;
    e.slope = dist > 0.0 ? (gap.cwiseProduct(k_dir.conjugate())).sum().real() / (d * dist) : 0.0;
    return e;
  };

  Eval cur = evaluate(0.0, nullptr);
  if (cur.f > ball_tol) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 200; ++it) {
      double next;
      if (cur.slope < -1e-14) next = cur.mu - cur.f / cur.slope;
      else next = std::isfinite(hi) ? 0.5 * (lo + hi) : std::max(1.0, 2.0 * cur.mu);
      if (std::isfinite(hi) && (next <= lo || next >= hi)) next = 0.5 * (lo + hi);
      Eval cand = evaluate(next, &cur.s);
      if (cand.f > 0.0) lo = cand.mu;
      else hi = cand.mu;
      cur = std::move(cand);
      if (std::abs(cur.f) <= ball_tol) break;
      if (std::isfinite(hi) && hi - lo <= 1e-13 * std::max(1.0, hi)) break;
      if (cur.mu > 1e12) break;
    }
    // End on the feasible side of the bracket.
    if (cur.f > ball_tol && std::isfinite(hi)) cur = evaluate(hi, &cur.s);
  }

  rep.mu = cur.mu;
  rep.objective = cur.mu;
  rep.x_opt = cur.s.x - (cur.mu / d) * k_dir;
  rep.iterations = total_iters;
  rep.residuals.affine = affine_violation(rep.x_opt);
  rep.residuals.cone = cone_violation(rep.x_opt, d, cur.mu);
  rep.residuals.ball = std::max(0.0, std::sqrt((rep.x_opt - th).squaredNorm() + anti2) - delta);
  const bool ok = all_converged && rep.residuals.cone <= st.cone_tol && rep.residuals.ball <= ball_tol * 10;
  rep.status = ok ? SolveStatus::Optimal : SolveStatus::MaxIters;
  if (cur.mu > 1e12) rep.status = SolveStatus::Infeasible;
  return rep;
}

}  // namespace lindfit
