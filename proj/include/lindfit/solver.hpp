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

#include "lindfit/linalg.hpp"

namespace lindfit {

struct SolverSettings {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double cone_tol = 1e-9;
  int max_iters = 50000;
  double over_relaxation = 1.6;
  double rho = 1.0;
};

enum class SolveStatus { Optimal, MaxIters, Infeasible };
const char* to_string(SolveStatus s);

struct SolveResiduals {
  double affine = 0.0;  // ||Tr_1 X||_1 plus the anti-hermitian norm of X
  double cone = 0.0;    // violation of w_perp X w_perp + (mu/d) 1 >= 0
  double ball = 0.0;    // max(0, ||X - target||_F - delta)
};

struct SolveReport {
  CMat x_opt;
  double objective = 0.0;
  double mu = 0.0;
  SolveResiduals residuals;
  SolveStatus status = SolveStatus::MaxIters;
  int iterations = 0;
};

namespace proj {
// Nearest hermitian X with Tr_1 X = 0.
CMat affine(const CMat& x, int d);
// Nearest hermitian X with w_perp X w_perp >= 0 (input assumed hermitian).
CMat ccp_cone(const CMat& x, int d);
// Hermitian, Tr_1-free direction whose compression onto w_perp is w_perp.
CMat white_noise_direction(int d);
}  // namespace proj

// min ||X - target||_F over hermitian X with w_perp X w_perp >= 0, Tr_1 X = 0.
SolveReport solve_closest_lindbladian(const CMat& target, int d, const SolverSettings& settings = {});

// min mu over the same set intersected with ||X - target||_F <= delta and the
// cone shifted by (mu/d) 1.
SolveReport solve_min_mu(const CMat& target, int d, double delta, const SolverSettings& settings = {});

}  // namespace lindfit
