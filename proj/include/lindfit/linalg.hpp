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

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lindfit/errors.hpp"

namespace lindfit {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

// Vectorization is row-stacking: vec(V)[j*d + k] = V(j, k). A unitary U then
// acts as kron(U, conj(U)) and a map rho -> A rho B as kron(A, B^T).
int sqrt_dim(Eigen::Index n);
CVec vec(const CMat& v);
CMat unvec(const CVec& v);
CMat kron(const CMat& a, const CMat& b);

struct SpectralData {
  CVec eigenvalues;
  CMat right;  // columns |r_j>
  CMat left;   // rows <l_j|, the inverse of `right`

  Eigen::Index size() const { return eigenvalues.size(); }
  CMat projector(Eigen::Index j) const { return right.col(j) * left.row(j); }
  CMat reconstruct() const;
};

// Real part descending, then imaginary part descending.
bool canonical_less(const cplx& a, const cplx& b);

// Throws DegenerateSpectrum when two eigenvalues are closer than
// `degeneracy_tol` relative to max(1, spectral radius).
SpectralData eig_full(const CMat& m, double degeneracy_tol = 1e-12);
// Same decomposition without the simplicity check.
SpectralData eig_any(const CMat& m);
double min_relative_gap(const CVec& eigenvalues);

CMat matrix_log_principal(const SpectralData& s);
CMat branch(const CMat& l0, const SpectralData& s, const std::vector<int>& m);

CMat gamma_involution(const CMat& a);
CMat flip_operator(int d);
CVec vec_adjoint(const CVec& v);
CMat partial_trace_first(const CMat& x);

double frobenius(const CMat& a);
double one_norm(const CMat& a);
bool is_hermitian(const CMat& a, double tol);
CMat hermitian_part(const CMat& a);
// Smallest eigenvalue of a hermitian matrix; NotHermitian beyond `tol`.
double min_eig_hermitian(const CMat& a, double tol = 1e-10);

struct Norms {
  double frobenius = 0.0;
  double one_norm = 0.0;
  std::optional<double> min_eig_hermitian_part;
};
// min_eig_hermitian_part is filled only for hermitian input.
Norms norms(const CMat& a);

struct MaxEntangled {
  int d = 0;
  CVec omega;
  CMat omega_perp;
  static MaxEntangled make(int d);
};

// Pade-13 scaling and squaring.
CMat expm(const CMat& a);

}  // namespace lindfit
