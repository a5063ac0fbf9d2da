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

#include "lindfit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace lindfit {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
    case ErrorKind::SingularInput: return "SingularInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotPerfectSquareDim: return "NotPerfectSquareDim";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotUnitary: return "NotUnitary";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::NotCompletelyPositive: return "NotCompletelyPositive";
    case ErrorKind::NotHermitianHamiltonian: return "NotHermitianHamiltonian";
    case ErrorKind::BasisUnavailable: return "BasisUnavailable";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InconsistentClusters: return "InconsistentClusters";
    case ErrorKind::InputError: return "InputError";
  }
  return "Unknown";
}

int sqrt_dim(Eigen::Index n) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
  if (n <= 0 || d * d != n) raise(ErrorKind::NotPerfectSquareDim, "dimension " + std::to_string(n));
  return static_cast<int>(d);
}

CVec vec(const CMat& v) {
  const Eigen::Index d = v.rows();
  CVec out(d * v.cols());
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index k = 0; k < v.cols(); ++k) out(j * v.cols() + k) = v(j, k);
  return out;
}

CMat unvec(const CVec& v) {
  const int d = sqrt_dim(v.size());
  CMat out(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) out(j, k) = v(j * d + k);
  return out;
}

CMat kron(const CMat& a, const CMat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

CMat SpectralData::reconstruct() const {
  return right * eigenvalues.asDiagonal() * left;
}

bool canonical_less(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

double min_relative_gap(const CVec& ev) {
  double scale = 1.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) scale = std::max(scale, std::abs(ev(i)));
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) gap = std::min(gap, std::abs(ev(i) - ev(j)));
  return gap / scale;
}

SpectralData eig_any(const CMat& m) {
  if (m.rows() != m.cols()) raise(ErrorKind::DimensionMismatch, "eigendecomposition of a non-square matrix");
  if (!m.allFinite()) raise(ErrorKind::NumericalFailure, "non-finite matrix entries");
  Eigen::ComplexEigenSolver<CMat> es(m, true);
  if (es.info() != Eigen::Success) raise(ErrorKind::NumericalFailure, "eigensolver did not converge");

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const CVec& raw = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return canonical_less(raw(a), raw(b)); });

  SpectralData s;
  s.eigenvalues.resize(n);
  s.right.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    s.eigenvalues(i) = raw(order[static_cast<std::size_t>(i)]);
    s.right.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]).normalized();
  }
  Eigen::FullPivLU<CMat> lu(s.right);
  if (!lu.isInvertible()) raise(ErrorKind::NumericalFailure, "eigenvector matrix is singular");
  s.left = lu.inverse();
  if (!s.left.allFinite()) raise(ErrorKind::NumericalFailure, "non-finite left eigenvectors");
  return s;
}

SpectralData eig_full(const CMat& m, double degeneracy_tol) {
  SpectralData s = eig_any(m);
  if (min_relative_gap(s.eigenvalues) <= degeneracy_tol)
    raise(ErrorKind::DegenerateSpectrum, "eigenvalues coincide within relative gap " + std::to_string(degeneracy_tol));
  return s;
}

CMat matrix_log_principal(const SpectralData& s) {
  CVec logs(s.size());
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const cplx lambda = s.eigenvalues(j);
    if (std::abs(lambda) <= 1e-14) raise(ErrorKind::SingularInput, "zero eigenvalue has no logarithm");
    cplx l = std::log(lambda);
    if (l.imag() <= -M_PI) l += cplx(0.0, 2.0 * M_PI);  // keep arg in (-pi, pi]
    logs(j) = l;
  }
  return s.right * logs.asDiagonal() * s.left;
}

CMat branch(const CMat& l0, const SpectralData& s, const std::vector<int>& m) {
  if (static_cast<Eigen::Index>(m.size()) != s.size() || l0.rows() != s.size())
    raise(ErrorKind::DimensionMismatch, "branch vector length does not match the spectrum");
  CVec shift(s.size());
  bool any = false;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    shift(j) = cplx(0.0, 2.0 * M_PI * m[static_cast<std::size_t>(j)]);
    any = any || m[static_cast<std::size_t>(j)] != 0;
  }
  if (!any) return l0;
  return l0 + s.right * shift.asDiagonal() * s.left;
}

CMat gamma_involution(const CMat& a) {
  if (a.rows() != a.cols()) raise(ErrorKind::DimensionMismatch, "gamma involution needs a square matrix");
  const int d = sqrt_dim(a.rows());
  CMat out(a.rows(), a.cols());
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k)
      for (int l = 0; l < d; ++l)
        for (int m = 0; m < d; ++m) out(j * d + l, k * d + m) = a(j * d + k, l * d + m);
  return out;
}

CMat flip_operator(int d) {
  CMat f = CMat::Zero(d * d, d * d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) f(k * d + j, j * d + k) = 1.0;
  return f;
}

CVec vec_adjoint(const CVec& v) {
  const int d = sqrt_dim(v.size());
  CVec out(v.size());
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) out(j * d + k) = std::conj(v(k * d + j));
  return out;
}

CMat partial_trace_first(const CMat& x) {
  if (x.rows() != x.cols()) raise(ErrorKind::DimensionMismatch, "partial trace needs a square matrix");
  const int d = sqrt_dim(x.rows());
  CMat out = CMat::Zero(d, d);
  for (int j = 0; j < d; ++j) out += x.block(j * d, j * d, d, d);
  return out;
}

double frobenius(const CMat& a) { return a.norm(); }

double one_norm(const CMat& a) { return a.cwiseAbs().sum(); }

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double min_eig_hermitian(const CMat& a, double tol) {
  if (!is_hermitian(a, tol)) raise(ErrorKind::NotHermitian, "minimum eigenvalue requested for a non-hermitian matrix");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) raise(ErrorKind::NumericalFailure, "hermitian eigensolver failed");
  return es.eigenvalues()(0);
}

Norms norms(const CMat& a) {
  Norms n;
  n.frobenius = frobenius(a);
  n.one_norm = one_norm(a);
  if (is_hermitian(a, 1e-10)) n.min_eig_hermitian_part = min_eig_hermitian(a);
  return n;
}

MaxEntangled MaxEntangled::make(int d) {
  if (d < 1) raise(ErrorKind::OutOfRange, "dimension must be positive");
  MaxEntangled w;
  w.d = d;
  w.omega = CVec::Zero(d * d);
  for (int j = 0; j < d; ++j) w.omega(j * d + j) = 1.0 / std::sqrt(static_cast<double>(d));
  w.omega_perp = CMat::Identity(d * d, d * d) - w.omega * w.omega.adjoint();
  return w;
}

CMat expm(const CMat& a) { return a.exp(); }

}  // namespace lindfit
