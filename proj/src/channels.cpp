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

#include "lindfit/channels.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace lindfit {

namespace gates {
CMat pauli_x() {
  CMat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
CMat pauli_y() {
  CMat m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
CMat pauli_z() {
  CMat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
CMat iswap() {
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = 1.0;
  m(1, 2) = cplx(0, 1);
  m(2, 1) = cplx(0, 1);
  m(3, 3) = 1.0;
  return m;
}
CMat cz() {
  CMat m = CMat::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}
}  // namespace gates

namespace {

CMat unitary_action(const CMat& u) { return kron(u, u.conjugate()); }

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) raise(ErrorKind::OutOfRange, std::string(name) + " must lie in [0, 1]");
}

}  // namespace

TransferMatrix unitary_transfer(const CMat& u) {
  if (u.rows() != u.cols()) raise(ErrorKind::NotUnitary, "unitary must be square");
  const CMat id = CMat::Identity(u.rows(), u.cols());
  if ((u.adjoint() * u - id).norm() > 1e-10) raise(ErrorKind::NotUnitary, "U^H U differs from identity");
  return {static_cast<int>(u.rows()), unitary_action(u), true};
}

TransferMatrix depolarizing_transfer(double p) {
  check_probability(p, "depolarizing probability");
  const CMat mat = (1.0 - p) * CMat::Identity(4, 4) +
                   (p / 3.0) * (unitary_action(gates::pauli_x()) + unitary_action(gates::pauli_y()) +
                                unitary_action(gates::pauli_z()));
  return {2, mat, true};
}

std::array<double, 3> unital_gammas(double g1, double g2, double g3, double t) {
  return {std::exp(-t * (g2 + g3)), std::exp(-t * (g1 + g3)), std::exp(-t * (g1 + g2))};
}

TransferMatrix unital_transfer(double g1, double g2, double g3, double t) {
  const auto G = unital_gammas(g1, g2, g3, t);
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    if (G[i] + G[j] > 1.0 + G[k] + 1e-12)
      raise(ErrorKind::NotCompletelyPositive, "unital channel violates Gamma_i + Gamma_j <= 1 + Gamma_k");
  }
  const std::array<double, 4> weights = {
      1.0 + G[0] + G[1] + G[2], 1.0 + G[0] - G[1] - G[2], 1.0 - G[0] + G[1] - G[2], 1.0 - G[0] - G[1] + G[2]};
  const std::array<CMat, 4> paulis = {CMat::Identity(2, 2), gates::pauli_x(), gates::pauli_y(), gates::pauli_z()};
  CMat mat = CMat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    const CMat a = 0.5 * std::sqrt(std::max(0.0, weights[i])) * paulis[i];
    mat += kron(a, a.conjugate());
  }
  return {2, mat, true};
}

bool unital_is_markovian(double g1, double g2, double g3) { return g1 > 0 && g2 > 0 && g3 > 0; }

TransferMatrix depolarizing_cz_transfer(double p_cz, double p_xx, double p_yy, double p_zz) {
  check_probability(p_cz, "p_cz");
  check_probability(p_xx, "p_xx");
  check_probability(p_yy, "p_yy");
  check_probability(p_zz, "p_zz");
  const double rest = 1.0 - (p_cz + p_xx + p_yy + p_zz);
  if (rest < -1e-12) raise(ErrorKind::OutOfRange, "mixture probabilities sum above 1");
  const CMat xx = kron(gates::pauli_x(), gates::pauli_x());
  const CMat yy = kron(gates::pauli_y(), gates::pauli_y());
  const CMat zz = kron(gates::pauli_z(), gates::pauli_z());
  const CMat mat = p_cz * unitary_action(gates::cz()) + p_xx * unitary_action(xx) + p_yy * unitary_action(yy) +
                   p_zz * unitary_action(zz) + std::max(0.0, rest) * CMat::Identity(16, 16);
  return {4, mat, true};
}

TransferMatrix identity_transfer(int d) { return {d, CMat::Identity(d * d, d * d), true}; }

TransferMatrix exact_transfer(const ChannelSpec& spec) {
  return std::visit(
      [](const auto& c) -> TransferMatrix {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, channel::Unitary>) return unitary_transfer(c.u);
        if constexpr (std::is_same_v<T, channel::Depolarizing>) return depolarizing_transfer(c.p);
        if constexpr (std::is_same_v<T, channel::UnitalPauli>) return unital_transfer(c.g1, c.g2, c.g3, c.t);
        if constexpr (std::is_same_v<T, channel::DepolarizingCZ>)
          return depolarizing_cz_transfer(c.p_cz, c.p_xx, c.p_yy, c.p_zz);
        if constexpr (std::is_same_v<T, channel::Identity>) return identity_transfer(c.d);
        if constexpr (std::is_same_v<T, channel::Custom>) return c.m;
      },
      spec);
}

int channel_dim(const ChannelSpec& spec) { return exact_transfer(spec).d; }

LindbladGenerator lindblad_generator(const CMat& H, const std::vector<CMat>& jumps) {
  if (H.rows() != H.cols() || (H - H.adjoint()).norm() > 1e-10)
    raise(ErrorKind::NotHermitianHamiltonian, "Hamiltonian must be hermitian");
  const Eigen::Index d = H.rows();
  const CMat id = CMat::Identity(d, d);
  const cplx i(0.0, 1.0);
  // rho -> i rho H - i H rho
  CMat mat = i * kron(id, H.transpose()) - i * kron(H, id);
  for (const CMat& J : jumps) {
    if (J.rows() != d || J.cols() != d) raise(ErrorKind::DimensionMismatch, "jump operator dimension");
    const CMat jj = J.adjoint() * J;
    mat += kron(J, J.conjugate()) - 0.5 * kron(jj, id) - 0.5 * kron(id, jj.transpose());
  }
  return {static_cast<int>(d), H, jumps, mat};
}

LindbladCheck is_lindbladian(const CMat& l, double tol) {
  const int d = sqrt_dim(l.rows());
  const CMat lg = gamma_involution(l);
  LindbladCheck c;
  c.herm = (lg - lg.adjoint()).norm();
  const MaxEntangled w = MaxEntangled::make(d);
  const CMat compressed = w.omega_perp * hermitian_part(lg) * w.omega_perp;
  Eigen::SelfAdjointEigenSolver<CMat> es(compressed, Eigen::EigenvaluesOnly);
  c.ccp = std::max(0.0, -es.eigenvalues()(0));
  c.trace = one_norm(partial_trace_first(lg));
  c.ok = c.herm <= tol && c.ccp <= tol && c.trace <= tol;
  return c;
}

bool is_cpt(const CMat& transfer, double tol) {
  const int d = sqrt_dim(transfer.rows());
  const CMat choi = gamma_involution(transfer);
  if ((choi - choi.adjoint()).norm() > tol) return false;
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(choi), Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -tol) return false;
  return (partial_trace_first(choi) - CMat::Identity(d, d)).norm() <= tol;
}

}  // namespace lindfit
