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

#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lindfit/linalg.hpp"

namespace lindfit {

struct TransferMatrix {
  int d = 0;
  CMat mat;
  bool exact_cpt = false;
};

struct LindbladGenerator {
  int d = 0;
  CMat H;
  std::vector<CMat> jumps;
  CMat mat;
};

struct LindbladCheck {
  bool ok = false;
  double herm = 0.0;   // ||L^G - (L^G)^H||_F
  double ccp = 0.0;    // max(0, -lambda_min(w_perp L^G w_perp))
  double trace = 0.0;  // ||Tr_1[L^G]||_1
};

namespace gates {
CMat pauli_x();
CMat pauli_y();
CMat pauli_z();
CMat iswap();
CMat cz();
}  // namespace gates

namespace channel {
struct Unitary { CMat u; };
struct Depolarizing { double p = 0.0; };
struct UnitalPauli { double g1 = 0.0, g2 = 0.0, g3 = 0.0, t = 1.0; };
struct DepolarizingCZ { double p_cz = 0.0, p_xx = 0.0, p_yy = 0.0, p_zz = 0.0; };
struct Identity { int d = 2; };
struct Custom { TransferMatrix m; };
}  // namespace channel

using ChannelSpec = std::variant<channel::Unitary, channel::Depolarizing, channel::UnitalPauli,
                                 channel::DepolarizingCZ, channel::Identity, channel::Custom>;

struct TomographyConfig {
  std::int64_t shots = 10000;
  std::uint64_t seed = 0;
};

TransferMatrix unitary_transfer(const CMat& u);
TransferMatrix depolarizing_transfer(double p);
// Gamma_i = exp(-t (g_j + g_k)) for {i,j,k} a permutation of {1,2,3}.
std::array<double, 3> unital_gammas(double g1, double g2, double g3, double t);
TransferMatrix unital_transfer(double g1, double g2, double g3, double t);
bool unital_is_markovian(double g1, double g2, double g3);
TransferMatrix depolarizing_cz_transfer(double p_cz, double p_xx, double p_yy, double p_zz);
TransferMatrix identity_transfer(int d);

TransferMatrix exact_transfer(const ChannelSpec& spec);
int channel_dim(const ChannelSpec& spec);

LindbladGenerator lindblad_generator(const CMat& H, const std::vector<CMat>& jumps);
LindbladCheck is_lindbladian(const CMat& l, double tol);

// Choi form hermitian, PSD and trace preserving within `tol`.
bool is_cpt(const CMat& transfer, double tol);

TransferMatrix simulate_process_tomography(const ChannelSpec& spec, const TomographyConfig& cfg);

}  // namespace lindfit
