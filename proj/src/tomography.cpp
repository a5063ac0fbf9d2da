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

#include <algorithm>
#include <cmath>
#include <random>

#include "lindfit/channels.hpp"
#include "lindfit/rng.hpp"

namespace lindfit {

namespace {

int qubit_count(int d) {
  int n = 0;
  while ((1 << n) < d) ++n;
  if ((1 << n) != d) raise(ErrorKind::OutOfRange, "tomography needs a qubit register (d a power of two)");
  return n;
}

int ipow(int base, int e) {
  int r = 1;
  while (e-- > 0) r *= base;
  return r;
}

// Digit q of `index` in base `base`, qubit 0 most significant.
int digit(int index, int base, int n, int q) { return (index / ipow(base, n - 1 - q)) % base; }

CMat input_state(int which) {
  const double h = 1.0 / std::sqrt(2.0);
  CVec v(2);
  switch (which) {
    case 0: v << 1.0, 0.0; break;
    case 1: v << 0.0, 1.0; break;
    case 2: v << h, h; break;
    default: v << h, cplx(0.0, h); break;
  }
  return v * v.adjoint();
}

// Eigenbasis of X (0), Y (1) or Z (2); column 0 is the +1 outcome.
CMat measurement_basis(int axis) {
  const double h = 1.0 / std::sqrt(2.0);
  CMat b(2, 2);
  if (axis == 0) b << h, h, h, -h;
  else if (axis == 1) b << h, h, cplx(0.0, h), cplx(0.0, -h);
  else b << 1.0, 0.0, 0.0, 1.0;
  return b;
}

CMat pauli(int which) {
  switch (which) {
    case 1: return gates::pauli_x();
    case 2: return gates::pauli_y();
    case 3: return gates::pauli_z();
    default: return CMat::Identity(2, 2);
  }
}

std::vector<std::int64_t> multinomial(std::mt19937_64& eng, std::int64_t shots, const std::vector<double>& p) {
  std::vector<std::int64_t> counts(p.size(), 0);
  std::int64_t left = shots;
  double mass = 1.0;
  for (std::size_t k = 0; k + 1 < p.size() && left > 0; ++k) {
    const double q = mass > 0.0 ? std::clamp(p[k] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> bin(left, q);
    counts[k] = bin(eng);
    left -= counts[k];
    mass -= p[k];
  }
  counts.back() += left;
  return counts;
}

}  // namespace

TransferMatrix simulate_process_tomography(const ChannelSpec& spec, const TomographyConfig& cfg) {
  if (cfg.shots < 1) raise(ErrorKind::OutOfRange, "shots must be >= 1");
  const TransferMatrix exact = exact_transfer(spec);
  const int d = exact.d;
  const int n = qubit_count(d);
  const int n_inputs = ipow(4, n), n_settings = ipow(3, n), n_paulis = ipow(4, n);

  std::vector<CMat> bases(static_cast<std::size_t>(n_settings));
  for (int s = 0; s < n_settings; ++s) {
    CMat b = CMat::Identity(1, 1);
    for (int q = 0; q < n; ++q) b = kron(b, measurement_basis(digit(s, 3, n, q)));
    bases[static_cast<std::size_t>(s)] = b;
  }
  std::vector<CMat> pauli_ops(static_cast<std::size_t>(n_paulis));
  for (int P = 0; P < n_paulis; ++P) {
    CMat op = CMat::Identity(1, 1);
    for (int q = 0; q < n; ++q) op = kron(op, pauli(digit(P, 4, n, q)));
    pauli_ops[static_cast<std::size_t>(P)] = op;
  }

  CMat in_cols(d * d, n_inputs), out_cols(d * d, n_inputs);
  for (int a = 0; a < n_inputs; ++a) {
    CMat rho_in = CMat::Identity(1, 1);
    for (int q = 0; q < n; ++q) rho_in = kron(rho_in, input_state(digit(a, 4, n, q)));
    const CMat rho_out = unvec(exact.mat * vec(rho_in));

    // Frequencies per setting, outcome index bits ordered like the qubits.
    std::vector<std::vector<double>> freq(static_cast<std::size_t>(n_settings));
    for (int s = 0; s < n_settings; ++s) {
      const CMat& b = bases[static_cast<std::size_t>(s)];
      std::vector<double> p(static_cast<std::size_t>(d));
      double total = 0.0;
      for (int k = 0; k < d; ++k) {
        p[static_cast<std::size_t>(k)] = std::max(0.0, (b.col(k).adjoint() * rho_out * b.col(k))(0, 0).real());
        total += p[static_cast<std::size_t>(k)];
      }
      for (double& x : p) x /= total;
      auto eng = keyed_engine(cfg.seed, stream::kTomography, static_cast<std::uint64_t>(a * n_settings + s));
      const auto counts = multinomial(eng, cfg.shots, p);
      auto& f = freq[static_cast<std::size_t>(s)];
      f.resize(static_cast<std::size_t>(d));
      for (int k = 0; k < d; ++k)
        f[static_cast<std::size_t>(k)] = static_cast<double>(counts[static_cast<std::size_t>(k)]) / cfg.shots;
    }

    // Linear inversion: average each Pauli expectation over compatible settings.
    CMat rho_est = CMat::Zero(d, d);
    for (int P = 0; P < n_paulis; ++P) {
      double sum = 0.0;
      int used = 0;
      for (int s = 0; s < n_settings; ++s) {
        bool compatible = true;
        for (int q = 0; q < n && compatible; ++q) {
          const int pq = digit(P, 4, n, q);
          compatible = pq == 0 || pq - 1 == digit(s, 3, n, q);
        }
        if (!compatible) continue;
        double e = 0.0;
        for (int k = 0; k < d; ++k) {
          int parity = 0;
          for (int q = 0; q < n; ++q)
            if (digit(P, 4, n, q) != 0) parity ^= digit(k, 2, n, q);
          e += (parity ? -1.0 : 1.0) * freq[static_cast<std::size_t>(s)][static_cast<std::size_t>(k)];
        }
        sum += e;
        ++used;
      }
      rho_est += (sum / used) * pauli_ops[static_cast<std::size_t>(P)];
    }
    rho_est /= static_cast<double>(d);
    in_cols.col(a) = vec(rho_in);
    out_cols.col(a) = vec(rho_est);
  }
  const CMat mat = out_cols * in_cols.inverse();
  return {d, mat, false};
}

}  // namespace lindfit
