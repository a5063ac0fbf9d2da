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

#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "lindfit/channels.hpp"

using namespace lindfit;

TEST_CASE("vec and unvec use row stacking") {
  CMat v(2, 2);
  v << 1.0, 2.0, 3.0, 4.0;
  const CVec x = vec(v);
  CHECK(x(1) == cplx(2.0));
  CHECK(x(2) == cplx(3.0));
  CHECK((unvec(x) - v).norm() == 0.0);
}

TEST_CASE("kron(U, conj U) applies U rho U^dagger") {
  std::mt19937_64 rng(11);
  const CMat u = oracle::random_unitary(3, rng);
  const CMat rho = oracle::random_hermitian(3, rng);
  const CMat t = kron(u, u.conjugate());
  CHECK((unvec(t * vec(rho)) - u * rho * u.adjoint()).norm() < 1e-12);
  CHECK((t - oracle::kraus_transfer({u})).norm() < 1e-12);
}

TEST_CASE("sqrt_dim rejects non squares") {
  CHECK(sqrt_dim(16) == 4);
  CHECK_THROWS_AS(sqrt_dim(15), Error);
}

TEST_CASE("gamma involution matches explicit reshuffle and is self inverse") {
  std::mt19937_64 rng(3);
  for (int d : {2, 3}) {
    const CMat a = oracle::random_complex(d * d, rng);
    CHECK((gamma_involution(a) - oracle::reshuffle(a)).norm() < 1e-14);
    CHECK((gamma_involution(gamma_involution(a)) - a).norm() == 0.0);
  }
}

TEST_CASE("choi form of a unitary channel is a rank one projector times d") {
  const CMat choi = gamma_involution(unitary_transfer(gates::pauli_x()).mat);
  CHECK((choi - choi.adjoint()).norm() < 1e-14);
  CHECK(min_eig_hermitian(choi) > -1e-12);
  CHECK(std::abs(choi.trace() - cplx(2.0)) < 1e-12);
}

TEST_CASE("flip operator swaps tensor factors and vec_adjoint is F conj") {
  std::mt19937_64 rng(5);
  const int d = 3;
  const CMat f = flip_operator(d);
  const CMat a = oracle::random_complex(d, rng), b = oracle::random_complex(d, rng);
  CHECK((f * kron(a, b) * f - kron(b, a)).norm() < 1e-12);
  const CMat v = oracle::random_complex(d, rng);
  CHECK((unvec(vec_adjoint(vec(v))) - v.adjoint()).norm() < 1e-14);
  CHECK((vec_adjoint(vec(v)) - f * vec(v).conjugate()).norm() < 1e-14);
}

TEST_CASE("partial trace over the first factor") {
  std::mt19937_64 rng(7);
  const CMat a = oracle::random_complex(3, rng), b = oracle::random_complex(3, rng);
  CHECK((partial_trace_first(kron(a, b)) - a.trace() * b).norm() < 1e-12);
}

TEST_CASE("eig_full sorts canonically and reconstructs") {
  std::mt19937_64 rng(9);
  const CMat m = oracle::random_complex(4, rng);
  const SpectralData s = eig_full(m);
  for (Eigen::Index j = 0; j + 1 < s.size(); ++j)
    CHECK_FALSE(canonical_less(s.eigenvalues(j + 1), s.eigenvalues(j)));
  CHECK((s.reconstruct() - m).norm() < 1e-10);
  CHECK((s.left * s.right - CMat::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("degenerate spectra are rejected") {
  CHECK_THROWS_AS(eig_full(CMat::Identity(4, 4)), Error);
  try {
    eig_full(unitary_transfer(gates::pauli_x()).mat);
    FAIL("expected DegenerateSpectrum");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DegenerateSpectrum);
  }
}

TEST_CASE("principal logarithm round trips and keeps arg in (-pi, pi]") {
  std::mt19937_64 rng(13);
  const auto l = oracle::random_lindbladian(2, rng, 0.5, 0.4);
  const CMat m = oracle::taylor_expm(l.transfer);
  const SpectralData s = eig_full(m);
  const CMat l0 = matrix_log_principal(s);
  CHECK((oracle::taylor_expm(l0) - m).norm() < 1e-10);

  CMat neg = CMat::Zero(2, 2);
  neg(0, 0) = -1.0;
  neg(1, 1) = 0.5;
  const CMat lneg = matrix_log_principal(eig_full(neg));
  CHECK(std::abs(lneg(0, 0).imag() - M_PI) < 1e-12);
}

TEST_CASE("log of a singular matrix fails") {
  CMat m = CMat::Zero(2, 2);
  m(0, 0) = 1.0;
  try {
    matrix_log_principal(eig_full(m));
    FAIL("expected SingularInput");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularInput);
  }
}

TEST_CASE("branch shifts by 2 pi i on the chosen projectors") {
  std::mt19937_64 rng(17);
  const CMat m = oracle::random_complex(4, rng);
  const SpectralData s = eig_full(m);
  const CMat l0 = matrix_log_principal(s);
  const std::vector<int> b = {1, 0, -1, 0};
  const CMat lb = branch(l0, s, b);
  CHECK((oracle::taylor_expm(lb) - m).norm() < 1e-8);
  const CMat expect = l0 + cplx(0, 2 * M_PI) * (s.projector(0) - s.projector(2));
  CHECK((lb - expect).norm() < 1e-10);
  CHECK_THROWS_AS(branch(l0, s, {1, 0}), Error);
}

TEST_CASE("expm agrees with the Taylor oracle") {
  std::mt19937_64 rng(19);
  for (int n : {2, 4, 16}) {
    const CMat a = oracle::random_complex(n, rng, 1.5);
    const CMat ref = oracle::taylor_expm(a);
    CHECK((expm(a) - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
  }
}

TEST_CASE("hermitian helpers") {
  std::mt19937_64 rng(23);
  const CMat a = oracle::random_complex(4, rng);
  CHECK(is_hermitian(hermitian_part(a), 1e-14));
  CHECK_FALSE(is_hermitian(a, 1e-6));
  CHECK_THROWS_AS(min_eig_hermitian(a), Error);
  const Norms n = norms(hermitian_part(a));
  CHECK(n.min_eig_hermitian_part.has_value());
  CHECK_FALSE(norms(a).min_eig_hermitian_part.has_value());
  CHECK(one_norm(a) >= frobenius(a));
}

TEST_CASE("omega_perp is the projector off the maximally entangled vector") {
  const MaxEntangled w = MaxEntangled::make(3);
  CHECK(std::abs(w.omega.norm() - 1.0) < 1e-14);
  CHECK((w.omega_perp * w.omega).norm() < 1e-14);
  CHECK((w.omega_perp * w.omega_perp - w.omega_perp).norm() < 1e-14);
}
