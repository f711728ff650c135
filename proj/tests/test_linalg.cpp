#include <random>

#include "doctest.h"
#include "steerdi/linalg.hpp"
#include "steerdi/quantum_model.hpp"
#include "test_util.hpp"

using namespace steerdi;

TEST_CASE("kron basics") {
  const DenseOperator i2 = DenseOperator::identity(2);
  CHECK(kron(i2, i2).max_abs_diff(DenseOperator::identity(4)) < tol::structural);

  // |00> is a +1 eigenstate of sz (x) sz
  Ket zero00;
  zero00.amp = {1, 0, 0, 0};
  const Ket out = apply(kron(pauli_z(), pauli_z()), zero00);
  CHECK(std::abs(out.amp[0] - cplx(1, 0)) < tol::structural);

  CHECK(std::abs(kron(pauli_x(), pauli_y()).trace()) < tol::structural);
}

TEST_CASE("kron is bilinear and associative") {
  std::mt19937_64 rng(11);
  const auto a = testutil::random_hermitian(rng, 2);
  const auto b = testutil::random_hermitian(rng, 2);
  const auto c = testutil::random_hermitian(rng, 3);

  const auto lhs = kron(a + b, c);
  const auto rhs = kron(a, c) + kron(b, c);
  CHECK(lhs.max_abs_diff(rhs) < tol::structural);

  const auto assoc1 = kron(kron(a, b), c);
  const auto assoc2 = kron(a, kron(b, c));
  CHECK(assoc1.max_abs_diff(assoc2) < tol::structural);
}

TEST_CASE("partial trace") {
  const DenseOperator phi = bell_phi_plus(2).projector();
  const DenseOperator half = partial_trace(phi, {2, 2}, {0});
  CHECK(half.max_abs_diff(DenseOperator::identity(2) * cplx(0.5, 0)) < tol::structural);

  std::mt19937_64 rng(7);
  const auto ra = testutil::random_density(rng, 2);
  const auto rb = testutil::random_density(rng, 3);
  CHECK(partial_trace(kron(ra, rb), {2, 3}, {0}).max_abs_diff(ra) < 1e-10);
  CHECK(partial_trace(kron(ra, rb), {2, 3}, {1}).max_abs_diff(rb) < 1e-10);

  // keeping everything is the identity map
  CHECK(partial_trace(kron(ra, rb), {2, 3}, {0, 1}).max_abs_diff(kron(ra, rb)) < tol::structural);

  // steering identity: Tr_C[(I (x) tau) |Phi+><Phi+|] = tau^T / 2
  for (int b = -1; b <= 1; b += 2)
    for (int j = 1; j <= 3; ++j) {
      const DenseOperator tau = tau_input(b, j);
      const DenseOperator lhs = partial_trace(kron(DenseOperator::identity(2), tau) * phi, {2, 2}, {0});
      CHECK(lhs.max_abs_diff(tau.transpose() * cplx(0.5, 0)) < tol::structural);
    }

  CHECK_THROWS_AS(partial_trace(phi, {2, 3}, {0}), std::invalid_argument);
}

TEST_CASE("partial trace preserves trace") {
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 5; ++rep) {
    const auto rho = testutil::random_density(rng, 8);
    const auto red = partial_trace(rho, {2, 2, 2}, {1});
    CHECK(std::abs(red.trace() - cplx(1, 0)) < 1e-10);
  }
}

TEST_CASE("hermitian eigendecomposition") {
  const auto ez = hermitian_eig(pauli_z());
  CHECK(ez.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ez.values[1] == doctest::Approx(1.0).epsilon(1e-12));

  // difference operator with fidelity f: eigenvalues +/- sqrt(1-f)
  const double f = 0.99;
  const double alpha = std::sqrt(f);
  DenseOperator delta(2);
  delta(0, 0) = alpha * alpha - 1.0;
  delta(0, 1) = alpha * std::sqrt(1 - alpha * alpha);
  delta(1, 0) = delta(0, 1);
  delta(1, 1) = 1.0 - alpha * alpha;
  const auto ed = hermitian_eig(delta);
  CHECK(ed.values[0] == doctest::Approx(-0.1).epsilon(1e-10));
  CHECK(ed.values[1] == doctest::Approx(0.1).epsilon(1e-10));

  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = testutil::random_hermitian(rng, 4, 2.0);
    const auto e = hermitian_eig(a);
    DenseOperator rec(4);
    for (int k = 0; k < 4; ++k)
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          rec(i, j) += e.values[static_cast<size_t>(k)] * e.vectors(i, k) * std::conj(e.vectors(j, k));
    CHECK(rec.max_abs_diff(a) < 1e-10);
    for (size_t k = 1; k < e.values.size(); ++k) CHECK(e.values[k] >= e.values[k - 1]);
  }

  DenseOperator nh(2);
  nh(0, 1) = 1.0;  // not Hermitian
  CHECK_THROWS_AS(hermitian_eig(nh), std::invalid_argument);
}

TEST_CASE("density eigenvalues stay in [0,1]") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const auto rho = testutil::random_density(rng, 4);
    const auto e = hermitian_eig(rho);
    CHECK(e.values.front() >= -1e-10);
    CHECK(e.values.back() <= 1.0 + 1e-10);
    CHECK(is_density(rho));
  }
}

TEST_CASE("trace distance") {
  std::mt19937_64 rng(17);
  const auto rho = testutil::random_density(rng, 4);
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-12));

  Ket k0, k1;
  k0.amp = {1, 0};
  k1.amp = {0, 1};
  CHECK(trace_distance(k0.projector(), k1.projector()) == doctest::Approx(2.0).epsilon(1e-12));

  // pure states: || |psi><psi| - |phi><phi| ||_1 = 2 sqrt(1 - |<psi|phi>|^2)
  for (int rep = 0; rep < 10; ++rep) {
    const auto psi = testutil::random_ket(rng, 4);
    const auto phi = testutil::random_ket(rng, 4);
    const double f = std::norm(inner(psi, phi));
    const double d = trace_distance(psi.projector(), phi.projector());
    CHECK(d == doctest::Approx(2.0 * std::sqrt(1.0 - f)).epsilon(1e-9));
  }

  CHECK_THROWS_AS(trace_distance(rho, DenseOperator::identity(2)), std::invalid_argument);
}

TEST_CASE("trace distance triangle inequality") {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 20; ++rep) {
    const auto a = testutil::random_density(rng, 4);
    const auto b = testutil::random_density(rng, 4);
    const auto c = testutil::random_density(rng, 4);
    CHECK(trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-9);
  }
}

TEST_CASE("state fidelity") {
  const Ket phi = bell_phi_plus(2);
  CHECK(state_fidelity(phi, phi.projector()) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state_fidelity(phi, DenseOperator::identity(4) * cplx(0.25, 0)) ==
        doctest::Approx(0.25).epsilon(1e-12));

  const Ket psim = bell_psi_minus();
  for (double v : {0.0, 0.3, 0.7015, 1.0}) {
    CHECK(state_fidelity(psim, werner(v)) == doctest::Approx(v + (1 - v) / 4).epsilon(1e-12));
  }
}
