#include <doctest.h>

#include <random>

#include "siv/errors.hpp"
#include "siv/numerics.hpp"

using namespace siv;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = cplx(g(rng), g(rng));
  }
  return m;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, int n) {
  const ComplexMatrix a = random_matrix(rng, n);
  return 0.5 * (a + a.adjoint());
}

// scaled-and-squared Taylor series of exp(-i h t)
ComplexMatrix taylor_exp(const ComplexMatrix& h, double t) {
  ComplexMatrix a = cplx(0.0, -t) * h;
  int squarings = 0;
  while (a.norm() > 0.1) {
    a /= 2.0;
    ++squarings;
  }
  ComplexMatrix sum = ComplexMatrix::Identity(h.rows(), h.cols());
  ComplexMatrix term = sum;
  for (int k = 1; k < 30; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

// equality up to a global phase
double phase_free_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  const cplx overlap = (b.adjoint() * a).trace();
  const cplx phase = overlap / std::abs(overlap);
  return (a - phase * b).norm();
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("kron of identities and sigma_z") {
    const ComplexMatrix id = pauli::identity();
    CHECK((kron(id, id) - ComplexMatrix::Identity(4, 4)).norm() == doctest::Approx(0.0));
    const ComplexMatrix zz = kron(pauli::z(), id);
    ComplexMatrix expect = ComplexMatrix::Zero(4, 4);
    expect.diagonal() << 1.0, 1.0, -1.0, -1.0;
    CHECK((zz - expect).norm() == doctest::Approx(0.0));
  }

  TEST_CASE("kron mixed product and bilinearity") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexMatrix a = random_matrix(rng, 2);
      const ComplexMatrix b = random_matrix(rng, 2);
      const ComplexMatrix c = random_matrix(rng, 2);
      const ComplexMatrix d = random_matrix(rng, 2);
      CHECK((kron(a, b) * kron(c, d) - kron(a * c, b * d)).norm() < 1e-12);
      const cplx s(0.3, -1.7);
      CHECK((kron(s * a + c, b) - (s * kron(a, b) + kron(c, b))).norm() < 1e-12);
    }
  }

  TEST_CASE("eigensystem of sigma_x") {
    const Eigensystem e = hermitian_eig(pauli::x());
    CHECK(e.values(0) == doctest::Approx(-1.0));
    CHECK(e.values(1) == doctest::Approx(1.0));
    // |-> and |+> up to phase
    CHECK(std::abs(e.vectors(0, 0) + e.vectors(1, 0)) < 1e-12);
    CHECK(std::abs(e.vectors(0, 1) - e.vectors(1, 1)) < 1e-12);
  }

  TEST_CASE("diagonal input is sorted with permuted basis vectors") {
    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h.diagonal() << 3.0, 1.0, 2.0;
    const Eigensystem e = hermitian_eig(h);
    CHECK(e.values(0) == doctest::Approx(1.0));
    CHECK(e.values(1) == doctest::Approx(2.0));
    CHECK(e.values(2) == doctest::Approx(3.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(2, 1)) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(0, 2)) == doctest::Approx(1.0));
  }

  TEST_CASE("random hermitian spectra agree with an independent solver") {
    std::mt19937_64 rng(11);
    for (int n : {2, 4, 8, 16}) {
      const ComplexMatrix h = random_hermitian(rng, n);
      const Eigensystem e = hermitian_eig(h);
      const Eigen::SelfAdjointEigenSolver<ComplexMatrix> oracle(h);
      CHECK((e.values - oracle.eigenvalues()).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(std::abs(e.values.sum() - h.trace().real()) < 1e-9 * std::max(1.0, h.norm()));
      CHECK((e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(n, n)).norm() < 1e-10);
      CHECK((h * e.vectors - e.vectors * e.values.asDiagonal()).norm() < 1e-9 * h.norm());
    }
  }

  TEST_CASE("eigensolver rejects bad input") {
    ComplexMatrix h = pauli::x();
    h(0, 1) = 2.0;
    CHECK_THROWS_AS(hermitian_eig(h), NotHermitian);
    CHECK_THROWS_AS(hermitian_eig(ComplexMatrix::Identity(32, 32)), InvalidArgument);
    CHECK_FALSE(is_hermitian(h));
    CHECK(is_hermitian(pauli::y()));
  }

  TEST_CASE("propagator at zero time is the identity") {
    std::mt19937_64 rng(3);
    const ComplexMatrix h = random_hermitian(rng, 4);
    CHECK((propagator(h, 0.0) - ComplexMatrix::Identity(4, 4)).norm() < 1e-14);
  }

  TEST_CASE("rabi half period is a pi pulse") {
    const double omega = two_pi * 1e6;
    const ComplexMatrix h = 0.5 * omega * pauli::x();
    const ComplexMatrix u = propagator(h, pi / omega);
    CHECK(phase_free_distance(u, cplx(0.0, -1.0) * pauli::x()) < 1e-10);
  }

  TEST_CASE("propagator matches a scaled-and-squared Taylor series") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexMatrix h = random_hermitian(rng, 4);
      CHECK((propagator(h, 0.37) - taylor_exp(h, 0.37)).norm() < 1e-10);
    }
  }

  TEST_CASE("propagator is unitary and composes") {
    std::mt19937_64 rng(9);
    const ComplexMatrix h = random_hermitian(rng, 8);
    const ComplexMatrix u1 = propagator(h, 0.21);
    const ComplexMatrix u2 = propagator(h, 0.55);
    CHECK((u1.adjoint() * u1 - ComplexMatrix::Identity(8, 8)).norm() < 1e-10);
    CHECK((u1 * u2 - propagator(h, 0.76)).norm() < 1e-9);
  }
}
