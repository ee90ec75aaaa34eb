#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace siv {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr std::size_t max_dimension = 16;

// eigenvalues ascending, eigenvectors in matching columns
struct Eigensystem {
  RealVector values;
  ComplexMatrix vectors;
};

// left factor is the slowest index
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// cyclic Jacobi; throws NotHermitian when ||h - h^dag|| > 1e-10 ||h||
Eigensystem hermitian_eig(const ComplexMatrix& h);

// exp(-i h t) for h in rad/s
ComplexMatrix propagator(const ComplexMatrix& h, double t);

bool is_hermitian(const ComplexMatrix& h, double rel_tol = 1e-10);

namespace pauli {
ComplexMatrix identity();
ComplexMatrix x();
ComplexMatrix y();
ComplexMatrix z();
}  // namespace pauli

}  // namespace siv
