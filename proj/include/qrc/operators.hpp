#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qrc/types.hpp"

namespace qrc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Lowering operator truncated to dim: entry (n, n+1) = sqrt(n+1).
ComplexMatrix lowering_operator(int dim);

/// Number operator a†a, diagonal (0, 1, ..., dim-1).
ComplexMatrix number_operator(int dim);

/// X = (a + a†)/√2.
ComplexMatrix quadrature_x(int dim);

/// P = -i (a - a†)/√2.
ComplexMatrix quadrature_p(int dim);

/// Driven Kerr Hamiltonian H = K (a†a)² + u (a + a†) at instantaneous drive
/// value u. The Kerr term is diagonal with entry K n² at Fock index n.
ComplexMatrix kerr_hamiltonian(const ReservoirParams& params, double u);

double hermiticity_deviation(const ComplexMatrix& m);  // max entrywise |m - m†|
double trace_deviation(const ComplexMatrix& rho);      // |Tr rho - 1|
double min_diagonal_real(const ComplexMatrix& rho);

}  // namespace qrc
