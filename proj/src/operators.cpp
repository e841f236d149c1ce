#include "qrc/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace qrc {

ComplexMatrix lowering_operator(int dim) {
  if (dim < 2) throw std::invalid_argument("lowering_operator: dim must be >= 2");
  ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) a(n, n + 1) = std::sqrt(static_cast<double>(n + 1));
  return a;
}

ComplexMatrix number_operator(int dim) {
  if (dim < 2) throw std::invalid_argument("number_operator: dim must be >= 2");
  ComplexMatrix n = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) n(i, i) = static_cast<double>(i);
  return n;
}

ComplexMatrix quadrature_x(int dim) {
  const ComplexMatrix a = lowering_operator(dim);
  return (a + a.adjoint()) / std::sqrt(2.0);
}

ComplexMatrix quadrature_p(int dim) {
  const ComplexMatrix a = lowering_operator(dim);
  return Complex(0.0, -1.0) * (a - a.adjoint()) / std::sqrt(2.0);
}

ComplexMatrix kerr_hamiltonian(const ReservoirParams& params, double u) {
  params.validate();
  const int dim = params.dim;
  ComplexMatrix h = ComplexMatrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) h(n, n) = params.kerr * static_cast<double>(n) * static_cast<double>(n);
  for (int n = 0; n + 1 < dim; ++n) {
    const double c = u * std::sqrt(static_cast<double>(n + 1));
    h(n, n + 1) += c;
    h(n + 1, n) += c;
  }
  return h;
}

double hermiticity_deviation(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

double trace_deviation(const ComplexMatrix& rho) { return std::abs(rho.trace() - Complex(1.0, 0.0)); }

double min_diagonal_real(const ComplexMatrix& rho) {
  double lo = std::numeric_limits<double>::infinity();
  for (int i = 0; i < rho.rows(); ++i) lo = std::min(lo, rho(i, i).real());
  return lo;
}

}  // namespace qrc
