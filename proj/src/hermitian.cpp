#include "cuspbergman/hermitian.hpp"

#include <cmath>
#include <stdexcept>

namespace cuspbergman {

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() < 1)
    throw std::domain_error("HermitianMatrix: not square");
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (entries_(i, j) != std::conj(entries_(j, i)))
        throw std::domain_error("HermitianMatrix: conjugate symmetry violated");
}

double HermitianMatrix::max_deviation_from_identity() const {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < entries_.rows(); ++i)
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      std::complex<double> d = entries_(i, j);
      if (i == j) d -= 1.0;
      dev = std::max(dev, std::abs(d));
    }
  return dev;
}

HermitianMatrix hermitian_sqrt(const HermitianMatrix& a, double delta) {
  const auto n = a.order();
  if (!(delta > 0.0) || delta > 1.0 / (100.0 * static_cast<double>(n)))
    throw std::domain_error("hermitian_sqrt: delta must lie in (0, 1/(100N)]");
  if (a.max_deviation_from_identity() > delta)
    throw std::domain_error("hermitian_sqrt: input exceeds the stated deviation bound");

  // Eigen's self-adjoint solver returns eigenvalues in ascending order;
  // the principal root is diagonal in that frame.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.entries());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian_sqrt: eigendecomposition failed");
  Eigen::VectorXd sq = es.eigenvalues();
  for (Eigen::Index i = 0; i < sq.size(); ++i) {
    if (sq(i) <= 0.0)
      throw std::runtime_error("hermitian_sqrt: matrix not positive definite");
    sq(i) = std::sqrt(sq(i));
  }
  Eigen::MatrixXcd b = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
  // Symmetrize exactly; the solver output is Hermitian only to rounding.
  for (Eigen::Index i = 0; i < n; ++i) {
    b(i, i) = std::complex<double>(b(i, i).real(), 0.0);
    for (Eigen::Index j = 0; j < i; ++j) {
      std::complex<double> m = 0.5 * (b(i, j) + std::conj(b(j, i)));
      b(i, j) = m;
      b(j, i) = std::conj(m);
    }
  }
  HermitianMatrix root(std::move(b));

  double residual = (a.entries() - root.entries() * root.entries().conjugate().transpose())
                        .cwiseAbs()
                        .maxCoeff();
  if (residual > 1e-10)
    throw std::runtime_error("hermitian_sqrt: reconstruction residual above 1e-10");
  if (root.max_deviation_from_identity() > 2.0 * static_cast<double>(n) * delta)
    throw std::runtime_error("hermitian_sqrt: entrywise 2N*delta bound violated");
  return root;
}

}  // namespace cuspbergman
