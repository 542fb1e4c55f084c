#ifndef CUSPBERGMAN_HERMITIAN_HPP
#define CUSPBERGMAN_HERMITIAN_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>

namespace cuspbergman {

// Hermitian matrix with conjugate symmetry enforced exactly as stored.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Eigen::MatrixXcd entries);

  std::int64_t order() const { return entries_.rows(); }
  const Eigen::MatrixXcd& entries() const { return entries_; }
  std::complex<double> operator()(std::int64_t i, std::int64_t j) const {
    return entries_(i, j);
  }

  // max_{i,j} |a_ij - delta_ij|
  double max_deviation_from_identity() const;

 private:
  Eigen::MatrixXcd entries_;
};

// Principal square root B of A (so A = B * conj(B)^T) for an input within
// entrywise distance delta <= 1/(100N) of the identity. The returned B
// satisfies max_{i,j}|b_ij - delta_ij| <= 2*N*delta; both that bound and the
// reconstruction residual are verified before returning.
HermitianMatrix hermitian_sqrt(const HermitianMatrix& a, double delta);

}  // namespace cuspbergman

#endif
