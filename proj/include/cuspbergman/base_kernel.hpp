#ifndef CUSPBERGMAN_BASE_KERNEL_HPP
#define CUSPBERGMAN_BASE_KERNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace cuspbergman {

// Point of the base manifold D. Ignored by the point provider; for the theta
// provider z = x + i y must lie in the fundamental rectangle
// [0,1) x [0, Im tau).
struct BasePoint {
  std::complex<double> z{0.0, 0.0};
};

// Per-q unitary families for the projector provider: q -> |Gamma| matrices
// (the action of each group element on the inner orthonormal sections).
using ProjectorUnitaries = std::map<std::int64_t, std::vector<Eigen::MatrixXcd>>;

// L^2 norm of one level-q theta section under Vol(D) = 2pi:
// 2*pi / sqrt(2 q Im tau), independent of the section index.
double theta_norm_constant(std::complex<double> tau, std::int64_t q);

// Provider of base Bergman densities rho_{D,q} and section dimensions:
// the degenerate point base (cusp dimension 1, with optional cyclic rotation
// twist), the flat elliptic-curve theta base (cusp dimension 2), and a
// group-averaged projector wrapper over user-supplied unitaries.
class BaseKernel {
 public:
  enum class Kind { kPoint, kTheta, kProjector };

  static BaseKernel point(std::int64_t group_order = 1, std::int64_t character_index = 0);
  static BaseKernel theta(std::complex<double> tau);
  static BaseKernel projector(BaseKernel inner, ProjectorUnitaries unitaries,
                              std::int64_t group_order, std::int64_t character_index);

  Kind kind() const { return kind_; }
  std::int64_t cusp_dim() const { return cusp_dim_; }
  std::int64_t group_order() const { return group_order_; }
  std::int64_t character_index() const { return character_index_; }
  std::complex<double> tau() const { return tau_; }

  // Density of the character-invariant level-q sections at a, for bundle
  // power m. Nonnegative; periodic in m with period group_order.
  double density(std::int64_t m, std::int64_t q, const BasePoint& a) const;

  // Dimension of the invariant section space at level q.
  std::int64_t dimension(std::int64_t m, std::int64_t q) const;

  // Values of an orthonormal section basis at a, in the unitary frame
  // (sum of squared magnitudes equals the untwisted density).
  std::vector<std::complex<double>> section_values(std::int64_t q, const BasePoint& a) const;

  // ln of a pointwise upper bound for density(m, q, .); monotone data for
  // series tail control.
  double density_log_bound(std::int64_t q) const;

  // Mode bookkeeping for series enumeration: for the point provider with a
  // cyclic twist only one residue class of q mod group_order carries
  // sections; everything else admits every q.
  bool structurally_zero(std::int64_t m, std::int64_t q) const;
  std::int64_t mode_step(std::int64_t m) const;
  std::int64_t first_mode_at_or_above(std::int64_t m, std::int64_t q_from) const;

  // Reduce a coordinate into the fundamental rectangle (theta provider).
  BasePoint reduce(const BasePoint& a) const;

 private:
  BaseKernel() = default;

  void check_theta_domain(const BasePoint& a) const;
  std::complex<double> character_power(std::int64_t element, std::int64_t m) const;

  Kind kind_ = Kind::kPoint;
  std::int64_t cusp_dim_ = 1;
  std::int64_t group_order_ = 1;
  std::int64_t character_index_ = 0;
  std::complex<double> tau_{0.0, 1.0};
  std::shared_ptr<const BaseKernel> inner_;
  std::shared_ptr<const ProjectorUnitaries> unitaries_;
};

}  // namespace cuspbergman

#endif
