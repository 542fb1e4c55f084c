#ifndef CUSPBERGMAN_CUSP_SERIES_HPP
#define CUSPBERGMAN_CUSP_SERIES_HPP

#include <cstdint>
#include <span>

#include "cuspbergman/base_kernel.hpp"
#include "cuspbergman/log_real.hpp"

namespace cuspbergman {

// Point of the model cusp, parametrized by t = |log h_D| > 0 (t -> infinity
// is the cusp end) and a base coordinate.
struct CuspPoint {
  double t = 1.0;
  BasePoint base{};
};

// Truncated domain V_sigma = {0 < h_D < sigma}.
struct TruncationSpec {
  double sigma = 1.0;
  double log_sigma_abs = 0.0;

  static TruncationSpec from_sigma(double sigma);
  static TruncationSpec from_log_abs(double log_sigma_abs);
};

// Series value with a rigorous bound on the omitted modes and the summed
// mode window. tail_bound / value <= 1e-12 on successful return.
struct SeriesResult {
  LogReal value;
  LogReal tail_bound;
  std::int64_t q_first = 0;
  std::int64_t q_last = 0;
};

struct SeriesOptions {
  double tail_rel_target = 1e-13;
  std::int64_t max_modes = 10'000'000;
};

// Bergman density of the model cusp at x, for bundle power m and metric
// twist |log h_D|^k:
//   rho^(k)(x) = n |Gamma| t^M / (2 pi (M-n-1)!) *
//                sum_{q>=1} q^{M-n} rho_{D,q}(a) e^{-q t},   M = m(k+1).
// Summation runs over a window around q* = M/t and is extended until the
// geometric tail bound meets the relative target.
SeriesResult rho_cusp(const BaseKernel& kernel, std::int64_t m, const CuspPoint& x,
                      std::int64_t twist = 0, const SeriesOptions& opts = {});

// Density of the truncated cusp V_sigma at x (which must lie in V_sigma):
// each mode's squared norm shrinks by Q(m-n, q |log sigma|), so each series
// term is divided by that factor.
SeriesResult rho_truncated(const BaseKernel& kernel, std::int64_t m,
                           const TruncationSpec& trunc, const CuspPoint& x,
                           const SeriesOptions& opts = {});

// Squared L^2 norm of the level-q mode over V_sigma:
// 2 pi (m-n-1)! / q^{m-n} * Q(m-n, q |log sigma|).
LogReal mode_norm(std::int64_t n, std::int64_t m, std::int64_t q, double sigma);

// Density of the Poincare product model: product of punctured-disc factors
// at coordinates t_i times the flat factor (m / 2 pi)^d.
LogReal product_rho(std::int64_t m, std::span<const double> disc_ts, std::int64_t euclidean_dim);

// Adaptive-quadrature check of the n=1 mode normalization: integrates the
// normalized mode's squared norm over V in the radial coordinate and returns
// |integral - 1|.
double quad_norm_check(std::int64_t m, std::int64_t q);

}  // namespace cuspbergman

#endif
