#ifndef CUSPBERGMAN_ESTIMATES_HPP
#define CUSPBERGMAN_ESTIMATES_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "cuspbergman/base_kernel.hpp"
#include "cuspbergman/cusp_series.hpp"
#include "cuspbergman/log_real.hpp"

namespace cuspbergman {

// Compatibility conditions between the observation region V_gamma and the
// truncation V_sigma at level m: r >= sigma, gamma >= e^{-kappa sqrt(m)/log m},
// and log sigma >= e^{-xi log m / sqrt m} log gamma.
struct AdmissiblePair {
  double gamma = 0.0;
  double sigma = 0.0;
  std::int64_t m = 2;
  double xi = 1.0;
  double kappa = 1.0;
  double r = 1.0;

  bool cond_r = false;      // r >= sigma
  bool cond_gamma = false;  // gamma above its m-dependent floor
  bool cond_sigma = false;  // log sigma >= e^{-xi log m / sqrt m} log gamma

  static AdmissiblePair make(double gamma, double sigma, std::int64_t m, double xi,
                             double kappa, double r);
  bool admissible() const { return cond_r && cond_gamma && cond_sigma; }
};

// sup over base points and mode levels of q^{-n} rho_{D,q}(a), with a
// decay-based guard for the unexplored levels q > q_max.
struct AlphaResult {
  double value = 0.0;
  std::int64_t argmax_q = 1;
  BasePoint argmax_a{};
  double tail_guard = 0.0;
};
AlphaResult alpha_sup(const BaseKernel& kernel, std::int64_t m, std::int64_t q_max,
                      std::span<const BasePoint> a_grid);

// sup over t (bracketed golden-section refinement seeded near the alpha
// maximizer) and the base grid of the cusp density; `normalized` is
// (2 pi)^{3/2} n^{-1} M^{-n-1/2} sup with M = m(k+1).
struct SupResult {
  LogReal sup;
  double t_star = 0.0;
  BasePoint a_star{};
  double normalized = 0.0;
  AlphaResult alpha{};
};
SupResult sup_rho(const BaseKernel& kernel, std::int64_t m, std::int64_t twist, double t_max,
                  std::span<const BasePoint> a_grid, std::int64_t q_max = 0);

// Relative deviation |rho_V / rho_{V_sigma} - 1| over a t grid inside
// V_gamma, with the per-point profile. Values can be far below double range
// and are carried as LogReal.
struct LocalizationReport {
  LogReal sup_deviation;
  double argmax_t = 0.0;
  std::vector<std::pair<double, LogReal>> profile;
  AdmissiblePair pair{};
  bool admissible_warning = false;
};
LocalizationReport localization_report(const BaseKernel& kernel, std::int64_t m, double gamma,
                                       double sigma, std::span<const double> t_grid,
                                       double xi = 1.0, double kappa = 1.0, double r = 1.0);

// Least-squares line through (ln m, ln value).
struct RateFit {
  double exponent = 0.0;
  double log_constant = 0.0;
  double residual = 0.0;  // RMS in log space
};
RateFit rate_fit(std::span<const std::pair<double, LogReal>> samples);
RateFit rate_fit(std::span<const std::pair<double, double>> samples);

}  // namespace cuspbergman

#endif
