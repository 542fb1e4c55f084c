#include "cuspbergman/special_functions.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cuspbergman {

double log_factorial(std::int64_t n) {
  if (n < 0) throw std::domain_error("log_factorial: negative argument");
  static const std::array<double, 21> small = [] {
    std::array<double, 21> t{};
    long double f = 1.0L;
    t[0] = 0.0;
    for (int k = 1; k <= 20; ++k) {
      f *= k;
      t[k] = static_cast<double>(std::log(f));
    }
    return t;
  }();
  if (n <= 20) return small[static_cast<std::size_t>(n)];
  return std::lgamma(static_cast<double>(n) + 1.0);
}

namespace {

// Shifted Kahan sum of ln-domain terms T_k = k ln x - ln k! for k in a window
// around the dominant index; terms more than ~46 decades below the peak are
// dropped. Returns ln sum_{k in [0, s)} x^k / k!.
double log_poisson_partial_sum(std::int64_t s, double x) {
  const double lx = std::log(x);
  const std::int64_t kpeak = std::min<std::int64_t>(s - 1, static_cast<std::int64_t>(x));
  const double cutoff = 106.0;  // ~46 decades

  auto term = [&](std::int64_t k) { return k * lx - log_factorial(k); };

  const double peak = term(kpeak);
  std::vector<double> logs;
  logs.push_back(peak);
  for (std::int64_t k = kpeak - 1; k >= 0; --k) {
    double t = term(k);
    if (t < peak - cutoff) break;
    logs.push_back(t);
  }
  for (std::int64_t k = kpeak + 1; k < s; ++k) {
    double t = term(k);
    if (t < peak - cutoff) break;
    logs.push_back(t);
  }
  return detail::logsumexp(std::move(logs));
}

}  // namespace

double regularized_gamma_q_log(std::int64_t s, double x) {
  if (s < 1) throw std::domain_error("regularized_gamma_q: shape must be >= 1");
  if (x < 0.0) throw std::domain_error("regularized_gamma_q: negative x");
  if (x == 0.0) return 0.0;
  return log_poisson_partial_sum(s, x) - x;
}

double regularized_gamma_q(std::int64_t s, double x) {
  if (s < 1) throw std::domain_error("regularized_gamma_q: shape must be >= 1");
  if (x < 0.0) throw std::domain_error("regularized_gamma_q: negative x");
  if (x == 0.0) return 1.0;
  if (x < static_cast<double>(s)) {
    // Near saturation the complement series is the accurate route.
    LogReal p = regularized_gamma_p(s, x);
    if (p.log_abs() < -0.7) return 1.0 - p.value();
  }
  double lq = regularized_gamma_q_log(s, x);
  return lq >= 0.0 ? 1.0 : std::exp(lq);
}

LogReal regularized_gamma_p(std::int64_t s, double x) {
  if (s < 1) throw std::domain_error("regularized_gamma_p: shape must be >= 1");
  if (x < 0.0) throw std::domain_error("regularized_gamma_p: negative x");
  if (x == 0.0) return LogReal();
  if (x >= static_cast<double>(s)) {
    // P is order one here; the complement is accurate.
    double q = regularized_gamma_q(s, x);
    return LogReal::from_value(1.0 - q);
  }
  // P(s,x) = e^{-x} sum_{k>=s} x^k / k!; the terms decay by x/(k+1) < 1.
  const double lx = std::log(x);
  std::vector<double> logs;
  double lf = log_factorial(s);
  double first = s * lx - lf;
  for (std::int64_t k = s;; ++k) {
    double t = k * lx - lf;
    logs.push_back(t);
    if (t < first - 106.0) break;
    lf += std::log(static_cast<double>(k) + 1.0);
  }
  return LogReal::from_log(detail::logsumexp(std::move(logs)) - x);
}

}  // namespace cuspbergman
