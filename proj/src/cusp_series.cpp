#include "cuspbergman/cusp_series.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "cuspbergman/special_functions.hpp"

namespace cuspbergman {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct ModeSum {
  double log_sum;   // ln sum of enumerated terms (series part only)
  double log_tail;  // ln of rigorous bound on everything omitted
  std::int64_t q_first, q_last;
};

// Windowed evaluation of sum_q q^s rho_q(a) e^{-q t} / Q(s0, q L) in log
// domain; L = 0 recovers the plain series. The window is centered on the
// peak of the effective weight (decay rate d = t - L) and extended until the
// geometric tail bound meets the relative target. The tail uses
//   term(q+1)/term(q) <= ((q+1)/q)^{s+2} e^{-(t-L)}
// past the window (Q(s0,x)/Q(s0,x+L) <= e^L covers the truncated case, and
// the density bounds grow no faster than q^2).
ModeSum windowed_mode_sum(const BaseKernel& kernel, std::int64_t m, std::int64_t big_m,
                          const CuspPoint& x, double L, std::int64_t s0,
                          const SeriesOptions& opts) {
  const auto n = kernel.cusp_dim();
  const double t = x.t;
  const double d = t - L;
  const double s = static_cast<double>(big_m - n);

  auto log_term = [&](std::int64_t q) -> double {
    double rho = kernel.density(m, q, x.base);
    if (rho == 0.0) return kNegInf;
    double v = s * std::log(static_cast<double>(q)) + std::log(rho) - q * t;
    if (L > 0.0) v -= regularized_gamma_q_log(s0, static_cast<double>(q) * L);
    return v;
  };
  auto log_term_bound = [&](std::int64_t q) -> double {
    double v = s * std::log(static_cast<double>(q)) + kernel.density_log_bound(q) - q * t;
    if (L > 0.0) v -= regularized_gamma_q_log(s0, static_cast<double>(q) * L);
    return v;
  };
  auto upper_tail = [&](std::int64_t edge) -> double {
    double r = (s + 2.0) * std::log1p(1.0 / static_cast<double>(edge)) - d;
    if (r >= -1e-9) return std::numeric_limits<double>::infinity();
    return log_term_bound(edge + 1) - std::log1p(-std::exp(r));
  };
  auto lower_tail = [&](std::int64_t edge) -> double {
    if (edge <= 1) return kNegInf;
    double r = s * std::log1p(-1.0 / static_cast<double>(edge)) + t;
    if (r >= -1e-9) return std::numeric_limits<double>::infinity();
    return log_term_bound(edge - 1) - std::log1p(-std::exp(r));
  };

  const auto q_star = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(static_cast<double>(big_m) / d)));
  const auto width = static_cast<std::int64_t>(std::ceil(
                         12.0 * std::sqrt(static_cast<double>(big_m)) / d)) + 8;
  std::int64_t q_lo = std::max<std::int64_t>(1, q_star - width);
  std::int64_t q_hi = q_star + width;
  const std::int64_t chunk = std::max<std::int64_t>(width / 2, 16);
  const double log_target = std::log(opts.tail_rel_target);

  ModeSum out{kNegInf, kNegInf, 0, 0};
  for (int pass = 0;; ++pass) {
    if (q_hi - q_lo > opts.max_modes || pass > 4096)
      throw std::runtime_error("rho_cusp: tail bound cannot reach target within mode budget");

    // Push the edges out until the geometric bounds apply at all.
    while (std::isinf(upper_tail(q_hi)) && upper_tail(q_hi) > 0.0) {
      q_hi += chunk;
      if (q_hi - q_lo > opts.max_modes)
        throw std::runtime_error("rho_cusp: tail bound cannot reach target within mode budget");
    }
    while (q_lo > 1 && std::isinf(lower_tail(q_lo)) && lower_tail(q_lo) > 0.0)
      q_lo = std::max<std::int64_t>(1, q_lo - chunk);

    std::vector<double> logs;
    logs.reserve(static_cast<std::size_t>((q_hi - q_lo) / kernel.mode_step(m) + 2));
    std::int64_t q_first = 0, q_last = 0;
    for (std::int64_t q = kernel.first_mode_at_or_above(m, q_lo); q <= q_hi;
         q += kernel.mode_step(m)) {
      double lt = log_term(q);
      if (lt == kNegInf) continue;
      if (q_first == 0) q_first = q;
      q_last = q;
      logs.push_back(lt);
    }
    double tail_hi = upper_tail(q_hi);
    double tail_lo = lower_tail(q_lo);
    double log_tail;
    if (tail_hi == kNegInf && tail_lo == kNegInf) log_tail = kNegInf;
    else if (tail_lo == kNegInf) log_tail = tail_hi;
    else if (tail_hi == kNegInf) log_tail = tail_lo;
    else log_tail = std::max(tail_hi, tail_lo) + std::log1p(std::exp(-std::abs(tail_hi - tail_lo)));

    out.log_sum = detail::logsumexp(std::move(logs));
    out.log_tail = log_tail;
    out.q_first = q_first == 0 ? q_lo : q_first;
    out.q_last = q_last == 0 ? q_hi : q_last;

    if (log_tail <= out.log_sum + log_target) return out;
    if (tail_hi >= tail_lo) q_hi += chunk;
    if (tail_lo >= tail_hi) q_lo = std::max<std::int64_t>(1, q_lo - chunk);
  }
}

SeriesResult evaluate_series(const BaseKernel& kernel, std::int64_t m, const CuspPoint& x,
                             std::int64_t twist, double L, const SeriesOptions& opts) {
  const auto n = kernel.cusp_dim();
  if (m < 1) throw std::domain_error("rho_cusp: m must be positive");
  if (twist < 0) throw std::domain_error("rho_cusp: twist must be nonnegative");
  const std::int64_t big_m = m * (twist + 1);
  if (big_m < n + 1) throw std::domain_error("rho_cusp: need m(k+1) >= n+1");
  if (!(x.t > 0.0)) throw std::domain_error("rho_cusp: t must be positive");
  if (L > 0.0 && !(x.t > L))
    throw std::domain_error("rho_truncated: point outside the truncated domain");

  ModeSum ms = windowed_mode_sum(kernel, m, big_m, x, L, m - n, opts);

  double log_prefactor = std::log(static_cast<double>(n)) +
                         std::log(static_cast<double>(kernel.group_order())) +
                         static_cast<double>(big_m) * std::log(x.t) - std::log(kTwoPi) -
                         log_factorial(big_m - n - 1);
  SeriesResult r;
  r.value = LogReal::from_log(log_prefactor + ms.log_sum);
  r.tail_bound = LogReal::from_log(log_prefactor + ms.log_tail);
  r.q_first = ms.q_first;
  r.q_last = ms.q_last;
  return r;
}

}  // namespace

TruncationSpec TruncationSpec::from_sigma(double sigma) {
  if (!(sigma > 0.0) || !(sigma < 1.0))
    throw std::domain_error("TruncationSpec: sigma must lie in (0,1)");
  return TruncationSpec{sigma, -std::log(sigma)};
}

TruncationSpec TruncationSpec::from_log_abs(double log_sigma_abs) {
  if (!(log_sigma_abs > 0.0))
    throw std::domain_error("TruncationSpec: |log sigma| must be positive");
  return TruncationSpec{std::exp(-log_sigma_abs), log_sigma_abs};
}

SeriesResult rho_cusp(const BaseKernel& kernel, std::int64_t m, const CuspPoint& x,
                      std::int64_t twist, const SeriesOptions& opts) {
  return evaluate_series(kernel, m, x, twist, 0.0, opts);
}

SeriesResult rho_truncated(const BaseKernel& kernel, std::int64_t m,
                           const TruncationSpec& trunc, const CuspPoint& x,
                           const SeriesOptions& opts) {
  if (std::abs(trunc.log_sigma_abs + std::log(trunc.sigma)) >
      1e-14 * std::max(1.0, trunc.log_sigma_abs))
    throw std::domain_error("TruncationSpec: sigma and |log sigma| are inconsistent");
  return evaluate_series(kernel, m, x, 0, trunc.log_sigma_abs, opts);
}

LogReal mode_norm(std::int64_t n, std::int64_t m, std::int64_t q, double sigma) {
  if (n < 1) throw std::domain_error("mode_norm: n must be positive");
  if (m < n + 1) throw std::domain_error("mode_norm: need m >= n+1");
  if (q < 1) throw std::domain_error("mode_norm: q must be positive");
  if (!(sigma > 0.0) || sigma > 1.0) throw std::domain_error("mode_norm: sigma in (0,1]");
  const std::int64_t s = m - n;
  double lg = std::log(kTwoPi) + log_factorial(s - 1) -
              static_cast<double>(s) * std::log(static_cast<double>(q));
  if (sigma < 1.0) lg += regularized_gamma_q_log(s, static_cast<double>(q) * (-std::log(sigma)));
  return LogReal::from_log(lg);
}

LogReal product_rho(std::int64_t m, std::span<const double> disc_ts,
                    std::int64_t euclidean_dim) {
  if (m < 1) throw std::domain_error("product_rho: m must be positive");
  if (euclidean_dim < 0) throw std::domain_error("product_rho: negative euclidean dimension");
  LogReal out = LogReal::from_log(static_cast<double>(euclidean_dim) *
                                  (std::log(static_cast<double>(m)) - std::log(kTwoPi)));
  const BaseKernel disc = BaseKernel::point();
  for (double t : disc_ts) out = out * rho_cusp(disc, m, CuspPoint{t, {}}).value;
  return out;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double eps, int depth) {
  if (depth > 48) throw std::runtime_error("quad_norm_check: quadrature failed to converge");
  double mid = 0.5 * (a + b);
  double lm = 0.5 * (a + mid), rm = 0.5 * (mid + b);
  double flm = f(lm), frm = f(rm);
  double left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb);
  if (std::abs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, mid, fa, flm, fm, left, eps, depth + 1) +
         adaptive_simpson(f, mid, b, fm, frm, fb, right, eps, depth + 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double eps) {
  double mid = 0.5 * (a + b);
  double fa = f(a), fm = f(mid), fb = f(b);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, eps, 0);
}

}  // namespace

double quad_norm_check(std::int64_t m, std::int64_t q) {
  if (m < 2) throw std::domain_error("quad_norm_check: need m >= 2");
  if (q < 1) throw std::domain_error("quad_norm_check: q must be positive");
  // Normalized n=1 mode over V in the radial coordinate r = sqrt(h_D):
  //   a^2 * 4 pi * int_0^1 r^{2q-1} (2 |log r|)^{m-2} dr,
  //   a^2 = q^{m-1} / (2 pi (m-2)!).
  const double la2 = static_cast<double>(m - 1) * std::log(static_cast<double>(q)) -
                     std::log(kTwoPi) - log_factorial(m - 2);
  const double scale = std::exp(la2) * 4.0 * std::numbers::pi;
  std::function<double(double)> g = [&](double r) -> double {
    if (r <= 0.0) return 0.0;
    if (m == 2) return scale * std::pow(r, 2.0 * static_cast<double>(q) - 1.0);
    if (r >= 1.0) return 0.0;
    return scale * std::exp((2.0 * static_cast<double>(q) - 1.0) * std::log(r) +
                            static_cast<double>(m - 2) * std::log(-2.0 * std::log(r)));
  };
  // Geometric subdivision reaching below the integrand peak at
  // r = exp(-(m-2)/(2q)).
  double t_deep = (static_cast<double>(m - 2) + 120.0) / (2.0 * static_cast<double>(q)) + 4.0;
  std::vector<double> cuts{1.0};
  double t = 0.5;
  while (t < t_deep) {
    cuts.push_back(std::exp(-t));
    t *= 2.0;
  }
  cuts.push_back(std::exp(-t_deep));
  cuts.push_back(0.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate(g, cuts[i + 1], cuts[i], 1e-12 / static_cast<double>(cuts.size()));
  return std::abs(total - 1.0);
}

}  // namespace cuspbergman
