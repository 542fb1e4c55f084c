#include "cuspbergman/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cuspbergman/special_functions.hpp"

namespace cuspbergman {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

AdmissiblePair AdmissiblePair::make(double gamma, double sigma, std::int64_t m, double xi,
                                    double kappa, double r) {
  if (m < 2) throw std::domain_error("AdmissiblePair: need m >= 2 (log m > 0)");
  if (!(gamma > 0.0) || !(gamma < 1.0) || !(sigma > 0.0) || !(sigma < 1.0))
    throw std::domain_error("AdmissiblePair: gamma and sigma must lie in (0,1)");
  if (!(xi > 0.0) || !(kappa > 0.0) || !(r > 0.0))
    throw std::domain_error("AdmissiblePair: xi, kappa, r must be positive");
  AdmissiblePair p;
  p.gamma = gamma;
  p.sigma = sigma;
  p.m = m;
  p.xi = xi;
  p.kappa = kappa;
  p.r = r;
  const double md = static_cast<double>(m);
  p.cond_r = r >= sigma;
  p.cond_gamma = gamma >= std::exp(-kappa * std::sqrt(md) / std::log(md));
  p.cond_sigma =
      std::log(sigma) >= std::exp(-xi * std::log(md) / std::sqrt(md)) * std::log(gamma);
  return p;
}

AlphaResult alpha_sup(const BaseKernel& kernel, std::int64_t m, std::int64_t q_max,
                      std::span<const BasePoint> a_grid) {
  if (q_max < 1) throw std::domain_error("alpha_sup: q_max must be positive");
  const auto n = kernel.cusp_dim();
  std::vector<BasePoint> grid(a_grid.begin(), a_grid.end());
  if (grid.empty()) {
    if (kernel.kind() != BaseKernel::Kind::kPoint)
      throw std::domain_error("alpha_sup: base grid required for this kernel");
    grid.push_back(BasePoint{});
  }
  AlphaResult best;
  best.value = -1.0;
  for (std::int64_t q = 1; q <= q_max; ++q) {
    if (kernel.structurally_zero(m, q)) continue;
    double qn = std::exp(-static_cast<double>(n) * std::log(static_cast<double>(q)));
    for (const BasePoint& a : grid) {
      double v = qn * kernel.density(m, q, a);
      if (v > best.value) {
        best.value = v;
        best.argmax_q = q;
        best.argmax_a = a;
      }
    }
  }
  // q^{-n} rho_q decays at least like 1/q past q_max (density bounds grow
  // strictly slower than q^n).
  best.tail_guard = std::exp(kernel.density_log_bound(q_max + 1) -
                             static_cast<double>(n) * std::log(static_cast<double>(q_max + 1)));
  if (best.tail_guard > 0.01 * best.value)
    throw std::runtime_error("alpha_sup: q_max too small (tail guard above 1% of maximum)");
  return best;
}

namespace {

// Golden-section maximization of f on [a,b] to absolute tolerance 1e-10,
// assuming a single interior peak; seeds near the mode peaks make that hold.
template <typename F>
std::pair<double, double> golden_max(F&& f, double a, double b) {
  constexpr double kInvPhi = 0.6180339887498949;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  double mid = 0.5 * (a + b);
  return {mid, f(mid)};
}

}  // namespace

SupResult sup_rho(const BaseKernel& kernel, std::int64_t m, std::int64_t twist, double t_max,
                  std::span<const BasePoint> a_grid, std::int64_t q_max) {
  const auto n = kernel.cusp_dim();
  const std::int64_t big_m = m * (twist + 1);
  if (big_m < n + 1) throw std::domain_error("sup_rho: need m(k+1) >= n+1");
  if (!(t_max > 0.0)) throw std::domain_error("sup_rho: t_max must be positive");
  if (q_max <= 0) q_max = 10 * m;

  std::vector<BasePoint> grid(a_grid.begin(), a_grid.end());
  if (grid.empty()) {
    if (kernel.kind() != BaseKernel::Kind::kPoint)
      throw std::domain_error("sup_rho: base grid required for this kernel");
    grid.push_back(BasePoint{});
  }
  AlphaResult alpha = alpha_sup(kernel, m, q_max, grid);

  const double t_predicted = static_cast<double>(big_m) / static_cast<double>(alpha.argmax_q);
  if (t_max < t_predicted)
    throw std::domain_error("sup_rho: t_max below the predicted peak M/q_alpha");

  SupResult out;
  double best_log = kNegInf;
  for (const BasePoint& a : grid) {
    auto log_rho = [&](double t) -> double {
      if (!(t > 0.0) || t > t_max) return kNegInf;
      return rho_cusp(kernel, m, CuspPoint{t, a}, twist).value.log_abs();
    };
    for (std::int64_t dq = -2; dq <= 2; ++dq) {
      std::int64_t q = alpha.argmax_q + dq;
      if (q < 1) continue;
      double seed = static_cast<double>(big_m) / static_cast<double>(q);
      if (seed > t_max) continue;
      double lo = seed * 0.5, hi = std::min(seed * 1.6, t_max);
      auto [t_star, v] = golden_max(log_rho, lo, hi);
      // Tie-break toward smaller t.
      if (v > best_log || (v == best_log && t_star < out.t_star)) {
        best_log = v;
        out.t_star = t_star;
        out.a_star = a;
      }
    }
  }
  out.sup = LogReal::from_log(best_log);
  if (out.t_star >= t_max * (1.0 - 1e-9))
    throw std::runtime_error("sup_rho: maximizer on the t-scan boundary (raise t_max)");
  double log_norm = 1.5 * std::log(2.0 * std::numbers::pi) -
                    std::log(static_cast<double>(n)) -
                    (static_cast<double>(n) + 0.5) * std::log(static_cast<double>(big_m)) +
                    best_log;
  out.normalized = std::exp(log_norm);
  out.alpha = alpha;
  return out;
}

LocalizationReport localization_report(const BaseKernel& kernel, std::int64_t m, double gamma,
                                       double sigma, std::span<const double> t_grid,
                                       double xi, double kappa, double r) {
  if (t_grid.empty()) throw std::domain_error("localization_report: empty grid");
  const auto n = kernel.cusp_dim();
  if (m < n + 1) throw std::domain_error("localization_report: need m >= n+1");
  const double log_gamma_abs = -std::log(gamma);
  const double L = -std::log(sigma);
  for (double t : t_grid)
    if (t < log_gamma_abs * (1.0 - 1e-12))
      throw std::domain_error("localization_report: grid point outside V_gamma");

  LocalizationReport rep;
  rep.pair = AdmissiblePair::make(gamma, sigma, m, xi, kappa, r);
  rep.admissible_warning = !rep.pair.admissible();

  const std::int64_t s = m - n;
  for (double t : t_grid) {
    // |rho_V / rho_{V_sigma} - 1| = (sum w_q P_q / Q_q) / (sum w_q / Q_q),
    // with w_q the series weights and P = 1 - Q the lower gamma tail.
    const double d = t - L > 0.0 ? t - L : 0.5 * t;
    const auto q_peak = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::llround(static_cast<double>(s) / d)));
    const auto width = static_cast<std::int64_t>(std::ceil(
                           14.0 * std::sqrt(static_cast<double>(s)) / d)) + 16;
    // The numerator weights skew toward higher q; stretch the upper edge.
    const std::int64_t q_lo = std::max<std::int64_t>(1, q_peak - width);
    const auto q_hi = static_cast<std::int64_t>(3 * q_peak + 4 * width);

    std::vector<LogReal> num, den;
    for (std::int64_t q = kernel.first_mode_at_or_above(m, q_lo); q <= q_hi;
         q += kernel.mode_step(m)) {
      double rho = kernel.density(m, q, BasePoint{});
      if (rho == 0.0) continue;
      double lw = static_cast<double>(s) * std::log(static_cast<double>(q)) + std::log(rho) -
                  static_cast<double>(q) * t;
      double x = static_cast<double>(q) * L;
      double lq = regularized_gamma_q_log(s, x);
      LogReal w_over_q = LogReal::from_log(lw - lq);
      den.push_back(w_over_q);
      LogReal p = regularized_gamma_p(s, x);
      if (!p.is_zero()) num.push_back(w_over_q * p);
    }
    LogReal dev = logsumexp_sorted(std::span<const LogReal>(num)) /
                  logsumexp_sorted(std::span<const LogReal>(den));
    rep.profile.emplace_back(t, dev);
    if (dev > rep.sup_deviation) {
      rep.sup_deviation = dev;
      rep.argmax_t = t;
    }
  }
  return rep;
}

namespace {

RateFit fit_lines(const std::vector<double>& xs, const std::vector<double>& ys) {
  const auto n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw std::domain_error("rate_fit: degenerate abscissae");
  RateFit f;
  f.exponent = (n * sxy - sx * sy) / denom;
  f.log_constant = (sy - f.exponent * sx) / n;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (f.log_constant + f.exponent * xs[i]);
    ss += e * e;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

}  // namespace

RateFit rate_fit(std::span<const std::pair<double, LogReal>> samples) {
  if (samples.size() < 4) throw std::domain_error("rate_fit: need at least 4 samples");
  std::vector<double> xs, ys;
  for (const auto& [m, v] : samples) {
    if (!(m > 0.0) || v.sign() <= 0)
      throw std::domain_error("rate_fit: samples must be positive");
    xs.push_back(std::log(m));
    ys.push_back(v.log_abs());
  }
  return fit_lines(xs, ys);
}

RateFit rate_fit(std::span<const std::pair<double, double>> samples) {
  std::vector<std::pair<double, LogReal>> conv;
  conv.reserve(samples.size());
  for (const auto& [m, v] : samples) conv.emplace_back(m, LogReal::from_value(v));
  return rate_fit(std::span<const std::pair<double, LogReal>>(conv));
}

}  // namespace cuspbergman
