#include "cuspbergman/expansion.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cuspbergman/cusp_series.hpp"
#include "cuspbergman/special_functions.hpp"

namespace cuspbergman {

namespace {

using Series = std::vector<PolyInM>;  // index = power of t

Series series_multiply(const Series& a, const Series& b, int order) {
  Series r(static_cast<std::size_t>(order) + 1);
  for (int i = 0; i <= order; ++i) {
    if (a[static_cast<std::size_t>(i)].empty()) continue;
    for (int j = 0; i + j <= order; ++j) {
      if (b[static_cast<std::size_t>(j)].empty()) continue;
      auto& dst = r[static_cast<std::size_t>(i + j)];
      const auto& pa = a[static_cast<std::size_t>(i)];
      const auto& pb = b[static_cast<std::size_t>(j)];
      if (dst.size() < pa.size() + pb.size() - 1) dst.resize(pa.size() + pb.size() - 1);
      for (std::size_t da = 0; da < pa.size(); ++da)
        for (std::size_t db = 0; db < pb.size(); ++db)
          dst[da + db] += pa[da] * pb[db];
    }
  }
  return r;
}

void series_add_scaled(Series& dst, const Series& src, const Rational& scale) {
  for (std::size_t l = 0; l < dst.size(); ++l) {
    const auto& p = src[l];
    if (p.empty()) continue;
    if (dst[l].size() < p.size()) dst[l].resize(p.size());
    for (std::size_t d = 0; d < p.size(); ++d) dst[l][d] += scale * p[d];
  }
}

}  // namespace

double ExpansionPoly::evaluate(int l, std::int64_t m) const {
  const PolyInM& p = coeffs_.at(static_cast<std::size_t>(l));
  Rational acc = 0;
  Rational mp = 1;
  for (const Rational& c : p) {
    acc += c * mp;
    mp *= m;
  }
  return static_cast<double>(acc);
}

std::vector<double> ExpansionPoly::evaluate_all(std::int64_t m) const {
  std::vector<double> out(coeffs_.size());
  for (std::size_t l = 0; l < coeffs_.size(); ++l) out[l] = evaluate(static_cast<int>(l), m);
  return out;
}

ExpansionPoly lambda_polys(int order) {
  if (order < 3) throw std::domain_error("lambda_polys: order must be >= 3");
  if (order > 40) throw std::domain_error("lambda_polys: order capped at 40");
  const std::size_t sz = static_cast<std::size_t>(order) + 1;
  // g(t) = m * sum_{k=3}^{order} (-1)^{k-1} t^k / k
  Series g(sz);
  for (int k = 3; k <= order; ++k)
    g[static_cast<std::size_t>(k)] = PolyInM{Rational(0), Rational((k % 2 == 1) ? 1 : -1, k)};
  // exp(g) = sum_j g^j / j!, truncated at degree `order` (g starts at t^3).
  Series acc(sz);
  acc[0] = PolyInM{Rational(1)};
  Series power = acc;
  Rational factorial = 1;
  for (int j = 1; 3 * j <= order; ++j) {
    power = series_multiply(power, g, order);
    factorial *= j;
    series_add_scaled(acc, power, Rational(1) / factorial);
  }
  return ExpansionPoly(order, std::move(acc));
}

LogReal f_pow(std::int64_t m, double t) {
  if (m < 1) throw std::domain_error("f_pow: m must be positive");
  if (!(t > -1.0)) throw std::domain_error("f_pow: t must exceed -1");
  return LogReal::from_log(static_cast<double>(m) * (std::log1p(t) - t));
}

LogReal approximant(const ExpansionPoly& polys, std::int64_t m, double t) {
  std::vector<LogReal> terms;
  terms.reserve(static_cast<std::size_t>(polys.order()));
  terms.push_back(LogReal::from_value(1.0));
  for (int l = 3; l <= polys.order(); ++l) {
    double lam = polys.evaluate(l, m);
    if (lam == 0.0 || t == 0.0) continue;
    int sign = (lam > 0.0 ? +1 : -1) * ((t < 0.0 && l % 2 == 1) ? -1 : +1);
    terms.push_back(LogReal::from_log(
        std::log(std::abs(lam)) + static_cast<double>(l) * std::log(std::abs(t)), sign));
  }
  LogReal poly = signed_log_sum(terms);
  return poly * LogReal::from_log(-0.5 * static_cast<double>(m) * t * t);
}

double approximant_value(const ExpansionPoly& polys, std::int64_t m, double t) {
  return approximant(polys, m, t).value();
}

std::vector<double> default_expansion_grid() {
  std::vector<double> grid;
  grid.reserve(2000 + 64 * 5);
  for (int i = 0; i < 2000; ++i)
    grid.push_back(-0.99 + (3.0 + 0.99) * static_cast<double>(i + 1) / 2000.0);
  for (int k = 1; k <= 64 * 5; ++k)
    grid.push_back(0.01 * std::pow(10.0, static_cast<double>(k) / 64.0));
  return grid;
}

WeightedErrorSup expansion_error(std::int64_t m, const ExpansionPoly& polys,
                                 std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::domain_error("expansion_error: empty grid");
  const int N = polys.order();
  WeightedErrorSup out;
  for (double t : t_grid) {
    LogReal diff = (f_pow(m, t) - approximant(polys, m, t)).abs();
    LogReal weight = LogReal::from_value(1.0) +
                     LogReal::from_value(std::abs(t + 1.0)).pow(2 * N);
    LogReal v = weight * diff;
    if (v > out.sup) {
      out.sup = v;
      out.argmax_t = t;
    }
  }
  return out;
}

double b_scaled(const BaseKernel& kernel, std::int64_t m, const BasePoint& a, double t) {
  if (!(t > 0.0)) throw std::domain_error("b_scaled: t must be positive");
  const auto n = kernel.cusp_dim();
  LogReal rho = rho_cusp(kernel, m, CuspPoint{static_cast<double>(m) * t, a}).value;
  double log_pref = std::log(2.0 * std::numbers::pi) + log_factorial(m - n - 1) -
                    std::log(static_cast<double>(n)) -
                    std::log(static_cast<double>(kernel.group_order())) -
                    static_cast<double>(m) * std::log(static_cast<double>(m)) -
                    (1.0 - static_cast<double>(m));
  return (rho * LogReal::from_log(log_pref)).value();
}

double b_approximant(const BaseKernel& kernel, const ExpansionPoly& polys, std::int64_t m,
                     const BasePoint& a, double t) {
  if (!(t > 0.0)) throw std::domain_error("b_approximant: t must be positive");
  const auto n = kernel.cusp_dim();
  // Modes contribute through G_{m-1,N}(qt-1), which localizes q t near 1.
  const double W = 20.0;
  const double halfwidth = W / std::sqrt(static_cast<double>(m - 1));
  const auto q_hi = std::max<std::int64_t>(
      2, static_cast<std::int64_t>(std::ceil((1.0 + halfwidth) / t)) + 1);
  std::vector<LogReal> terms;
  for (std::int64_t q = kernel.first_mode_at_or_above(m, 1); q <= q_hi;
       q += kernel.mode_step(m)) {
    double rho = kernel.density(m, q, a);
    if (rho == 0.0) continue;
    LogReal w = LogReal::from_log((1.0 - static_cast<double>(n)) *
                                      std::log(static_cast<double>(q)) +
                                  std::log(rho) - static_cast<double>(q) * t);
    terms.push_back(w * approximant(polys, m - 1, static_cast<double>(q) * t - 1.0));
  }
  LogReal sum = signed_log_sum(terms);
  return (LogReal::from_value(t) * sum).value();
}

}  // namespace cuspbergman
