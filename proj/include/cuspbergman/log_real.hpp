#ifndef CUSPBERGMAN_LOG_REAL_HPP
#define CUSPBERGMAN_LOG_REAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace cuspbergman {

// Signed log-magnitude real number. Zero is (sign 0, log_abs -inf); this is
// the carrier for series terms far outside double range.
class LogReal {
 public:
  LogReal() : sign_(0), log_abs_(-std::numeric_limits<double>::infinity()) {}

  static LogReal from_value(double x) {
    if (x == 0.0) return LogReal();
    return LogReal(x > 0.0 ? +1 : -1, std::log(std::abs(x)));
  }

  static LogReal from_log(double log_abs, int sign = +1) {
    if (sign == 0 || log_abs == -std::numeric_limits<double>::infinity())
      return LogReal();
    return LogReal(sign > 0 ? +1 : -1, log_abs);
  }

  int sign() const { return sign_; }
  bool is_zero() const { return sign_ == 0; }
  double log_abs() const { return log_abs_; }
  double log10_abs() const { return log_abs_ / kLn10; }

  // Best-effort double; may round to 0 or +-inf outside double range.
  double value() const {
    if (sign_ == 0) return 0.0;
    return sign_ * std::exp(log_abs_);
  }

  LogReal operator-() const {
    LogReal r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  LogReal abs() const {
    LogReal r = *this;
    if (r.sign_ < 0) r.sign_ = +1;
    return r;
  }

  LogReal operator*(const LogReal& o) const {
    if (sign_ == 0 || o.sign_ == 0) return LogReal();
    double l = log_abs_ + o.log_abs_;
    if (l == -std::numeric_limits<double>::infinity()) {
      underflow_flag() = true;
      return LogReal();
    }
    return LogReal(sign_ * o.sign_, l);
  }

  LogReal operator/(const LogReal& o) const {
    if (o.sign_ == 0) throw std::domain_error("LogReal: division by zero");
    if (sign_ == 0) return LogReal();
    double l = log_abs_ - o.log_abs_;
    if (l == -std::numeric_limits<double>::infinity()) {
      underflow_flag() = true;
      return LogReal();
    }
    return LogReal(sign_ * o.sign_, l);
  }

  LogReal operator+(const LogReal& o) const {
    if (sign_ == 0) return o;
    if (o.sign_ == 0) return *this;
    const LogReal& hi = (log_abs_ >= o.log_abs_) ? *this : o;
    const LogReal& lo = (log_abs_ >= o.log_abs_) ? o : *this;
    double d = lo.log_abs_ - hi.log_abs_;
    if (hi.sign_ == lo.sign_)
      return LogReal(hi.sign_, hi.log_abs_ + std::log1p(std::exp(d)));
    if (d == 0.0) return LogReal();
    return LogReal(hi.sign_, hi.log_abs_ + std::log1p(-std::exp(d)));
  }

  LogReal operator-(const LogReal& o) const { return *this + (-o); }

  // Raise |x| to a real power, keeping the sign (domain use is positive x).
  LogReal pow(double e) const {
    if (sign_ == 0) return LogReal();
    return LogReal(sign_, log_abs_ * e);
  }

  bool operator==(const LogReal& o) const {
    return sign_ == o.sign_ && (sign_ == 0 || log_abs_ == o.log_abs_);
  }

  bool operator<(const LogReal& o) const {
    if (sign_ != o.sign_) return sign_ < o.sign_;
    if (sign_ == 0) return false;
    return sign_ > 0 ? log_abs_ < o.log_abs_ : log_abs_ > o.log_abs_;
  }
  bool operator>(const LogReal& o) const { return o < *this; }
  bool operator<=(const LogReal& o) const { return !(o < *this); }
  bool operator>=(const LogReal& o) const { return !(*this < o); }

  // Set when a product or quotient of nonzero values saturated to zero.
  static bool& underflow_flag() {
    thread_local bool flag = false;
    return flag;
  }

 private:
  LogReal(int s, double l) : sign_(s), log_abs_(l) {}

  static constexpr double kLn10 = 2.302585092994045684;

  int8_t sign_;
  double log_abs_;
};

namespace detail {

// Kahan-compensated sum of exp(l - shift) over raw log magnitudes, assumed
// sorted descending so the largest term is accumulated first.
inline double shifted_exp_sum(std::span<const double> sorted_logs, double shift) {
  double sum = 0.0, c = 0.0;
  for (double l : sorted_logs) {
    double term = std::exp(l - shift);
    double y = term - c;
    double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

// Deterministic log-sum-exp over raw log magnitudes (terms all positive).
// Sorts internally, so the result is independent of input order.
inline double logsumexp(std::vector<double> logs) {
  if (logs.empty()) return -std::numeric_limits<double>::infinity();
  std::sort(logs.begin(), logs.end(), std::greater<double>());
  double m = logs[0];
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double rest = shifted_exp_sum(std::span<const double>(logs).subspan(1), m);
  return m + std::log1p(rest);
}

}  // namespace detail

// Sum of nonnegative terms with a fixed (descending log-magnitude) reduction
// order; bit-identical for any permutation of the input.
inline LogReal logsumexp_sorted(std::span<const LogReal> terms) {
  std::vector<double> logs;
  logs.reserve(terms.size());
  for (const LogReal& t : terms) {
    if (t.sign() < 0)
      throw std::domain_error("logsumexp_sorted: negative term (use signed_log_sum)");
    if (t.sign() > 0) logs.push_back(t.log_abs());
  }
  if (logs.empty()) return LogReal();
  return LogReal::from_log(detail::logsumexp(std::move(logs)));
}

// Mixed-sign sum via two magnitude accumulators and one final subtraction.
inline LogReal signed_log_sum(std::span<const LogReal> terms) {
  std::vector<double> pos, neg;
  for (const LogReal& t : terms) {
    if (t.sign() > 0) pos.push_back(t.log_abs());
    else if (t.sign() < 0) neg.push_back(t.log_abs());
  }
  LogReal p = pos.empty() ? LogReal() : LogReal::from_log(detail::logsumexp(std::move(pos)));
  LogReal n = neg.empty() ? LogReal() : LogReal::from_log(detail::logsumexp(std::move(neg)));
  return p - n;
}

}  // namespace cuspbergman

#endif
