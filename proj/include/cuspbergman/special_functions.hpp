#ifndef CUSPBERGMAN_SPECIAL_FUNCTIONS_HPP
#define CUSPBERGMAN_SPECIAL_FUNCTIONS_HPP

#include <cstdint>

#include "cuspbergman/log_real.hpp"

namespace cuspbergman {

// ln(n!); exact product path for n <= 20.
double log_factorial(std::int64_t n);

// Regularized upper incomplete gamma Q(s,x) = Gamma(s,x)/Gamma(s) for integer
// shape s >= 1, evaluated through the finite sum e^{-x} sum_{k<s} x^k/k! in
// log domain. Result in [0,1].
double regularized_gamma_q(std::int64_t s, double x);

// ln Q(s,x); usable where Q underflows double.
double regularized_gamma_q_log(std::int64_t s, double x);

// Lower tail P(s,x) = 1 - Q(s,x) as a LogReal, accurate when P is tiny.
LogReal regularized_gamma_p(std::int64_t s, double x);

}  // namespace cuspbergman

#endif
