#ifndef CUSPBERGMAN_EXPANSION_HPP
#define CUSPBERGMAN_EXPANSION_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <span>
#include <vector>

#include "cuspbergman/base_kernel.hpp"
#include "cuspbergman/log_real.hpp"

namespace cuspbergman {

using Rational = boost::multiprecision::cpp_rational;

// Polynomial in m with exact rational coefficients; coeffs[d] multiplies m^d.
using PolyInM = std::vector<Rational>;

// Correction coefficients lambda_{m,l}, l = 3..N, of the Gaussian expansion
// of f(t)^m = ((1+t) e^{-t})^m:
//   exp(m sum_{k>=3} (-1)^{k-1} t^k / k) = 1 + sum_{l>=3} lambda_{m,l} t^l.
class ExpansionPoly {
 public:
  explicit ExpansionPoly(int order, std::vector<PolyInM> coeffs)
      : order_(order), coeffs_(std::move(coeffs)) {}

  int order() const { return order_; }
  const PolyInM& coeff(int l) const { return coeffs_.at(static_cast<std::size_t>(l)); }

  // lambda_{m,l} at integer m (exact rational evaluation, then one rounding).
  double evaluate(int l, std::int64_t m) const;

  // All lambda_{m,l} for l = 0..N (entries below l = 3 are zero except l = 0).
  std::vector<double> evaluate_all(std::int64_t m) const;

 private:
  int order_;
  std::vector<PolyInM> coeffs_;  // index l, 0..order
};

// Exact truncated power-series exponentiation; order is capped at 40
// (coefficient growth guard).
ExpansionPoly lambda_polys(int order);

// f(t)^m = exp(m (log(1+t) - t)) for t > -1, in log domain.
LogReal f_pow(std::int64_t m, double t);

// Gaussian approximant G_{m,N}(t) = (1 + sum_{l=3}^N lambda_{m,l} t^l) e^{-m t^2/2},
// signed, assembled through a two-accumulator log-domain sum.
LogReal approximant(const ExpansionPoly& polys, std::int64_t m, double t);
double approximant_value(const ExpansionPoly& polys, std::int64_t m, double t);

// sup over the grid of (1 + |t+1|^{2N}) |f(t)^m - G_{m,N}(t)|.
struct WeightedErrorSup {
  LogReal sup;
  double argmax_t = 0.0;
};
WeightedErrorSup expansion_error(std::int64_t m, const ExpansionPoly& polys,
                                 std::span<const double> t_grid);

// Default grid for expansion error scans: 64 geometric points per decade on
// (1e-2, 1e3] plus a 2000-point linear refinement of (-0.99, 3].
std::vector<double> default_expansion_grid();

// Rescaled cusp density along the dilated ray t -> m t:
//   (2 pi (m-n-1)! / (n |Gamma| m^m e^{1-m})) * rho_cusp at CuspPoint(m t, a),
// computed without forming m^m.
double b_scaled(const BaseKernel& kernel, std::int64_t m, const BasePoint& a, double t);

// Mode-by-mode Gaussian approximant of the rescaled density:
//   t sum_q q^{1-n} rho_{D,q}(a) e^{-q t} G_{m-1,N}(q t - 1).
double b_approximant(const BaseKernel& kernel, const ExpansionPoly& polys, std::int64_t m,
                     const BasePoint& a, double t);

}  // namespace cuspbergman

#endif
