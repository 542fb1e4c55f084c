#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cuspbergman/hermitian.hpp"
#include "cuspbergman/log_real.hpp"
#include "cuspbergman/special_functions.hpp"
#include "oracles.hpp"

using namespace cuspbergman;

namespace {
double rel_err(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}
}  // namespace

TEST_CASE("LogReal round trip") {
  // Within a few e-folds of 1 the log/exp round trip is clean to 1e-15.
  for (double x : {1.0, -1.0, 0.5, 3.25, 1e-3, 2.5e3, -17.0, 0.9999}) {
    LogReal v = LogReal::from_value(x);
    CHECK(rel_err(v.value(), x) <= 1e-15);
  }
  // Over the full double range the exponent rounding costs a little more.
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> expo(-290.0, 290.0);
  for (int i = 0; i < 2000; ++i) {
    double x = std::pow(10.0, expo(rng));
    CHECK(rel_err(LogReal::from_value(x).value(), x) <= 1e-13);
  }
  CHECK(LogReal::from_value(0.0).is_zero());
  CHECK(LogReal().value() == 0.0);
  CHECK(LogReal().log_abs() == -std::numeric_limits<double>::infinity());
}

TEST_CASE("LogReal arithmetic and signed sums") {
  LogReal a = LogReal::from_value(3.0), b = LogReal::from_value(-2.0);
  CHECK(rel_err((a * b).value(), -6.0) <= 1e-14);
  CHECK(rel_err((a / b).value(), -1.5) <= 1e-14);
  CHECK(rel_err((a + b).value(), 1.0) <= 1e-13);
  CHECK(rel_err((a - b).value(), 5.0) <= 1e-13);
  CHECK((a - a).is_zero());
  CHECK((LogReal() * a).is_zero());
  CHECK_THROWS_AS(a / LogReal(), std::domain_error);

  // Saturating underflow sets the flag instead of producing NaN.
  LogReal::underflow_flag() = false;
  LogReal tiny = LogReal::from_log(-1.6e308);
  LogReal prod = tiny * tiny;
  CHECK(prod.is_zero());
  CHECK(LogReal::underflow_flag());
  CHECK(!std::isnan(prod.value()));
  LogReal::underflow_flag() = false;
}

TEST_CASE("logsumexp_sorted basics") {
  std::vector<LogReal> two{LogReal::from_value(1.0), LogReal::from_value(1.0)};
  CHECK(rel_err(logsumexp_sorted(two).log_abs(), std::log(2.0)) <= 1e-15);

  CHECK(logsumexp_sorted(std::span<const LogReal>{}).is_zero());

  // 1e4 copies of 1e-300 sum to exactly 1e4 * 1e-300 in the log domain.
  std::vector<LogReal> many(10000, LogReal::from_value(1e-300));
  double expect = std::log(1e4) + std::log(1e-300);
  CHECK(std::abs(logsumexp_sorted(many).log_abs() - expect) <= 1e-13);

  std::vector<LogReal> bad{LogReal::from_value(-1.0)};
  CHECK_THROWS_AS(logsumexp_sorted(bad), std::domain_error);
}

TEST_CASE("logsumexp_sorted is permutation invariant bit-for-bit") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> mag(-600.0, 600.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LogReal> terms;
    for (int i = 0; i < 257; ++i) terms.push_back(LogReal::from_log(mag(rng)));
    double reference = logsumexp_sorted(terms).log_abs();
    for (int rep = 0; rep < 4; ++rep) {
      std::shuffle(terms.begin(), terms.end(), rng);
      CHECK(logsumexp_sorted(terms).log_abs() == reference);
    }
  }
}

TEST_CASE("log_factorial") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(rel_err(log_factorial(5), std::log(120.0)) <= 1e-15);
  CHECK(rel_err(log_factorial(20), std::log(2432902008176640000.0)) <= 1e-14);

  // Stirling-series oracle, cross-checked against an exact big integer.
  long double stirling = oracles::stirling_log_factorial(1000);
  long double exact = oracles::bigint_log_factorial(1000);
  REQUIRE(std::abs(static_cast<double>(stirling - exact) / static_cast<double>(exact)) <= 1e-16);
  CHECK(rel_err(log_factorial(1000), static_cast<double>(stirling)) <= 1e-12);

  CHECK_THROWS_AS(log_factorial(-1), std::domain_error);
}

TEST_CASE("log_factorial increments match ln(n+1)") {
  // The identity holds to 1e-13 relative wherever double rounding of
  // ln(n!) allows; past that the error is capped by the cancellation of the
  // two stored logs (a few ulp of ln((n+1)!)).
  CHECK(log_factorial(1) - log_factorial(0) == 0.0);
  for (std::int64_t n = 1; n <= 100000; n = (n < 64 ? n + 1 : n + n / 7)) {
    double want = std::log(static_cast<double>(n + 1));
    double diff = log_factorial(n + 1) - log_factorial(n);
    double ulp_cap = 4.0 * std::ldexp(log_factorial(n + 1), -52);
    CHECK(std::abs(diff - want) <= std::max(1e-13 * want, ulp_cap));
    if (n <= 170) CHECK(rel_err(diff, want) <= 1e-13);
  }
}

TEST_CASE("regularized gamma Q values") {
  CHECK(regularized_gamma_q(3, 0.0) == 1.0);
  CHECK(rel_err(regularized_gamma_q(1, 2.0), std::exp(-2.0)) <= 1e-14);
  CHECK(rel_err(regularized_gamma_q(2, 1.0), 2.0 * std::exp(-1.0)) <= 1e-14);
  CHECK_THROWS_AS(regularized_gamma_q(0, 1.0), std::domain_error);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::int64_t> sdist(1, 400);
  std::uniform_real_distribution<double> xdist(0.0, 800.0);
  for (int i = 0; i < 300; ++i) {
    std::int64_t s = sdist(rng);
    double x = xdist(rng);
    long double ref = oracles::direct_gamma_q(s, x);
    if (ref < 1e-280L) continue;
    CHECK(rel_err(regularized_gamma_q(s, x), static_cast<double>(ref)) <= 1e-12);
  }
  // Large-shape spot checks stay in [0,1].
  for (double x : {0.0, 1.0, 1e3, 1e5, 1e7}) {
    double v = regularized_gamma_q(100000, x);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("regularized gamma monotonicity lattice") {
  // Decreasing in x, increasing in s; [0,1] throughout.
  for (std::int64_t s : {1, 2, 3, 5, 10, 30, 80, 140, 200}) {
    double prev = 2.0;
    for (double x = 0.0; x <= 400.0; x += 2.0) {
      double v = regularized_gamma_q(s, x);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      CHECK(v <= prev * (1.0 + 5e-16));
      if (s > 1) CHECK(v >= regularized_gamma_q(s - 1, x) * (1.0 - 5e-16));
      prev = v;
    }
  }
  // Strict decrease where the step is resolvable.
  CHECK(regularized_gamma_q(3, 2.0) > regularized_gamma_q(3, 4.0));
  CHECK(regularized_gamma_q(1, 0.5) > regularized_gamma_q(1, 0.6));
}

TEST_CASE("regularized gamma lower tail") {
  // P + Q = 1 where both are order one.
  for (std::int64_t s : {2, 5, 20}) {
    for (double x : {0.5, 3.0, 10.0, 25.0}) {
      double p = regularized_gamma_p(s, x).value();
      CHECK(std::abs(p + regularized_gamma_q(s, x) - 1.0) <= 1e-12);
    }
  }
  // Tiny tail: P(11,1) = e^{-1} (e - sum_{k<=10} 1/k!).
  long double partial = 0.0L, f = 1.0L;
  for (int k = 0; k <= 10; ++k) {
    if (k > 0) f *= k;
    partial += 1.0L / f;
  }
  long double expect = std::exp(-1.0L) * (std::exp(1.0L) - partial);
  CHECK(rel_err(regularized_gamma_p(11, 1.0).value(), static_cast<double>(expect)) <= 1e-10);
  CHECK(regularized_gamma_p(5, 0.0).is_zero());
}

namespace {

HermitianMatrix random_near_identity(std::mt19937_64& rng, std::int64_t n, double delta) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd a(n, n);
  const double scale = delta / std::sqrt(2.0);
  for (std::int64_t i = 0; i < n; ++i) {
    a(i, i) = std::complex<double>(1.0 + delta * u(rng), 0.0);
    for (std::int64_t j = 0; j < i; ++j) {
      std::complex<double> z(scale * u(rng), scale * u(rng));
      a(i, j) = z;
      a(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix(std::move(a));
}

}  // namespace

TEST_CASE("hermitian_sqrt identity and scalar") {
  HermitianMatrix id{Eigen::MatrixXcd::Identity(4, 4)};
  HermitianMatrix r = hermitian_sqrt(id, 1.0 / 400.0);
  CHECK(r.max_deviation_from_identity() <= 1e-14);

  Eigen::MatrixXcd a1(1, 1);
  a1(0, 0) = 1.005;
  HermitianMatrix b1 = hermitian_sqrt(HermitianMatrix(a1), 0.005);
  CHECK(rel_err(b1(0, 0).real(), std::sqrt(1.005)) <= 1e-14);
  CHECK(std::abs(b1(0, 0).real() - 1.0) <= 2.0 * 0.005);
}

TEST_CASE("hermitian_sqrt rejects bad input") {
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(3, 3);
  CHECK_THROWS_AS(hermitian_sqrt(HermitianMatrix(a), 1.0 / 200.0), std::domain_error);
  a(0, 1) = std::complex<double>(0.0, 1e-3);
  a(1, 0) = std::complex<double>(0.0, 1e-3);  // not conjugate-symmetric
  CHECK_THROWS_AS(HermitianMatrix{a}, std::domain_error);
}

TEST_CASE("hermitian_sqrt versus long double Jacobi oracle") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::int64_t> ndist(1, 8);
  for (int trial = 0; trial < 60; ++trial) {
    std::int64_t n = ndist(rng);
    double delta = 1.0 / (100.0 * static_cast<double>(n) * (1 + trial % 5));
    HermitianMatrix a = random_near_identity(rng, n, delta);
    HermitianMatrix b = hermitian_sqrt(a, delta);

    std::vector<std::vector<std::complex<long double>>> al(
        static_cast<std::size_t>(n), std::vector<std::complex<long double>>(static_cast<std::size_t>(n)));
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        al[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j);
    auto bl = oracles::jacobi_sqrt(al);
    // Oracle self-check: reconstructs A in long double.
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j) {
        std::complex<long double> s{0.0L, 0.0L};
        for (std::int64_t k = 0; k < n; ++k)
          s += bl[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] *
               std::conj(bl[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]);
        REQUIRE(std::abs(s - al[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]) <= 1e-15L);
      }
    double worst = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
      for (std::int64_t j = 0; j < n; ++j)
        worst = std::max(worst,
                         static_cast<double>(std::abs(
                             std::complex<long double>(b(i, j)) -
                             bl[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)])));
    CHECK(worst <= 1e-12);
    CHECK(b.max_deviation_from_identity() <= 2.0 * static_cast<double>(n) * delta);
  }
}
