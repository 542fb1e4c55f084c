#include "cuspbergman/base_kernel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cuspbergman {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Smallest number of lattice translates needed so that dropped theta terms
// sit at least 40 decades below the largest one.
std::int64_t theta_window(double tau2, std::int64_t q) {
  double need = 40.0 * std::numbers::ln10;
  return static_cast<std::int64_t>(std::ceil(std::sqrt(need / (std::numbers::pi * tau2 * q)))) + 2;
}
}  // namespace

double theta_norm_constant(std::complex<double> tau, std::int64_t q) {
  if (!(tau.imag() > 0.0)) throw std::domain_error("theta_norm_constant: Im tau must be positive");
  if (q < 1) throw std::domain_error("theta_norm_constant: q must be positive");
  return kTwoPi / std::sqrt(2.0 * static_cast<double>(q) * tau.imag());
}

BaseKernel BaseKernel::point(std::int64_t group_order, std::int64_t character_index) {
  if (group_order < 1) throw std::domain_error("BaseKernel: group order must be positive");
  if (character_index < 0 || character_index >= group_order)
    throw std::domain_error("BaseKernel: character index must lie in [0, group order)");
  BaseKernel k;
  k.kind_ = Kind::kPoint;
  k.cusp_dim_ = 1;
  k.group_order_ = group_order;
  k.character_index_ = character_index;
  return k;
}

BaseKernel BaseKernel::theta(std::complex<double> tau) {
  if (!(tau.imag() > 0.0)) throw std::domain_error("BaseKernel: Im tau must be positive");
  BaseKernel k;
  k.kind_ = Kind::kTheta;
  k.cusp_dim_ = 2;
  k.tau_ = tau;
  return k;
}

BaseKernel BaseKernel::projector(BaseKernel inner, ProjectorUnitaries unitaries,
                                 std::int64_t group_order, std::int64_t character_index) {
  if (group_order < 1) throw std::domain_error("BaseKernel: group order must be positive");
  if (character_index < 0 || character_index >= group_order)
    throw std::domain_error("BaseKernel: character index must lie in [0, group order)");
  for (const auto& [q, mats] : unitaries) {
    if (static_cast<std::int64_t>(mats.size()) != group_order)
      throw std::domain_error("BaseKernel: projector needs one unitary per group element");
    const auto dim = inner.dimension(1, q);
    for (const auto& u : mats)
      if (u.rows() != dim || u.cols() != dim)
        throw std::domain_error("BaseKernel: projector unitary has wrong dimension");
  }
  BaseKernel k;
  k.kind_ = Kind::kProjector;
  k.cusp_dim_ = inner.cusp_dim();
  k.group_order_ = group_order;
  k.character_index_ = character_index;
  k.tau_ = inner.tau();
  k.inner_ = std::make_shared<BaseKernel>(std::move(inner));
  k.unitaries_ = std::make_shared<ProjectorUnitaries>(std::move(unitaries));
  return k;
}

void BaseKernel::check_theta_domain(const BasePoint& a) const {
  double x = a.z.real(), y = a.z.imag();
  if (x < 0.0 || x >= 1.0 || y < 0.0 || y >= tau_.imag())
    throw std::domain_error("BaseKernel: theta coordinate outside the fundamental domain");
}

BasePoint BaseKernel::reduce(const BasePoint& a) const {
  if (kind_ == Kind::kPoint) return BasePoint{};
  double x = a.z.real() - std::floor(a.z.real());
  double t2 = tau_.imag();
  double y = a.z.imag() - std::floor(a.z.imag() / t2) * t2;
  if (x >= 1.0) x = 0.0;
  if (y >= t2) y = 0.0;
  return BasePoint{{x, y}};
}

std::complex<double> BaseKernel::character_power(std::int64_t element, std::int64_t m) const {
  // Character of the generator is the root of unity e^{-2 pi i c / r}; the
  // residue is reduced in integer arithmetic so powers are exactly periodic
  // in m.
  std::int64_t r = group_order_;
  std::int64_t e = ((character_index_ % r) * (element % r)) % r;
  e = (e * (m % r)) % r;
  double angle = -kTwoPi * static_cast<double>(e) / static_cast<double>(r);
  return {std::cos(angle), std::sin(angle)};
}

std::vector<std::complex<double>> BaseKernel::section_values(std::int64_t q,
                                                             const BasePoint& a) const {
  if (q < 1) throw std::domain_error("BaseKernel: q must be positive");
  switch (kind_) {
    case Kind::kPoint:
      return {std::complex<double>(1.0, 0.0)};
    case Kind::kTheta: {
      check_theta_domain(a);
      const double tau1 = tau_.real(), tau2 = tau_.imag();
      const double x = a.z.real(), y = a.z.imag();
      const double qd = static_cast<double>(q);
      const double inv_norm = 1.0 / std::sqrt(theta_norm_constant(tau_, q));
      const std::int64_t K = theta_window(tau2, q);
      std::vector<std::complex<double>> vals(static_cast<std::size_t>(q));
      for (std::int64_t j = 0; j < q; ++j) {
        const double cj = static_cast<double>(j) / qd;
        const auto n0 = static_cast<std::int64_t>(std::llround(-cj - y / tau2));
        std::complex<double> s{0.0, 0.0};
        for (std::int64_t n = n0 - K; n <= n0 + K; ++n) {
          double c = static_cast<double>(n) + cj;
          // Metric weight folded in: magnitude exp(-pi tau2 q (c + y/tau2)^2)
          // never overflows.
          double u = c + y / tau2;
          double mag = std::exp(-std::numbers::pi * tau2 * qd * u * u);
          double phase = std::numbers::pi * tau1 * qd * c * c + kTwoPi * qd * c * x;
          s += mag * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        vals[static_cast<std::size_t>(j)] = inv_norm * s;
      }
      return vals;
    }
    case Kind::kProjector:
      return inner_->section_values(q, a);
  }
  throw std::logic_error("BaseKernel: unreachable");
}

double BaseKernel::density(std::int64_t m, std::int64_t q, const BasePoint& a) const {
  if (q < 1) throw std::domain_error("BaseKernel: q must be positive");
  if (m < 1) throw std::domain_error("BaseKernel: m must be positive");
  switch (kind_) {
    case Kind::kPoint:
      return structurally_zero(m, q) ? 0.0 : 1.0;
    case Kind::kTheta: {
      auto vals = section_values(q, a);
      double s = 0.0;
      for (const auto& v : vals) s += std::norm(v);
      return s;
    }
    case Kind::kProjector: {
      auto it = unitaries_->find(q);
      if (it == unitaries_->end())
        throw std::domain_error("BaseKernel: projector unitaries missing for requested q");
      auto vals = inner_->section_values(q, a);
      Eigen::VectorXcd v(static_cast<Eigen::Index>(vals.size()));
      for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<Eigen::Index>(i)) = vals[i];
      std::complex<double> acc{0.0, 0.0};
      for (std::int64_t g = 0; g < group_order_; ++g)
        acc += character_power(g, m) * v.dot(it->second[static_cast<std::size_t>(g)] * v);
      double val = acc.real() / static_cast<double>(group_order_);
      double scale = std::exp(inner_->density_log_bound(q));
      if (val < -1e-9 * scale)
        throw std::runtime_error("BaseKernel: projector density is negative (bad unitaries?)");
      return std::max(val, 0.0);
    }
  }
  throw std::logic_error("BaseKernel: unreachable");
}

std::int64_t BaseKernel::dimension(std::int64_t m, std::int64_t q) const {
  if (q < 1) throw std::domain_error("BaseKernel: q must be positive");
  switch (kind_) {
    case Kind::kPoint:
      return structurally_zero(m, q) ? 0 : 1;
    case Kind::kTheta:
      return q;
    case Kind::kProjector: {
      auto it = unitaries_->find(q);
      if (it == unitaries_->end())
        throw std::domain_error("BaseKernel: projector unitaries missing for requested q");
      std::complex<double> tr{0.0, 0.0};
      for (std::int64_t g = 0; g < group_order_; ++g)
        tr += character_power(g, m) * it->second[static_cast<std::size_t>(g)].trace();
      return std::llround(tr.real() / static_cast<double>(group_order_));
    }
  }
  throw std::logic_error("BaseKernel: unreachable");
}

double BaseKernel::density_log_bound(std::int64_t q) const {
  const double qd = static_cast<double>(q);
  switch (kind_) {
    case Kind::kPoint:
      return 0.0;
    case Kind::kTheta: {
      double t2 = tau_.imag();
      double a = std::numbers::pi * t2 * qd;
      if (a >= std::numbers::pi) {
        // Row sums F(u) = sum_n exp(-a (n+u)^2) obey
        // F(u) <= exp(-a ubar^2) + 1.2 exp(-a/4), and the q equispaced
        // offsets give sum_j F(u_j)^2 <= 8 + 2 sqrt(q/(2 t2)) + 3 q e^{-a/2},
        // hence a density bound linear in q.
        double rows = 8.0 + 2.0 * std::sqrt(qd / (2.0 * t2)) +
                      3.0 * qd * std::exp(-0.5 * a);
        return std::log(rows / theta_norm_constant(tau_, q));
      }
      // Thin-lattice regime: bound every row by the Gaussian integral.
      double row = 3.0 + 1.0 / std::sqrt(t2 * qd);
      return std::log(qd * row * row / theta_norm_constant(tau_, q));
    }
    case Kind::kProjector:
      // |<U v, v>| <= |v|^2, so the average is bounded by the inner density.
      return inner_->density_log_bound(q);
  }
  throw std::logic_error("BaseKernel: unreachable");
}

bool BaseKernel::structurally_zero(std::int64_t m, std::int64_t q) const {
  if (kind_ != Kind::kPoint || group_order_ == 1) return false;
  // Invariance picks out q == -c*m (mod r).
  std::int64_t r = group_order_;
  return ((q % r) + ((character_index_ % r) * (m % r)) % r) % r != 0;
}

std::int64_t BaseKernel::mode_step(std::int64_t m) const {
  (void)m;
  return (kind_ == Kind::kPoint) ? group_order_ : 1;
}

std::int64_t BaseKernel::first_mode_at_or_above(std::int64_t m, std::int64_t q_from) const {
  if (q_from < 1) q_from = 1;
  if (kind_ != Kind::kPoint || group_order_ == 1) return q_from;
  std::int64_t r = group_order_;
  std::int64_t want = (r - ((character_index_ % r) * (m % r)) % r) % r;  // q mod r
  std::int64_t delta = (want - (q_from % r) + r) % r;
  return q_from + delta;
}

}  // namespace cuspbergman
