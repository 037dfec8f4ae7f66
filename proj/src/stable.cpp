#include "ebc/stable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ebc/quadrature.hpp"

namespace ebc {

double sample_stable(const StableParams& params, Rng& rng) {
  // Chambers-Mallows-Stuck, alpha != 1 branch (Weron's form of the
  // transform for this parameterization).
  const double a = params.alpha;
  const double tan_half = std::tan(std::numbers::pi * a / 2.0);
  const double b_ang = std::atan(params.beta * tan_half) / a;
  const double scale = std::pow(1.0 + params.beta * params.beta * tan_half * tan_half,
                                1.0 / (2.0 * a));
  const double v = std::numbers::pi * (uniform01(rng) - 0.5);
  double w;
  do {
    w = exponential(rng, 1.0);
  } while (w == 0.0);
  const double x = scale * std::sin(a * (v + b_ang)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b_ang)) / w, (1.0 - a) / a);
  return params.sigma * x + params.mu;
}

std::complex<double> cf_stable(const StableParams& params, double theta) {
  const double a = params.alpha;
  const double sgn = (theta > 0.0) ? 1.0 : (theta < 0.0 ? -1.0 : 0.0);
  const double mag = std::pow(params.sigma * std::abs(theta), a);
  const double tan_half = std::tan(std::numbers::pi * a / 2.0);
  const std::complex<double> exponent(-mag + 0.0,
                                      params.mu * theta + mag * params.beta * sgn * tan_half);
  return std::exp(exponent);
}

PointBuffer sample_poisson_points(PointKind kind, const LimitProfile& profile,
                                  double window_lo, double window_hi, double eps, Rng& rng) {
  if (!(eps > 0.0) || !(window_hi > window_lo)) {
    throw std::domain_error("sample_poisson_points requires eps > 0 and a nonempty window");
  }
  const double a = profile.alpha();
  const double density = (kind == PointKind::psi) ? profile.levy_const() : profile.theta_const();
  const double mean = (window_hi - window_lo) * density * std::pow(eps, -a) / a;
  const std::int64_t count = poisson(rng, mean);
  PointBuffer buf{kind, eps, window_lo, window_hi, {}};
  buf.points.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    const double first = uniform_real(rng, window_lo, window_hi);
    const double second = pareto(rng, a, eps);
    buf.points.emplace_back(first, second);
  }
  return buf;
}

PointBuffer map_psi_to_theta(const PointBuffer& psi, const LimitProfile& profile) {
  if (psi.kind != PointKind::psi) {
    throw std::invalid_argument("map_psi_to_theta requires a psi-kind buffer");
  }
  PointBuffer out;
  out.kind = PointKind::theta;
  const double depth = -psi.window_lo;
  out.window_lo = profile.survival_fraction(depth);
  out.window_hi = 1.0;
  out.eps = psi.eps * out.window_lo;  // guaranteed floor of the mapped jumps
  out.points.reserve(psi.points.size());
  for (const auto& [s, u] : psi.points) {
    if (s > 0.0) {
      throw std::invalid_argument("map_psi_to_theta requires all s <= 0");
    }
    const double m = profile.survival_fraction(-s);
    out.points.emplace_back(m, m * u);
  }
  return out;
}

double theta_compensator(const FunctionalSpec& f, const LimitProfile& profile, double eps) {
  const double a = profile.alpha();
  return std::pow(eps, 1.0 - a) * a / std::tgamma(2.0 - a) * f.signed_alpha_integral();
}

double compensated_integral(const PointBuffer& theta_points, const FunctionalSpec& f,
                            double eps, double analytic_compensator,
                            const LimitProfile& profile) {
  if (theta_points.kind != PointKind::theta) {
    throw std::invalid_argument("compensated_integral requires a theta-kind buffer");
  }
  const double a = profile.alpha();
  // Independent quadrature route for the compensator: integrate
  // |f|^a sgn f directly under the power substitution x = u^kappa.
  const double zplus = std::max(f.max_zeta(), 0.0);
  const double kappa = (zplus > 0.0) ? 1.0 / (1.0 - a * zplus) : 1.0;
  double quad = 0.0;
  if (!f.is_zero()) {
    quad = integrate(
        [&](double u) {
          const double x = std::pow(u, kappa);
          if (x <= 0.0) {
            return 0.0;
          }
          const double v = f.eval(x);
          const double s = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
          return s * std::pow(std::abs(v), a) * kappa * std::pow(u, kappa - 1.0);
        },
        0.0, 1.0, 1e-10, 1e-14);
  }
  const double quad_comp = std::pow(eps, 1.0 - a) * a / std::tgamma(2.0 - a) * quad;
  if (std::abs(analytic_compensator - quad_comp) >
      1e-8 * std::max(1.0, std::abs(quad_comp))) {
    throw CompensatorMismatch("compensator disagrees with quadrature cross-check: analytic " +
                              std::to_string(analytic_compensator) + " vs " +
                              std::to_string(quad_comp));
  }
  double sum = 0.0;
  for (const auto& [x, y] : theta_points.points) {
    const double v = f.eval(x);
    if (std::abs(v) * y > eps) {
      sum += v * y;
    }
  }
  return sum - analytic_compensator;
}

double theta_plain_compensated(const PointBuffer& theta_points, const FunctionalSpec& f,
                               const LimitProfile& profile) {
  if (theta_points.kind != PointKind::theta) {
    throw std::invalid_argument("theta_plain_compensated requires a theta-kind buffer");
  }
  const double a = profile.alpha();
  double sum = 0.0;
  for (const auto& [x, y] : theta_points.points) {
    sum += f.eval(x) * y;
  }
  const double comp = profile.theta_const() * std::pow(theta_points.eps, 1.0 - a) /
                      (a - 1.0) * f.integral(theta_points.window_lo, theta_points.window_hi);
  return sum - comp;
}

StableIntegralSampler::StableIntegralSampler(const FunctionalSpec& f,
                                             const LimitProfile& profile, double eps)
    : f_(f), profile_(profile), eps_(eps) {
  if (!(eps > 0.0)) {
    throw std::domain_error("truncation eps must be positive");
  }
  const double a = profile_.alpha();
  abs_int_ = f_.abs_alpha_integral();
  signed_int_ = f_.signed_alpha_integral();
  mean_count_ = profile_.theta_const() / a * std::pow(eps, -a) * abs_int_;
  compensator_ = std::pow(eps, 1.0 - a) * a / std::tgamma(2.0 - a) * signed_int_;
  limit_ = sigma_beta(f_, profile_);
  single_sign_ = f_.sign_change_points().empty();
  sign_ = 1.0;
  if (single_sign_ && !f_.is_zero()) {
    sign_ = (f_.eval(0.5) >= 0.0) ? 1.0 : -1.0;
  }
  zeta_plus_ = std::max(f_.max_zeta(), 0.0);
  double coef_sum = 0.0;
  for (const PowerTerm& t : f_.terms()) {
    coef_sum += std::abs(t.coef);
  }
  coef_bound_alpha_ = std::pow(coef_sum, a);
}

double StableIntegralSampler::draw_sign(Rng& rng) const {
  if (single_sign_) {
    return sign_;
  }
  // X ~ |f|^a-weighted density by rejection from x^{-a zeta_+}.
  const double a = profile_.alpha();
  const double p = 1.0 / (1.0 - a * zeta_plus_);
  for (;;) {
    const double x = std::pow(uniform01(rng), p);
    const double v = f_.eval(x);
    const double accept = std::pow(std::abs(v), a) /
                          (coef_bound_alpha_ * std::pow(x, -a * zeta_plus_));
    if (uniform01(rng) <= accept) {
      return v >= 0.0 ? 1.0 : -1.0;
    }
  }
}

double StableIntegralSampler::draw(Rng& rng) const {
  if (f_.is_zero()) {
    return 0.0;
  }
  // Conditional on x, the weighted jump |f(x)| y given |f(x)| y > eps is
  // Pareto(a) above eps, independent of x; only the sign depends on x.
  const double a = profile_.alpha();
  const std::int64_t count = poisson(rng, mean_count_);
  double sum = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    sum += draw_sign(rng) * pareto(rng, a, eps_);
  }
  return sum - compensator_;
}

double StableIntegralSampler::small_jump_residual(Rng& rng, double eps_lo) const {
  if (!(eps_lo > 0.0) || !(eps_lo < eps_)) {
    throw std::domain_error("small_jump_residual requires 0 < eps_lo < eps");
  }
  if (f_.is_zero()) {
    return 0.0;
  }
  const double a = profile_.alpha();
  const double mean = profile_.theta_const() / a *
                      (std::pow(eps_lo, -a) - std::pow(eps_, -a)) * abs_int_;
  const std::int64_t count = poisson(rng, mean);
  double sum = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    sum += draw_sign(rng) * pareto_band(rng, a, eps_lo, eps_);
  }
  const double comp = a / std::tgamma(2.0 - a) *
                      (std::pow(eps_lo, 1.0 - a) - std::pow(eps_, 1.0 - a)) * signed_int_;
  return sum - comp;
}

double StableIntegralSampler::residual_variance() const {
  const double a = profile_.alpha();
  return std::pow(eps_, 2.0 - a) * a * (a - 1.0) / std::tgamma(3.0 - a) * abs_int_;
}

double sample_I(const FunctionalSpec& f, const LimitProfile& profile, double eps, Rng& rng) {
  return StableIntegralSampler(f, profile, eps).draw(rng);
}

double default_truncation_eps(const FunctionalSpec& f, const LimitProfile& profile,
                              double max_expected_points) {
  const double a = profile.alpha();
  const double abs_int = f.abs_alpha_integral();
  if (abs_int == 0.0) {
    return 1.0;
  }
  const SigmaBeta sb = sigma_beta(f, profile);
  const double var_target = 1e-4 * sb.sigma * sb.sigma;
  const double eps_var = std::pow(
      var_target * std::tgamma(3.0 - a) / (a * (a - 1.0) * abs_int), 1.0 / (2.0 - a));
  const double eps_budget =
      std::pow(profile.theta_const() * abs_int / (a * max_expected_points), 1.0 / a);
  return std::max(eps_var, eps_budget);
}

double eps_for_cf_tolerance(const FunctionalSpec& f, const LimitProfile& profile,
                            double theta_max, double cf_tol) {
  const double a = profile.alpha();
  const double abs_int = f.abs_alpha_integral();
  if (abs_int == 0.0) {
    return 1.0;
  }
  const double sigma = sigma_beta(f, profile).sigma;
  double worst = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double t = theta_max * i / 64.0;
    worst = std::max(worst,
                     0.5 * t * t * std::exp(-std::pow(sigma * t, a)));
  }
  const double var_target = cf_tol / worst;
  return std::pow(var_target * std::tgamma(3.0 - a) / (a * (a - 1.0) * abs_int),
                  1.0 / (2.0 - a));
}

double default_kernel_horizon(const FunctionalSpec& f, const LimitProfile& profile,
                              double rel_tail) {
  const double total = kernel_abs_alpha_integral(f, profile, 0.0,
                                                 std::numeric_limits<double>::infinity());
  double r = profile.alpha_gamma_alpha();
  while (kernel_abs_alpha_integral(f, profile, r, std::numeric_limits<double>::infinity()) >
         rel_tail * total) {
    r *= 2.0;
    if (r > 1e12) {
      throw TruncationError("kernel horizon search failed to converge");
    }
  }
  return r;
}

MovingAverageSampler::MovingAverageSampler(const FunctionalSpec& f,
                                           const LimitProfile& profile,
                                           std::vector<double> scaled_times, double eps,
                                           double r_max, double tail_budget)
    : f_(f), profile_(profile), times_(std::move(scaled_times)), eps_(eps), r_max_(r_max) {
  if (times_.empty() || !std::is_sorted(times_.begin(), times_.end())) {
    throw std::invalid_argument("moving average requires sorted, nonempty times");
  }
  if (!(eps > 0.0) || !(r_max > 0.0)) {
    throw std::domain_error("moving average requires eps > 0 and r_max > 0");
  }
  const double a = profile_.alpha();
  const double total = kernel_abs_alpha_integral(f_, profile_, 0.0,
                                                 std::numeric_limits<double>::infinity());
  const double tail = kernel_abs_alpha_integral(f_, profile_, r_max_,
                                                std::numeric_limits<double>::infinity());
  if (tail > tail_budget * total) {
    throw TruncationError("kernel tail mass " + std::to_string(tail / total) +
                          " exceeds the truncation budget " + std::to_string(tail_budget));
  }
  window_lo_ = times_.front() - r_max_;
  mean_count_ = (times_.back() - window_lo_) * profile_.levy_const() * std::pow(eps, -a) / a;
  compensators_.reserve(times_.size());
  for (double s : times_) {
    compensators_.push_back(profile_.levy_const() * std::pow(eps, 1.0 - a) / (a - 1.0) *
                            kernel_integral(f_, profile_, s - window_lo_));
  }
  marginal_ = sigma_beta(f_, profile_);
}

std::vector<double> MovingAverageSampler::draw(Rng& rng) const {
  const double a = profile_.alpha();
  const std::int64_t count = poisson(rng, mean_count_);
  std::vector<double> sums(times_.size(), 0.0);
  for (std::int64_t i = 0; i < count; ++i) {
    const double w = uniform_real(rng, window_lo_, times_.back());
    const double u = pareto(rng, a, eps_);
    for (std::size_t j = 0; j < times_.size(); ++j) {
      if (w <= times_[j]) {
        sums[j] += kernel_g(f_, profile_, times_[j] - w) * u;
      }
    }
  }
  std::vector<double> out(times_.size());
  for (std::size_t j = 0; j < times_.size(); ++j) {
    out[j] = compensators_[j] - sums[j];
  }
  return out;
}

double MovingAverageSampler::residual_variance() const {
  // Var of the dropped small jumps per coordinate:
  //   b_L eps^{2-a}/(2-a) int_0^inf g(r)^2 dr,
  // with the kernel-square integral in closed form through x = m(r).
  const double a = profile_.alpha();
  const double A = profile_.alpha_gamma_alpha();
  double gsq = 0.0;
  for (const PowerTerm& ti : f_.terms()) {
    for (const PowerTerm& tj : f_.terms()) {
      const double p = 3.0 - a - ti.zeta - tj.zeta;  // > 0 since zeta < (3-a)/2
      gsq += ti.coef * tj.coef / p;
    }
  }
  gsq *= A * (a - 1.0);
  return profile_.levy_const() * std::pow(eps_, 2.0 - a) / (2.0 - a) * gsq;
}

std::complex<double> joint_cf_moving_average(const FunctionalSpec& f,
                                             const LimitProfile& profile,
                                             const std::vector<double>& scaled_times,
                                             const std::vector<double>& theta) {
  if (scaled_times.empty() || scaled_times.size() != theta.size() ||
      !std::is_sorted(scaled_times.begin(), scaled_times.end())) {
    throw std::invalid_argument("joint_cf_moving_average requires sorted times matching theta");
  }
  const double a = profile.alpha();
  const auto h = [&](double w) {
    double v = 0.0;
    for (std::size_t j = 0; j < scaled_times.size(); ++j) {
      if (w <= scaled_times[j] && theta[j] != 0.0) {
        v += theta[j] * kernel_g(f, profile, scaled_times[j] - w);
      }
    }
    return v;
  };
  double theta_abs_sum = 0.0;
  for (double t : theta) {
    theta_abs_sum += std::abs(t);
  }
  if (theta_abs_sum == 0.0 || f.is_zero()) {
    return {1.0, 0.0};
  }
  // Horizon: beyond s_1 - R the remaining |h|^a mass is negligible.
  const double total = kernel_abs_alpha_integral(f, profile, 0.0,
                                                 std::numeric_limits<double>::infinity());
  double horizon = profile.alpha_gamma_alpha();
  const double span = scaled_times.back() - scaled_times.front();
  while (std::pow(theta_abs_sum, a) *
             kernel_abs_alpha_integral(f, profile, horizon,
                                       std::numeric_limits<double>::infinity()) >
         1e-10 * total) {
    horizon *= 2.0;
  }
  horizon += span;

  // Panel boundaries: the kink points s_j, then geometric panels into the past.
  std::vector<double> cuts(scaled_times.begin(), scaled_times.end());
  double step = std::max(span, 1.0);
  double lo = scaled_times.front();
  while (lo > scaled_times.front() - horizon) {
    lo -= step;
    cuts.push_back(lo);
    step *= 2.0;
  }
  std::sort(cuts.begin(), cuts.end());

  double abs_part = 0.0;
  double signed_part = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    abs_part += integrate([&](double w) { return std::pow(std::abs(h(w)), a); }, cuts[i],
                          cuts[i + 1], 1e-9, 1e-13);
    signed_part += integrate(
        [&](double w) {
          const double v = h(w);
          const double s = (v > 0.0) ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
          return s * std::pow(std::abs(v), a);
        },
        cuts[i], cuts[i + 1], 1e-9, 1e-13);
  }
  const double K = profile.levy_const() * profile.musigma_const();
  const std::complex<double> exponent(-K * abs_part,
                                      -K * profile.tan_half() * signed_part);
  return std::exp(exponent);
}

double levy_small_jump_sum(double b, double alpha, double eps_lo, double eps_hi, Rng& rng) {
  if (!(0.0 < eps_lo) || !(eps_lo < eps_hi)) {
    throw std::domain_error("levy_small_jump_sum requires 0 < eps_lo < eps_hi");
  }
  const double mean = b / alpha * (std::pow(eps_lo, -alpha) - std::pow(eps_hi, -alpha));
  const std::int64_t count = poisson(rng, mean);
  double sum = 0.0;
  for (std::int64_t i = 0; i < count; ++i) {
    sum += pareto_band(rng, alpha, eps_lo, eps_hi);
  }
  const double comp =
      b / (alpha - 1.0) * (std::pow(eps_lo, 1.0 - alpha) - std::pow(eps_hi, 1.0 - alpha));
  return sum - comp;
}

SubstitutionReport substitution_identity_check(const PointBuffer& psi,
                                               const FunctionalSpec& f,
                                               const LimitProfile& profile, double eps) {
  if (psi.kind != PointKind::psi) {
    throw std::invalid_argument("substitution_identity_check requires a psi buffer");
  }
  if (eps < psi.eps) {
    throw std::invalid_argument("evaluation eps must be >= the buffer truncation");
  }
  const double a = profile.alpha();
  const double depth = -psi.window_lo;
  const PointBuffer theta = map_psi_to_theta(psi, profile);

  double left_jumps_all = 0.0;
  double right_jumps_all = 0.0;
  double left_jumps_eps = 0.0;
  double right_jumps_eps = 0.0;
  for (std::size_t i = 0; i < psi.points.size(); ++i) {
    const double r = -psi.points[i].first;
    const double u = psi.points[i].second;
    const double gl = kernel_g(f, profile, r) * u;
    const double fr = f.eval(theta.points[i].first) * theta.points[i].second;
    left_jumps_all += gl;
    right_jumps_all += fr;
    if (u >= eps) {
      left_jumps_eps += gl;
    }
    if (theta.points[i].second >= eps) {
      right_jumps_eps += fr;
    }
  }
  const double comp_left = profile.levy_const() * std::pow(eps, 1.0 - a) / (a - 1.0) *
                           kernel_integral(f, profile, depth);
  const double m_depth = profile.survival_fraction(depth);
  const double comp_right = profile.theta_const() * std::pow(eps, 1.0 - a) / (a - 1.0) *
                            f.integral(m_depth, 1.0);
  SubstitutionReport rep;
  rep.jump_abs_diff = std::abs(left_jumps_all - right_jumps_all);
  rep.left_compensated = left_jumps_eps - comp_left;
  rep.right_compensated = right_jumps_eps - comp_right;
  rep.compensated_diff = std::abs(rep.left_compensated - rep.right_compensated);
  return rep;
}

}  // namespace ebc
