#ifndef EBC_STABLE_HPP
#define EBC_STABLE_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "ebc/funcspec.hpp"
#include "ebc/rng.hpp"

namespace ebc {

class CompensatorMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// S_a(sigma, beta, mu) in the parameterization whose characteristic function
// is exp(i theta mu - sigma^a |theta|^a (1 - i beta sgn(theta) tan(pi a/2))).
// Only mu = 0 is used by the limit laws here.
struct StableParams {
  double alpha;
  double sigma;
  double beta;
  double mu = 0.0;

  StableParams(double alpha_, double sigma_, double beta_, double mu_ = 0.0)
      : alpha(alpha_), sigma(sigma_), beta(beta_), mu(mu_) {
    if (!(alpha > 1.0) || !(alpha < 2.0) || !(sigma > 0.0) || std::abs(beta) > 1.0) {
      throw std::domain_error("invalid stable parameters");
    }
  }
};

// Exact draw via the Chambers-Mallows-Stuck transform.
double sample_stable(const StableParams& params, Rng& rng);

std::complex<double> cf_stable(const StableParams& params, double theta);

// Truncated Poisson point sets.  Psi-kind lives on (time window) x [eps,inf)
// with intensity ds x b_L u^{-1-a} du (also the Levy measure of the driving
// process); Theta-kind lives on (0,1] x [eps,inf) with intensity
// dx x a(a-1)/Gamma(2-a) y^{-1-a} dy.
enum class PointKind { psi, theta };

struct PointBuffer {
  PointKind kind;
  double eps;
  double window_lo;
  double window_hi;
  std::vector<std::pair<double, double>> points;
};

PointBuffer sample_poisson_points(PointKind kind, const LimitProfile& profile,
                                  double window_lo, double window_hi, double eps, Rng& rng);

// (s, u) -> (x, y) = (m(-s), m(-s) u); requires all s <= 0.
PointBuffer map_psi_to_theta(const PointBuffer& psi, const LimitProfile& profile);

// Truncated compensated integral over a Theta buffer: sums f(x) y over the
// points with |f(x)| y > eps and subtracts the supplied compensator, which is
// cross-checked against a quadrature evaluation of
//   eps^{1-a} (a/Gamma(2-a)) int |f|^a sgn f dx
// and rejected (CompensatorMismatch) beyond 1e-8 relative disagreement.
double compensated_integral(const PointBuffer& theta_points, const FunctionalSpec& f,
                            double eps, double analytic_compensator,
                            const LimitProfile& profile);

// Closed-form compensator for the truncation above.
double theta_compensator(const FunctionalSpec& f, const LimitProfile& profile, double eps);

// Compensated sum over ALL points of a Theta buffer truncated uniformly at
// y >= buffer eps:  sum f(x_i) y_i - c_theta eps^{1-a}/(a-1) int_window f.
// Exactly linear in f on a fixed buffer.
double theta_plain_compensated(const PointBuffer& theta_points, const FunctionalSpec& f,
                               const LimitProfile& profile);

// Sampler for the stable integral I(f) = int f dM with the profile's control
// measure, realized as a compensated sum of Theta-kind jumps truncated at
// |f(x)| y > eps.  Setup is O(1) per draw after construction.
class StableIntegralSampler {
 public:
  StableIntegralSampler(const FunctionalSpec& f, const LimitProfile& profile, double eps);

  double draw(Rng& rng) const;

  // Compensated sum of the weighted jumps in the band [eps_lo, eps); this is
  // the simulable part of the residual I(f) - I_eps(f).  Mean zero with
  // variance (a(a-1)/Gamma(3-a)) (eps^{2-a} - eps_lo^{2-a}) int |f|^a.
  double small_jump_residual(Rng& rng, double eps_lo) const;

  double eps() const { return eps_; }
  double compensator() const { return compensator_; }
  double expected_points() const { return mean_count_; }
  double residual_variance() const;
  SigmaBeta limit_sigma_beta() const { return limit_; }

 private:
  double draw_sign(Rng& rng) const;  // sgn(f(X)) with X ~ |f|^a-weighted

  FunctionalSpec f_;
  LimitProfile profile_;
  double eps_;
  double abs_int_;
  double signed_int_;
  double mean_count_;
  double compensator_;
  SigmaBeta limit_;
  bool single_sign_;
  double sign_;
  double zeta_plus_;
  double coef_bound_alpha_;  // (sum |c_j|)^a
};

double sample_I(const FunctionalSpec& f, const LimitProfile& profile, double eps, Rng& rng);

// Default truncation threshold: small enough that the residual variance is
// 1e-4 of sigma_f^2 when that is affordable, otherwise the largest eps
// keeping the expected point count per draw within the budget.
double default_truncation_eps(const FunctionalSpec& f, const LimitProfile& profile,
                              double max_expected_points = 1e5);

// Largest eps whose truncation residual biases the characteristic function
// by at most cf_tol anywhere on |theta| <= theta_max.  The residual is an
// independent mean-zero perturbation with the variance above, so the CF
// error is about |cf(theta)| theta^2 Var / 2.
double eps_for_cf_tolerance(const FunctionalSpec& f, const LimitProfile& profile,
                            double theta_max, double cf_tol);

// Smallest horizon with int_{r_max}^inf |kernel_g|^a dr below rel_tail of the
// total kernel mass.
double default_kernel_horizon(const FunctionalSpec& f, const LimitProfile& profile,
                              double rel_tail = 1e-4);

// Sampler for the stationary limit of the evolving functional: coordinates
//   J(s_j) = C_j - sum_{w_i <= s_j} kernel_g(s_j - w_i) u_i,
// all coordinates sharing one Psi realization on [s_1 - r_max, s_d].  The
// sign matches the finite-n functional expansion, so the marginal law is
// S_a(sigma_f, -beta_f, 0).
class MovingAverageSampler {
 public:
  MovingAverageSampler(const FunctionalSpec& f, const LimitProfile& profile,
                       std::vector<double> scaled_times, double eps, double r_max,
                       double tail_budget = 1e-4);

  std::vector<double> draw(Rng& rng) const;

  double marginal_sigma() const { return marginal_.sigma; }
  double marginal_beta() const { return -marginal_.beta; }
  double expected_points() const { return mean_count_; }
  double residual_variance() const;  // per coordinate, plain u-truncation

 private:
  FunctionalSpec f_;
  LimitProfile profile_;
  std::vector<double> times_;
  double eps_;
  double r_max_;
  double window_lo_;
  double mean_count_;
  std::vector<double> compensators_;
  SigmaBeta marginal_;
};

// Joint characteristic function of the moving-average limit at the given
// times: with h(w) = sum_j theta_j kernel_g(s_j - w) 1_{w <= s_j},
//   E exp(i sum theta_j J(s_j))
//     = exp(-K int |h|^a (1 + i sgn(h) tan(pi a/2)) dw),
// K = b_L pi / (2 sin(pi a/2) Gamma(a+1)).
std::complex<double> joint_cf_moving_average(const FunctionalSpec& f,
                                             const LimitProfile& profile,
                                             const std::vector<double>& scaled_times,
                                             const std::vector<double>& theta);

// Compensated sum of plain Levy jumps (density b u^{-1-a} du) in [eps_lo,
// eps_hi); realizes Z(eps_lo) - Z(eps_hi).  Variance b (eps_hi^{2-a} -
// eps_lo^{2-a}) / (2-a).
double levy_small_jump_sum(double b, double alpha, double eps_lo, double eps_hi, Rng& rng);

// Pathwise check of the change of variables between the two integral
// representations, evaluated on one Psi realization restricted to s <= 0.
//   jump_abs_diff:  | sum g(r_i) u_i - sum f(x_i) y_i | over all points,
//                   zero up to rounding since (x,y) = (m(r), m(r) u).
//   left/right:     each side's compensated integral with its own truncation
//                   (u >= eps for the kernel side, y >= eps for the mapped
//                   side) and closed-form compensator; the difference
//                   vanishes as eps -> 0.
struct SubstitutionReport {
  double jump_abs_diff;
  double left_compensated;
  double right_compensated;
  double compensated_diff;
};

SubstitutionReport substitution_identity_check(const PointBuffer& psi,
                                               const FunctionalSpec& f,
                                               const LimitProfile& profile, double eps);

}  // namespace ebc

#endif  // EBC_STABLE_HPP
