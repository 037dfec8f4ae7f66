#ifndef EBC_FUNCSPEC_HPP
#define EBC_FUNCSPEC_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ebc/alpha.hpp"

namespace ebc {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

class MembershipError : public std::domain_error {
 public:
  MembershipError(double zeta, double bound)
      : std::domain_error("functional term x^" + std::to_string(-zeta) +
                          " is outside the admissible class: zeta = " + std::to_string(zeta) +
                          " must be < 1/alpha = " + std::to_string(bound)),
        zeta_(zeta),
        bound_(bound) {}
  double zeta() const { return zeta_; }
  double bound() const { return bound_; }

 private:
  double zeta_;
  double bound_;
};

// One power term coef * x^{-zeta}.
struct PowerTerm {
  double coef;
  double zeta;
};

// A finite power sum f(x) = sum_j c_j x^{-zeta_j} on (0,1], restricted to
// max_j zeta_j < 1/alpha so that the stable-limit machinery applies.
// Canonical form: exponents strictly increasing, coefficients nonzero.
//
// The accepted grammar is
//   expr  := ['-'] term (('+'|'-') term)*
//   term  := power ('*' power)*
//   power := atom ['^' atom]
//   atom  := NUMBER | 'alpha' | 'x' | 'gammafn' '(' expr ')' | '(' expr ')'
// Exponents must be constant expressions; a parenthesized sum may be raised
// to a small nonnegative integer power.  Examples:
//   "alpha-1"
//   "alpha*(alpha-1)*gammafn(alpha)*x^(1-alpha)"
//   "(2-alpha)^2*(x^(1-alpha)-1)"
class FunctionalSpec {
 public:
  static FunctionalSpec parse(std::string_view text, Alpha alpha);
  static FunctionalSpec from_terms(std::vector<PowerTerm> terms, Alpha alpha);
  static FunctionalSpec constant(double value, Alpha alpha);

  // The four worked functionals: "tau" (collision count), "length" (total
  // branch length), "extlength" (external length), "ratio-linearization"
  // (external over total length, linearized).
  static FunctionalSpec preset(std::string_view name, Alpha alpha);
  static std::vector<std::string> preset_names();

  double eval(double x) const;   // throws std::domain_error for x <= 0
  double integral01() const;     // closed form sum c_j / (1 - zeta_j)
  double integral(double lo, double hi) const;  // same, over [lo,hi] in (0,1]

  // integral over (lo,hi) of |f|^alpha, and of |f|^alpha sgn f.  Single-term
  // specs use the closed power form; multi-term specs locate the finitely
  // many sign changes first and integrate the pieces adaptively.
  double abs_alpha_integral(double lo = 0.0, double hi = 1.0) const;
  double signed_alpha_integral(double lo = 0.0, double hi = 1.0) const;

  std::vector<double> sign_change_points() const;  // roots of f in (0,1)

  const std::vector<PowerTerm>& terms() const { return terms_; }
  double alpha() const { return alpha_; }
  double max_zeta() const;
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::string to_string() const;

 private:
  FunctionalSpec(std::vector<PowerTerm> terms, double alpha)
      : terms_(std::move(terms)), alpha_(alpha) {}

  std::vector<PowerTerm> terms_;
  double alpha_;
};

// Closed-form constants of the limit laws for a given alpha.
class LimitProfile {
 public:
  explicit LimitProfile(Alpha alpha);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }                      // 1/(a-1), mean merger loss
  double alpha_gamma_alpha() const { return a_gamma_a_; }      // a Gamma(a)
  double rho_prime() const { return rho_prime_; }              // control-measure density
  double levy_const() const { return levy_const_; }            // 1/(Gamma(a) Gamma(2-a))
  double a_const() const { return a_const_; }                  // 2 sin(pi a/2) Gamma(a+1)/pi
  double theta_const() const { return theta_const_; }          // a(a-1)/Gamma(2-a)
  double tan_half() const { return tan_half_; }                // tan(pi a / 2), negative here
  double musigma_const() const { return musigma_const_; }      // sigma^a = b * this

  // m(r): limiting fraction of blocks surviving to reverse scaled time r.
  double survival_fraction(double r) const;

 private:
  double alpha_;
  double gamma_;
  double a_gamma_a_;
  double rho_prime_;
  double levy_const_;
  double a_const_;
  double theta_const_;
  double tan_half_;
  double musigma_const_;
};

struct SigmaBeta {
  double sigma;
  double beta;
};

// Scale and skewness of the stable integral of f against the random measure
// with the profile's control measure:
//   sigma_f = (rho' * int |f|^a)^{1/a},  beta_f = int |f|^a sgn f / int |f|^a.
SigmaBeta sigma_beta(const FunctionalSpec& f, const LimitProfile& profile);

// Moving-average kernel f(m(r)) m(r).
double kernel_g(const FunctionalSpec& f, const LimitProfile& profile, double r);

// int_{r_lo}^{r_hi} |kernel_g|^a dr, computed through the substitution
// x = m(r):  a(a-1)Gamma(a) * int_{m(r_hi)}^{m(r_lo)} |f(x)|^a dx.
double kernel_abs_alpha_integral(const FunctionalSpec& f, const LimitProfile& profile,
                                 double r_lo, double r_hi);

// int_0^R kernel_g(r) dr in closed form (power terms in r + aGamma(a),
// including the logarithmic exponent case).
double kernel_integral(const FunctionalSpec& f, const LimitProfile& profile, double upper);

}  // namespace ebc

#endif  // EBC_FUNCSPEC_HPP
