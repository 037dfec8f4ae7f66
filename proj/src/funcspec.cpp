#include "ebc/funcspec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ebc/quadrature.hpp"

namespace ebc {

namespace {

constexpr double kZetaMergeTol = 1e-12;
constexpr double kMembershipTol = 1e-12;

using Poly = std::vector<PowerTerm>;

Poly canonicalize(Poly terms) {
  std::sort(terms.begin(), terms.end(),
            [](const PowerTerm& a, const PowerTerm& b) { return a.zeta < b.zeta; });
  Poly out;
  for (const PowerTerm& t : terms) {
    if (!out.empty() && std::abs(out.back().zeta - t.zeta) <= kZetaMergeTol) {
      out.back().coef += t.coef;
    } else {
      out.push_back(t);
    }
  }
  double scale = 0.0;
  for (const PowerTerm& t : out) {
    scale = std::max(scale, std::abs(t.coef));
  }
  Poly pruned;
  for (const PowerTerm& t : out) {
    if (t.coef != 0.0 && std::abs(t.coef) > 1e-14 * scale) {
      pruned.push_back(t);
    }
  }
  return pruned;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out = a;
  out.insert(out.end(), b.begin(), b.end());
  return canonicalize(std::move(out));
}

Poly poly_neg(Poly a) {
  for (PowerTerm& t : a) {
    t.coef = -t.coef;
  }
  return a;
}

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly out;
  out.reserve(a.size() * b.size());
  for (const PowerTerm& ta : a) {
    for (const PowerTerm& tb : b) {
      out.push_back({ta.coef * tb.coef, ta.zeta + tb.zeta});
    }
  }
  return canonicalize(std::move(out));
}

bool poly_is_constant(const Poly& p) {
  return p.empty() || (p.size() == 1 && std::abs(p[0].zeta) <= kZetaMergeTol);
}

double poly_constant_value(const Poly& p) { return p.empty() ? 0.0 : p[0].coef; }

// --- recursive-descent parser over the grammar in the header ---

class Parser {
 public:
  Parser(std::string_view text, double alpha) : text_(text), alpha_(alpha) {}

  Poly run() {
    Poly p = expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError("unexpected trailing input", pos_);
    }
    return p;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Poly expr() {
    bool negate = false;
    skip_ws();
    if (consume('-')) {
      negate = true;
    } else {
      consume('+');
    }
    Poly acc = term();
    if (negate) {
      acc = poly_neg(std::move(acc));
    }
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        acc = poly_add(acc, term());
      } else if (c == '-') {
        ++pos_;
        acc = poly_add(acc, poly_neg(term()));
      } else {
        return acc;
      }
    }
  }

  Poly term() {
    Poly acc = power();
    for (;;) {
      if (consume('*')) {
        acc = poly_mul(acc, power());
      } else if (consume('/')) {
        const std::size_t pos = pos_;
        Poly divisor = power();
        if (!poly_is_constant(divisor) || poly_constant_value(divisor) == 0.0) {
          throw ParseError("divisor must be a nonzero constant expression", pos);
        }
        acc = poly_mul(acc, {{1.0 / poly_constant_value(divisor), 0.0}});
      } else {
        return acc;
      }
    }
  }

  Poly power() {
    const std::size_t base_pos = pos_;
    Poly base = atom();
    if (!consume('^')) {
      return base;
    }
    const std::size_t exp_pos = pos_;
    Poly exponent = atom();
    if (!poly_is_constant(exponent)) {
      throw ParseError("exponent must be a constant expression", exp_pos);
    }
    const double e = poly_constant_value(exponent);
    if (poly_is_constant(base)) {
      const double v = poly_constant_value(base);
      if (v < 0.0 && e != std::floor(e)) {
        throw ParseError("negative base with non-integer exponent", base_pos);
      }
      return {{std::pow(v, e), 0.0}};
    }
    if (base.size() == 1) {
      // c * x^{-z} raised to e: legal for any constant e.
      if (base[0].coef < 0.0 && e != std::floor(e)) {
        throw ParseError("negative coefficient under non-integer exponent", base_pos);
      }
      return {{std::pow(base[0].coef, e), base[0].zeta * e}};
    }
    if (e != std::floor(e) || e < 0.0 || e > 16.0) {
      throw ParseError("a sum may only be raised to a small nonnegative integer power",
                       exp_pos);
    }
    Poly acc{{1.0, 0.0}};
    for (int i = 0; i < static_cast<int>(e); ++i) {
      acc = poly_mul(acc, base);
    }
    return acc;
  }

  Poly atom() {
    skip_ws();
    if (pos_ >= text_.size()) {
      throw ParseError("unexpected end of input", pos_);
    }
    const char c = text_[pos_];
    if (c == '-') {
      ++pos_;
      return poly_neg(atom());
    }
    if (c == '+') {
      ++pos_;
      return atom();
    }
    if (c == '(') {
      ++pos_;
      Poly inner = expr();
      if (!consume(')')) {
        throw ParseError("expected ')'", pos_);
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return {{number(), 0.0}};
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "alpha") {
        return {{alpha_, 0.0}};
      }
      if (name == "x") {
        return {{1.0, -1.0}};
      }
      if (name == "gammafn") {
        if (!consume('(')) {
          throw ParseError("gammafn requires a parenthesized argument", pos_);
        }
        Poly arg = expr();
        if (!consume(')')) {
          throw ParseError("expected ')'", pos_);
        }
        if (!poly_is_constant(arg)) {
          throw ParseError("gammafn argument must be a constant expression", start);
        }
        return {{std::tgamma(poly_constant_value(arg)), 0.0}};
      }
      throw ParseError("unknown identifier '" + std::string(name) + "'", start);
    }
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  double number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    // scientific notation
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) {
        ++p;
      }
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          ++pos_;
        }
      }
    }
    try {
      return std::stod(std::string(text_.substr(start, pos_ - start)));
    } catch (const std::exception&) {
      throw ParseError("malformed number", start);
    }
  }

  std::string_view text_;
  double alpha_;
  std::size_t pos_ = 0;
};

void check_membership(const Poly& terms, double alpha) {
  const double bound = 1.0 / alpha;
  for (const PowerTerm& t : terms) {
    if (t.zeta >= bound - kMembershipTol) {
      throw MembershipError(t.zeta, bound);
    }
  }
}

}  // namespace

FunctionalSpec FunctionalSpec::parse(std::string_view text, Alpha alpha) {
  Poly terms = Parser(text, alpha.value()).run();
  return from_terms(std::move(terms), alpha);
}

FunctionalSpec FunctionalSpec::from_terms(std::vector<PowerTerm> terms, Alpha alpha) {
  Poly canon = canonicalize(std::move(terms));
  check_membership(canon, alpha.value());
  return FunctionalSpec(std::move(canon), alpha.value());
}

FunctionalSpec FunctionalSpec::constant(double value, Alpha alpha) {
  return from_terms({{value, 0.0}}, alpha);
}

FunctionalSpec FunctionalSpec::preset(std::string_view name, Alpha alpha) {
  const double a = alpha.value();
  const double ga = std::tgamma(a);
  if (name == "tau") {
    return constant(a - 1.0, alpha);
  }
  if (name == "length") {
    return from_terms({{a * (a - 1.0) * ga, a - 1.0}}, alpha);
  }
  if (name == "extlength") {
    return constant(a * (a - 1.0) * (2.0 - a) * ga, alpha);
  }
  if (name == "ratio-linearization") {
    const double c = (2.0 - a) * (2.0 - a);
    return from_terms({{c, a - 1.0}, {-c, 0.0}}, alpha);
  }
  throw std::invalid_argument("unknown functional preset '" + std::string(name) + "'");
}

std::vector<std::string> FunctionalSpec::preset_names() {
  return {"tau", "length", "extlength", "ratio-linearization"};
}

double FunctionalSpec::eval(double x) const {
  if (!(x > 0.0)) {
    throw std::domain_error("functional is defined on (0,1]; got x = " + std::to_string(x));
  }
  double v = 0.0;
  for (const PowerTerm& t : terms_) {
    v += (t.zeta == 0.0) ? t.coef : t.coef * std::pow(x, -t.zeta);
  }
  return v;
}

double FunctionalSpec::integral01() const { return integral(0.0, 1.0); }

double FunctionalSpec::integral(double lo, double hi) const {
  double v = 0.0;
  for (const PowerTerm& t : terms_) {
    const double p = 1.0 - t.zeta;  // > 0 since zeta < 1/alpha < 1
    const double upper = std::pow(hi, p);
    const double lower = (lo == 0.0) ? 0.0 : std::pow(lo, p);
    v += t.coef * (upper - lower) / p;
  }
  return v;
}

double FunctionalSpec::max_zeta() const {
  return terms_.empty() ? 0.0 : terms_.back().zeta;
}

bool FunctionalSpec::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].zeta == 0.0);
}

std::string FunctionalSpec::to_string() const {
  if (terms_.empty()) {
    return "0";
  }
  std::ostringstream os;
  bool first = true;
  for (const PowerTerm& t : terms_) {
    if (!first) {
      os << (t.coef >= 0.0 ? " + " : " - ");
    } else if (t.coef < 0.0) {
      os << "-";
    }
    os << std::abs(t.coef);
    if (t.zeta != 0.0) {
      os << "*x^" << -t.zeta;
    }
    first = false;
  }
  return os.str();
}

std::vector<double> FunctionalSpec::sign_change_points() const {
  std::vector<double> roots;
  if (terms_.size() < 2) {
    return roots;
  }
  // Multiply by x^{zeta_max}: h(x) = sum c_j x^{zeta_max - zeta_j} is
  // continuous on [0,1] with h(0+) = coef of the leading term, and has the
  // sign of f on (0,1).
  const double zmax = terms_.back().zeta;
  const auto h = [&](double x) {
    double v = 0.0;
    for (const PowerTerm& t : terms_) {
      const double e = zmax - t.zeta;
      v += (e == 0.0) ? t.coef : t.coef * std::pow(x, e);
    }
    return v;
  };
  constexpr int kGrid = 4096;
  double prev_x = 1e-14;
  double prev_v = h(prev_x);
  for (int i = 1; i <= kGrid; ++i) {
    const double x = std::pow(10.0, -14.0 * (1.0 - static_cast<double>(i) / kGrid));
    const double v = h(x);
    if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
      double a = prev_x;
      double b = x;
      double fa = prev_v;
      for (int it = 0; it < 100; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = h(m);
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_v = v;
  }
  return roots;
}

namespace {

// integral over [lo, hi] of |f|^alpha, assuming f has constant sign there.
// A power substitution x = u^kappa absorbs the singularity at 0.
double piece_abs_alpha(const FunctionalSpec& f, double lo, double hi) {
  const double alpha = f.alpha();
  const double zplus = std::max(f.max_zeta(), 0.0);
  const double kappa = (zplus > 0.0) ? 1.0 / (1.0 - alpha * zplus) : 1.0;
  const auto integrand = [&](double u) {
    const double x = std::pow(u, kappa);
    if (x <= 0.0) {
      return 0.0;
    }
    return std::pow(std::abs(f.eval(x)), alpha) * kappa * std::pow(u, kappa - 1.0);
  };
  const double ulo = std::pow(lo, 1.0 / kappa);
  const double uhi = std::pow(hi, 1.0 / kappa);
  return integrate(integrand, ulo, uhi, 1e-11, 1e-15);
}

}  // namespace

double FunctionalSpec::abs_alpha_integral(double lo, double hi) const {
  if (terms_.empty() || lo >= hi) {
    return 0.0;
  }
  if (terms_.size() == 1) {
    const double p = 1.0 - alpha_ * terms_[0].zeta;  // > 0 by membership
    const double upper = std::pow(hi, p);
    const double lower = (lo == 0.0) ? 0.0 : std::pow(lo, p);
    return std::pow(std::abs(terms_[0].coef), alpha_) * (upper - lower) / p;
  }
  std::vector<double> cuts{lo};
  for (double r : sign_change_points()) {
    if (r > lo && r < hi) {
      cuts.push_back(r);
    }
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += piece_abs_alpha(*this, cuts[i], cuts[i + 1]);
  }
  return total;
}

double FunctionalSpec::signed_alpha_integral(double lo, double hi) const {
  if (terms_.empty() || lo >= hi) {
    return 0.0;
  }
  if (terms_.size() == 1) {
    const double mag = abs_alpha_integral(lo, hi);
    return terms_[0].coef >= 0.0 ? mag : -mag;
  }
  std::vector<double> cuts{lo};
  for (double r : sign_change_points()) {
    if (r > lo && r < hi) {
      cuts.push_back(r);
    }
  }
  cuts.push_back(hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double mid = (cuts[i] == 0.0) ? 0.5 * cuts[i + 1]
                                        : std::sqrt(cuts[i] * cuts[i + 1]);
    const double sign = eval(mid) >= 0.0 ? 1.0 : -1.0;
    total += sign * piece_abs_alpha(*this, cuts[i], cuts[i + 1]);
  }
  return total;
}

LimitProfile::LimitProfile(Alpha alpha) : alpha_(alpha.value()) {
  const double a = alpha_;
  const double pi = std::numbers::pi;
  const double sin_half = std::sin(pi * a / 2.0);
  gamma_ = 1.0 / (a - 1.0);
  a_gamma_a_ = a * std::tgamma(a);
  rho_prime_ = pi * (a - 1.0) / (2.0 * sin_half * std::tgamma(a) * std::tgamma(2.0 - a));
  levy_const_ = 1.0 / (std::tgamma(a) * std::tgamma(2.0 - a));
  a_const_ = 2.0 * sin_half * std::tgamma(a + 1.0) / pi;
  theta_const_ = a * (a - 1.0) / std::tgamma(2.0 - a);
  tan_half_ = std::tan(pi * a / 2.0);
  musigma_const_ = pi / (2.0 * sin_half * std::tgamma(a + 1.0));
}

double LimitProfile::survival_fraction(double r) const {
  if (r < 0.0) {
    throw std::domain_error("survival fraction requires r >= 0");
  }
  return std::pow(a_gamma_a_ / (r + a_gamma_a_), 1.0 / (alpha_ - 1.0));
}

SigmaBeta sigma_beta(const FunctionalSpec& f, const LimitProfile& profile) {
  const double abs_int = f.abs_alpha_integral();
  if (abs_int == 0.0) {
    return {0.0, 0.0};
  }
  const double sigma = std::pow(profile.rho_prime() * abs_int, 1.0 / f.alpha());
  const double beta = f.signed_alpha_integral() / abs_int;
  return {sigma, beta};
}

double kernel_g(const FunctionalSpec& f, const LimitProfile& profile, double r) {
  const double m = profile.survival_fraction(r);
  return f.eval(m) * m;
}

double kernel_abs_alpha_integral(const FunctionalSpec& f, const LimitProfile& profile,
                                 double r_lo, double r_hi) {
  const double a = profile.alpha();
  const double x_hi = profile.survival_fraction(r_lo);
  const double x_lo = std::isinf(r_hi) ? 0.0 : profile.survival_fraction(r_hi);
  return a * (a - 1.0) * std::tgamma(a) * f.abs_alpha_integral(x_lo, x_hi);
}

double kernel_integral(const FunctionalSpec& f, const LimitProfile& profile, double upper) {
  const double a = profile.alpha();
  const double A = profile.alpha_gamma_alpha();
  double total = 0.0;
  for (const PowerTerm& t : f.terms()) {
    // m(r)^{1-zeta} = (A/(r+A))^{e} with e = (1-zeta)/(a-1) > 0.
    const double e = (1.0 - t.zeta) / (a - 1.0);
    double piece;
    if (std::isinf(upper)) {
      if (e <= 1.0 + 1e-12) {
        return std::numeric_limits<double>::infinity();
      }
      piece = A / (e - 1.0);
    } else if (std::abs(e - 1.0) < 1e-9) {
      piece = A * std::log((upper + A) / A);
    } else {
      piece = std::pow(A, e) * (std::pow(upper + A, 1.0 - e) - std::pow(A, 1.0 - e)) /
              (1.0 - e);
    }
    total += t.coef * piece;
  }
  return total;
}

}  // namespace ebc
