#include "ebc/rates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ebc {

namespace {

constexpr std::int64_t kQTableSize = 10000;
constexpr std::int64_t kEnvelopeCalibrationMaxJ = 2000;

double log_beta(double x, double y) {
  return std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y);
}

}  // namespace

RatesContext::RatesContext(Alpha alpha, std::int64_t max_blocks)
    : alpha_(alpha.value()), log_beta_norm_(log_beta(2.0 - alpha.value(), alpha.value())) {
  const double a = alpha_;

  // q-table: q_1 = a/2, then q_{i+1} = q_i (i+1-a)/(i+2).
  q_.resize(kQTableSize);
  q_cum_.resize(kQTableSize);
  long double q = a / 2.0L;
  long double cum = 0.0L;
  for (std::int64_t i = 1; i <= kQTableSize; ++i) {
    q_[i - 1] = static_cast<double>(q);
    cum += q;
    q_cum_[i - 1] = static_cast<double>(cum);
    q *= (static_cast<long double>(i) + 1.0L - a) / (static_cast<long double>(i) + 2.0L);
  }
  q_tail_mass_ = static_cast<double>(1.0L - cum);
  tail_floor_ = static_cast<double>(kQTableSize + 1);

  // lambda_b table via lambda_{b+1} = lambda_b + b * lambda_{b+1,2} with
  // lambda_{b+1,2} = lambda_{b,2} (b-2+a)/b; long double keeps the
  // accumulated relative error around 1e-15 even for b ~ 1e6.
  max_blocks = std::max<std::int64_t>(max_blocks, 2);
  rate_table_.resize(static_cast<std::size_t>(max_blocks - 1));
  long double lam = 1.0L;    // lambda_2
  long double lam2 = 1.0L;   // lambda_{2,2}
  rate_table_[0] = 1.0;
  for (std::int64_t b = 2; b < max_blocks; ++b) {
    lam2 *= (static_cast<long double>(b) - 2.0L + a) / static_cast<long double>(b);
    lam += static_cast<long double>(b) * lam2;
    rate_table_[static_cast<std::size_t>(b - 1)] = static_cast<double>(lam);
  }

  // Envelope: twice the worst ratio p_j(i)/proposal(i) over j <= 2000.  The
  // pmf rows are generated by the same ratio recursion used in
  // merger_size_pmf, so the calibration is exact up to rounding.
  double worst = 0.0;
  for (std::int64_t j = 2; j <= kEnvelopeCalibrationMaxJ; ++j) {
    const std::vector<double> pmf = merger_size_pmf(j);
    for (std::int64_t i = 1; i < j; ++i) {
      const double ratio = pmf[static_cast<std::size_t>(i - 1)] / proposal_prob(i);
      worst = std::max(worst, ratio);
    }
  }
  envelope_m_ = 2.0 * worst;
}

double RatesContext::merger_rate(std::int64_t b, std::int64_t k) const {
  if (b < 2 || k < 2 || k > b) {
    throw std::domain_error("merger_rate requires 2 <= k <= b, got b=" + std::to_string(b) +
                            " k=" + std::to_string(k));
  }
  const double a = alpha_;
  const double kk = static_cast<double>(k);
  const double bb = static_cast<double>(b);
  return std::exp(std::lgamma(kk - a) + std::lgamma(bb - kk + a) - std::lgamma(bb) -
                  log_beta_norm_);
}

double RatesContext::total_rate(std::int64_t b) const {
  if (b < 2) {
    throw std::domain_error("total_rate requires b >= 2, got " + std::to_string(b));
  }
  if (b - 1 <= static_cast<std::int64_t>(rate_table_.size())) {
    return rate_table_[static_cast<std::size_t>(b - 2)];
  }
  return total_rate_direct(b);
}

double RatesContext::total_rate_direct(std::int64_t b) const {
  if (b < 2) {
    throw std::domain_error("total_rate requires b >= 2, got " + std::to_string(b));
  }
  const double a = alpha_;
  const double bb = static_cast<double>(b);
  // term_k = C(b,k) lambda_{b,k}; start at k = b and walk down so the small
  // terms accumulate first.  term ratio:
  //   term_k / term_{k+1} = (k+1)(b-k-1+a) / ((b-k)(k-a)).
  long double term =
      std::exp(std::lgamma(bb - a) + std::lgamma(a) - std::lgamma(bb) - log_beta_norm_);
  long double sum = term;  // k = b contribution: C(b,b) lambda_{b,b}
  long double comp = 0.0L;
  for (std::int64_t k = b - 1; k >= 2; --k) {
    const long double kk = static_cast<long double>(k);
    term *= (kk + 1.0L) * (bb - kk - 1.0L + a) / ((bb - kk) * (kk - a));
    const long double y = term - comp;
    const long double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return static_cast<double>(sum);
}

std::vector<double> RatesContext::merger_size_pmf(std::int64_t j) const {
  if (j < 2) {
    throw std::domain_error("merger_size_pmf requires j >= 2, got " + std::to_string(j));
  }
  const double a = alpha_;
  const double jj = static_cast<double>(j);
  std::vector<double> pmf(static_cast<std::size_t>(j - 1));
  // t_i = C(j, i+1) lambda_{j,i+1}, built by the ratio
  //   t_{i+1}/t_i = (j-i-1)(i+1-a) / ((i+2)(j-i-2+a)),
  // then normalized by their own sum so the pmf sums to one exactly up to
  // rounding.
  long double t = std::exp(std::lgamma(jj + 1.0) - std::lgamma(3.0) - std::lgamma(jj - 1.0) +
                           std::lgamma(2.0 - a) + std::lgamma(jj - 2.0 + a) - std::lgamma(jj) -
                           log_beta_norm_);
  long double sum = 0.0L;
  std::vector<long double> terms(static_cast<std::size_t>(j - 1));
  for (std::int64_t i = 1; i < j; ++i) {
    terms[static_cast<std::size_t>(i - 1)] = t;
    sum += t;
    const long double ii = static_cast<long double>(i);
    t *= (jj - ii - 1.0L) * (ii + 1.0L - a) / ((ii + 2.0L) * (jj - ii - 2.0L + a));
  }
  for (std::size_t idx = 0; idx < terms.size(); ++idx) {
    pmf[idx] = static_cast<double>(terms[idx] / sum);
  }
  return pmf;
}

double RatesContext::merger_size_prob(std::int64_t j, std::int64_t i) const {
  if (j < 2 || i < 1 || i >= j) {
    throw std::domain_error("merger_size_prob requires j >= 2, 1 <= i < j");
  }
  const double a = alpha_;
  const double jj = static_cast<double>(j);
  const double ii = static_cast<double>(i);
  const double log_choose =
      std::lgamma(jj + 1.0) - std::lgamma(ii + 2.0) - std::lgamma(jj - ii);
  const double log_rate = std::lgamma(ii + 1.0 - a) + std::lgamma(jj - ii - 1.0 + a) -
                          std::lgamma(jj) - log_beta_norm_;
  return std::exp(log_choose + log_rate) / total_rate(j);
}

double RatesContext::limit_q(std::int64_t i) const {
  if (i < 1) {
    throw std::domain_error("limit_q requires i >= 1, got " + std::to_string(i));
  }
  if (i <= static_cast<std::int64_t>(q_.size())) {
    return q_[static_cast<std::size_t>(i - 1)];
  }
  const double a = alpha_;
  const double ii = static_cast<double>(i);
  return a / std::tgamma(2.0 - a) *
         std::exp(std::lgamma(ii + 1.0 - a) - std::lgamma(ii + 2.0));
}

double RatesContext::proposal_prob(std::int64_t i) const {
  if (i <= static_cast<std::int64_t>(q_.size())) {
    return q_[static_cast<std::size_t>(i - 1)];
  }
  // Discrete Pareto tail: P(I = i) proportional to i^{-a} - (i+1)^{-a},
  // scaled to carry the exact leftover q mass.
  const double ii = static_cast<double>(i);
  const double scale = q_tail_mass_ * std::pow(tail_floor_, alpha_);
  return scale * (std::pow(ii, -alpha_) - std::pow(ii + 1.0, -alpha_));
}

std::int64_t RatesContext::propose_merger_size(Rng& rng) const {
  const double u = uniform01(rng);
  if (u <= q_cum_.back()) {
    const auto it = std::lower_bound(q_cum_.begin(), q_cum_.end(), u);
    return static_cast<std::int64_t>(it - q_cum_.begin()) + 1;
  }
  // Tail: i = floor((imax+1) V^{-1/a}) >= imax+1.
  const double v = uniform01(rng);
  const double x = tail_floor_ * std::pow(v, -1.0 / alpha_);
  if (x >= 9.0e18) {  // absurd proposal, certain rejection
    return std::numeric_limits<std::int64_t>::max() / 4;
  }
  return static_cast<std::int64_t>(x);
}

std::int64_t RatesContext::sample_merger_size(std::int64_t j, Rng& rng) const {
  if (j < 2) {
    throw std::domain_error("sample_merger_size requires j >= 2, got " + std::to_string(j));
  }
  if (j == 2) {
    return 1;
  }
  const double lambda_j = total_rate(j);
  const double a = alpha_;
  const double jj = static_cast<double>(j);
  const double log_j_terms = std::lgamma(jj + 1.0) - std::lgamma(jj) - log_beta_norm_;
  for (;;) {
    const std::int64_t i = propose_merger_size(rng);
    if (i >= j) {
      continue;  // p_j(i) = 0 beyond j-1
    }
    const double ii = static_cast<double>(i);
    const double log_p = log_j_terms - std::lgamma(ii + 2.0) - std::lgamma(jj - ii) +
                         std::lgamma(ii + 1.0 - a) + std::lgamma(jj - ii - 1.0 + a);
    const double p = std::exp(log_p) / lambda_j;
    const double ratio = p / (envelope_m_ * proposal_prob(i));
    if (ratio > 1.0) {
      throw EnvelopeError("merger-size envelope violated: p_" + std::to_string(j) + "(" +
                          std::to_string(i) + ") exceeds M * proposal; enlarge M");
    }
    if (uniform01(rng) <= ratio) {
      return i;
    }
  }
}

}  // namespace ebc
