#ifndef EBC_RATES_HPP
#define EBC_RATES_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ebc/alpha.hpp"
#include "ebc/rng.hpp"

namespace ebc {

// Thrown when a proposed merger size violates the rejection envelope
// p_j(i) <= M * proposal(i).  Signals a miscalibrated envelope constant and
// is never swallowed.
class EnvelopeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Transition rates and merger-size laws of the Beta(2-a, a) n-coalescent.
//
// When b blocks are present, each k-tuple merges at rate
//   lambda_{b,k} = B(k-a, b-k+a) / B(2-a, a),
// and the total merger rate is lambda_b = sum_k C(b,k) lambda_{b,k}.
// The number of blocks lost in a merger from j blocks has pmf
//   p_j(i) = C(j, i+1) lambda_{j,i+1} / lambda_j,  1 <= i <= j-1,
// which converges as j -> infinity to
//   q_i = a Gamma(i+1-a) / (Gamma(2-a) Gamma(i+2)).
//
// Immutable after construction; safe to share across threads.  Samplers take
// the caller's generator.
class RatesContext {
 public:
  // max_blocks sizes the cached lambda_b table.  total_rate(b) for
  // b > max_blocks falls back to direct summation (exact but O(b) per call),
  // so pass the largest n you intend to simulate.
  explicit RatesContext(Alpha alpha, std::int64_t max_blocks = 4096);

  double alpha() const { return alpha_; }
  std::int64_t max_blocks() const { return static_cast<std::int64_t>(rate_table_.size()) + 1; }

  // lambda_{b,k}; log-gamma evaluation, O(1).
  double merger_rate(std::int64_t b, std::int64_t k) const;

  // lambda_b.  Cached table lookup for b <= max_blocks, otherwise
  // total_rate_direct.
  double total_rate(std::int64_t b) const;

  // lambda_b summed term by term from k = b downward (smallest terms first)
  // with compensated accumulation; O(b).  Kept as an independent route for
  // cross-checks against the recursion-built table.
  double total_rate_direct(std::int64_t b) const;

  // p_j(i) for i = 1..j-1.
  std::vector<double> merger_size_pmf(std::int64_t j) const;

  // Single pmf entry p_j(i); O(1) via log-gamma.
  double merger_size_prob(std::int64_t j, std::int64_t i) const;

  // q_i.
  double limit_q(std::int64_t i) const;

  // Exact draw from merger_size_pmf(j): proposes from the q-table (inversion
  // for i <= q_table_size, discrete Pareto tail beyond) and accepts with
  // probability p_j(i) / (M * proposal(i)).  Throws EnvelopeError if that
  // ratio ever exceeds 1.
  std::int64_t sample_merger_size(std::int64_t j, Rng& rng) const;

  double envelope_constant() const { return envelope_m_; }
  std::int64_t q_table_size() const { return static_cast<std::int64_t>(q_.size()); }

  // Proposal pmf of the merger-size sampler (q_i below the cutoff, discrete
  // Pareto above); exposed for envelope diagnostics.
  double proposal_prob(std::int64_t i) const;

 private:
  std::int64_t propose_merger_size(Rng& rng) const;

  double alpha_;
  double log_beta_norm_;            // log B(2-a, a)
  std::vector<double> q_;           // q_1..q_imax
  std::vector<double> q_cum_;       // cumulative sums of q_
  double q_tail_mass_;              // 1 - sum(q_), exact
  double tail_floor_;               // (imax + 1) for the Pareto tail proposal
  double envelope_m_;
  std::vector<double> rate_table_;  // lambda_2..lambda_maxblocks
};

}  // namespace ebc

#endif  // EBC_RATES_HPP
