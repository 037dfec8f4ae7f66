#ifndef EBC_CHAIN_HPP
#define EBC_CHAIN_HPP

#include <cstdint>
#include <vector>

#include "ebc/funcspec.hpp"
#include "ebc/rates.hpp"
#include "ebc/rng.hpp"

namespace ebc {

// One realization of the block-counting process of the beta n-coalescent:
// blocks X_0 = n > X_1 > ... > X_tau = 1, optional holding times between
// consecutive mergers (reverse-time gaps) and optional counts of singleton
// (external) lineages just before each merger.
struct BlockPath {
  std::int64_t n = 0;
  std::vector<std::int64_t> blocks;
  std::vector<double> holding_times;    // size tau when requested, else empty
  std::vector<std::int64_t> singletons; // size tau when requested, else empty

  std::int64_t tau() const { return static_cast<std::int64_t>(blocks.size()) - 1; }
  std::int64_t loss(std::int64_t k) const {
    return blocks[static_cast<std::size_t>(k)] - blocks[static_cast<std::size_t>(k) + 1];
  }
  std::vector<std::int64_t> losses() const;
  bool has_times() const { return !holding_times.empty() || blocks.size() == 1; }
  bool has_singletons() const { return !singletons.empty() || blocks.size() == 1; }
};

// Direct simulation of the block-counting chain.  Holding times are
// exponential with rate lambda_{X_k}; when singletons are tracked, the
// number of singleton lineages taking part in a merger of Y_k + 1 lineages
// out of X_k is hypergeometric by exchangeability.
BlockPath sample_block_path(const RatesContext& ctx, std::int64_t n, Rng& rng,
                            bool with_times = false, bool with_singletons = false);

// Number of mergers tau_n.
std::int64_t functional_tau(const BlockPath& path);

// Total branch length sum_k X_k (R_{k+1} - R_k); requires holding times.
double functional_total_length(const BlockPath& path);

// Conditional mean of the total length given the block sequence:
// sum_k X_k / lambda_{X_k}.
double functional_total_length_mean(const RatesContext& ctx, const BlockPath& path);

// Power-law approximation a Gamma(a) sum_k X_k^{1-a}.
double functional_total_length_power(const RatesContext& ctx, const BlockPath& path);

// External branch length sum_k s_k (R_{k+1} - R_k); requires holding times
// and singleton counts.
double functional_external_length(const BlockPath& path);

// J_n(f) = n^{-1/a} ( (a-1)^{-1} sum_{k<tau} f(X_k/n) - n int_0^1 f ).
double functional_J(const BlockPath& path, const FunctionalSpec& f);

// First k with X_k <= a*n.
std::int64_t hitting_index(const BlockPath& path, double a);

// Block count of the path at reverse time r (requires holding times):
// N(r) = X_k for the last merger time R_k <= r.
std::int64_t block_count_at_time(const BlockPath& path, double r);

}  // namespace ebc

#endif  // EBC_CHAIN_HPP
