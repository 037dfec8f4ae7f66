#include "ebc/chain.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ebc {

namespace {

// Number of marked individuals in a uniform draw of `draws` from a
// population of size `total` containing `marked` marked ones; sequential
// conditional draws, O(draws).
std::int64_t hypergeometric(Rng& rng, std::int64_t total, std::int64_t marked,
                            std::int64_t draws) {
  std::int64_t hits = 0;
  for (std::int64_t d = 0; d < draws; ++d) {
    const double p = static_cast<double>(marked) / static_cast<double>(total - d);
    if (uniform01(rng) <= p) {
      ++hits;
      --marked;
    }
  }
  return hits;
}

}  // namespace

std::vector<std::int64_t> BlockPath::losses() const {
  std::vector<std::int64_t> out;
  out.reserve(blocks.size() - 1);
  for (std::size_t k = 0; k + 1 < blocks.size(); ++k) {
    out.push_back(blocks[k] - blocks[k + 1]);
  }
  return out;
}

BlockPath sample_block_path(const RatesContext& ctx, std::int64_t n, Rng& rng,
                            bool with_times, bool with_singletons) {
  if (n < 2) {
    throw std::domain_error("sample_block_path requires n >= 2, got " + std::to_string(n));
  }
  BlockPath path;
  path.n = n;
  path.blocks.reserve(static_cast<std::size_t>(n / 2 + 2));
  path.blocks.push_back(n);

  std::int64_t x = n;
  std::int64_t s = n;
  while (x > 1) {
    if (with_times) {
      path.holding_times.push_back(exponential(rng, ctx.total_rate(x)));
    }
    const std::int64_t lost = ctx.sample_merger_size(x, rng);
    if (with_singletons) {
      path.singletons.push_back(s);
      s -= hypergeometric(rng, x, s, lost + 1);
    }
    x -= lost;
    path.blocks.push_back(x);
  }
  return path;
}

std::int64_t functional_tau(const BlockPath& path) { return path.tau(); }

double functional_total_length(const BlockPath& path) {
  if (path.tau() > 0 && path.holding_times.empty()) {
    throw std::invalid_argument("total length requires a path sampled with holding times");
  }
  double total = 0.0;
  for (std::int64_t k = 0; k < path.tau(); ++k) {
    total += static_cast<double>(path.blocks[static_cast<std::size_t>(k)]) *
             path.holding_times[static_cast<std::size_t>(k)];
  }
  return total;
}

double functional_total_length_mean(const RatesContext& ctx, const BlockPath& path) {
  double total = 0.0;
  for (std::int64_t k = 0; k < path.tau(); ++k) {
    const std::int64_t x = path.blocks[static_cast<std::size_t>(k)];
    total += static_cast<double>(x) / ctx.total_rate(x);
  }
  return total;
}

double functional_total_length_power(const RatesContext& ctx, const BlockPath& path) {
  const double a = ctx.alpha();
  double total = 0.0;
  for (std::int64_t k = 0; k < path.tau(); ++k) {
    total += std::pow(static_cast<double>(path.blocks[static_cast<std::size_t>(k)]), 1.0 - a);
  }
  return a * std::tgamma(a) * total;
}

double functional_external_length(const BlockPath& path) {
  if (path.tau() > 0 && (path.holding_times.empty() || path.singletons.empty())) {
    throw std::invalid_argument(
        "external length requires a path sampled with holding times and singleton counts");
  }
  double total = 0.0;
  for (std::int64_t k = 0; k < path.tau(); ++k) {
    total += static_cast<double>(path.singletons[static_cast<std::size_t>(k)]) *
             path.holding_times[static_cast<std::size_t>(k)];
  }
  return total;
}

double functional_J(const BlockPath& path, const FunctionalSpec& f) {
  const double a = f.alpha();
  const double n = static_cast<double>(path.n);
  double sum = 0.0;
  if (f.is_constant()) {
    sum = f.eval(1.0) * static_cast<double>(path.tau());
  } else {
    for (std::int64_t k = 0; k < path.tau(); ++k) {
      sum += f.eval(static_cast<double>(path.blocks[static_cast<std::size_t>(k)]) / n);
    }
  }
  return std::pow(n, -1.0 / a) * (sum / (a - 1.0) - n * f.integral01());
}

std::int64_t hitting_index(const BlockPath& path, double a) {
  if (!(a > 0.0) || a > 1.0) {
    throw std::domain_error("hitting_index requires a in (0, 1]");
  }
  const double cutoff = a * static_cast<double>(path.n);
  for (std::size_t k = 0; k < path.blocks.size(); ++k) {
    if (static_cast<double>(path.blocks[k]) <= cutoff) {
      return static_cast<std::int64_t>(k);
    }
  }
  return path.tau();  // unreachable: X_tau = 1 <= a*n for any a in (0,1], n >= 1
}

std::int64_t block_count_at_time(const BlockPath& path, double r) {
  if (path.tau() > 0 && path.holding_times.empty()) {
    throw std::invalid_argument("block_count_at_time requires holding times");
  }
  double t = 0.0;
  for (std::int64_t k = 0; k < path.tau(); ++k) {
    t += path.holding_times[static_cast<std::size_t>(k)];
    if (t > r) {
      return path.blocks[static_cast<std::size_t>(k)];
    }
  }
  return 1;
}

}  // namespace ebc
