#ifndef EBC_EVOLVING_HPP
#define EBC_EVOLVING_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebc/chain.hpp"
#include "ebc/funcspec.hpp"
#include "ebc/rates.hpp"
#include "ebc/rng.hpp"

namespace ebc {

class CorruptLogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DepthCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One effective reproduction event: the individuals in `participants` all
// descend from `parent` after the event, so their lineages coalesce at
// `time` when the genealogy is read backward.
struct PopulationEvent {
  double time;
  std::uint32_t parent;
  std::vector<std::uint32_t> participants;  // sorted, size >= 2, contains parent
};

// The genealogy read backward from one query time: effective merger depths,
// the induced block-counting path (holding times are gaps between effective
// mergers) and the reverse-time depth at which each of the n external
// branches ends.
struct GenealogyTrace {
  double query_time = 0.0;
  BlockPath path;
  std::vector<double> merger_depths;        // r_1 < r_2 < ... for each merger
  std::vector<double> external_end_depths;  // indexed by leaf label - 1
  bool complete = true;                     // false for depth-capped partial traces
};

// Poisson construction of the evolving population of size n.  Effective
// events arrive at rate lambda_n; each event draws its participant count k
// from C(n,k) lambda_{n,k} / lambda_n, then a uniform k-subset of labels and
// a uniform parent among them.
//
// Events are generated per fixed time chunk from a substream seeded by
// (seed, chunk index), so the realized process is independent of the order
// in which the window is extended.  Generated chunks are cached up to a
// budget and regenerated on demand; extraction below the current window
// extends it lazily.
class EventLog {
 public:
  EventLog(const RatesContext& ctx, std::int64_t n, std::uint64_t seed);

  std::int64_t n() const { return n_; }
  double alpha() const { return alpha_; }
  std::uint64_t seed() const { return seed_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  double event_rate() const { return rate_; }
  double depth_cap() const { return depth_cap_; }
  void set_depth_cap(double cap) { depth_cap_ = cap; }

  // Grow the window; shrinking is an error.  Events on the added intervals
  // follow the same homogeneous construction.
  void extend(double t_lo_new, double t_hi_new);

  // Events with time in [t_lo, t_hi), in increasing time order.
  std::vector<PopulationEvent> events();
  std::size_t event_count();

  // Ascending visit of events in [from, to) within the current window.
  void visit_events(double from, double to,
                    const std::function<void(const PopulationEvent&)>& fn);

  friend GenealogyTrace extract_tree(EventLog& log, double t_query);
  friend GenealogyTrace extract_partial(EventLog& log, double t_query, double max_depth);

 private:
  struct Chunk {
    std::vector<double> times;
    std::vector<std::uint32_t> parents;
    std::vector<std::uint32_t> offsets;  // participant ranges, size N+1
    std::vector<std::uint32_t> participants;
  };

  const Chunk& chunk(std::int64_t id);
  void generate_chunk(std::int64_t id, Chunk& out) const;
  std::int64_t chunk_of(double t) const { return static_cast<std::int64_t>(std::floor(t / chunk_len_)); }
  std::int64_t sample_size(Rng& rng) const;

  GenealogyTrace extract(double t_query, double max_depth, bool allow_partial);

  const RatesContext* ctx_;
  std::int64_t n_;
  double alpha_;
  std::uint64_t seed_;
  double rate_;            // lambda_n
  double chunk_len_;
  double t_lo_ = 0.0;
  double t_hi_ = 0.0;
  double depth_cap_;
  std::vector<double> size_cum_;  // cumulative pmf of k over {2..n}
  std::map<std::int64_t, Chunk> cache_;
  std::vector<std::int64_t> cache_order_;
  std::size_t cache_budget_chunks_ = 64;
};

// Block count of the traced coalescent at reverse depth r from the query.
std::int64_t block_count_at_depth(const GenealogyTrace& trace, double r);

// Genealogy at t_query (must be <= t_hi); the window is extended backward
// as needed until the most recent common ancestor is found.  Throws
// DepthCapError if the configured depth cap is exceeded first.
GenealogyTrace extract_tree(EventLog& log, double t_query);

// Depth-limited variant: walks at most max_depth below t_query and returns a
// partial trace (complete = false if more than one class remains).
GenealogyTrace extract_partial(EventLog& log, double t_query, double max_depth);

// J_{n,s_j}(f) evaluated on the trees extracted at t_j = n^{1-a} s_j, all
// times sharing this log's realization.
std::vector<double> functional_series(EventLog& log, const std::vector<double>& scaled_times,
                                      const FunctionalSpec& f);

// Binary persistence: header (magic "EBCL", version, n, alpha, seed, window,
// event count), then per event: time f64, k u32, parent u32, participants
// k x u32; all little-endian.  A JSON mirror is provided for small logs.
void write_event_log(EventLog& log, std::ostream& os);
void write_event_log_json(EventLog& log, std::ostream& os);

// Replayable snapshot of a persisted log: extraction only, no extension.
class PersistedLog {
 public:
  static PersistedLog read(std::istream& is);
  static PersistedLog read_json(std::istream& is);

  std::int64_t n() const { return n_; }
  double alpha() const { return alpha_; }
  std::uint64_t seed() const { return seed_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }
  const std::vector<PopulationEvent>& events() const { return events_; }

  // Re-extracts the genealogy at t_query from the stored events.  Throws
  // std::out_of_range if t_query is outside the persisted window or if the
  // stored depth does not reach the MRCA.
  GenealogyTrace extract(double t_query) const;

 private:
  std::int64_t n_ = 0;
  double alpha_ = 0.0;
  std::uint64_t seed_ = 0;
  double t_lo_ = 0.0;
  double t_hi_ = 0.0;
  std::vector<PopulationEvent> events_;
};

}  // namespace ebc

#endif  // EBC_EVOLVING_HPP
