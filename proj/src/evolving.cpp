#include "ebc/evolving.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

namespace ebc {

namespace {

constexpr double kChunkTargetEvents = 32768.0;
constexpr char kMagic[4] = {'E', 'B', 'C', 'L'};
constexpr std::uint32_t kFormatVersion = 1;

template <typename T>
void write_raw(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) {
    throw CorruptLogError("event log truncated mid-field");
  }
  return v;
}

}  // namespace

EventLog::EventLog(const RatesContext& ctx, std::int64_t n, std::uint64_t seed)
    : ctx_(&ctx), n_(n), alpha_(ctx.alpha()), seed_(seed) {
  if (n < 2) {
    throw std::domain_error("EventLog requires n >= 2");
  }
  rate_ = ctx.total_rate(n);
  chunk_len_ = kChunkTargetEvents / rate_;
  // P(k) = C(n,k) lambda_{n,k} / lambda_n is the loss pmf shifted by one.
  const std::vector<double> pmf = ctx.merger_size_pmf(n);
  size_cum_.resize(pmf.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    cum += pmf[i];
    size_cum_[i] = cum;
  }
  size_cum_.back() = 1.0;
  // Default reverse-depth cap, far beyond the MRCA scale n^{1-a} a Gamma(a).
  depth_cap_ = 1e4 * std::pow(static_cast<double>(n), 1.0 - alpha_) *
               alpha_ * std::tgamma(alpha_);
  // The final phases with O(1) blocks last O(1) evolutionary time, so never
  // cap below a fixed constant.
  depth_cap_ = std::max(depth_cap_, 1e4);
}

std::int64_t EventLog::sample_size(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::lower_bound(size_cum_.begin(), size_cum_.end(), u);
  return static_cast<std::int64_t>(it - size_cum_.begin()) + 2;
}

void EventLog::generate_chunk(std::int64_t id, Chunk& out) const {
  Rng rng = make_rng(seed_, static_cast<std::uint64_t>(id + (1LL << 62)));
  const double lo = static_cast<double>(id) * chunk_len_;
  const double hi = lo + chunk_len_;
  const std::int64_t count = poisson(rng, rate_ * chunk_len_);
  out.times.resize(static_cast<std::size_t>(count));
  for (auto& t : out.times) {
    t = uniform_real(rng, lo, hi);
  }
  std::sort(out.times.begin(), out.times.end());
  for (std::size_t i = 1; i < out.times.size(); ++i) {
    if (out.times[i] == out.times[i - 1]) {
      throw std::runtime_error("tied event times in chunk generation");
    }
  }
  out.parents.resize(out.times.size());
  out.offsets.assign(1, 0);
  out.offsets.reserve(out.times.size() + 1);
  out.participants.clear();
  out.participants.reserve(out.times.size() * 3);
  std::vector<std::uint32_t> subset;
  for (std::size_t e = 0; e < out.times.size(); ++e) {
    const std::int64_t k = sample_size(rng);
    subset.clear();
    if (k >= n_) {
      subset.resize(static_cast<std::size_t>(n_));
      for (std::int64_t i = 0; i < n_; ++i) {
        subset[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(i + 1);
      }
    } else if (k <= 64) {
      // Floyd's subset sampling with an insertion-sorted vector.
      for (std::int64_t j = n_ - k + 1; j <= n_; ++j) {
        const std::uint32_t t = static_cast<std::uint32_t>(uniform_index(rng, j) + 1);
        auto pos = std::lower_bound(subset.begin(), subset.end(), t);
        if (pos != subset.end() && *pos == t) {
          const std::uint32_t jj = static_cast<std::uint32_t>(j);
          subset.insert(std::lower_bound(subset.begin(), subset.end(), jj), jj);
        } else {
          subset.insert(pos, t);
        }
      }
    } else {
      std::unordered_set<std::uint32_t> seen;
      for (std::int64_t j = n_ - k + 1; j <= n_; ++j) {
        const std::uint32_t t = static_cast<std::uint32_t>(uniform_index(rng, j) + 1);
        if (!seen.insert(t).second) {
          seen.insert(static_cast<std::uint32_t>(j));
        }
      }
      subset.assign(seen.begin(), seen.end());
      std::sort(subset.begin(), subset.end());
    }
    out.parents[e] = subset[static_cast<std::size_t>(
        uniform_index(rng, static_cast<std::int64_t>(subset.size())))];
    out.participants.insert(out.participants.end(), subset.begin(), subset.end());
    out.offsets.push_back(static_cast<std::uint32_t>(out.participants.size()));
  }
}

const EventLog::Chunk& EventLog::chunk(std::int64_t id) {
  auto it = cache_.find(id);
  if (it != cache_.end()) {
    return it->second;
  }
  if (cache_.size() >= cache_budget_chunks_) {
    // Drop the oldest cached chunk; regeneration is deterministic.
    cache_.erase(cache_order_.front());
    cache_order_.erase(cache_order_.begin());
  }
  Chunk c;
  generate_chunk(id, c);
  cache_order_.push_back(id);
  return cache_.emplace(id, std::move(c)).first->second;
}

void EventLog::extend(double t_lo_new, double t_hi_new) {
  if (t_lo_new > t_lo_ || t_hi_new < t_hi_) {
    throw std::invalid_argument("extend must grow the window");
  }
  t_lo_ = t_lo_new;
  t_hi_ = t_hi_new;
}

void EventLog::visit_events(double from, double to,
                            const std::function<void(const PopulationEvent&)>& fn) {
  from = std::max(from, t_lo_);
  to = std::min(to, t_hi_);
  if (from >= to) {
    return;
  }
  PopulationEvent ev;
  for (std::int64_t id = chunk_of(from); id <= chunk_of(to); ++id) {
    const Chunk& c = chunk(id);
    for (std::size_t e = 0; e < c.times.size(); ++e) {
      if (c.times[e] < from || c.times[e] >= to) {
        continue;
      }
      ev.time = c.times[e];
      ev.parent = c.parents[e];
      ev.participants.assign(c.participants.begin() + c.offsets[e],
                             c.participants.begin() + c.offsets[e + 1]);
      fn(ev);
    }
  }
}

std::vector<PopulationEvent> EventLog::events() {
  std::vector<PopulationEvent> out;
  visit_events(t_lo_, t_hi_, [&](const PopulationEvent& ev) { out.push_back(ev); });
  return out;
}

std::size_t EventLog::event_count() {
  std::size_t count = 0;
  visit_events(t_lo_, t_hi_, [&](const PopulationEvent&) { ++count; });
  return count;
}

namespace {

// Ancestral-class state shared by log extraction and persisted replay.
struct ClassWalker {
  struct Cls {
    std::uint32_t label;
    std::uint32_t leaves;
    std::uint32_t leaf_id;  // valid iff leaves == 1
  };

  explicit ClassWalker(std::int64_t n, double t_query) : query(t_query) {
    classes.reserve(static_cast<std::size_t>(n));
    idx_of_label.assign(static_cast<std::size_t>(n) + 1, -1);
    for (std::int64_t i = 1; i <= n; ++i) {
      classes.push_back({static_cast<std::uint32_t>(i), 1, static_cast<std::uint32_t>(i)});
      idx_of_label[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(i - 1);
    }
    alive = n;
    singleton_count = n;
    trace.query_time = t_query;
    trace.path.n = n;
    trace.path.blocks.push_back(n);
    trace.external_end_depths.assign(static_cast<std::size_t>(n), 0.0);
  }

  // Applies one event at time t <= query; returns true when one class remains.
  bool apply(double t, std::uint32_t parent, const std::uint32_t* part, std::size_t k) {
    matched.clear();
    for (std::size_t i = 0; i < k; ++i) {
      const std::int64_t ci = idx_of_label[part[i]];
      if (ci >= 0) {
        matched.push_back(ci);
      }
    }
    if (matched.empty()) {
      return false;
    }
    if (matched.size() == 1) {
      Cls& c = classes[static_cast<std::size_t>(matched[0])];
      idx_of_label[c.label] = -1;
      c.label = parent;
      idx_of_label[parent] = matched[0];
      return false;
    }
    const double depth = query - t;
    trace.path.singletons.push_back(singleton_count);
    trace.path.holding_times.push_back(depth - last_depth);
    last_depth = depth;
    Cls& keep = classes[static_cast<std::size_t>(matched[0])];
    std::uint32_t leaves = 0;
    for (const std::int64_t ci : matched) {
      Cls& c = classes[static_cast<std::size_t>(ci)];
      leaves += c.leaves;
      if (c.leaves == 1) {
        trace.external_end_depths[c.leaf_id - 1] = depth;
        --singleton_count;
      }
      idx_of_label[c.label] = -1;
    }
    keep.label = parent;
    keep.leaves = leaves;
    idx_of_label[parent] = matched[0];
    alive -= static_cast<std::int64_t>(matched.size()) - 1;
    trace.merger_depths.push_back(depth);
    trace.path.blocks.push_back(alive);
    return alive == 1;
  }

  double query;
  std::vector<Cls> classes;
  std::vector<std::int64_t> idx_of_label;
  std::vector<std::int64_t> matched;
  std::int64_t alive = 0;
  std::int64_t singleton_count = 0;
  double last_depth = 0.0;
  GenealogyTrace trace;
};

}  // namespace

GenealogyTrace EventLog::extract(double t_query, double max_depth, bool allow_partial) {
  if (t_query > t_hi_) {
    throw std::invalid_argument("query time lies above the generated window");
  }
  ClassWalker walker(n_, t_query);
  if (walker.alive == 1) {
    walker.trace.complete = true;
    return walker.trace;
  }
  const double cap = std::min(max_depth, depth_cap_);
  bool done = false;
  double floor_t = t_query - cap;
  std::int64_t id = chunk_of(t_query);
  const std::int64_t id_floor = chunk_of(floor_t);
  for (; id >= id_floor && !done; --id) {
    if (static_cast<double>(id) * chunk_len_ < t_lo_) {
      // Grow the window downward in doubling steps so repeated extractions
      // touch each chunk boundary pattern identically.
      double new_lo = std::min(t_lo_, t_query);
      double span = std::max(chunk_len_, t_query - new_lo);
      while (static_cast<double>(id) * chunk_len_ < new_lo) {
        new_lo -= span;
        span *= 2.0;
      }
      extend(new_lo, t_hi_);
    }
    const Chunk& c = chunk(id);
    for (std::size_t e = c.times.size(); e-- > 0;) {
      const double t = c.times[e];
      if (t > t_query) {
        continue;
      }
      if (t < floor_t) {
        break;
      }
      done = walker.apply(t, c.parents[e], c.participants.data() + c.offsets[e],
                          c.offsets[e + 1] - c.offsets[e]);
      if (done) {
        break;
      }
    }
  }
  walker.trace.complete = done;
  if (!done && !allow_partial) {
    throw DepthCapError("MRCA not reached within depth cap " + std::to_string(cap) +
                        "; " + std::to_string(walker.alive) + " classes remain");
  }
  return walker.trace;
}

std::int64_t block_count_at_depth(const GenealogyTrace& trace, double r) {
  std::size_t mergers = 0;
  while (mergers < trace.merger_depths.size() && trace.merger_depths[mergers] <= r) {
    ++mergers;
  }
  return trace.path.blocks[mergers];
}

GenealogyTrace extract_tree(EventLog& log, double t_query) {
  return log.extract(t_query, std::numeric_limits<double>::infinity(), false);
}

GenealogyTrace extract_partial(EventLog& log, double t_query, double max_depth) {
  return log.extract(t_query, max_depth, true);
}

std::vector<double> functional_series(EventLog& log, const std::vector<double>& scaled_times,
                                      const FunctionalSpec& f) {
  if (scaled_times.empty()) {
    throw std::invalid_argument("functional_series requires at least one time");
  }
  const double time_scale = std::pow(static_cast<double>(log.n()), 1.0 - log.alpha());
  std::vector<double> out;
  out.reserve(scaled_times.size());
  // Walk the latest query first so the shared deep chunks stay cached.
  std::vector<std::size_t> order(scaled_times.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scaled_times[a] > scaled_times[b];
  });
  out.assign(scaled_times.size(), 0.0);
  for (const std::size_t i : order) {
    const double t = time_scale * scaled_times[i];
    if (t > log.t_hi()) {
      log.extend(log.t_lo(), t);
    }
    const GenealogyTrace trace = extract_tree(log, t);
    out[i] = functional_J(trace.path, f);
  }
  return out;
}

void write_event_log(EventLog& log, std::ostream& os) {
  os.write(kMagic, 4);
  write_raw(os, kFormatVersion);
  write_raw(os, static_cast<std::uint32_t>(log.n()));
  write_raw(os, log.alpha());
  write_raw(os, log.seed());
  write_raw(os, log.t_lo());
  write_raw(os, log.t_hi());
  write_raw(os, static_cast<std::uint64_t>(log.event_count()));
  log.visit_events(log.t_lo(), log.t_hi(), [&](const PopulationEvent& ev) {
    write_raw(os, ev.time);
    write_raw(os, static_cast<std::uint32_t>(ev.participants.size()));
    write_raw(os, ev.parent);
    for (const std::uint32_t p : ev.participants) {
      write_raw(os, p);
    }
  });
}

void write_event_log_json(EventLog& log, std::ostream& os) {
  nlohmann::json j;
  j["magic"] = "EBCL";
  j["version"] = kFormatVersion;
  j["n"] = log.n();
  j["alpha"] = log.alpha();
  j["seed"] = log.seed();
  j["window"] = {log.t_lo(), log.t_hi()};
  nlohmann::json events = nlohmann::json::array();
  log.visit_events(log.t_lo(), log.t_hi(), [&](const PopulationEvent& ev) {
    events.push_back({{"t", ev.time}, {"parent", ev.parent}, {"participants", ev.participants}});
  });
  j["events"] = std::move(events);
  os << j.dump(2) << '\n';
}

PersistedLog PersistedLog::read(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw CorruptLogError("bad magic; not an event-log file");
  }
  const auto version = read_raw<std::uint32_t>(is);
  if (version != kFormatVersion) {
    throw CorruptLogError("unsupported event-log version " + std::to_string(version));
  }
  PersistedLog log;
  log.n_ = read_raw<std::uint32_t>(is);
  log.alpha_ = read_raw<double>(is);
  log.seed_ = read_raw<std::uint64_t>(is);
  log.t_lo_ = read_raw<double>(is);
  log.t_hi_ = read_raw<double>(is);
  const auto count = read_raw<std::uint64_t>(is);
  log.events_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PopulationEvent ev;
    ev.time = read_raw<double>(is);
    const auto k = read_raw<std::uint32_t>(is);
    ev.parent = read_raw<std::uint32_t>(is);
    if (k < 2 || k > static_cast<std::uint32_t>(log.n_)) {
      throw CorruptLogError("corrupt participant count " + std::to_string(k));
    }
    ev.participants.resize(k);
    for (auto& p : ev.participants) {
      p = read_raw<std::uint32_t>(is);
    }
    log.events_.push_back(std::move(ev));
  }
  is.peek();
  if (!is.eof()) {
    throw CorruptLogError("trailing bytes after the declared event count");
  }
  return log;
}

PersistedLog PersistedLog::read_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptLogError(std::string("bad JSON event log: ") + e.what());
  }
  if (j.value("magic", "") != "EBCL" || j.value("version", 0u) != kFormatVersion) {
    throw CorruptLogError("bad JSON event-log header");
  }
  PersistedLog log;
  log.n_ = j.at("n").get<std::int64_t>();
  log.alpha_ = j.at("alpha").get<double>();
  log.seed_ = j.at("seed").get<std::uint64_t>();
  log.t_lo_ = j.at("window").at(0).get<double>();
  log.t_hi_ = j.at("window").at(1).get<double>();
  for (const auto& ev : j.at("events")) {
    PopulationEvent e;
    e.time = ev.at("t").get<double>();
    e.parent = ev.at("parent").get<std::uint32_t>();
    e.participants = ev.at("participants").get<std::vector<std::uint32_t>>();
    log.events_.push_back(std::move(e));
  }
  return log;
}

GenealogyTrace PersistedLog::extract(double t_query) const {
  if (t_query < t_lo_ || t_query > t_hi_) {
    throw std::out_of_range("query time outside the persisted window; re-run the "
                            "simulation to extend");
  }
  ClassWalker walker(n_, t_query);
  bool done = walker.alive == 1;
  for (auto it = events_.rbegin(); it != events_.rend() && !done; ++it) {
    if (it->time > t_query) {
      continue;
    }
    done = walker.apply(it->time, it->parent, it->participants.data(),
                        it->participants.size());
  }
  if (!done) {
    throw std::out_of_range("persisted window too shallow: MRCA not reached");
  }
  walker.trace.complete = true;
  return walker.trace;
}

}  // namespace ebc
