// process.hpp: sequential, parallel and uniform IDLA simulators.
//
// Particle 0 settles at the origin before anything moves. Particle i draws its
// walk from rng::child(seed, i), so two processes run with the same seed share
// per-particle randomness. Scheduling (uniform process) and clock times use the
// reserved streams in rng.hpp.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "idla/block.hpp"
#include "idla/graph.hpp"
#include "idla/rng.hpp"
#include "idla/types.hpp"

namespace idla {

enum class Process { sequential, parallel, uniform };
enum class TimeModel { discrete, continuous };

inline std::string_view process_name(Process p) {
  switch (p) {
    case Process::sequential:
      return "seq";
    case Process::parallel:
      return "par";
    case Process::uniform:
      return "unif";
  }
  return "?";
}

inline Process process_from_name(std::string_view s) {
  if (s == "seq" || s == "sequential") return Process::sequential;
  if (s == "par" || s == "parallel") return Process::parallel;
  if (s == "unif" || s == "uniform") return Process::uniform;
  throw ParameterError("unknown process '" + std::string(s) + "' (expected seq, par or unif)");
}

/// What a settle rule sees when a particle stands on a vacant vertex.
struct SettleContext {
  std::size_t particle = 0;
  Vertex vertex = 0;
  Steps elapsed = 0;  // moves made by this particle so far, including this one
  const std::vector<char>* occupied = nullptr;
};

/// Decides whether a particle on a vacant vertex settles. A rule always settles
/// once the particle has made `cap` moves, which guarantees termination.
class SettleRule {
 public:
  using Predicate = std::function<bool(const SettleContext&)>;

  /// Settle at the first vacant vertex.
  static SettleRule first_vacant() {
    SettleRule r;
    r.name_ = "first_vacant";
    return r;
  }

  static SettleRule custom(std::string name, Predicate pred, Steps cap) {
    if (!pred) throw ConfigError("settle rule '" + name + "' has no predicate");
    if (cap == std::numeric_limits<Steps>::max())
      throw ConfigError("settle rule '" + name + "' needs a finite step cap to guarantee termination");
    SettleRule r;
    r.name_ = std::move(name);
    r.pred_ = std::move(pred);
    r.cap_ = cap;
    return r;
  }

  /// Keep walking past vacant vertices until `cap` moves, except at `target`.
  static SettleRule least_action(Vertex target, Steps cap) {
    return custom(
        "least_action", [target](const SettleContext& c) { return c.vertex == target; }, cap);
  }

  /// least_action with cap ceil(3 n ln n) aimed at the graph's "hair_tip".
  static SettleRule least_action(const Graph& g) {
    const auto tip = g.landmark("hair_tip");
    if (!tip) throw ConfigError("least_action rule needs a graph with a 'hair_tip' landmark");
    const double n = static_cast<double>(g.size());
    return least_action(*tip, static_cast<Steps>(std::ceil(3.0 * n * std::log(n))));
  }

  bool is_default() const noexcept { return !pred_; }
  const std::string& name() const noexcept { return name_; }
  Steps cap() const noexcept { return cap_; }

  /// Caller guarantees the vertex is vacant.
  bool settles(const SettleContext& c) const {
    if (!pred_) return true;
    return c.elapsed >= cap_ || pred_(c);
  }

 private:
  SettleRule() = default;

  std::string name_;
  Predicate pred_;
  Steps cap_ = std::numeric_limits<Steps>::max();
};

struct RunConfig {
  Process process = Process::sequential;
  bool lazy = false;
  TimeModel time_model = TimeModel::discrete;
  SettleRule settle_rule = SettleRule::first_vacant();
  /// Parallel conflict priority: particles earlier in the order win. Lowest
  /// index when absent.
  std::optional<RowOrder> priority;
  /// Report the first step with fewer than 2^k - 1 vertices left unsettled.
  std::optional<std::size_t> partial_k;
  /// Keep the block (and timing array, order sequence) of the run.
  bool record_block = true;
};

struct DispersionResult {
  /// Max particle steps (sequential, parallel), last settle step (discrete
  /// uniform) or last settle clock time (continuous).
  double dispersion_time = 0.0;
  Steps total_length = 0;
  Steps max_steps = 0;
  std::vector<Steps> per_particle_steps;
  std::vector<Vertex> settle_order;
  std::uint64_t seed = 0;
  std::optional<double> partial_time;
};

struct Run {
  Block block;
  std::optional<TimingArray> timing;
  DispersionResult result;
  /// Particle chosen at each step of a discrete uniform run.
  std::vector<std::size_t> order_sequence;
};

namespace detail {

inline void check_run(const Graph& g, Vertex origin, const RunConfig& cfg) {
  if (origin >= g.size())
    throw DomainError("origin " + std::to_string(origin) + " outside 0.." + std::to_string(g.size() - 1));
  if (cfg.time_model == TimeModel::continuous && cfg.process == Process::parallel)
    throw ConfigError("parallel IDLA is discrete-time; use the uniform process for continuous time");
  if (cfg.priority) {
    if (cfg.process != Process::parallel) throw ConfigError("a priority order only applies to the parallel process");
    try {
      check_order(*cfg.priority, g.size());
    } catch (const ParameterError& e) {
      throw ConfigError(std::string("priority: ") + e.what());
    }
  }
  require_connected(g);
}

struct RunState {
  std::size_t n;
  std::vector<char> occupied;
  std::vector<Vertex> position;
  Run run;

  RunState(const Graph& g, Vertex origin, const RunConfig& cfg, std::uint64_t seed)
      : n(g.size()), occupied(g.size(), 0), position(g.size(), origin) {
    occupied[origin] = 1;
    run.result.seed = seed;
    run.result.per_particle_steps.assign(n, 0);
    run.result.settle_order.reserve(n);
    run.result.settle_order.push_back(origin);
    run.block.origin = origin;
    if (cfg.record_block) run.block.rows.assign(n, std::vector<Vertex>{origin});
  }

  void finish() {
    auto& r = run.result;
    for (Steps s : r.per_particle_steps) {
      r.total_length += s;
      r.max_steps = std::max(r.max_steps, s);
    }
  }
};

inline std::size_t partial_threshold(std::size_t k) {
  return k >= 63 ? std::numeric_limits<std::size_t>::max() : (std::size_t{1} << k) - 1;
}

}  // namespace detail

inline Run run_sequential(const Graph& g, Vertex origin, const RunConfig& cfg, std::uint64_t seed) {
  detail::check_run(g, origin, cfg);
  detail::RunState st(g, origin, cfg, seed);
  const bool continuous = cfg.time_model == TimeModel::continuous;
  auto clock = rng::child(seed, rng::kClockStream);
  double longest = 0.0;

  for (std::size_t i = 1; i < st.n; ++i) {
    auto eng = rng::child(seed, i);
    Vertex at = origin;
    Steps steps = 0;
    double elapsed = 0.0;
    std::vector<Vertex>* row = cfg.record_block ? &st.run.block.rows[i] : nullptr;
    for (;;) {
      at = walk_step(g, at, eng, cfg.lazy);
      ++steps;
      if (continuous) elapsed += rng::exponential(clock);
      if (row) row->push_back(at);
      if (!st.occupied[at] && cfg.settle_rule.settles({i, at, steps, &st.occupied})) break;
    }
    st.occupied[at] = 1;
    st.run.result.settle_order.push_back(at);
    st.run.result.per_particle_steps[i] = steps;
    longest = std::max(longest, continuous ? elapsed : static_cast<double>(steps));
  }
  st.finish();
  st.run.result.dispersion_time = longest;
  return std::move(st.run);
}

inline Run run_parallel(const Graph& g, Vertex origin, const RunConfig& cfg, std::uint64_t seed) {
  detail::check_run(g, origin, cfg);
  detail::RunState st(g, origin, cfg, seed);
  auto& res = st.run.result;
  const RowOrder order = cfg.priority ? *cfg.priority : identity_order(st.n);

  std::vector<rng::Engine> engines;
  engines.reserve(st.n);
  for (std::size_t i = 0; i < st.n; ++i) engines.push_back(rng::child(seed, i));

  // Active particles, kept in priority order.
  std::vector<std::size_t> active(order.begin() + 1, order.end());
  std::size_t unsettled = st.n - 1;
  const std::size_t threshold = cfg.partial_k ? detail::partial_threshold(*cfg.partial_k) : 0;
  if (cfg.partial_k && unsettled < threshold) res.partial_time = 0.0;

  Steps round = 0;
  while (!active.empty()) {
    ++round;
    for (std::size_t i : active) {
      st.position[i] = walk_step(g, st.position[i], engines[i], cfg.lazy);
      if (cfg.record_block) st.run.block.rows[i].push_back(st.position[i]);
    }
    std::size_t kept = 0;
    for (std::size_t i : active) {
      const Vertex at = st.position[i];
      if (!st.occupied[at] && cfg.settle_rule.settles({i, at, round, &st.occupied})) {
        st.occupied[at] = 1;
        res.settle_order.push_back(at);
        res.per_particle_steps[i] = round;
        --unsettled;
      } else {
        active[kept++] = i;
      }
    }
    active.resize(kept);
    if (cfg.partial_k && !res.partial_time && unsettled < threshold) res.partial_time = static_cast<double>(round);
  }
  st.finish();
  res.dispersion_time = static_cast<double>(round);
  return std::move(st.run);
}

/// Uniform IDLA. Discrete: at step t a particle R_t uniform on 1..n-1 moves if
/// it is unsettled. Continuous: every unsettled particle carries a rate-1 clock.
inline Run run_uniform(const Graph& g, Vertex origin, const RunConfig& cfg, std::uint64_t seed) {
  detail::check_run(g, origin, cfg);
  detail::RunState st(g, origin, cfg, seed);
  auto& res = st.run.result;
  const bool continuous = cfg.time_model == TimeModel::continuous;

  std::vector<rng::Engine> engines;
  engines.reserve(st.n);
  for (std::size_t i = 0; i < st.n; ++i) engines.push_back(rng::child(seed, i));
  auto sched = rng::child(seed, rng::kSchedulerStream);
  auto clock = rng::child(seed, rng::kClockStream);

  if (cfg.record_block) st.run.timing = TimingArray{std::vector<std::vector<double>>(st.n, {0.0})};
  std::vector<char> settled(st.n, 0);
  settled[0] = 1;
  std::vector<std::size_t> active;
  for (std::size_t i = 1; i < st.n; ++i) active.push_back(i);
  std::vector<std::size_t> slot(st.n, 0);
  for (std::size_t k = 0; k < active.size(); ++k) slot[active[k]] = k;

  std::size_t unsettled = st.n - 1;
  const std::size_t threshold = cfg.partial_k ? detail::partial_threshold(*cfg.partial_k) : 0;
  if (cfg.partial_k && unsettled < threshold) res.partial_time = 0.0;

  Steps t = 0;
  double now = 0.0;
  while (unsettled > 0) {
    std::size_t i = 0;
    if (continuous) {
      now += rng::exponential(clock, static_cast<double>(active.size()));
      i = active[rng::below(sched, active.size())];
    } else {
      ++t;
      i = 1 + rng::below(sched, st.n - 1);
      if (cfg.record_block) st.run.order_sequence.push_back(i);
      now = static_cast<double>(t);
      if (settled[i]) continue;
    }
    const Vertex at = walk_step(g, st.position[i], engines[i], cfg.lazy);
    st.position[i] = at;
    const Steps moves = ++res.per_particle_steps[i];
    if (cfg.record_block) {
      st.run.block.rows[i].push_back(at);
      st.run.timing->times[i].push_back(now);
    }
    if (!st.occupied[at] && cfg.settle_rule.settles({i, at, moves, &st.occupied})) {
      st.occupied[at] = 1;
      settled[i] = 1;
      res.settle_order.push_back(at);
      --unsettled;
      // Swap-remove from the active list.
      const std::size_t k = slot[i];
      active[k] = active.back();
      slot[active[k]] = k;
      active.pop_back();
      if (cfg.partial_k && !res.partial_time && unsettled < threshold) res.partial_time = now;
    }
  }
  st.finish();
  res.dispersion_time = now;
  return std::move(st.run);
}

inline Run run(const Graph& g, Vertex origin, const RunConfig& cfg, std::uint64_t seed) {
  switch (cfg.process) {
    case Process::sequential:
      return run_sequential(g, origin, cfg, seed);
    case Process::parallel:
      return run_parallel(g, origin, cfg, seed);
    case Process::uniform:
      return run_uniform(g, origin, cfg, seed);
  }
  throw ConfigError("unknown process");
}

/// Same engine as `run`, with the settle decision taken from `rule`.
inline Run run_with_rule(const Graph& g, Vertex origin, const SettleRule& rule, RunConfig cfg, std::uint64_t seed) {
  cfg.settle_rule = rule;
  return run(g, origin, cfg, seed);
}

}  // namespace idla
