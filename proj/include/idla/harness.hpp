// harness.hpp: seeded Monte Carlo experiments.
//
// Trial t of an experiment with master seed s runs with seed rng::derive(s, t).
// Results are stored by trial index and reduced in index order, so output does
// not depend on the number of worker threads.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "idla/block.hpp"
#include "idla/bounds.hpp"
#include "idla/graph.hpp"
#include "idla/process.hpp"
#include "idla/rng.hpp"
#include "idla/stats.hpp"
#include "idla/walkstats.hpp"

namespace idla::harness {

using stats::Estimate;

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// out[i] = fn(i) for i in [0, count), spread over worker threads.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, unsigned threads, Fn&& fn) {
  std::vector<T> out(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  return out;
}

struct EstimateOptions {
  std::vector<double> levels{0.5, 0.9, 0.99};
  unsigned threads = 0;
  bool keep_values = false;
};

/// Dispersion times of independent seeded runs.
inline std::vector<double> dispersion_samples(const Graph& g, Vertex origin, RunConfig cfg, std::size_t trials,
                                              std::uint64_t seed, unsigned threads = 0) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  cfg.record_block = false;
  return parallel_map<double>(trials, threads, [&](std::size_t t) {
    return run(g, origin, cfg, rng::derive(seed, t)).result.dispersion_time;
  });
}

inline Estimate estimate_dispersion(const Graph& g, Vertex origin, const RunConfig& cfg, std::size_t trials,
                                    std::uint64_t seed, const EstimateOptions& opts = {}) {
  return stats::summarize(dispersion_samples(g, origin, cfg, trials, seed, opts.threads), opts.levels, seed,
                          opts.keep_values);
}

inline Estimate estimate_dispersion(const GraphSpec& spec, Vertex origin, const RunConfig& cfg, std::size_t trials,
                                    std::uint64_t seed, const EstimateOptions& opts = {}) {
  return estimate_dispersion(generate(spec), origin, cfg, trials, seed, opts);
}

/// Documented origin set per family, used to approximate the worst-case origin.
inline std::vector<std::string> origin_set(Family f) {
  switch (f) {
    case Family::star:
      return {"center", "leaf"};
    case Family::binary_tree:
      return {"root", "leaf"};
    case Family::path:
      return {"end"};
    case Family::lollipop:
      return {"clique"};
    case Family::clique_with_hair:
    case Family::clique_hair_on_pimple:
      return {"hair_base"};
    case Family::tree_with_path:
      return {"root"};
    case Family::torus:
    case Family::grid:
      return {"center"};
    default:
      return {"0"};
  }
}

struct SweepEstimate {
  std::string origin;
  Estimate estimate;
};

/// Estimates every origin of `origins` (each with its own derived seed) and
/// keeps the one with the largest mean.
inline SweepEstimate estimate_worst_origin(const Graph& g, const std::vector<std::string>& origins,
                                           const RunConfig& cfg, std::size_t trials, std::uint64_t seed,
                                           const EstimateOptions& opts = {}) {
  SweepEstimate best;
  bool first = true;
  for (std::size_t k = 0; k < origins.size(); ++k) {
    const Vertex v = resolve_vertex(g, origins[k]);
    auto e = estimate_dispersion(g, v, cfg, trials, rng::derive(seed, k), opts);
    if (first || e.mean > best.estimate.mean) {
      best = {origins[k], std::move(e)};
      first = false;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Dominance coupling

struct QuantileCheck {
  double level = 0.0;
  double seq = 0.0;
  double par = 0.0;
  double compared_level = 0.0;  // sequential level the parallel quantile must reach
  bool pass = true;
};

struct DominanceReport {
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t shrunk_max_row = 0;   // stp decreased the longest row
  std::size_t changed_length = 0;   // stp changed the total length
  std::size_t invalid_output = 0;   // stp output not a valid parallel block
  std::optional<std::uint64_t> first_bad_seed;
  Estimate seq;
  Estimate par;
  std::vector<QuantileCheck> quantiles;

  bool coupling_pass() const { return shrunk_max_row == 0 && changed_length == 0 && invalid_output == 0; }
  bool quantile_pass() const {
    return std::all_of(quantiles.begin(), quantiles.end(), [](const QuantileCheck& q) { return q.pass; });
  }
  bool pass() const { return coupling_pass() && quantile_pass(); }
};

/// Maps sequential runs through stp and checks the coupling properties, then
/// compares quantiles of independent sequential and parallel pools with a DKW
/// slack at overall confidence 99%.
inline DominanceReport dominance_experiment(const Graph& g, Vertex origin, std::size_t trials, std::uint64_t seed,
                                            unsigned threads = 0, std::size_t par_trials = 0) {
  if (trials < 1) throw ParameterError("trials must be >= 1");
  if (par_trials == 0) par_trials = trials;
  DominanceReport rep;
  rep.trials = trials;
  rep.seed = seed;
  const std::uint64_t seq_seed = rng::derive(seed, 0), par_seed = rng::derive(seed, 1);

  struct Outcome {
    double dispersion = 0.0;
    bool shrunk = false, changed = false, invalid = false;
  };
  RunConfig cfg;
  const auto outcomes = parallel_map<Outcome>(trials, threads, [&](std::size_t t) {
    Outcome o;
    const auto r = run_sequential(g, origin, cfg, rng::derive(seq_seed, t));
    o.dispersion = r.result.dispersion_time;
    const auto before = block_stats(r.block);
    try {
      const Block p = stp(r.block);
      const auto after = block_stats(p);
      o.shrunk = after.max_row_length < before.max_row_length;
      o.changed = after.total_length != before.total_length;
      o.invalid = !check_validity(p, g, BlockKind::parallel).ok(BlockKind::parallel);
    } catch (const Error&) {
      o.invalid = true;
    }
    return o;
  });
  std::vector<double> seq_values;
  seq_values.reserve(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& o = outcomes[t];
    seq_values.push_back(o.dispersion);
    rep.shrunk_max_row += o.shrunk;
    rep.changed_length += o.changed;
    rep.invalid_output += o.invalid;
    if ((o.shrunk || o.changed || o.invalid) && !rep.first_bad_seed) rep.first_bad_seed = rng::derive(seq_seed, t);
  }

  RunConfig pcfg;
  pcfg.process = Process::parallel;
  const auto par_values = dispersion_samples(g, origin, pcfg, par_trials, par_seed, threads);
  const std::vector<double> levels{0.1, 0.25, 0.5, 0.75, 0.9};
  rep.seq = stats::summarize(seq_values, levels, seq_seed);
  rep.par = stats::summarize(par_values, levels, par_seed);

  // Each empirical CDF lies in its DKW band with probability 0.995.
  const double slack = stats::dkw_epsilon(trials, 0.005) + stats::dkw_epsilon(par_trials, 0.005);
  std::sort(seq_values.begin(), seq_values.end());
  for (double p : levels) {
    QuantileCheck q;
    q.level = p;
    q.compared_level = std::max(0.0, p - slack);
    q.par = *rep.par.quantile(p);
    q.seq = stats::quantile_sorted(seq_values, q.compared_level);
    q.pass = q.par >= q.seq;
    rep.quantiles.push_back(q);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Bijection oracle

struct BijectionRow {
  std::size_t m = 0;
  std::size_t seq_count = 0;
  std::size_t par_count = 0;
  bool stp_injective = true;
  bool stp_into_par = true;
  bool pts_injective = true;
  bool pts_into_seq = true;
  bool roundtrip = true;

  bool pass() const {
    return seq_count == par_count && stp_injective && stp_into_par && pts_injective && pts_into_seq && roundtrip;
  }
};

struct BijectionReport {
  std::vector<BijectionRow> rows;
  std::optional<Block> counterexample;

  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const BijectionRow& r) { return r.pass(); });
  }
};

inline BijectionReport bijection_experiment(const Graph& g, Vertex origin, std::size_t m_max,
                                            const EnumerationCap& cap = {}) {
  BijectionReport rep;
  auto injective = [](std::vector<Block> images) {
    std::sort(images.begin(), images.end());
    return std::adjacent_find(images.begin(), images.end()) == images.end();
  };
  for (std::size_t m = 0; m <= m_max; ++m) {
    BijectionRow row;
    row.m = m;
    const auto seqs = enumerate_blocks(g, origin, m, BlockKind::sequential, cap);
    const auto pars = enumerate_blocks(g, origin, m, BlockKind::parallel, cap);
    row.seq_count = seqs.size();
    row.par_count = pars.size();

    std::vector<Block> images;
    for (const auto& L : seqs) {
      Block P = stp(L);
      if (!std::binary_search(pars.begin(), pars.end(), P)) {
        row.stp_into_par = false;
        if (!rep.counterexample) rep.counterexample = L;
      }
      if (pts(P) != L) {
        row.roundtrip = false;
        if (!rep.counterexample) rep.counterexample = L;
      }
      images.push_back(std::move(P));
    }
    row.stp_injective = injective(images);

    images.clear();
    for (const auto& P : pars) {
      Block S = pts(P);
      if (!std::binary_search(seqs.begin(), seqs.end(), S)) {
        row.pts_into_seq = false;
        if (!rep.counterexample) rep.counterexample = P;
      }
      images.push_back(std::move(S));
    }
    row.pts_injective = injective(images);
    rep.rows.push_back(row);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Ratios between process variants

struct RatioOptions {
  bool lazy_seq = true;   // lazy-seq / seq
  bool lazy_par = true;   // lazy-par / par
  bool ctu_par = true;    // ctu / par
  bool par_seq = true;    // par / seq
  unsigned threads = 0;
};

struct NamedRatio {
  std::string name;
  stats::Ratio ratio;
};

struct RatioReport {
  std::map<std::string, Estimate> pools;
  std::vector<NamedRatio> ratios;

  std::optional<stats::Ratio> ratio(std::string_view name) const {
    for (const auto& r : ratios)
      if (r.name == name) return r.ratio;
    return std::nullopt;
  }
};

/// Independent pools (each with its own derived seed) for seq, lazy seq, par,
/// lazy par and continuous uniform, as required by the selected ratios.
inline RatioReport ratio_experiment(const Graph& g, Vertex origin, std::size_t trials, std::uint64_t seed,
                                    const RatioOptions& opts = {}) {
  struct Pool {
    std::string name;
    Process process;
    bool lazy;
    TimeModel time;
    std::uint64_t stream;
  };
  const Pool all[] = {
      {"seq", Process::sequential, false, TimeModel::discrete, 0},
      {"lazy_seq", Process::sequential, true, TimeModel::discrete, 1},
      {"par", Process::parallel, false, TimeModel::discrete, 2},
      {"lazy_par", Process::parallel, true, TimeModel::discrete, 3},
      {"ctu", Process::uniform, false, TimeModel::continuous, 4},
  };
  std::map<std::string, bool> need;
  need["seq"] = opts.lazy_seq || opts.par_seq;
  need["lazy_seq"] = opts.lazy_seq;
  need["par"] = opts.lazy_par || opts.ctu_par || opts.par_seq;
  need["lazy_par"] = opts.lazy_par;
  need["ctu"] = opts.ctu_par;

  RatioReport rep;
  EstimateOptions eo;
  eo.threads = opts.threads;
  for (const auto& p : all) {
    if (!need[p.name]) continue;
    RunConfig cfg;
    cfg.process = p.process;
    cfg.lazy = p.lazy;
    cfg.time_model = p.time;
    rep.pools[p.name] = estimate_dispersion(g, origin, cfg, trials, rng::derive(seed, p.stream), eo);
  }
  auto add = [&](bool on, const std::string& name, const std::string& num, const std::string& den) {
    if (on) rep.ratios.push_back({name, stats::ratio_of_means(rep.pools.at(num), rep.pools.at(den))});
  };
  add(opts.lazy_seq, "lazy_seq/seq", "lazy_seq", "seq");
  add(opts.lazy_par, "lazy_par/par", "lazy_par", "par");
  add(opts.ctu_par, "ctu/par", "ctu", "par");
  add(opts.par_seq, "par/seq", "par", "seq");
  return rep;
}

// ---------------------------------------------------------------------------
// Multiple walks hitting a set

/// First time any of j independent lazy walks started from pi reaches S.
inline Estimate multiwalk_set_hitting_mc(const Graph& g, std::size_t j, const std::vector<Vertex>& S,
                                         std::size_t trials, std::uint64_t seed, unsigned threads = 0) {
  if (S.empty()) throw DomainError("target set S must be nonempty");
  if (j < 1) throw ParameterError("need at least one walk");
  if (trials < 1) throw ParameterError("trials must be >= 1");
  require_connected(g);
  std::vector<char> target(g.size(), 0);
  for (Vertex v : S) {
    if (v >= g.size()) throw DomainError("target vertex out of range");
    target[v] = 1;
  }
  const auto pi = walk::stationary(g);
  const auto values = parallel_map<double>(trials, threads, [&](std::size_t t) {
    auto eng = rng::child(seed, t);
    std::discrete_distribution<std::size_t> start(pi.begin(), pi.end());
    std::vector<Vertex> pos(j);
    for (auto& p : pos) {
      p = static_cast<Vertex>(start(eng));
      if (target[p]) return 0.0;
    }
    for (Steps step = 1;; ++step) {
      for (auto& p : pos) {
        p = walk_step(g, p, eng, true);
        if (target[p]) return static_cast<double>(step);
      }
    }
  });
  return stats::summarize(values, {0.5, 0.9, 0.99}, seed);
}

// ---------------------------------------------------------------------------
// Upper-bound tail

struct TailReport {
  double threshold = 0.0;
  std::size_t trials = 0;
  std::size_t exceed = 0;
  double fraction = 0.0;
  double allowed = 0.0;  // 1/n^2 + 3 binomial sigmas

  bool pass() const { return fraction <= allowed; }
};

/// Fraction of parallel runs above 6 t_hit log2 n.
inline TailReport basic_tail_experiment(const Graph& g, Vertex origin, std::size_t trials, std::uint64_t seed,
                                        unsigned threads = 0) {
  TailReport rep;
  rep.threshold = bounds::basic_upper(g);
  rep.trials = trials;
  RunConfig cfg;
  cfg.process = Process::parallel;
  const auto values = dispersion_samples(g, origin, cfg, trials, seed, threads);
  for (double v : values) rep.exceed += v > rep.threshold;
  rep.fraction = static_cast<double>(rep.exceed) / static_cast<double>(trials);
  const double n = static_cast<double>(g.size());
  const double p = 1.0 / (n * n);
  rep.allowed = p + 3.0 * stats::binomial_sigma(p, trials);
  return rep;
}

// ---------------------------------------------------------------------------
// Non-concentration

struct ConcentrationReport {
  Estimate estimate;
  double below_mean_fifth = 0.0;     // fraction of runs < mean / 5
  double above_four_median = 0.0;    // fraction of runs > 4 * median
  double fraction_threshold = 0.25;

  bool non_concentrated() const {
    return below_mean_fifth >= fraction_threshold || above_four_median >= fraction_threshold;
  }
};

inline ConcentrationReport concentration_experiment(const Graph& g, Vertex origin, const RunConfig& cfg,
                                                    std::size_t trials, std::uint64_t seed,
                                                    double fraction_threshold = 0.25, unsigned threads = 0) {
  ConcentrationReport rep;
  rep.fraction_threshold = fraction_threshold;
  const auto values = dispersion_samples(g, origin, cfg, trials, seed, threads);
  rep.estimate = stats::summarize(values, {0.5, 0.9, 0.99}, seed);
  const double median = *rep.estimate.quantile(0.5);
  std::size_t low = 0, high = 0;
  for (double v : values) {
    low += v < rep.estimate.mean / 5.0;
    high += v > 4.0 * median;
  }
  rep.below_mean_fifth = static_cast<double>(low) / static_cast<double>(trials);
  rep.above_four_median = static_cast<double>(high) / static_cast<double>(trials);
  return rep;
}

// ---------------------------------------------------------------------------
// Growth table

/// Table row family tokens: the generator families plus "expander" (connected
/// G(n, p) with p = min(1, 4 ln n / n)) and "torus2", "torus3", "grid2",
/// "grid3" (n must be a perfect square or cube).
inline GraphSpec spec_for_size(const std::string& family, std::size_t n, std::uint64_t seed = 1) {
  GraphSpec s;
  s.n = n;
  auto lattice = [&](Family f, std::size_t d) {
    const auto side = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
    std::size_t check = 1;
    for (std::size_t i = 0; i < d; ++i) check *= side;
    if (check != n) throw ParameterError(family + " needs n to be a perfect " + (d == 2 ? "square" : "cube"));
    s.family = f;
    s.dim = d;
    s.side = side;
  };
  if (family == "expander") {
    s.family = Family::gnp;
    s.p = std::min(1.0, 4.0 * std::log(static_cast<double>(n)) / static_cast<double>(n));
    s.seed = seed;
  } else if (family == "torus2") {
    lattice(Family::torus, 2);
  } else if (family == "torus3") {
    lattice(Family::torus, 3);
  } else if (family == "grid2") {
    lattice(Family::grid, 2);
  } else if (family == "grid3") {
    lattice(Family::grid, 3);
  } else {
    const auto f = family_from_name(family);
    if (!f || *f == Family::custom) throw ParameterError("unsupported table family '" + family + "'");
    s.family = *f;
  }
  return s;
}

struct Growth {
  std::string name;
  std::function<double(double)> g;
};

inline Growth growth_for(const std::string& family) {
  if (family == "cycle" || family == "path")
    return {"n^2 ln n", [](double n) { return n * n * std::log(n); }};
  if (family == "binary_tree") return {"n ln^2 n", [](double n) { return n * std::log(n) * std::log(n); }};
  if (family == "torus2" || family == "grid2") return {"n ln n", [](double n) { return n * std::log(n); }};
  return {"n", [](double n) { return n; }};
}

struct TableOptions {
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  bool exact_columns = true;
  std::size_t exact_cap = 512;  // largest n for the exact t_hit / t_mix / lambda2 columns
};

struct TableRow {
  std::string family;
  std::size_t n = 0;
  std::string spec;
  SweepEstimate seq;
  SweepEstimate par;
  std::optional<double> t_hit;
  std::optional<double> t_mix;
  std::optional<double> lambda2;
  std::string growth;
  double seq_norm = 0.0;
  double par_norm = 0.0;
};

inline std::vector<TableRow> table_reproduce(const std::vector<std::string>& families,
                                             const std::vector<std::size_t>& sizes, const TableOptions& opts = {}) {
  std::vector<TableRow> rows;
  EstimateOptions eo;
  eo.threads = opts.threads;
  std::uint64_t cell = 0;
  for (const auto& fam : families) {
    const auto growth = growth_for(fam);
    for (std::size_t n : sizes) {
      TableRow row;
      row.family = fam;
      const GraphSpec spec = spec_for_size(fam, n, opts.seed);
      const Graph g = generate(spec);
      row.n = g.size();
      row.spec = to_string(spec);
      const std::uint64_t base = rng::derive(opts.seed, cell++);
      const auto origins = origin_set(spec.family);
      RunConfig seq;
      RunConfig par;
      par.process = Process::parallel;
      row.seq = estimate_worst_origin(g, origins, seq, opts.trials, rng::derive(base, 0), eo);
      row.par = estimate_worst_origin(g, origins, par, opts.trials, rng::derive(base, 1), eo);
      if (opts.exact_columns && g.size() <= opts.exact_cap) {
        row.t_hit = hitting_times_exact(g, false).max();
        const auto mix = mixing_time_exact(g, 0.25, true);
        if (mix.converged) row.t_mix = static_cast<double>(mix.steps);
        row.lambda2 = spectral(g, true).lambda2;
      }
      row.growth = growth.name;
      const double gn = growth.g(static_cast<double>(g.size()));
      row.seq_norm = row.seq.estimate.mean / gn;
      row.par_norm = row.par.estimate.mean / gn;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

struct StabilityCheck {
  std::string family;
  double seq_spread = 0.0;  // max / min of the normalized mean over sizes
  double par_spread = 0.0;
  double factor = 1.5;

  bool pass() const { return seq_spread <= factor && par_spread <= factor; }
};

inline std::vector<StabilityCheck> growth_stability(const std::vector<TableRow>& rows, double factor = 1.5) {
  std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> by_family;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!by_family.count(r.family)) order.push_back(r.family);
    by_family[r.family].first.push_back(r.seq_norm);
    by_family[r.family].second.push_back(r.par_norm);
  }
  auto spread = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi / *lo;
  };
  std::vector<StabilityCheck> out;
  for (const auto& fam : order) {
    StabilityCheck c;
    c.family = fam;
    c.factor = factor;
    c.seq_spread = spread(by_family[fam].first);
    c.par_spread = spread(by_family[fam].second);
    out.push_back(c);
  }
  return out;
}

}  // namespace idla::harness
