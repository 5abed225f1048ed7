// bounds.hpp: computable dispersion bounds and closed-form oracles.
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idla/graph.hpp"
#include "idla/types.hpp"
#include "idla/walkstats.hpp"

namespace idla::bounds {

/// basic: skip the set-hitting terms and the refined bounds.
enum class Mode { exact_subsets, spectral_estimate, basic };

inline std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::exact_subsets: return "exact";
    case Mode::spectral_estimate: return "spectral";
    default: return "basic";
  }
}

inline Mode mode_from_name(std::string_view s) {
  if (s == "exact" || s == "exact_subsets") return Mode::exact_subsets;
  if (s == "spectral" || s == "spectral_estimate") return Mode::spectral_estimate;
  if (s == "basic") return Mode::basic;
  throw ParameterError("unknown bounds mode '" + std::string(s) + "' (expected exact, spectral or basic)");
}

inline constexpr std::size_t kExactSubsetCap = 14;
inline const double kSetHittingConstant = 5.0 / (1.0 - std::exp(-1.0));

inline std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1)); }

/// 6 * max t_hit * log2 n, with the simple (non-lazy) walk.
inline double basic_upper(const Graph& g) {
  if (g.size() < 2) throw DomainError("basic_upper needs n >= 2");
  const auto table = hitting_times_exact(g, false);
  return 6.0 * table.max() * std::log2(static_cast<double>(g.size()));
}

/// Upper bound on t_hit(pi, S) over sets of size s from the spectral gap;
/// `natural_log` selects ln (default) or log2 inside the ceiling.
inline double set_hitting_estimate(std::size_t n, double lambda2, std::size_t s, bool natural_log = true) {
  if (!(lambda2 >= 0.0) || lambda2 >= 1.0) throw DomainError("set_hitting_estimate needs 0 <= lambda2 < 1");
  if (s < 1 || s > n) throw DomainError("set_hitting_estimate needs 1 <= s <= n");
  const double ls = natural_log ? std::log(static_cast<double>(s)) : std::log2(static_cast<double>(s));
  const double lg = std::ceil(ls - 1e-12);
  return kSetHittingConstant * static_cast<double>(n) * (1.0 + lg) / ((1.0 - lambda2) * static_cast<double>(s));
}

/// Polynomial-decay variant with caller-supplied constants C and eps.
inline double set_hitting_estimate_poly(std::size_t n, std::size_t s, double C, double eps) {
  if (s < 1 || s > n) throw DomainError("set_hitting_estimate needs 1 <= s <= n");
  if (!(eps > 0.0)) throw DomainError("polynomial branch needs eps > 0");
  return kSetHittingConstant * (C + 2.0) * static_cast<double>(n) /
         std::pow(static_cast<double>(s), eps / (1.0 + eps));
}

/// max_{|S| >= s} t_hit(pi, S) for the lazy walk, for every s = 1..n, by
/// exhaustive subset search. Entry [s] of the result; entry [0] is unused.
inline std::vector<double> max_set_hitting_exact(const Graph& g, std::size_t cap = kExactSubsetCap) {
  const std::size_t n = g.size();
  if (n > cap)
    throw CapabilityError("exact set-hitting search capped at n = " + std::to_string(cap) +
                          "; use the spectral estimate");
  require_connected(g);
  const auto pi = walk::stationary(g);
  std::vector<double> best(n + 2, 0.0);
  std::vector<Vertex> set;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    set.clear();
    for (Vertex v = 0; v < n; ++v)
      if (mask >> v & 1U) set.push_back(v);
    const double h = hitting_time_set_exact(g, pi, set, true);
    best[set.size()] = std::max(best[set.size()], h);
  }
  for (std::size_t s = n; s-- > 1;) best[s] = std::max(best[s], best[s + 1]);
  best.resize(n + 1);
  return best;
}

struct Report {
  Mode mode = Mode::exact_subsets;
  std::size_t n = 0;
  double t_hit = 0.0;       // max pairwise, simple walk
  double t_mix_lazy = 0.0;  // eps = 1/4
  double lambda2_lazy = 0.0;
  double basic_upper = 0.0;
  std::optional<double> refined_parallel_upper;
  std::optional<double> refined_sequential_upper;
  double lower_degree = 0.0;
  std::optional<double> lower_tree;
  double lower_mixing = 0.0;
  /// set term used at each j = 1..ceil(log2 n): max_{|S| >= 2^(j-2)} t_hit(pi, S)
  std::vector<double> set_terms;
};

namespace detail {

inline std::size_t set_size_for(std::size_t j) {
  // 2^(j-2) rounded up, and at least 1.
  return j <= 2 ? 1 : std::size_t{1} << (j - 2);
}

}  // namespace detail

/// Set terms for j = 1..ceil(log2 n) in the requested mode.
inline std::vector<double> set_terms(const Graph& g, Mode mode, double lambda2_lazy) {
  const std::size_t n = g.size();
  const std::size_t J = std::max<std::size_t>(ceil_log2(n), 1);
  std::vector<double> terms;
  if (mode == Mode::exact_subsets) {
    const auto best = max_set_hitting_exact(g);
    for (std::size_t j = 1; j <= J; ++j) terms.push_back(best[std::min(detail::set_size_for(j), n)]);
  } else {
    if (!validate(g).is_regular)
      throw CapabilityError("spectral set-hitting estimate requires a regular graph; use exact mode");
    for (std::size_t j = 1; j <= J; ++j)
      terms.push_back(set_hitting_estimate(n, lambda2_lazy, std::min(detail::set_size_for(j), n)));
  }
  return terms;
}

inline double refined_parallel_from(double t_mix, const std::vector<double>& terms) {
  double s = 0.0;
  for (double h : terms) s += t_mix + h;
  return 60.0 * s;
}

inline double refined_sequential_from(double t_mix, const std::vector<double>& terms) {
  double best = 0.0;
  for (std::size_t j = 1; j <= terms.size(); ++j)
    best = std::max(best, static_cast<double>(j) * (t_mix + terms[j - 1]));
  return 30.0 * best;
}

inline double lazy_mixing_time(const Graph& g, double eps = 0.25) {
  const auto m = mixing_time_exact(g, eps, true);
  if (!m.converged) throw CapabilityError("lazy mixing time did not converge within the step cap");
  return static_cast<double>(m.steps);
}

inline double refined_parallel_upper(const Graph& g, Mode mode) {
  if (g.size() < 2) throw DomainError("refined bounds need n >= 2");
  const double tm = lazy_mixing_time(g);
  const double lam = mode == Mode::spectral_estimate ? spectral(g, true).lambda2 : 0.0;
  return refined_parallel_from(tm, set_terms(g, mode, lam));
}

inline double refined_sequential_upper(const Graph& g, Mode mode) {
  if (g.size() < 2) throw DomainError("refined bounds need n >= 2");
  const double tm = lazy_mixing_time(g);
  const double lam = mode == Mode::spectral_estimate ? spectral(g, true).lambda2 : 0.0;
  return refined_sequential_from(tm, set_terms(g, mode, lam));
}

struct LowerBounds {
  double degree = 0.0;
  std::optional<double> tree;
  double mixing = 0.0;
};

inline LowerBounds lower_bounds(const Graph& g) {
  const auto d = validate(g);
  if (!d.connected) throw ConnectivityError("lower bounds need a connected graph");
  LowerBounds lb;
  lb.degree = 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(d.max_degree);
  if (d.is_tree) lb.tree = 2.0 * static_cast<double>(g.size()) - 3.0;
  lb.mixing = g.size() < 2 ? 0.0 : lazy_mixing_time(g);
  return lb;
}

inline Report report(const Graph& g, Mode mode) {
  if (g.size() < 2) throw DomainError("bounds need n >= 2");
  Report r;
  r.mode = mode;
  r.n = g.size();
  r.t_hit = hitting_times_exact(g, false).max();
  r.basic_upper = 6.0 * r.t_hit * std::log2(static_cast<double>(r.n));
  r.t_mix_lazy = lazy_mixing_time(g);
  r.lambda2_lazy = spectral(g, true).lambda2;
  if (mode != Mode::basic) {
    r.set_terms = set_terms(g, mode, r.lambda2_lazy);
    r.refined_parallel_upper = refined_parallel_from(r.t_mix_lazy, r.set_terms);
    r.refined_sequential_upper = refined_sequential_from(r.t_mix_lazy, r.set_terms);
  }
  const auto lb = lower_bounds(g);
  r.lower_degree = lb.degree;
  r.lower_tree = lb.tree;
  r.lower_mixing = lb.mixing;
  return r;
}

struct KappaPartial {
  long double partial = 0.0L;
  /// Upper bound on the omitted tail sum_{i > T} 4 / (i (9 i^2 - 1)).
  long double tail_bound = 0.0L;
};

/// Partial sum of sum_i (2/(i(3i-1)) - 2/(i(3i+1))) over i = 1..terms.
inline KappaPartial kappa_cc_partial(std::size_t terms) {
  if (terms < 1) throw DomainError("kappa_cc_partial needs terms >= 1");
  KappaPartial k;
  // Summed smallest-first for accuracy.
  for (std::size_t i = terms; i >= 1; --i) {
    const long double x = static_cast<long double>(i);
    k.partial += 2.0L / (x * (3.0L * x - 1.0L)) - 2.0L / (x * (3.0L * x + 1.0L));
  }
  // 9i^2 - 1 >= 8i^2, so the tail is at most sum_{i>T} 1/(2 i^3) <= 1/(4 T^2).
  const long double T = static_cast<long double>(terms);
  k.tail_bound = 1.0L / (4.0L * T * T);
  return k;
}

struct CliqueOracles {
  double seq_expectation = 0.0;
  double ctu_expectation = 0.0;
};

/// E[max of independent Geometric(i/n), i = 1..n] and (n-1) sum_{k<n} 1/k^2.
inline CliqueOracles clique_oracles(std::size_t n) {
  if (n < 1) throw DomainError("clique_oracles needs n >= 1");
  CliqueOracles o;
  const double N = static_cast<double>(n);
  // E[max] = sum_{t >= 0} P(max > t) = sum_t [1 - prod_i (1 - q_i^t)], q_i = 1 - i/n.
  // The q_n = 0 factor makes the t = 0 term exactly 1.
  double total = 1.0;
  std::vector<double> logq(n);
  for (std::size_t i = 1; i < n; ++i) logq[i] = std::log1p(-static_cast<double>(i) / N);
  for (std::size_t t = 1;; ++t) {
    double log_prod = 0.0;
    for (std::size_t i = 1; i < n; ++i) log_prod += std::log1p(-std::exp(logq[i] * static_cast<double>(t)));
    const double term = -std::expm1(log_prod);
    total += term;
    if (term < 1e-12 || n == 1) break;
  }
  o.seq_expectation = total;
  for (std::size_t k = n - 1; k >= 1; --k) o.ctu_expectation += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
  o.ctu_expectation *= N - 1.0;
  return o;
}

}  // namespace idla::bounds
