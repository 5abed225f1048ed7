// walkstats.hpp: exact quantities of the simple and lazy random walk.
//
// Everything here is computed from linear solves or matrix powers of the
// transition matrix P (lazy: (I + P) / 2). Loops count as moves that stay, so
// they enter degrees and the stationary law pi(v) = deg(v) / volume.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <string>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "idla/graph.hpp"
#include "idla/rng.hpp"
#include "idla/types.hpp"

namespace idla {

struct HittingTable {
  /// t_hit(u, v): expected steps from u to first reach v. Row u, column v.
  Eigen::MatrixXd t_hit;
  std::vector<double> pi;
  bool lazy = false;
  /// Largest relative residual of the absorbing systems the columns solve.
  double max_relative_residual = 0.0;

  double operator()(Vertex u, Vertex v) const { return t_hit(u, v); }

  /// max over ordered pairs: the graph's t_hit.
  double max() const { return t_hit.size() == 0 ? 0.0 : t_hit.maxCoeff(); }
};

struct SpectralSummary {
  double lambda2 = 0.0;
  double gap = 1.0;
  std::optional<Steps> t_mix;
  std::optional<double> phi;
};

struct MixingTime {
  Steps steps = 0;
  bool converged = false;
  /// Worst-start total variation at `steps`.
  double distance = 0.0;
};

enum class HittingMethod { automatic, absorbing, fundamental };

namespace walk {

inline std::vector<double> stationary(const Graph& g) {
  std::vector<double> pi(g.size());
  const double vol = static_cast<double>(g.volume());
  for (Vertex v = 0; v < g.size(); ++v) pi[v] = static_cast<double>(g.degree(v)) / vol;
  return pi;
}

/// Dense transition matrix.
inline Eigen::MatrixXd transition_matrix(const Graph& g, bool lazy) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
  for (Vertex u = 0; u < g.size(); ++u) {
    const double deg = static_cast<double>(g.degree(u));
    if (deg == 0) {
      P(u, u) = 1.0;
      continue;
    }
    const double scale = lazy ? 0.5 / deg : 1.0 / deg;
    for (Vertex w : g.neighbors(u)) P(u, w) += scale;
    P(u, u) += scale * g.loops(u) + (lazy ? 0.5 : 0.0);
  }
  return P;
}

/// (P h)(u) without materializing P.
inline double apply_row(const Graph& g, bool lazy, Vertex u, const Eigen::VectorXd& h) {
  const double deg = static_cast<double>(g.degree(u));
  double s = 0.0;
  for (Vertex w : g.neighbors(u)) s += h[w];
  s += g.loops(u) * h[u];
  s /= deg;
  return lazy ? 0.5 * (s + h[u]) : s;
}

/// Relative residual of h against h(u) = 1 + sum_w P(u,w) h(w) off the target.
inline double absorbing_residual(const Graph& g, bool lazy, Vertex target, const Eigen::VectorXd& h) {
  double worst = 0.0;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  for (Vertex u = 0; u < g.size(); ++u) {
    if (u == target) continue;
    worst = std::max(worst, std::abs(h[u] - 1.0 - apply_row(g, lazy, u, h)));
  }
  return worst / scale;
}

/// Expected steps to absorption in `absorbing` for every vertex (0 inside it).
inline Eigen::VectorXd absorption_times(const Graph& g, std::span<const char> absorbing, bool lazy) {
  const std::size_t n = g.size();
  std::vector<Eigen::Index> slot(n, -1);
  Eigen::Index m = 0;
  for (Vertex v = 0; v < n; ++v)
    if (!absorbing[v]) slot[v] = m++;
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (m == 0) return h;

  const Eigen::MatrixXd P = transition_matrix(g, lazy);
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
  for (Vertex u = 0; u < n; ++u) {
    if (slot[u] < 0) continue;
    for (Vertex w = 0; w < n; ++w)
      if (slot[w] >= 0 && P(u, w) != 0.0) A(slot[u], slot[w]) -= P(u, w);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Ones(m));
  if (!x.allFinite()) throw ConnectivityError("absorbing system is singular: target unreachable");
  for (Vertex u = 0; u < n; ++u)
    if (slot[u] >= 0) h[u] = x[slot[u]];
  if ((h.array() < -1e-9).any()) throw ConnectivityError("absorbing system is singular: target unreachable");
  return h;
}

}  // namespace walk

/// Exact t_hit for all ordered pairs.
///
/// `absorbing` solves one (n-1)x(n-1) system per target; `fundamental` inverts
/// Z = (I - P + 1 pi^T) once and reads t_hit(u,v) = (Z_vv - Z_uv) / pi_v.
/// `automatic` picks absorbing up to 96 vertices. Every column is checked
/// against its absorbing system.
inline HittingTable hitting_times_exact(const Graph& g, bool lazy,
                                        HittingMethod method = HittingMethod::automatic) {
  require_connected(g);
  const std::size_t n = g.size();
  const auto N = static_cast<Eigen::Index>(n);
  HittingTable table;
  table.lazy = lazy;
  table.pi = walk::stationary(g);
  table.t_hit = Eigen::MatrixXd::Zero(N, N);
  if (method == HittingMethod::automatic) method = n <= 96 ? HittingMethod::absorbing : HittingMethod::fundamental;

  if (method == HittingMethod::absorbing) {
    std::vector<char> absorbing(n, 0);
    for (Vertex v = 0; v < n; ++v) {
      absorbing[v] = 1;
      table.t_hit.col(v) = walk::absorption_times(g, absorbing, lazy);
      absorbing[v] = 0;
    }
  } else {
    const Eigen::MatrixXd P = walk::transition_matrix(g, lazy);
    Eigen::VectorXd pi(N);
    for (Eigen::Index v = 0; v < N; ++v) pi[v] = table.pi[static_cast<std::size_t>(v)];
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) - P + Eigen::VectorXd::Ones(N) * pi.transpose();
    const Eigen::MatrixXd Z = Eigen::PartialPivLU<Eigen::MatrixXd>(M).inverse();
    for (Eigen::Index v = 0; v < N; ++v)
      for (Eigen::Index u = 0; u < N; ++u) table.t_hit(u, v) = u == v ? 0.0 : (Z(v, v) - Z(u, v)) / pi[v];
  }

  for (Vertex v = 0; v < n; ++v) {
    const Eigen::VectorXd col = table.t_hit.col(v);
    table.max_relative_residual =
        std::max(table.max_relative_residual, walk::absorbing_residual(g, lazy, v, col));
  }
  return table;
}

/// t_hit(mu, S): start drawn from `start`, absorbed on first visit to S.
inline double hitting_time_set_exact(const Graph& g, std::span<const double> start, std::span<const Vertex> targets,
                                     bool lazy) {
  if (targets.empty()) throw DomainError("target set S must be nonempty");
  if (start.size() != g.size()) throw DomainError("start distribution has the wrong length");
  std::vector<char> absorbing(g.size(), 0);
  for (Vertex v : targets) {
    if (v >= g.size()) throw DomainError("target vertex out of range");
    absorbing[v] = 1;
  }
  const Eigen::VectorXd h = walk::absorption_times(g, absorbing, lazy);
  double total = 0.0;
  for (Vertex u = 0; u < g.size(); ++u) total += start[u] * h[u];
  return total;
}

/// Effective resistance between u and v from the grounded Laplacian (unit
/// conductance per edge; loops carry no current).
inline double effective_resistance(const Graph& g, Vertex u, Vertex v) {
  if (u == v) return 0.0;
  require_connected(g);
  const std::size_t n = g.size();
  // Ground v: drop its row/column, inject unit current at u.
  std::vector<Eigen::Index> slot(n, -1);
  Eigen::Index m = 0;
  for (Vertex x = 0; x < n; ++x)
    if (x != v) slot[x] = m++;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  for (Vertex x = 0; x < n; ++x) {
    if (slot[x] < 0) continue;
    L(slot[x], slot[x]) = static_cast<double>(g.neighbors(x).size());
    for (Vertex w : g.neighbors(x))
      if (slot[w] >= 0) L(slot[x], slot[w]) -= 1.0;
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
  b[slot[u]] = 1.0;
  const Eigen::VectorXd phi = Eigen::PartialPivLU<Eigen::MatrixXd>(L).solve(b);
  return phi[slot[u]];
}

struct Commute {
  double t_com = 0.0;
  double resistance = 0.0;
};

/// Commute time from two absorbing solves and R = t_com / volume (volume =
/// 2|E| plus loops, the commute-time identity with loop-weighted degrees).
inline Commute commute_and_resistance(const Graph& g, Vertex u, Vertex v) {
  if (u == v) throw DomainError("commute time needs distinct vertices");
  require_connected(g);
  std::vector<char> absorbing(g.size(), 0);
  absorbing[v] = 1;
  const double uv = walk::absorption_times(g, absorbing, false)[u];
  absorbing[v] = 0;
  absorbing[u] = 1;
  const double vu = walk::absorption_times(g, absorbing, false)[v];
  Commute c;
  c.t_com = uv + vu;
  c.resistance = c.t_com / static_cast<double>(g.volume());
  return c;
}

/// P_r[walk hits u before returning to r], solved as a harmonic function with
/// boundary values f(r) = 0, f(u) = 1.
inline double hit_before_return(const Graph& g, Vertex r, Vertex u) {
  if (r == u) throw DomainError("hit_before_return needs r != u");
  require_connected(g);
  const std::size_t n = g.size();
  std::vector<Eigen::Index> slot(n, -1);
  Eigen::Index m = 0;
  for (Vertex x = 0; x < n; ++x)
    if (x != r && x != u) slot[x] = m++;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  f[u] = 1.0;
  if (m > 0) {
    const Eigen::MatrixXd P = walk::transition_matrix(g, false);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (Vertex x = 0; x < n; ++x) {
      if (slot[x] < 0) continue;
      b[slot[x]] = P(x, u);
      for (Vertex w = 0; w < n; ++w)
        if (slot[w] >= 0) A(slot[x], slot[w]) -= P(x, w);
    }
    const Eigen::VectorXd x = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
    for (Vertex y = 0; y < n; ++y)
      if (slot[y] >= 0) f[y] = x[slot[y]];
  }
  // First step from r; loops at r return immediately and contribute f(r) = 0.
  double p = 0.0;
  for (Vertex w : g.neighbors(r)) p += f[w];
  return p / static_cast<double>(g.degree(r));
}

struct SpectralOptions {
  std::size_t dense_cap = 2048;
  bool allow_iterative = false;
  double tolerance = 1e-12;
  std::size_t max_iterations = 2'000'000;
};

/// Second-largest eigenvalue magnitude of the (lazy) transition matrix.
inline SpectralSummary spectral(const Graph& g, bool lazy, const SpectralOptions& opts = {}) {
  require_connected(g);
  const std::size_t n = g.size();
  SpectralSummary out;
  if (n <= 1) {
    out.lambda2 = 0.0;
    out.gap = 1.0;
    return out;
  }
  std::vector<double> sqrt_deg(n);
  for (Vertex v = 0; v < n; ++v) sqrt_deg[v] = std::sqrt(static_cast<double>(g.degree(v)));

  if (n <= opts.dense_cap) {
    // D^{-1/2} W D^{-1/2} is symmetric and similar to P.
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex w : g.neighbors(u)) S(u, w) = 1.0 / (sqrt_deg[u] * sqrt_deg[w]);
      S(u, u) = g.loops(u) / static_cast<double>(g.degree(u));
    }
    if (lazy) S = 0.5 * (Eigen::MatrixXd::Identity(N, N) + S);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();  // ascending; the top one is 1
    double lam = 0.0;
    for (Eigen::Index i = 0; i + 1 < N; ++i) lam = std::max(lam, std::abs(ev[i]));
    out.lambda2 = std::min(lam, 1.0);
    out.gap = 1.0 - out.lambda2;
    return out;
  }

  if (!opts.allow_iterative)
    throw CapabilityError("n = " + std::to_string(n) + " exceeds the dense eigensolver cap " +
                          std::to_string(opts.dense_cap) + " and iterative deflation is disabled");

  // Power iteration on S with the top eigenvector sqrt(pi) projected out.
  const double vol = static_cast<double>(g.volume());
  Eigen::VectorXd top(static_cast<Eigen::Index>(n));
  for (Vertex v = 0; v < n; ++v) top[v] = sqrt_deg[v] / std::sqrt(vol);
  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y(x.size());
    for (Vertex u = 0; u < n; ++u) {
      double s = g.loops(u) * x[u] / static_cast<double>(g.degree(u));
      for (Vertex w : g.neighbors(u)) s += x[w] / (sqrt_deg[u] * sqrt_deg[w]);
      y[u] = lazy ? 0.5 * (x[u] + s) : s;
    }
    return y;
  };
  rng::Engine eng(0x1d1aULL);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& xi : x) xi = gauss(eng);
  double prev = 0.0;
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    x -= top.dot(x) * top;
    x.normalize();
    Eigen::VectorXd y = apply(x);
    y -= top.dot(y) * top;
    const double est = y.norm();
    x = y;
    if (it > 10 && std::abs(est - prev) < opts.tolerance) {
      prev = est;
      break;
    }
    prev = est;
  }
  out.lambda2 = std::min(prev, 1.0);
  out.gap = 1.0 - out.lambda2;
  return out;
}

/// Smallest t with max_u TV(P^t(u, .), pi) <= eps.
inline MixingTime mixing_time_exact(const Graph& g, double eps, bool lazy, Steps step_cap = 10'000'000) {
  require_connected(g);
  const std::size_t n = g.size();
  const auto pi = walk::stationary(g);
  MixingTime out;

  // A periodic (bipartite, non-lazy) chain keeps total variation >= 1/2.
  const auto diag = validate(g);
  if (!lazy && diag.is_bipartite && eps < 0.5) {
    out.converged = false;
    out.steps = 0;
    out.distance = 1.0;
    return out;
  }

  // Row u of `dist` is P^t(u, .). Advanced with the sparse structure.
  std::vector<double> dist(n * n, 0.0), next(n * n, 0.0);
  for (Vertex u = 0; u < n; ++u) dist[u * n + u] = 1.0;

  auto worst_tv = [&]() {
    double worst = 0.0;
    for (Vertex u = 0; u < n; ++u) {
      double tv = 0.0;
      const double* row = &dist[u * n];
      for (Vertex v = 0; v < n; ++v) tv += std::abs(row[v] - pi[v]);
      worst = std::max(worst, 0.5 * tv);
    }
    return worst;
  };

  std::vector<double> inv_deg(n);
  for (Vertex v = 0; v < n; ++v) inv_deg[v] = 1.0 / static_cast<double>(g.degree(v));
  for (Steps t = 0;; ++t) {
    const double tv = worst_tv();
    if (tv <= eps) {
      out.steps = t;
      out.converged = true;
      out.distance = tv;
      return out;
    }
    if (t >= step_cap) {
      out.steps = t;
      out.converged = false;
      out.distance = tv;
      return out;
    }
    // next(u, w) = sum_x dist(u, x) P(x, w)
    std::fill(next.begin(), next.end(), 0.0);
    for (Vertex u = 0; u < n; ++u) {
      const double* row = &dist[u * n];
      double* out_row = &next[u * n];
      for (Vertex x = 0; x < n; ++x) {
        const double mass = row[x];
        if (mass == 0.0) continue;
        const double share = (lazy ? 0.5 : 1.0) * mass * inv_deg[x];
        for (Vertex w : g.neighbors(x)) out_row[w] += share;
        out_row[x] += share * g.loops(x) + (lazy ? 0.5 * mass : 0.0);
      }
    }
    dist.swap(next);
  }
}

/// Exact conductance of the lazy walk: min over S with pi(S) <= 1/2 of
/// Q(S, S^c) / pi(S). For the lazy walk each crossing edge carries flow
/// 1 / (2 vol), so the ratio is crossing(S) / (2 vol(S)).
inline double conductance_exact(const Graph& g, std::size_t cap = 20) {
  const std::size_t n = g.size();
  if (n > cap)
    throw CapabilityError("conductance enumeration capped at n = " + std::to_string(cap) +
                          "; use the Cheeger bracket gap/2 <= phi <= sqrt(2 gap) from spectral()");
  if (n < 2) throw DomainError("conductance needs at least two vertices");
  require_connected(g);
  const double vol = static_cast<double>(g.volume());
  std::vector<char> in(n, 0);
  long long crossing = 0;
  double vol_s = 0.0;
  double best = std::numeric_limits<double>::infinity();
  // Gray-code walk over all nonempty subsets.
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const auto x = static_cast<Vertex>(std::countr_zero(i));
    const bool entering = !in[x];
    for (Vertex y : g.neighbors(x)) crossing += (in[y] != 0) == entering ? -1 : 1;
    in[x] = entering ? 1 : 0;
    vol_s += (entering ? 1.0 : -1.0) * static_cast<double>(g.degree(x));
    if (vol_s > 0.0 && vol_s <= 0.5 * vol + 1e-12)
      best = std::min(best, static_cast<double>(crossing) / (2.0 * vol_s));
  }
  return best;
}

}  // namespace idla
