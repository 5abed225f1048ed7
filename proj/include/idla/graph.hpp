// graph.hpp: finite undirected graphs and generators for the analyzed families.
//
// Vertices are 0..n-1. Neighbor lists are sorted and duplicate-free; self-loops
// are kept out of the lists and stored as a per-vertex multiplicity so that the
// "stay put" moves of a lazy walk can be expressed as loops (the G~ graph with
// as many loops as neighbours).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "idla/rng.hpp"
#include "idla/types.hpp"

namespace idla {

class Graph {
 public:
  Graph() = default;

  std::size_t size() const noexcept { return adjacency_.size(); }
  std::span<const Vertex> neighbors(Vertex v) const noexcept { return adjacency_[v]; }
  std::uint32_t loops(Vertex v) const noexcept { return loops_[v]; }

  /// Degree counting each loop once, i.e. the number of equally likely moves.
  std::size_t degree(Vertex v) const noexcept { return adjacency_[v].size() + loops_[v]; }

  std::size_t edge_count() const noexcept { return edge_count_; }
  std::size_t loop_count() const noexcept { return loop_count_; }

  /// Sum of degrees (2|E| plus loops); the normalizer of the stationary law.
  std::size_t volume() const noexcept { return 2 * edge_count_ + loop_count_; }

  bool has_edge(Vertex u, Vertex v) const {
    if (u == v) return loops_[u] > 0;
    const auto& nb = adjacency_[u];
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  const std::string& name() const noexcept { return name_; }
  void set_name(std::string name) { name_ = std::move(name); }

  /// Named vertices (tree root, hair tip, ...) that origins can refer to.
  const std::vector<std::pair<std::string, Vertex>>& landmarks() const noexcept { return landmarks_; }
  std::optional<Vertex> landmark(std::string_view key) const {
    for (const auto& [k, v] : landmarks_)
      if (k == key) return v;
    return std::nullopt;
  }
  void add_landmark(std::string key, Vertex v) { landmarks_.emplace_back(std::move(key), v); }

  /// Connectivity retries spent by the gnp generator.
  std::uint32_t generation_retries() const noexcept { return retries_; }
  void set_generation_retries(std::uint32_t r) noexcept { retries_ = r; }

 private:
  friend class GraphBuilder;

  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::uint32_t> loops_;
  std::size_t edge_count_ = 0;
  std::size_t loop_count_ = 0;
  std::string name_;
  std::vector<std::pair<std::string, Vertex>> landmarks_;
  std::uint32_t retries_ = 0;
};

/// Accumulates edges, then produces a Graph with sorted, deduplicated lists.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n) : adjacency_(n), loops_(n, 0) {}

  std::size_t size() const noexcept { return adjacency_.size(); }

  GraphBuilder& add_edge(Vertex u, Vertex v) {
    if (u >= size() || v >= size())
      throw ParameterError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") out of range for n = " +
                           std::to_string(size()));
    if (u == v) {
      ++loops_[u];
    } else {
      adjacency_[u].push_back(v);
      adjacency_[v].push_back(u);
    }
    return *this;
  }

  GraphBuilder& add_loops(Vertex v, std::uint32_t count) {
    loops_.at(v) += count;
    return *this;
  }

  /// With `strict`, a repeated simple edge is an error instead of being merged.
  Graph build(std::string name = {}, bool strict = false) && {
    Graph g;
    g.adjacency_ = std::move(adjacency_);
    g.loops_ = std::move(loops_);
    std::size_t half_edges = 0;
    for (Vertex v = 0; v < g.adjacency_.size(); ++v) {
      auto& nb = g.adjacency_[v];
      std::sort(nb.begin(), nb.end());
      const auto before = nb.size();
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      if (strict && nb.size() != before)
        throw ParameterError("repeated edge at vertex " + std::to_string(v) + "; multi-edges are not supported");
      half_edges += nb.size();
      g.loop_count_ += g.loops_[v];
    }
    g.edge_count_ = half_edges / 2;
    g.name_ = std::move(name);
    return g;
  }

 private:
  std::vector<std::vector<Vertex>> adjacency_;
  std::vector<std::uint32_t> loops_;
};

/// One random-walk move from v. Lazy walks stay with probability 1/2 before
/// choosing uniformly among the degree(v) moves; loops are moves that stay.
inline Vertex walk_step(const Graph& g, Vertex v, rng::Engine& eng, bool lazy) {
  if (lazy && rng::coin(eng)) return v;
  const auto nb = g.neighbors(v);
  const std::size_t deg = nb.size() + g.loops(v);
  if (deg == 0) return v;
  const auto r = rng::below(eng, deg);
  return r < nb.size() ? nb[r] : v;
}

/// Breadth-first distances from `source`; unreachable vertices get max().
inline std::vector<std::size_t> bfs_distances(const Graph& g, Vertex source) {
  std::vector<std::size_t> dist(g.size(), std::numeric_limits<std::size_t>::max());
  std::queue<Vertex> q;
  dist[source] = 0;
  q.push(source);
  while (!q.empty()) {
    const Vertex u = q.front();
    q.pop();
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == std::numeric_limits<std::size_t>::max()) {
        dist[w] = dist[u] + 1;
        q.push(w);
      }
    }
  }
  return dist;
}

/// G~: every vertex gains as many loops as it has neighbours, so the simple
/// walk on the result is the lazy walk on `g`.
inline Graph with_lazy_loops(const Graph& g) {
  GraphBuilder b(g.size());
  for (Vertex v = 0; v < g.size(); ++v) {
    for (Vertex w : g.neighbors(v))
      if (v < w) b.add_edge(v, w);
    b.add_loops(v, g.loops(v) + static_cast<std::uint32_t>(g.neighbors(v).size()));
  }
  Graph out = std::move(b).build(g.name() + "+loops");
  for (const auto& [k, v] : g.landmarks()) out.add_landmark(k, v);
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostics

struct Diagnostics {
  bool connected = false;
  std::size_t max_degree = 0;
  std::size_t min_degree = 0;
  std::size_t edge_count = 0;
  bool is_tree = false;
  bool is_regular = false;
  bool is_bipartite = false;
};

inline Diagnostics validate(const Graph& g) {
  Diagnostics d;
  const std::size_t n = g.size();
  d.edge_count = g.edge_count();
  if (n == 0) return d;

  d.min_degree = std::numeric_limits<std::size_t>::max();
  for (Vertex v = 0; v < n; ++v) {
    d.max_degree = std::max(d.max_degree, g.degree(v));
    d.min_degree = std::min(d.min_degree, g.degree(v));
  }
  d.is_regular = d.max_degree == d.min_degree;

  // Two-colouring BFS over every component; also counts reached vertices from 0.
  std::vector<int> colour(n, -1);
  bool bipartite = g.loop_count() == 0;
  std::size_t reached_from_zero = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (colour[s] != -1) continue;
    colour[s] = 0;
    std::queue<Vertex> q;
    q.push(s);
    std::size_t reached = 0;
    while (!q.empty()) {
      const Vertex u = q.front();
      q.pop();
      ++reached;
      for (Vertex w : g.neighbors(u)) {
        if (colour[w] == -1) {
          colour[w] = 1 - colour[u];
          q.push(w);
        } else if (colour[w] == colour[u]) {
          bipartite = false;
        }
      }
    }
    if (s == 0) reached_from_zero = reached;
  }
  d.connected = reached_from_zero == n;
  d.is_bipartite = bipartite;
  d.is_tree = d.connected && g.loop_count() == 0 && g.edge_count() + 1 == n;
  return d;
}

inline void require_connected(const Graph& g) {
  if (!validate(g).connected) throw ConnectivityError("graph '" + g.name() + "' is not connected");
}

// ---------------------------------------------------------------------------
// Families

enum class Family {
  complete,
  path,
  cycle,
  star,
  binary_tree,
  hypercube,
  torus,
  grid,
  lollipop,
  clique_with_hair,
  clique_hair_on_pimple,
  tree_with_path,
  gnp,
  custom,
};

struct GraphSpec {
  Family family = Family::complete;
  std::size_t n = 0;      // vertex count, or the tree size for tree_with_path
  std::size_t dim = 0;    // torus / grid dimension
  std::size_t side = 0;   // torus / grid side length
  std::size_t hair = 0;   // h for clique_hair_on_pimple
  double eps = 0.0;       // tree_with_path exponent slack
  double p = 0.0;         // gnp edge probability
  std::uint64_t seed = 0; // gnp seed
  std::string file;       // custom edge-list path (empty when `edges` is used)
  std::vector<std::pair<Vertex, Vertex>> edges;  // inline custom edges
};

inline constexpr std::pair<Family, std::string_view> kFamilyNames[] = {
    {Family::complete, "complete"},
    {Family::path, "path"},
    {Family::cycle, "cycle"},
    {Family::star, "star"},
    {Family::binary_tree, "binary_tree"},
    {Family::hypercube, "hypercube"},
    {Family::torus, "torus"},
    {Family::grid, "grid"},
    {Family::lollipop, "lollipop"},
    {Family::clique_with_hair, "clique_with_hair"},
    {Family::clique_hair_on_pimple, "clique_hair_on_pimple"},
    {Family::tree_with_path, "tree_with_path"},
    {Family::gnp, "gnp"},
    {Family::custom, "custom"},
};

inline std::string_view family_name(Family f) {
  for (const auto& [fam, name] : kFamilyNames)
    if (fam == f) return name;
  return "unknown";
}

inline std::optional<Family> family_from_name(std::string_view s) {
  for (const auto& [fam, name] : kFamilyNames)
    if (name == s) return fam;
  return std::nullopt;
}

namespace detail {

inline bool is_power_of_two(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

inline std::size_t checked_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > (std::size_t{1} << 26) / std::max<std::size_t>(base, 1))
      throw ParameterError("lattice too large: side^dim exceeds 2^26 vertices");
    r *= base;
  }
  return r;
}

inline std::string format_double(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

// Binary tree in heap layout: root 0, children 2i+1 and 2i+2.
inline void add_binary_tree(GraphBuilder& b, std::size_t n) {
  for (std::size_t i = 1; i < n; ++i) b.add_edge(static_cast<Vertex>((i - 1) / 2), static_cast<Vertex>(i));
}

inline void require_tree_size(std::size_t n, std::string_view family) {
  if (n == 0 || !is_power_of_two(n + 1))
    throw ParameterError(std::string(family) + " requires n = 2^k - 1 (got " + std::to_string(n) + ")");
}

inline void lattice(GraphBuilder& b, std::size_t dim, std::size_t side, bool wrap) {
  const std::size_t n = b.size();
  std::vector<std::size_t> stride(dim, 1);
  for (std::size_t d = 1; d < dim; ++d) stride[d] = stride[d - 1] * side;
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t d = 0; d < dim; ++d) {
      const std::size_t coord = (v / stride[d]) % side;
      if (coord + 1 < side) {
        b.add_edge(static_cast<Vertex>(v), static_cast<Vertex>(v + stride[d]));
      } else if (wrap && side > 2) {
        b.add_edge(static_cast<Vertex>(v), static_cast<Vertex>(v - coord * stride[d]));
      }
    }
  }
}

}  // namespace detail

/// Canonical "family:params" form, accepted back by parse_spec.
inline std::string to_string(const GraphSpec& s) {
  std::string out(family_name(s.family));
  switch (s.family) {
    case Family::torus:
    case Family::grid:
      return out + ":" + std::to_string(s.dim) + ":" + std::to_string(s.side);
    case Family::clique_hair_on_pimple:
      return out + ":" + std::to_string(s.n) + ":" + std::to_string(s.hair);
    case Family::tree_with_path:
      return out + ":" + std::to_string(s.n) + ":" + detail::format_double(s.eps);
    case Family::gnp:
      return out + ":" + std::to_string(s.n) + ":" + detail::format_double(s.p) + ":" + std::to_string(s.seed);
    case Family::custom:
      return out + ":" + (s.file.empty() ? std::string("inline") : s.file);
    default:
      return out + ":" + std::to_string(s.n);
  }
}

/// Parses "family:params", e.g. "cycle:16", "torus:2:8", "gnp:64:0.2:7",
/// "clique_hair_on_pimple:100:20", "tree_with_path:127:0.25", "custom:g.txt".
inline GraphSpec parse_spec(std::string_view text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);

  const auto fam = family_from_name(parts[0]);
  if (!fam) throw ParameterError("unknown graph family '" + parts[0] + "'");
  GraphSpec s;
  s.family = *fam;

  auto want = [&](std::size_t count) {
    if (parts.size() != count + 1)
      throw ParameterError("graph '" + parts[0] + "' expects " + std::to_string(count) + " parameter(s)");
  };
  auto as_size = [&](const std::string& x) -> std::size_t {
    try {
      std::size_t pos = 0;
      const auto v = std::stoull(x, &pos);
      if (pos != x.size()) throw std::invalid_argument(x);
      return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      throw ParameterError("expected a non-negative integer, got '" + x + "'");
    }
  };
  auto as_double = [&](const std::string& x) -> double {
    try {
      std::size_t pos = 0;
      const double v = std::stod(x, &pos);
      if (pos != x.size()) throw std::invalid_argument(x);
      return v;
    } catch (const std::exception&) {
      throw ParameterError("expected a number, got '" + x + "'");
    }
  };

  switch (s.family) {
    case Family::torus:
    case Family::grid:
      want(2);
      s.dim = as_size(parts[1]);
      s.side = as_size(parts[2]);
      break;
    case Family::clique_hair_on_pimple:
      want(2);
      s.n = as_size(parts[1]);
      s.hair = as_size(parts[2]);
      break;
    case Family::tree_with_path:
      want(2);
      s.n = as_size(parts[1]);
      s.eps = as_double(parts[2]);
      break;
    case Family::gnp:
      if (parts.size() != 3 && parts.size() != 4) throw ParameterError("gnp expects n:p[:seed]");
      s.n = as_size(parts[1]);
      s.p = as_double(parts[2]);
      s.seed = parts.size() == 4 ? as_size(parts[3]) : 0;
      break;
    case Family::custom: {
      if (parts.size() < 2) throw ParameterError("custom expects a file path");
      // Re-join in case the path itself contains ':'.
      std::string path = parts[1];
      for (std::size_t i = 2; i < parts.size(); ++i) path += ":" + parts[i];
      s.file = path;
      break;
    }
    default:
      want(1);
      s.n = as_size(parts[1]);
  }
  return s;
}

/// Edge-list text: first token n, then whitespace-separated pairs "u v".
/// A pair "u u" adds one loop at u.
inline GraphBuilder parse_edge_list(std::istream& in) {
  long long n = -1;
  if (!(in >> n) || n <= 0) throw InputError("edge list must start with a positive vertex count");
  GraphBuilder b(static_cast<std::size_t>(n));
  long long u = 0, v = 0;
  std::size_t line = 1;
  while (in >> u) {
    ++line;
    if (!(in >> v)) throw InputError("edge list entry " + std::to_string(line) + " has an odd number of endpoints");
    if (u < 0 || v < 0 || u >= n || v >= n)
      throw InputError("edge list entry " + std::to_string(line) + " references a vertex outside 0.." +
                       std::to_string(n - 1));
    b.add_edge(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  if (!in.eof()) throw InputError("edge list contains a non-integer token after entry " + std::to_string(line));
  return b;
}

inline Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list '" + path + "'");
  return parse_edge_list(in).build("custom:" + path, true);
}

inline Graph generate(const GraphSpec& spec) {
  const std::size_t n = spec.n;
  const std::string name = to_string(spec);
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) throw ParameterError(std::string(family_name(spec.family)) + ": " + what);
  };

  switch (spec.family) {
    case Family::complete: {
      need(n >= 1, "requires n >= 1");
      GraphBuilder b(n);
      for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) b.add_edge(u, v);
      return std::move(b).build(name);
    }
    case Family::path: {
      need(n >= 1, "requires n >= 1");
      GraphBuilder b(n);
      for (Vertex v = 0; v + 1 < n; ++v) b.add_edge(v, v + 1);
      Graph g = std::move(b).build(name);
      g.add_landmark("end", 0);
      g.add_landmark("other_end", static_cast<Vertex>(n - 1));
      return g;
    }
    case Family::cycle: {
      need(n >= 3, "requires n >= 3");
      GraphBuilder b(n);
      for (Vertex v = 0; v < n; ++v) b.add_edge(v, static_cast<Vertex>((v + 1) % n));
      return std::move(b).build(name);
    }
    case Family::star: {
      need(n >= 2, "requires n >= 2");
      GraphBuilder b(n);
      for (Vertex v = 1; v < n; ++v) b.add_edge(0, v);
      Graph g = std::move(b).build(name);
      g.add_landmark("center", 0);
      g.add_landmark("leaf", 1);
      return g;
    }
    case Family::binary_tree: {
      detail::require_tree_size(n, "binary_tree");
      GraphBuilder b(n);
      detail::add_binary_tree(b, n);
      Graph g = std::move(b).build(name);
      g.add_landmark("root", 0);
      g.add_landmark("leaf", static_cast<Vertex>(n - 1));
      return g;
    }
    case Family::hypercube: {
      need(detail::is_power_of_two(n), "requires n = 2^k (got " + std::to_string(n) + ")");
      need(n <= (std::size_t{1} << 26), "n too large");
      GraphBuilder b(n);
      for (std::size_t v = 0; v < n; ++v)
        for (std::size_t bit = 1; bit < n; bit <<= 1)
          if ((v & bit) == 0) b.add_edge(static_cast<Vertex>(v), static_cast<Vertex>(v | bit));
      return std::move(b).build(name);
    }
    case Family::torus:
    case Family::grid: {
      need(spec.dim >= 1, "requires dimension >= 1");
      need(spec.side >= 2, "requires side >= 2");
      const std::size_t count = detail::checked_pow(spec.side, spec.dim);
      GraphBuilder b(count);
      detail::lattice(b, spec.dim, spec.side, spec.family == Family::torus);
      Graph g = std::move(b).build(name);
      // Centre of the box: every coordinate at side / 2.
      std::size_t centre = 0, stride = 1;
      for (std::size_t d = 0; d < spec.dim; ++d, stride *= spec.side) centre += (spec.side / 2) * stride;
      g.add_landmark("center", static_cast<Vertex>(centre));
      return g;
    }
    case Family::lollipop: {
      need(n >= 2, "requires n >= 2");
      const std::size_t clique = (n + 1) / 2;
      GraphBuilder b(n);
      for (Vertex u = 0; u < clique; ++u)
        for (Vertex v = u + 1; v < clique; ++v) b.add_edge(u, v);
      for (std::size_t v = clique; v < n; ++v) b.add_edge(static_cast<Vertex>(v - 1), static_cast<Vertex>(v));
      Graph g = std::move(b).build(name);
      g.add_landmark("clique", 0);
      g.add_landmark("bridge", static_cast<Vertex>(clique - 1));
      g.add_landmark("path_end", static_cast<Vertex>(n - 1));
      return g;
    }
    case Family::clique_with_hair: {
      // K_{n-1} on 0..n-2 plus the tip n-1 hanging off vertex 0.
      need(n >= 3, "requires n >= 3");
      GraphBuilder b(n);
      for (Vertex u = 0; u + 1 < n; ++u)
        for (Vertex v = u + 1; v + 1 < n; ++v) b.add_edge(u, v);
      b.add_edge(0, static_cast<Vertex>(n - 1));
      Graph g = std::move(b).build(name);
      g.add_landmark("hair_base", 0);
      g.add_landmark("hair_tip", static_cast<Vertex>(n - 1));
      return g;
    }
    case Family::clique_hair_on_pimple: {
      // K_{n-2} on 1..n-2; vertex 0 joins h-1 of them (1..h-1) and the tip n-1.
      need(n >= 4, "requires n >= 4");
      need(spec.hair >= 2 && spec.hair <= n - 1, "requires 2 <= h <= n - 1");
      GraphBuilder b(n);
      for (Vertex u = 1; u + 1 < n; ++u)
        for (Vertex v = u + 1; v + 1 < n; ++v) b.add_edge(u, v);
      for (Vertex v = 1; v < spec.hair; ++v) b.add_edge(0, v);
      b.add_edge(0, static_cast<Vertex>(n - 1));
      Graph g = std::move(b).build(name);
      g.add_landmark("hair_base", 0);
      g.add_landmark("hair_tip", static_cast<Vertex>(n - 1));
      return g;
    }
    case Family::tree_with_path: {
      detail::require_tree_size(n, "tree_with_path");
      need(spec.eps > 0.0 && spec.eps < 0.5, "requires 0 < eps < 1/2");
      const auto len = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 0.5 - spec.eps)));
      GraphBuilder b(n + len);
      detail::add_binary_tree(b, n);
      b.add_edge(0, static_cast<Vertex>(n));
      for (std::size_t v = n + 1; v < n + len; ++v) b.add_edge(static_cast<Vertex>(v - 1), static_cast<Vertex>(v));
      Graph g = std::move(b).build(name);
      g.add_landmark("root", 0);
      g.add_landmark("path_end", static_cast<Vertex>(n + len - 1));
      return g;
    }
    case Family::gnp: {
      need(n >= 1, "requires n >= 1");
      need(spec.p > 0.0 && spec.p <= 1.0, "requires 0 < p <= 1");
      constexpr std::uint32_t kMaxAttempts = 10000;
      for (std::uint32_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
        auto eng = rng::child(spec.seed, attempt);
        std::bernoulli_distribution edge(spec.p);
        GraphBuilder b(n);
        for (Vertex u = 0; u < n; ++u)
          for (Vertex v = u + 1; v < n; ++v)
            if (edge(eng)) b.add_edge(u, v);
        Graph g = std::move(b).build(name);
        if (validate(g).connected) {
          g.set_generation_retries(attempt);
          return g;
        }
      }
      throw ParameterError("gnp: no connected sample in " + std::to_string(kMaxAttempts) +
                           " attempts; p is below the connectivity threshold");
    }
    case Family::custom: {
      if (!spec.file.empty()) {
        Graph g = read_edge_list(spec.file);
        g.set_name(name);
        return g;
      }
      need(n >= 1, "inline custom graph requires n >= 1");
      GraphBuilder b(n);
      for (const auto& [u, v] : spec.edges) b.add_edge(u, v);
      return std::move(b).build(name, true);
    }
  }
  throw ParameterError("unhandled graph family");
}

inline Graph generate(std::string_view spec_text) { return generate(parse_spec(spec_text)); }

/// Resolves an origin given as a number or a landmark name ("root", "hair_base").
inline Vertex resolve_vertex(const Graph& g, std::string_view text) {
  if (auto lm = g.landmark(text)) return *lm;
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(std::string(text), &pos);
    if (pos == text.size() && v < g.size()) return static_cast<Vertex>(v);
  } catch (const std::exception&) {
  }
  throw DomainError("vertex '" + std::string(text) + "' is neither a landmark nor an index below " +
                    std::to_string(g.size()));
}

}  // namespace idla
