// block.hpp: IDLA histories as irregular 2-D arrays and the Cut & Paste maps.
//
// Row i of a Block is the trajectory of particle i: cells (i,0)..(i,rho_i) with
// (i,0) the origin and (i,rho_i) the vertex it settled on. Row 0 is always the
// singleton [origin]. Particles and rows are 0-based throughout.
//
// Reading orders:
//   sequential  rows in turn, each row left to right
//   parallel    column by column, rows top to bottom within a column
// A "row order" (a permutation of 0..n-1 fixing 0) replaces "rows in turn" and
// "top to bottom" by the given sequence in both readings; this is how a
// permutation priority for parallel conflicts is expressed.
#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "idla/graph.hpp"
#include "idla/types.hpp"

namespace idla {

struct Block {
  Vertex origin = 0;
  std::vector<std::vector<Vertex>> rows;

  std::size_t size() const noexcept { return rows.size(); }
  /// rho_i, the number of moves in row i.
  std::size_t length(std::size_t i) const { return rows[i].size() - 1; }
  Vertex end(std::size_t i) const { return rows[i].back(); }

  bool operator==(const Block&) const = default;
  auto operator<=>(const Block&) const = default;
};

/// T(i,j): time of particle i's j-th move; T(i,0) = 0.
struct TimingArray {
  std::vector<std::vector<double>> times;

  bool operator==(const TimingArray&) const = default;
};

struct Cell {
  std::size_t row = 0;
  std::size_t col = 0;

  bool operator==(const Cell&) const = default;
};

using RowOrder = std::vector<std::size_t>;

enum class BlockKind { any, sequential, parallel };

inline RowOrder identity_order(std::size_t n) {
  RowOrder order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  return order;
}

/// Throws unless `order` is a permutation of 0..n-1 with order[0] = 0.
inline void check_order(const RowOrder& order, std::size_t n) {
  if (order.size() != n) throw ParameterError("row order has " + std::to_string(order.size()) + " entries, expected " +
                                              std::to_string(n));
  if (n > 0 && order[0] != 0) throw ParameterError("row order must keep particle 0 first");
  std::vector<char> hit(n, 0);
  for (std::size_t r : order) {
    if (r >= n || hit[r]) throw ParameterError("row order is not a permutation");
    hit[r] = 1;
  }
}

/// Block whose row k is block.rows[order[k]].
inline Block permute_rows(const Block& block, const RowOrder& order) {
  check_order(order, block.size());
  Block out;
  out.origin = block.origin;
  out.rows.reserve(block.size());
  for (std::size_t r : order) out.rows.push_back(block.rows[r]);
  return out;
}

struct ValidityReport {
  bool well_formed = true;  // nonempty rows, each starting at the origin, row 0 = [origin]
  bool prop_a = true;       // distinct row endpoints
  bool path_valid = true;   // consecutive cells adjacent in the host graph
  bool seqdef = true;
  bool pardef = true;
  std::optional<Cell> violation;
  std::string message;

  bool ok(BlockKind kind) const {
    const bool base = well_formed && prop_a && path_valid;
    switch (kind) {
      case BlockKind::sequential:
        return base && seqdef;
      case BlockKind::parallel:
        return base && pardef;
      default:
        return base;
    }
  }
};

struct ValidityOptions {
  /// Accept repeated cells (a lazy stay) even where the graph has no loop.
  bool allow_stay = false;
  /// Row order for both readings; identity when absent.
  std::optional<RowOrder> order;
};

namespace detail {

inline std::size_t label_bound(const Block& b) {
  std::size_t bound = static_cast<std::size_t>(b.origin) + 1;
  for (const auto& row : b.rows)
    for (Vertex v : row) bound = std::max<std::size_t>(bound, static_cast<std::size_t>(v) + 1);
  return bound;
}

inline void fail(ValidityReport& r, bool ValidityReport::*flag, Cell c, std::string msg) {
  r.*flag = false;
  if (!r.violation) {
    r.violation = c;
    r.message = std::move(msg);
  }
}

inline std::string cell_text(Cell c) { return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")"; }

inline void check_structure(const Block& b, ValidityReport& r) {
  if (b.rows.empty()) {
    r.well_formed = false;
    r.message = "block has no rows";
    return;
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (b.rows[i].empty()) {
      fail(r, &ValidityReport::well_formed, {i, 0}, "row " + std::to_string(i) + " is empty");
      return;
    }
    if (b.rows[i][0] != b.origin)
      fail(r, &ValidityReport::well_formed, {i, 0}, "row " + std::to_string(i) + " does not start at the origin");
  }
  if (b.rows[0].size() != 1) fail(r, &ValidityReport::well_formed, {0, 1}, "row 0 must be the singleton [origin]");

  std::vector<std::size_t> owner(label_bound(b), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const Vertex e = b.end(i);
    if (owner[e] != b.size()) {
      fail(r, &ValidityReport::prop_a, {i, b.length(i)},
           "rows " + std::to_string(owner[e]) + " and " + std::to_string(i) + " both end at vertex " +
               std::to_string(e));
    } else {
      owner[e] = i;
    }
  }
}

// First occurrence in the given reading must be a row end.
inline void check_first_occurrence(const Block& b, const RowOrder& order, bool parallel, ValidityReport& r) {
  std::vector<char> seen(label_bound(b), 0);
  bool ValidityReport::*flag = parallel ? &ValidityReport::pardef : &ValidityReport::seqdef;
  const char* what = parallel ? "parallel" : "sequential";
  auto visit = [&](std::size_t i, std::size_t t) {
    const Vertex v = b.rows[i][t];
    if (seen[v]) return true;
    seen[v] = 1;
    if (t != b.length(i)) {
      fail(r, flag, {i, t},
           "vertex " + std::to_string(v) + " first occurs in " + what + " order at " + cell_text({i, t}) +
               ", which is not a row end");
      return false;
    }
    return true;
  };
  if (!parallel) {
    for (std::size_t i : order)
      for (std::size_t t = 0; t < b.rows[i].size(); ++t)
        if (!visit(i, t)) return;
    return;
  }
  std::size_t longest = 0;
  for (const auto& row : b.rows) longest = std::max(longest, row.size());
  for (std::size_t t = 0; t < longest; ++t)
    for (std::size_t i : order)
      if (t < b.rows[i].size() && !visit(i, t)) return;
}

}  // namespace detail

/// Graph-free check of the structure, propA and the requested read-order rule.
inline ValidityReport check_block(const Block& b, BlockKind kind, const std::optional<RowOrder>& order = std::nullopt) {
  ValidityReport r;
  detail::check_structure(b, r);
  if (!r.well_formed) return r;
  const RowOrder ord = order ? *order : identity_order(b.size());
  check_order(ord, b.size());
  if (kind != BlockKind::parallel) detail::check_first_occurrence(b, ord, false, r);
  if (kind != BlockKind::sequential) detail::check_first_occurrence(b, ord, true, r);
  return r;
}

/// Full check against a host graph. Cells must be vertices of `g` and each row a
/// walk in `g`. kind = any still evaluates both seqdef and pardef.
inline ValidityReport check_validity(const Block& b, const Graph& g, BlockKind kind = BlockKind::any,
                                     const ValidityOptions& opts = {}) {
  ValidityReport r;
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t t = 0; t < b.rows[i].size(); ++t)
      if (b.rows[i][t] >= g.size()) {
        r.well_formed = false;
        r.violation = Cell{i, t};
        r.message = "vertex " + std::to_string(b.rows[i][t]) + " at " + detail::cell_text({i, t}) +
                    " is outside the graph";
        return r;
      }
  r = check_block(b, BlockKind::any, opts.order);
  if (!r.well_formed) return r;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& row = b.rows[i];
    for (std::size_t t = 1; t < row.size(); ++t) {
      const bool stay = row[t] == row[t - 1];
      if (g.has_edge(row[t - 1], row[t]) || (stay && opts.allow_stay)) continue;
      detail::fail(r, &ValidityReport::path_valid, {i, t},
                   "step " + std::to_string(row[t - 1]) + " -> " + std::to_string(row[t]) + " at " +
                       detail::cell_text({i, t}) + " is not an edge");
      break;
    }
  }
  if (kind == BlockKind::sequential) r.pardef = true;
  if (kind == BlockKind::parallel) r.seqdef = true;
  return r;
}

inline bool is_sequential(const Block& b, const std::optional<RowOrder>& order = std::nullopt) {
  return check_block(b, BlockKind::sequential, order).ok(BlockKind::sequential);
}

inline bool is_parallel(const Block& b, const std::optional<RowOrder>& order = std::nullopt) {
  return check_block(b, BlockKind::parallel, order).ok(BlockKind::parallel);
}

// ---------------------------------------------------------------------------
// Cut & Paste

/// CP_(i,t): cut cells (i,t+1)..(i,rho_i) and append them to the row ending at
/// L(i,t). Timing entries, when given, travel with their cells.
inline void cut_paste_in_place(Block& b, std::size_t i, std::size_t t, TimingArray* timing = nullptr) {
  if (i >= b.size() || t >= b.rows[i].size())
    throw DomainError("cell " + detail::cell_text({i, t}) + " is not in the block");
  if (t == b.length(i)) return;
  const Vertex v = b.rows[i][t];
  std::size_t k = b.size();
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (b.end(j) == v) {
      if (k != b.size()) throw IntegrityError("two rows end at vertex " + std::to_string(v) + "; propA fails");
      k = j;
    }
  }
  if (k == b.size()) throw IntegrityError("no row ends at vertex " + std::to_string(v) + "; propA fails");
  if (k == i) return;

  auto& src = b.rows[i];
  auto& dst = b.rows[k];
  dst.insert(dst.end(), src.begin() + static_cast<std::ptrdiff_t>(t + 1), src.end());
  src.resize(t + 1);
  if (timing) {
    auto& ts = timing->times.at(i);
    auto& td = timing->times.at(k);
    td.insert(td.end(), ts.begin() + static_cast<std::ptrdiff_t>(t + 1), ts.end());
    ts.resize(t + 1);
  }
}

inline Block cut_paste(Block b, std::size_t i, std::size_t t) {
  cut_paste_in_place(b, i, t);
  return b;
}

namespace detail {

// Column-by-column reading with CP at every first occurrence.
inline Block read_columns(Block b, const RowOrder& ord) {
  std::vector<char> seen(label_bound(b), 0);
  for (std::size_t t = 0;; ++t) {
    bool any = false;
    for (std::size_t i : ord) {
      if (t >= b.rows[i].size()) continue;
      any = true;
      const Vertex v = b.rows[i][t];
      if (seen[v]) continue;
      seen[v] = 1;
      cut_paste_in_place(b, i, t);
    }
    if (!any) break;
  }
  return b;
}

}  // namespace detail

/// Sequential to parallel: read columns, CP at every first occurrence.
inline Block stp(Block b, const std::optional<RowOrder>& order = std::nullopt) {
  const RowOrder ord = order ? *order : identity_order(b.size());
  const auto report = check_block(b, BlockKind::sequential, ord);
  if (!report.ok(BlockKind::sequential)) throw ValidityError("stp needs a valid sequential block: " + report.message);
  return detail::read_columns(std::move(b), ord);
}

/// Parallel to sequential: read rows, CP at the first new vertex of each row.
inline Block pts(Block b, const std::optional<RowOrder>& order = std::nullopt) {
  const RowOrder ord = order ? *order : identity_order(b.size());
  const auto report = check_block(b, BlockKind::parallel, ord);
  if (!report.ok(BlockKind::parallel)) throw ValidityError("pts needs a valid parallel block: " + report.message);

  std::vector<char> seen(detail::label_bound(b), 0);
  for (std::size_t i : ord) {
    for (std::size_t t = 0; t < b.rows[i].size(); ++t) {
      const Vertex v = b.rows[i][t];
      if (seen[v]) continue;
      seen[v] = 1;
      cut_paste_in_place(b, i, t);
      break;
    }
  }
  return b;
}

struct UniformBlock {
  Block block;
  TimingArray timing;
  /// Number of R entries consumed (the time of the last move).
  std::size_t steps = 0;
};

/// Parallel to R-uniform. At time t = 1, 2, ... the next unread cell of row
/// R[t-1] is read and stamped T = t; a first occurrence triggers CP there. Rows
/// whose cells are all read ignore their turn. Cells moved by CP are always
/// unread, so they are stamped when their new row reaches them.
inline UniformBlock ptu(Block b, const std::vector<std::size_t>& R) {
  const auto report = check_block(b, BlockKind::parallel);
  if (!report.ok(BlockKind::parallel)) throw ValidityError("ptu needs a valid parallel block: " + report.message);
  const std::size_t n = b.size();

  UniformBlock out;
  std::vector<char> seen(detail::label_bound(b), 0);
  std::vector<std::size_t> cursor(n, 0);
  out.timing.times.assign(n, {0.0});
  seen[b.origin] = 1;

  std::size_t unread = 0;
  for (std::size_t i = 0; i < n; ++i) unread += b.length(i);

  std::size_t t = 0;
  while (unread > 0) {
    if (t >= R.size())
      throw InputError("order sequence exhausted after " + std::to_string(R.size()) + " entries with " +
                       std::to_string(unread) + " cell(s) still unread; at least that many more entries are required");
    const std::size_t i = R[t++];
    if (i == 0 || i >= n) throw InputError("order sequence entry " + std::to_string(i) + " outside 1.." +
                                           std::to_string(n - 1));
    if (cursor[i] == b.length(i)) continue;
    const std::size_t c = ++cursor[i];
    out.timing.times[i].push_back(static_cast<double>(t));
    --unread;
    const Vertex v = b.rows[i][c];
    if (seen[v]) continue;
    seen[v] = 1;
    // The cut cells are unread; CP keeps the count of unread cells unchanged.
    cut_paste_in_place(b, i, c);
  }
  out.block = std::move(b);
  out.steps = t;
  return out;
}

/// Replays R against a block and timing array; true iff they form the R-uniform
/// history: each row's j-th move happens at its j-th turn, and every first
/// occurrence in that reading is a row end.
inline bool is_uniform(const Block& b, const TimingArray& timing, const std::vector<std::size_t>& R) {
  const auto report = check_block(b, BlockKind::any);
  if (!report.ok(BlockKind::any) || timing.times.size() != b.size()) return false;
  const std::size_t n = b.size();
  for (std::size_t i = 0; i < n; ++i)
    if (timing.times[i].size() != b.rows[i].size() || timing.times[i][0] != 0.0) return false;
  std::vector<char> seen(detail::label_bound(b), 0);
  std::vector<std::size_t> cursor(n, 0);
  seen[b.origin] = 1;
  std::size_t unread = 0;
  for (std::size_t i = 0; i < n; ++i) unread += b.length(i);
  for (std::size_t t = 0; unread > 0; ++t) {
    if (t >= R.size()) return false;
    const std::size_t i = R[t];
    if (i >= n || cursor[i] == b.length(i)) continue;
    const std::size_t c = ++cursor[i];
    --unread;
    if (timing.times[i][c] != static_cast<double>(t + 1)) return false;
    const Vertex v = b.rows[i][c];
    if (!seen[v]) {
      seen[v] = 1;
      if (c != b.length(i)) return false;
    }
  }
  return true;
}

/// R-uniform to parallel: the column reading of stp, which ignores timing.
inline Block utp(Block b, const TimingArray& timing, const std::vector<std::size_t>& R) {
  if (!is_uniform(b, timing, R)) throw ValidityError("utp needs a valid R-uniform block and timing array");
  const RowOrder ord = identity_order(b.size());
  return detail::read_columns(std::move(b), ord);
}

struct BlockStats {
  std::size_t total_length = 0;
  std::size_t max_row_length = 0;
  std::vector<std::size_t> row_lengths;
};

inline BlockStats block_stats(const Block& b) {
  BlockStats s;
  s.row_lengths.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::size_t len = b.rows[i].empty() ? 0 : b.length(i);
    s.row_lengths.push_back(len);
    s.total_length += len;
    s.max_row_length = std::max(s.max_row_length, len);
  }
  return s;
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration

struct EnumerationCap {
  std::size_t max_vertices = 4;
  std::size_t max_length = 8;
};

/// All blocks of the given kind with total length m on `g` from `origin`, in
/// lexicographic order of their rows. Rows are walks in g (loops allow stays).
inline std::vector<Block> enumerate_blocks(const Graph& g, Vertex origin, std::size_t m, BlockKind kind,
                                           const EnumerationCap& cap = {}) {
  const std::size_t n = g.size();
  if (n > cap.max_vertices || m > cap.max_length)
    throw CapabilityError("enumeration capped at n <= " + std::to_string(cap.max_vertices) + ", m <= " +
                          std::to_string(cap.max_length) + " (got n = " + std::to_string(n) + ", m = " +
                          std::to_string(m) + ")");
  if (origin >= n) throw DomainError("origin outside the graph");
  if (kind == BlockKind::any) throw DomainError("enumeration needs kind sequential or parallel");

  std::vector<Block> out;
  Block cur;
  cur.origin = origin;
  cur.rows.push_back({origin});
  std::vector<char> ends(n, 0);
  ends[origin] = 1;

  // Walks from the origin of exact length `len`, extending `walk`.
  std::function<void(std::size_t, std::size_t)> add_row;
  std::function<void(std::vector<Vertex>&, std::size_t, std::size_t, std::size_t)> extend;

  extend = [&](std::vector<Vertex>& walk, std::size_t len, std::size_t row, std::size_t budget) {
    if (walk.size() == len + 1) {
      const Vertex e = walk.back();
      if (ends[e]) return;
      ends[e] = 1;
      cur.rows.push_back(walk);
      add_row(row + 1, budget - len);
      cur.rows.pop_back();
      ends[e] = 0;
      return;
    }
    const Vertex at = walk.back();
    std::vector<Vertex> moves(g.neighbors(at).begin(), g.neighbors(at).end());
    if (g.loops(at) > 0) moves.push_back(at);
    std::sort(moves.begin(), moves.end());
    for (Vertex w : moves) {
      walk.push_back(w);
      extend(walk, len, row, budget);
      walk.pop_back();
    }
  };

  add_row = [&](std::size_t row, std::size_t budget) {
    if (row == n) {
      if (budget != 0) return;
      if (check_block(cur, kind).ok(kind)) out.push_back(cur);
      return;
    }
    // Rows after the first need at least one move to leave the occupied origin.
    const std::size_t later = n - row - 1;
    if (budget < later + 1) return;
    const std::size_t first = later == 0 ? budget : 1;
    for (std::size_t len = first; len + later <= budget; ++len) {
      std::vector<Vertex> walk{origin};
      extend(walk, len, row, budget);
    }
  };

  if (n == 1) {
    if (m == 0) out.push_back(cur);
    return out;
  }
  add_row(1, m);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace idla
