#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "idla/graph.hpp"
#include "idla/walkstats.hpp"

using namespace idla;
using Catch::Approx;

namespace {

std::vector<std::string> small_graphs() {
  return {"path:3",         "path:6",       "cycle:4",  "cycle:7",          "complete:5",
          "star:5",         "binary_tree:7", "lollipop:8", "hypercube:8",   "grid:2:3",
          "clique_with_hair:6", "clique_hair_on_pimple:7:3", "gnp:12:0.4:3"};
}

}  // namespace

TEST_CASE("hand-derived hitting times", "[walkstats]") {
  const auto p3 = hitting_times_exact(generate("path:3"), false);
  CHECK(p3(0, 2) == Approx(4.0).epsilon(1e-12));
  CHECK(p3(2, 0) == Approx(4.0).epsilon(1e-12));
  CHECK(p3.max_relative_residual <= 1e-10);

  const auto k5 = hitting_times_exact(generate("complete:5"), false);
  for (Vertex u = 0; u < 5; ++u)
    for (Vertex v = 0; v < 5; ++v) CHECK(k5(u, v) == Approx(u == v ? 0.0 : 4.0).margin(1e-12));
}

TEST_CASE("hitting tables match exact rational values", "[walkstats]") {
  CHECK(hitting_times_exact(generate("lollipop:8"), false).max() == Approx(67.0).epsilon(1e-12));
  CHECK(hitting_times_exact(generate("lollipop:8"), false)(7, 0) == Approx(23.0).epsilon(1e-12));
  CHECK(hitting_times_exact(generate("binary_tree:7"), false).max() == Approx(24.0).epsilon(1e-12));
  CHECK(hitting_times_exact(generate("binary_tree:15"), false).max() == Approx(84.0).epsilon(1e-12));
  CHECK(hitting_times_exact(generate("hypercube:16"), false).max() == Approx(64.0 / 3.0).epsilon(1e-12));
  CHECK(hitting_times_exact(generate("cycle:16"), false).max() == Approx(64.0).epsilon(1e-12));
  CHECK(hitting_times_exact(generate("complete:16"), false).max() == Approx(15.0).epsilon(1e-12));
}

TEST_CASE("table invariants", "[walkstats]") {
  for (const auto& s : small_graphs()) {
    CAPTURE(s);
    const auto g = generate(s);
    const auto t = hitting_times_exact(g, false);
    CHECK(t.max_relative_residual <= 1e-10);
    CHECK(std::accumulate(t.pi.begin(), t.pi.end(), 0.0) == Approx(1.0));
    for (Vertex u = 0; u < g.size(); ++u) {
      const auto dist = bfs_distances(g, u);
      CHECK(t(u, u) == 0.0);
      for (Vertex v = 0; v < g.size(); ++v) CHECK(t(v, u) >= static_cast<double>(dist[v]) - 1e-9);
    }
  }
}

TEST_CASE("absorbing and fundamental-matrix routes agree", "[walkstats]") {
  for (const auto& s : small_graphs()) {
    CAPTURE(s);
    const auto g = generate(s);
    for (bool lazy : {false, true}) {
      const auto a = hitting_times_exact(g, lazy, HittingMethod::absorbing);
      const auto f = hitting_times_exact(g, lazy, HittingMethod::fundamental);
      CHECK(f.max_relative_residual <= 1e-10);
      CHECK((a.t_hit - f.t_hit).cwiseAbs().maxCoeff() <= 1e-8 * a.max());
    }
  }
}

TEST_CASE("lazy hitting times are exactly twice the simple ones", "[walkstats]") {
  for (const auto& s : small_graphs()) {
    CAPTURE(s);
    const auto g = generate(s);
    const auto simple = hitting_times_exact(g, false);
    const auto lazy = hitting_times_exact(g, true);
    CHECK(lazy.lazy);
    for (Vertex u = 0; u < g.size(); ++u)
      for (Vertex v = 0; v < g.size(); ++v) {
        CHECK(lazy(u, v) >= simple(u, v));
        CHECK(lazy(u, v) == Approx(2.0 * simple(u, v)).epsilon(1e-9).margin(1e-9));
      }
  }
}

TEST_CASE("set hitting times", "[walkstats]") {
  const auto p3 = generate("path:3");
  const std::vector<double> at_end{1.0, 0.0, 0.0};
  const std::vector<Vertex> far{2};
  CHECK(hitting_time_set_exact(p3, at_end, far, false) == Approx(4.0));

  const auto c4 = generate("cycle:4");
  const auto pi = walk::stationary(c4);
  const std::vector<Vertex> all{0, 1, 2, 3};
  CHECK(hitting_time_set_exact(c4, pi, all, false) == 0.0);
  // Average of k(4-k) over k = 0, 1, 2, 1.
  const std::vector<Vertex> one{0};
  CHECK(hitting_time_set_exact(c4, pi, one, false) == Approx(2.5));

  const auto c8 = generate("cycle:8");
  CHECK(hitting_time_set_exact(c8, walk::stationary(c8), one, true) == Approx(21.0));

  const std::vector<Vertex> none;
  CHECK_THROWS_AS(hitting_time_set_exact(c4, pi, none, false), DomainError);
}

TEST_CASE("set hitting time is monotone under inclusion", "[walkstats]") {
  const auto g = generate("lollipop:7");
  const auto pi = walk::stationary(g);
  for (unsigned mask = 1; mask < (1U << 7); ++mask) {
    std::vector<Vertex> S;
    for (Vertex v = 0; v < 7; ++v)
      if (mask >> v & 1U) S.push_back(v);
    const double h = hitting_time_set_exact(g, pi, S, true);
    for (Vertex extra = 0; extra < 7; ++extra) {
      if (mask >> extra & 1U) continue;
      auto bigger = S;
      bigger.push_back(extra);
      CHECK(hitting_time_set_exact(g, pi, bigger, true) <= h + 1e-9);
    }
  }
}

TEST_CASE("commute times and resistance", "[walkstats]") {
  const auto k2 = commute_and_resistance(generate("complete:2"), 0, 1);
  CHECK(k2.t_com == Approx(2.0));
  CHECK(k2.resistance == Approx(1.0));

  const auto p3 = commute_and_resistance(generate("path:3"), 0, 2);
  CHECK(p3.t_com == Approx(8.0));
  CHECK(p3.resistance == Approx(2.0));

  CHECK(commute_and_resistance(generate("star:4"), 1, 2).resistance == Approx(2.0));
  CHECK(effective_resistance(generate("lollipop:8"), 0, 7) == Approx(4.5));
  CHECK_THROWS_AS(commute_and_resistance(generate("path:3"), 1, 1), DomainError);
}

TEST_CASE("commute-time identity against the electrical solve", "[walkstats]") {
  for (const auto& s : small_graphs()) {
    CAPTURE(s);
    const auto g = generate(s);
    const auto t = hitting_times_exact(g, false);
    for (Vertex u = 0; u < g.size(); ++u)
      for (Vertex v = u + 1; v < g.size(); ++v) {
        const double lhs = t(u, v) + t(v, u);
        const double rhs = static_cast<double>(g.volume()) * effective_resistance(g, u, v);
        CHECK(std::abs(lhs - rhs) <= 1e-6 * rhs);
      }
  }
}

TEST_CASE("essential edges of a tree", "[walkstats]") {
  // For a leaf v with neighbour u, t_hit(u, v) = 2|A(u,v)| - 1 where A(u,v)
  // is the component of u after removing the edge: here n - 1 vertices.
  for (const char* s : {"binary_tree:15", "star:6", "path:7", "tree_with_path:15:0.2"}) {
    CAPTURE(s);
    const auto g = generate(s);
    const auto t = hitting_times_exact(g, false);
    for (Vertex v = 0; v < g.size(); ++v) {
      if (g.degree(v) != 1) continue;
      const Vertex u = g.neighbors(v)[0];
      CHECK(t(u, v) == Approx(2.0 * static_cast<double>(g.size() - 1) - 1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("hit before return", "[walkstats]") {
  const auto tree = generate("binary_tree:7");
  for (Vertex leaf : {3U, 4U, 5U, 6U}) CHECK(hit_before_return(tree, 0, leaf) == Approx(0.25).epsilon(1e-12));
  CHECK(hit_before_return(generate("complete:2"), 0, 1) == Approx(1.0));
  CHECK(hit_before_return(generate("cycle:4"), 0, 2) == Approx(0.5));
  CHECK_THROWS_AS(hit_before_return(tree, 2, 2), DomainError);

  for (const char* s : {"binary_tree:15", "path:6", "star:5", "cycle:6", "cycle:9"}) {
    CAPTURE(s);
    const auto g = generate(s);
    for (Vertex r = 0; r < g.size(); ++r)
      for (Vertex u = 0; u < g.size(); ++u) {
        if (u == r) continue;
        const double expected = 1.0 / (effective_resistance(g, r, u) * static_cast<double>(g.degree(r)));
        CHECK(std::abs(hit_before_return(g, r, u) - expected) <= 1e-9);
      }
  }
}

TEST_CASE("second eigenvalue", "[walkstats]") {
  CHECK(spectral(generate("complete:2"), true).lambda2 == Approx(0.0).margin(1e-12));
  CHECK(spectral(generate("cycle:4"), true).lambda2 == Approx(0.5).margin(1e-12));
  CHECK(spectral(generate("complete:4"), false).lambda2 == Approx(1.0 / 3.0).margin(1e-12));
  CHECK(spectral(generate("cycle:8"), true).lambda2 == Approx(0.8535533905932737).margin(1e-10));
  CHECK(spectral(generate("path:5"), true).lambda2 == Approx(0.8535533905932737).margin(1e-10));
  CHECK(spectral(generate("binary_tree:7"), true).lambda2 == Approx(0.908248290463863).margin(1e-10));
  // Bipartite: the simple walk has eigenvalue -1.
  CHECK(spectral(generate("cycle:6"), false).lambda2 == Approx(1.0).margin(1e-12));
}

TEST_CASE("iterative deflation matches the dense solver", "[walkstats]") {
  SpectralOptions iterative;
  iterative.dense_cap = 4;
  iterative.allow_iterative = true;
  for (const char* s : {"cycle:9", "hypercube:16", "lollipop:10"}) {
    CAPTURE(s);
    const auto g = generate(s);
    CHECK(spectral(g, true, iterative).lambda2 == Approx(spectral(g, true).lambda2).margin(1e-6));
  }
  SpectralOptions capped;
  capped.dense_cap = 4;
  CHECK_THROWS_AS(spectral(generate("cycle:9"), true, capped), CapabilityError);
}

TEST_CASE("mixing times", "[walkstats]") {
  CHECK(mixing_time_exact(generate("complete:2"), 0.25, true).steps == 1);
  for (std::size_t n : {5U, 6U, 9U}) {
    const auto m = mixing_time_exact(generate("complete:" + std::to_string(n)), 0.25, false);
    CHECK(m.converged);
    CHECK(m.steps == 1);
  }
  CHECK(mixing_time_exact(generate("cycle:8"), 0.25, true).steps == 6);
  CHECK(mixing_time_exact(generate("path:5"), 0.25, true).steps == 6);
  CHECK(mixing_time_exact(generate("binary_tree:7"), 0.25, true).steps == 9);
  const auto periodic = mixing_time_exact(generate("cycle:4"), 0.25, false);
  CHECK_FALSE(periodic.converged);
  const auto capped = mixing_time_exact(generate("cycle:50"), 0.01, true, 10);
  CHECK_FALSE(capped.converged);
  CHECK(capped.steps == 10);
}

TEST_CASE("conductance", "[walkstats]") {
  CHECK(conductance_exact(generate("complete:2")) == Approx(0.5));
  CHECK(conductance_exact(generate("cycle:4")) == Approx(0.25));
  CHECK(conductance_exact(generate("path:4")) == Approx(1.0 / 6.0));
  CHECK(conductance_exact(generate("complete:4")) == Approx(1.0 / 3.0));
  CHECK(conductance_exact(generate("binary_tree:7")) == Approx(0.1));
  CHECK_THROWS_AS(conductance_exact(generate("cycle:21")), CapabilityError);

  for (const auto& s : small_graphs()) {
    CAPTURE(s);
    const auto g = generate(s);
    const double gap = spectral(g, true).gap;
    const double phi = conductance_exact(g);
    CHECK(gap / 2.0 <= phi + 1e-12);
    CHECK(phi <= std::sqrt(2.0 * gap) + 1e-12);
  }
}

TEST_CASE("disconnected graphs are rejected", "[walkstats]") {
  GraphBuilder b(3);
  b.add_edge(0, 1);
  const auto g = std::move(b).build("broken");
  CHECK_THROWS_AS(hitting_times_exact(g, false), ConnectivityError);
  CHECK_THROWS_AS(spectral(g, true), ConnectivityError);
}
