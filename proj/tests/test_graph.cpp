#include <catch_amalgamated.hpp>

#include <sstream>

#include "idla/graph.hpp"

using namespace idla;

TEST_CASE("complete, path, cycle and star have the expected shape", "[graph]") {
  const auto k5 = generate("complete:5");
  CHECK(k5.size() == 5);
  CHECK(k5.edge_count() == 10);
  CHECK(validate(k5).is_regular);

  const auto p4 = generate("path:4");
  CHECK(p4.edge_count() == 3);
  CHECK(validate(p4).is_tree);
  CHECK(*p4.landmark("end") == 0);
  CHECK(*p4.landmark("other_end") == 3);

  const auto c6 = generate("cycle:6");
  CHECK(c6.edge_count() == 6);
  CHECK(validate(c6).is_bipartite);
  CHECK_FALSE(validate(generate("cycle:5")).is_bipartite);

  const auto s5 = generate("star:5");
  CHECK(s5.degree(0) == 4);
  CHECK(validate(s5).is_tree);
  CHECK(resolve_vertex(s5, "center") == 0);
  CHECK(resolve_vertex(s5, "leaf") == 1);
}

TEST_CASE("binary tree uses heap layout and requires 2^k - 1 vertices", "[graph]") {
  const auto t = generate("binary_tree:15");
  CHECK(t.edge_count() == 14);
  CHECK(t.has_edge(0, 1));
  CHECK(t.has_edge(0, 2));
  CHECK(t.has_edge(6, 14));
  CHECK(t.degree(0) == 2);
  CHECK(t.degree(14) == 1);
  CHECK(*t.landmark("root") == 0);
  CHECK_THROWS_AS(generate("binary_tree:10"), ParameterError);
}

TEST_CASE("hypercube and lattices", "[graph]") {
  const auto q = generate("hypercube:16");
  CHECK(q.edge_count() == 32);
  CHECK(validate(q).is_regular);
  CHECK(q.degree(5) == 4);
  CHECK_THROWS_AS(generate("hypercube:12"), ParameterError);

  const auto torus = generate("torus:2:4");
  CHECK(torus.size() == 16);
  CHECK(torus.edge_count() == 32);
  CHECK(validate(torus).is_regular);

  const auto grid = generate("grid:2:3");
  CHECK(grid.size() == 9);
  CHECK(grid.edge_count() == 12);
  CHECK(*grid.landmark("center") == 4);
  CHECK(grid.degree(4) == 4);

  // Side 2 wraps onto the same edge, so it stays a simple graph.
  CHECK(generate("torus:3:2").edge_count() == 12);
  CHECK_THROWS_AS(generate("torus:2:1"), ParameterError);
}

TEST_CASE("lollipop and hair families", "[graph]") {
  const auto lol = generate("lollipop:8");
  CHECK(lol.edge_count() == 6 + 4);
  CHECK(*lol.landmark("bridge") == 3);
  CHECK(*lol.landmark("path_end") == 7);

  const auto hair = generate("clique_with_hair:6");
  CHECK(hair.size() == 6);
  CHECK(hair.edge_count() == 10 + 1);
  CHECK(hair.degree(5) == 1);
  CHECK(hair.has_edge(0, 5));
  CHECK(*hair.landmark("hair_tip") == 5);

  const auto pimple = generate("clique_hair_on_pimple:8:3");
  CHECK(pimple.degree(0) == 3);  // joined to 1, 2 and the tip
  CHECK(pimple.has_edge(0, 7));
  CHECK(pimple.degree(7) == 1);
  CHECK(pimple.edge_count() == 15 + 3);
  CHECK_THROWS_AS(generate("clique_hair_on_pimple:8:1"), ParameterError);

  const auto twp = generate("tree_with_path:63:0.25");
  // ceil(63^(1/4)) = 3 extra path vertices
  CHECK(twp.size() == 66);
  CHECK(validate(twp).is_tree);
  CHECK(twp.has_edge(0, 63));
  CHECK(*twp.landmark("path_end") == 65);
  CHECK_THROWS_AS(generate("tree_with_path:63:0.5"), ParameterError);
}

TEST_CASE("gnp samples are connected and reproducible", "[graph]") {
  const auto a = generate("gnp:40:0.15:7");
  const auto b = generate("gnp:40:0.15:7");
  CHECK(validate(a).connected);
  REQUIRE(a.edge_count() == b.edge_count());
  for (Vertex v = 0; v < a.size(); ++v) {
    const auto na = a.neighbors(v), nb = b.neighbors(v);
    CHECK(std::equal(na.begin(), na.end(), nb.begin(), nb.end()));
  }
  CHECK_THROWS_AS(generate("gnp:40:1e-9:1"), ParameterError);
}

TEST_CASE("spec strings round trip", "[graph]") {
  for (const char* s : {"complete:7", "torus:3:5", "gnp:20:0.5:9", "clique_hair_on_pimple:10:4", "tree_with_path:31:0.2"})
    CHECK(to_string(parse_spec(s)) == s);
  CHECK_THROWS_AS(parse_spec("dodecahedron:12"), ParameterError);
  CHECK_THROWS_AS(parse_spec("cycle"), ParameterError);
  CHECK_THROWS_AS(parse_spec("cycle:x"), ParameterError);
}

TEST_CASE("edge lists", "[graph]") {
  std::istringstream in("4\n0 1\n1 2\n2 3\n1 1\n");
  const auto g = parse_edge_list(in).build("inline", true);
  CHECK(g.edge_count() == 3);
  CHECK(g.loops(1) == 1);
  CHECK(g.degree(1) == 3);
  CHECK(g.volume() == 7);

  std::istringstream bad_vertex("3\n0 5\n");
  CHECK_THROWS_AS(parse_edge_list(bad_vertex), InputError);
  std::istringstream odd("3\n0 1 2\n");
  CHECK_THROWS_AS(parse_edge_list(odd), InputError);
  std::istringstream dup("3\n0 1\n1 0\n");
  CHECK_THROWS_AS(parse_edge_list(dup).build("dup", true), ParameterError);
  CHECK_THROWS_AS(read_edge_list("/nonexistent/graph.txt"), InputError);
}

TEST_CASE("lazy loop graph doubles every degree", "[graph]") {
  const auto c = generate("cycle:5");
  const auto lazy = with_lazy_loops(c);
  for (Vertex v = 0; v < 5; ++v) {
    CHECK(lazy.degree(v) == 4);
    CHECK(lazy.loops(v) == 2);
  }
  CHECK(lazy.volume() == 2 * c.volume());
}

TEST_CASE("diagnostics and connectivity", "[graph]") {
  GraphBuilder b(4);
  b.add_edge(0, 1).add_edge(2, 3);
  const auto g = std::move(b).build("two pieces");
  const auto d = validate(g);
  CHECK_FALSE(d.connected);
  CHECK_THROWS_AS(require_connected(g), ConnectivityError);
  CHECK_THROWS_AS(GraphBuilder(2).add_edge(0, 2), ParameterError);
  CHECK_THROWS_AS(resolve_vertex(generate("path:3"), "7"), DomainError);
}

TEST_CASE("walk_step follows edges and lazy walks stay about half the time", "[graph]") {
  const auto g = generate("cycle:7");
  auto eng = rng::child(99, 0);
  Vertex at = 0;
  int stays = 0;
  const int steps = 20000;
  for (int i = 0; i < steps; ++i) {
    const Vertex next = walk_step(g, at, eng, true);
    if (next == at) {
      ++stays;
    } else {
      CHECK(g.has_edge(at, next));
    }
    at = next;
  }
  // Binomial(20000, 1/2): 5 sigma is about 354.
  CHECK(std::abs(stays - steps / 2) < 360);
}
