#include <catch_amalgamated.hpp>

#include <cmath>

#include "idla/bounds.hpp"
#include "idla/graph.hpp"
#include "idla/harness.hpp"

using namespace idla;
using Catch::Approx;

TEST_CASE("helpers", "[bounds]") {
  CHECK(bounds::ceil_log2(1) == 0);
  CHECK(bounds::ceil_log2(2) == 1);
  CHECK(bounds::ceil_log2(3) == 2);
  CHECK(bounds::ceil_log2(8) == 3);
  CHECK(bounds::ceil_log2(9) == 4);
  CHECK(bounds::mode_from_name("exact") == bounds::Mode::exact_subsets);
  CHECK(bounds::mode_from_name("spectral") == bounds::Mode::spectral_estimate);
  CHECK(bounds::mode_name(bounds::Mode::spectral_estimate) == "spectral");
  CHECK(bounds::mode_from_name("basic") == bounds::Mode::basic);
  CHECK_THROWS_AS(bounds::mode_from_name("guess"), ParameterError);
}

TEST_CASE("basic upper bound", "[bounds]") {
  CHECK(bounds::basic_upper(generate("path:3")) == Approx(6.0 * 4.0 * std::log2(3.0)));
  CHECK(bounds::basic_upper(generate("complete:16")) == Approx(6.0 * 15.0 * 4.0));
  CHECK(bounds::basic_upper(generate("cycle:16")) == Approx(6.0 * 64.0 * 4.0));
  CHECK(bounds::basic_upper(generate("path:2")) == Approx(6.0));
  CHECK(bounds::basic_upper(generate("complete:5")) == Approx(55.7259).epsilon(1e-5));
  CHECK_THROWS_AS(bounds::basic_upper(generate("complete:1")), DomainError);
}

TEST_CASE("set hitting estimate", "[bounds]") {
  CHECK(bounds::set_hitting_estimate(8, 0.5, 2) == Approx(126.55813654954612).epsilon(1e-12));
  // s = 1: the ceiling of log 1 is 0.
  CHECK(bounds::set_hitting_estimate(8, 0.5, 1) == Approx(bounds::kSetHittingConstant * 16.0));
  // At s = 5 the two logarithms round up differently.
  CHECK(bounds::set_hitting_estimate(8, 0.5, 5, false) ==
        Approx(bounds::kSetHittingConstant * 8.0 * 4.0 / (0.5 * 5.0)));
  CHECK(bounds::set_hitting_estimate(8, 0.5, 5, true) ==
        Approx(bounds::kSetHittingConstant * 8.0 * 3.0 / (0.5 * 5.0)));
  CHECK(bounds::set_hitting_estimate_poly(16, 4, 1.0, 1.0) ==
        Approx(bounds::kSetHittingConstant * 3.0 * 16.0 / 2.0));
  // ceil(ln 8) = ceil(ln 16) = 3, so doubling s halves the value.
  CHECK(bounds::set_hitting_estimate(32, 0.7, 8) == Approx(2.0 * bounds::set_hitting_estimate(32, 0.7, 16)));
  CHECK_THROWS_AS(bounds::set_hitting_estimate(8, 1.0, 2), DomainError);
  CHECK_THROWS_AS(bounds::set_hitting_estimate(8, 0.5, 0), DomainError);
  CHECK_THROWS_AS(bounds::set_hitting_estimate(8, 0.5, 9), DomainError);
  CHECK_THROWS_AS(bounds::set_hitting_estimate_poly(8, 2, 1.0, 0.0), DomainError);
}

TEST_CASE("exhaustive set hitting search", "[bounds]") {
  const auto c8 = bounds::max_set_hitting_exact(generate("cycle:8"));
  REQUIRE(c8.size() == 9);
  CHECK(c8[1] == Approx(21.0));
  CHECK(c8[8] == 0.0);
  for (std::size_t s = 1; s < 8; ++s) CHECK(c8[s] >= c8[s + 1]);
  CHECK_THROWS_AS(bounds::max_set_hitting_exact(generate("cycle:15")), CapabilityError);

  // The spectral estimate is an upper bound on regular graphs.
  for (const char* spec : {"cycle:8", "hypercube:8", "complete:6", "torus:2:3"}) {
    CAPTURE(spec);
    const Graph g = generate(spec);
    const auto exact = bounds::max_set_hitting_exact(g);
    const double lam = spectral(g, true).lambda2;
    for (std::size_t s = 1; s <= g.size(); ++s) CHECK(exact[s] <= bounds::set_hitting_estimate(g.size(), lam, s));
  }
}

TEST_CASE("refined bound arithmetic", "[bounds]") {
  const std::vector<double> terms{10.0, 8.0, 3.0};
  CHECK(bounds::refined_parallel_from(2.0, terms) == Approx(60.0 * (12.0 + 10.0 + 5.0)));
  CHECK(bounds::refined_sequential_from(2.0, terms) == Approx(30.0 * std::max({12.0, 20.0, 15.0})));

  const Graph c8 = generate("cycle:8");
  const auto t = bounds::set_terms(c8, bounds::Mode::exact_subsets, 0.0);
  REQUIRE(t.size() == 3);
  CHECK(t[0] == Approx(21.0));
  CHECK(t[1] == Approx(21.0));
  const auto best = bounds::max_set_hitting_exact(c8);
  CHECK(t[2] == Approx(best[2]));
  CHECK(bounds::refined_parallel_upper(c8, bounds::Mode::exact_subsets) ==
        Approx(bounds::refined_parallel_from(6.0, t)));
  CHECK(bounds::refined_sequential_upper(c8, bounds::Mode::exact_subsets) ==
        Approx(bounds::refined_sequential_from(6.0, t)));

  const double lazy_hit = hitting_times_exact(c8, true).max();
  CHECK(lazy_hit == Approx(32.0));
  CHECK(bounds::refined_parallel_upper(c8, bounds::Mode::exact_subsets) <= 120.0 * 3.0 * lazy_hit);

  CHECK_THROWS_AS(bounds::set_terms(generate("binary_tree:7"), bounds::Mode::spectral_estimate, 0.9),
                  CapabilityError);
  CHECK_NOTHROW(bounds::set_terms(generate("cycle:64"), bounds::Mode::spectral_estimate,
                                  spectral(generate("cycle:64"), true).lambda2));
}

TEST_CASE("lower bounds", "[bounds]") {
  const auto tree = bounds::lower_bounds(generate("binary_tree:7"));
  CHECK(tree.degree == Approx(4.0));
  REQUIRE(tree.tree);
  CHECK(*tree.tree == Approx(11.0));
  CHECK(tree.mixing == Approx(9.0));

  const auto cyc = bounds::lower_bounds(generate("cycle:8"));
  CHECK(cyc.degree == Approx(8.0));
  CHECK_FALSE(cyc.tree);
  CHECK(cyc.mixing == Approx(6.0));
}

TEST_CASE("full report on the 8-cycle", "[bounds]") {
  const auto r = bounds::report(generate("cycle:8"), bounds::Mode::exact_subsets);
  CHECK(r.n == 8);
  CHECK(r.t_hit == Approx(16.0));
  CHECK(r.t_mix_lazy == Approx(6.0));
  CHECK(r.lambda2_lazy == Approx(0.8535533905932737));
  CHECK(r.basic_upper == Approx(288.0));
  CHECK(r.set_terms.size() == 3);
  CHECK(r.lower_degree == Approx(8.0));
  CHECK(r.lower_mixing == Approx(6.0));
  CHECK(*r.refined_sequential_upper <= *r.refined_parallel_upper * 3.0);

  const auto s = bounds::report(generate("cycle:8"), bounds::Mode::spectral_estimate);
  for (std::size_t j = 0; j < 3; ++j) CHECK(s.set_terms[j] >= r.set_terms[j]);

  const auto b = bounds::report(generate("binary_tree:31"), bounds::Mode::basic);
  CHECK(b.set_terms.empty());
  CHECK_FALSE(b.refined_parallel_upper);
  CHECK(b.lower_tree);
  CHECK(b.basic_upper > 0.0);
}

TEST_CASE("bounds bracket simulated dispersion", "[bounds]") {
  for (const char* spec : {"cycle:8", "binary_tree:7", "complete:6", "lollipop:8"}) {
    CAPTURE(spec);
    const Graph g = generate(spec);
    const auto r = bounds::report(g, bounds::Mode::exact_subsets);
    RunConfig seq;
    RunConfig par;
    par.process = Process::parallel;
    const auto es = harness::estimate_dispersion(g, 0, seq, 2000, 5);
    const auto ep = harness::estimate_dispersion(g, 0, par, 2000, 6);
    CHECK(ep.mean <= r.basic_upper);
    CHECK(ep.mean <= *r.refined_parallel_upper);
    CHECK(es.mean <= *r.refined_sequential_upper);
    CHECK(es.mean + 3.0 * es.std_error >= r.lower_degree);
    if (r.lower_tree) CHECK(es.mean + 3.0 * es.std_error >= *r.lower_tree);
  }
}

TEST_CASE("kappa series", "[bounds]") {
  CHECK(static_cast<double>(bounds::kappa_cc_partial(1).partial) == Approx(0.5));
  CHECK(static_cast<double>(bounds::kappa_cc_partial(2).partial) == Approx(39.0 / 70.0).epsilon(1e-15));
  const auto a = bounds::kappa_cc_partial(1000);
  const auto b = bounds::kappa_cc_partial(200000);
  CHECK(b.partial >= a.partial);
  CHECK(b.partial - a.partial <= a.tail_bound);
  CHECK(static_cast<double>(b.partial) == Approx(0.5917).margin(1e-4));
  CHECK_THROWS_AS(bounds::kappa_cc_partial(0), DomainError);
}

TEST_CASE("clique oracles", "[bounds]") {
  CHECK(bounds::clique_oracles(1).seq_expectation == Approx(1.0));
  CHECK(bounds::clique_oracles(2).seq_expectation == Approx(2.0).epsilon(1e-10));
  CHECK(bounds::clique_oracles(10).seq_expectation == Approx(11.984839543108231).epsilon(1e-10));
  const auto big = bounds::clique_oracles(1000);
  CHECK(big.seq_expectation / 1000.0 == Approx(1.2546234560662202).epsilon(1e-9));
  CHECK(big.ctu_expectation / 1000.0 == Approx(1.64228963311488).epsilon(1e-12));
  CHECK(bounds::clique_oracles(2).ctu_expectation == Approx(1.0));
  CHECK_THROWS_AS(bounds::clique_oracles(0), DomainError);
}
