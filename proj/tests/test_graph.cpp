#include <doctest.h>

#include <cmath>

#include "graph.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace bl;

namespace {

WeightedGraph k2() { return WeightedGraph::build(2, std::vector<Edge>{{0, 1, 1.0}}); }

WeightedGraph unit_triangle() {
  return WeightedGraph::build(3, std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
}

WeightedGraph unit_path(vertex_id n) {
  std::vector<Edge> e;
  for (vertex_id v = 0; v + 1 < n; ++v) e.push_back({v, vertex_id(v + 1), 1.0});
  return WeightedGraph::build(n, e);
}

WeightedGraph random_connected(vertex_id n, double extra_p, Rng& rng) {
  std::vector<Edge> e;
  for (vertex_id v = 1; v < n; ++v)
    e.push_back({vertex_id(rng.next_below(v)), v, 0.25 + rng.next_double()});
  for (vertex_id u = 0; u < n; ++u)
    for (vertex_id v = u + 1; v < n; ++v) {
      bool tree_edge = false;
      for (const Edge& ed : e)
        if ((ed.u == u && ed.v == v) || (ed.u == v && ed.v == u)) tree_edge = true;
      if (!tree_edge && rng.next_double() < extra_p)
        e.push_back({u, v, 0.25 + rng.next_double()});
    }
  return WeightedGraph::build(n, e);
}

}  // namespace

TEST_CASE("build_graph validates input") {
  auto g = k2();
  CHECK(g.n_vertices() == 2);
  CHECK(g.mu(0) == 1.0);
  CHECK(g.mu(1) == 1.0);

  auto tri = unit_triangle();
  CHECK(tri.mu(0) == 2.0);
  CHECK(tri.mu(1) == 2.0);
  CHECK(tri.mu(2) == 2.0);

  CHECK_THROWS_AS(WeightedGraph::build(4, std::vector<Edge>{{0, 1, 1.0}, {2, 3, 1.0}}), error);
  CHECK_THROWS_AS(WeightedGraph::build(2, std::vector<Edge>{{0, 1, 0.0}}), error);
  CHECK_THROWS_AS(WeightedGraph::build(2, std::vector<Edge>{{0, 1, -2.0}}), error);
  CHECK_THROWS_AS(WeightedGraph::build(1, std::vector<Edge>{{0, 0, 1.0}}), error);
  CHECK_THROWS_AS(WeightedGraph::build(2, std::vector<Edge>{{0, 3, 1.0}}), error);
  // Self-loops need the multigraph flag.
  CHECK_THROWS_AS(WeightedGraph::build(2, std::vector<Edge>{{0, 1, 1.0}, {1, 1, 1.0}}), error);
  auto mg = WeightedGraph::build(2, std::vector<Edge>{{0, 1, 1.0}, {1, 1, 1.0}}, true);
  CHECK(mg.mu(1) == doctest::Approx(3.0));  // loop counts twice
}

TEST_CASE("stationary measure") {
  auto m2 = stationary_measure(k2());
  CHECK(m2.total_mass == doctest::Approx(2.0));
  CHECK(m2.pi[0] == doctest::Approx(0.5));

  auto mt = stationary_measure(unit_triangle());
  CHECK(mt.total_mass == doctest::Approx(6.0));
  for (int i = 0; i < 3; ++i) CHECK(mt.pi[i] == doctest::Approx(1.0 / 3.0));

  auto mp = stationary_measure(unit_path(3));
  CHECK(mp.pi[0] == doctest::Approx(0.25));
  CHECK(mp.pi[1] == doctest::Approx(0.5));
  CHECK(mp.pi[2] == doctest::Approx(0.25));

  double total = 0.0;
  for (double p : mp.pi) total += p;
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("dirichlet energy") {
  auto g = k2();
  std::vector<double> ind{0.0, 1.0};
  CHECK(dirichlet_energy(g, ind, ind) == doctest::Approx(1.0));

  auto tri = unit_triangle();
  std::vector<double> c{3.0, 3.0, 3.0};
  CHECK(dirichlet_energy(tri, c, c) == doctest::Approx(0.0));
  std::vector<double> f{0.0, 1.0, 2.0};
  CHECK(dirichlet_energy(tri, f, f) == doctest::Approx(6.0));

  // Bilinearity.
  std::vector<double> h{1.0, -1.0, 0.5};
  std::vector<double> fh(3);
  for (int i = 0; i < 3; ++i) fh[i] = f[i] + h[i];
  CHECK(dirichlet_energy(tri, fh, fh) ==
        doctest::Approx(dirichlet_energy(tri, f, f) + 2 * dirichlet_energy(tri, f, h) +
                        dirichlet_energy(tri, h, h)));

  CHECK_THROWS_AS(dirichlet_energy(tri, ind, ind), error);
}

TEST_CASE("dirichlet energy zero iff constant") {
  Rng rng(77);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = random_connected(6, 0.3, rng);
    std::vector<double> f(6);
    for (auto& v : f) v = rng.next_double();
    double e = dirichlet_energy(g, f, f);
    bool constant = true;
    for (double v : f)
      if (std::abs(v - f[0]) > 1e-12) constant = false;
    if (constant)
      CHECK(e <= 1e-12);
    else
      CHECK(e > 1e-12);
    std::vector<double> c(6, 0.42);
    CHECK(dirichlet_energy(g, c, c) <= 1e-12);
  }
}

TEST_CASE("effective resistance examples") {
  for (vertex_id k : {2u, 3u, 5u, 9u}) {
    auto p = unit_path(k + 1);
    CHECK(effective_resistance(p, 0, k) == doctest::Approx(double(k)));
  }
  CHECK(effective_resistance(unit_triangle(), 0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

  // Any tree: resistance equals path distance.
  Rng rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = random_connected(12, 0.0, rng);
    auto d = shortest_path_from(g, 3);
    for (vertex_id v = 0; v < 12; ++v)
      if (v != 3) CHECK(effective_resistance(g, 3, v) == doctest::Approx(d[v]).epsilon(1e-9));
  }
}

TEST_CASE("resistance matches the variational oracle on n <= 5") {
  Rng rng(11);
  for (int rep = 0; rep < 15; ++rep) {
    vertex_id n = 3 + vertex_id(rng.next_below(3));
    auto g = random_connected(n, 0.6, rng);
    vertex_id a = 0, b = n - 1;
    CHECK(effective_resistance(g, a, b) ==
          doctest::Approx(oracle::variational_resistance(g, a, b)).epsilon(1e-6));
  }
}

TEST_CASE("resistance self-consistency: R * energy(potential) = 1") {
  Rng rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    auto g = random_connected(10, 0.4, rng);
    double r = effective_resistance(g, 1, 7);
    auto f = resistance_potential(g, 1, 7);
    CHECK(f[1] == doctest::Approx(1.0));
    CHECK(f[7] == doctest::Approx(0.0));
    double energy = dirichlet_energy(g, f, f);
    CHECK(std::abs(r * energy - 1.0) < 1e-8);
  }
}

TEST_CASE("rayleigh monotonicity") {
  Rng rng(17);
  for (int rep = 0; rep < 25; ++rep) {
    vertex_id n = 5 + vertex_id(rng.next_below(6));
    auto g = random_connected(n, 0.2, rng);
    // Find a non-edge to add.
    vertex_id u = 0, v = 0;
    bool found = false;
    for (vertex_id a = 0; a < n && !found; ++a)
      for (vertex_id b = a + 1; b < n && !found; ++b) {
        bool exists = false;
        for (const Edge& e : g.edges())
          if ((e.u == a && e.v == b) || (e.u == b && e.v == a)) exists = true;
        if (!exists) {
          u = a;
          v = b;
          found = true;
        }
      }
    if (!found) continue;
    auto edges = g.edges();
    edges.push_back({u, v, 0.5 + rng.next_double()});
    auto g2 = WeightedGraph::build(n, edges);
    for (int k = 0; k < 5; ++k) {
      vertex_id a = vertex_id(rng.next_below(n));
      vertex_id b = vertex_id(rng.next_below(n));
      if (a == b) continue;
      CHECK(effective_resistance(g2, a, b) <= effective_resistance(g, a, b) + 1e-9);
    }
  }
}

TEST_CASE("graph metric matrices") {
  auto m2r = graph_metric(k2(), MetricKind::resistance);
  auto m2s = graph_metric(k2(), MetricKind::shortest_path);
  CHECK(m2r.at(0, 1) == doctest::Approx(1.0));
  CHECK(m2s.at(0, 1) == doctest::Approx(1.0));

  auto tr = graph_metric(unit_triangle(), MetricKind::resistance);
  auto ts = graph_metric(unit_triangle(), MetricKind::shortest_path);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(tr.at(i, j) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
      CHECK(ts.at(i, j) == doctest::Approx(1.0));
    }

  // Metric axioms on random graphs, both kinds.
  Rng rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    auto g = random_connected(9, 0.3, rng);
    for (auto kind : {MetricKind::resistance, MetricKind::shortest_path}) {
      auto m = graph_metric(g, kind);
      for (vertex_id i = 0; i < 9; ++i) {
        CHECK(m.at(i, i) == 0.0);
        for (vertex_id j = 0; j < 9; ++j) {
          CHECK(m.at(i, j) == doctest::Approx(m.at(j, i)));
          for (vertex_id k = 0; k < 9; ++k)
            CHECK(m.at(i, j) <= m.at(i, k) + m.at(k, j) + 1e-9);
        }
      }
    }
  }

  // Trees: resistance matrix equals shortest-path matrix.
  auto tree = random_connected(14, 0.0, rng);
  auto mr = graph_metric(tree, MetricKind::resistance);
  auto ms = graph_metric(tree, MetricKind::shortest_path);
  for (vertex_id i = 0; i < 14; ++i)
    for (vertex_id j = 0; j < 14; ++j) CHECK(std::abs(mr.at(i, j) - ms.at(i, j)) < 1e-9);
}

TEST_CASE("resistance oracle agrees with the direct solver on near-trees") {
  Rng rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    vertex_id n = 20 + vertex_id(rng.next_below(30));
    auto g = random_connected(n, 3.0 / double(n), rng);
    ResistanceOracle oracle_r(g);
    for (int k = 0; k < 12; ++k) {
      vertex_id a = vertex_id(rng.next_below(n));
      vertex_id b = vertex_id(rng.next_below(n));
      if (a == b) {
        CHECK(oracle_r.resistance(a, b) == 0.0);
        continue;
      }
      CHECK(oracle_r.resistance(a, b) ==
            doctest::Approx(effective_resistance(g, a, b)).epsilon(1e-8));
    }
  }
}

TEST_CASE("diameter") {
  CHECK(diameter(unit_path(7)) == doctest::Approx(6.0));
  CHECK(diameter(unit_triangle()) == doctest::Approx(1.0));
}
