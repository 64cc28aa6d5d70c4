#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "graphgen.hpp"
#include "oracles.hpp"
#include "rng.hpp"

using namespace bl;

namespace {

// Canonical signature of a labelled simple graph.
std::string edge_signature(vertex_id n, const std::vector<Edge>& edges) {
  std::set<std::pair<vertex_id, vertex_id>> s;
  for (const Edge& e : edges) s.insert({std::min(e.u, e.v), std::max(e.u, e.v)});
  std::string sig = std::to_string(n) + ":";
  for (auto [a, b] : s) sig += std::to_string(a) + "-" + std::to_string(b) + ";";
  return sig;
}

bool graph_connected(vertex_id n, const std::vector<Edge>& edges) {
  GraphSample s;
  s.n = n;
  s.edges = edges;
  return components_with_surplus(s).sizes[0] == n;
}

}  // namespace

TEST_CASE("critical ER basics") {
  // n = 2: p = 1/2 + lambda * 2^{-4/3}; take lambda = 0 -> p = 1/2.
  std::uint64_t present = 0;
  const std::uint64_t reps = 100000;
  for (std::uint64_t i = 0; i < reps; ++i)
    present += sample_er_critical(2, 0.0, derive_seed(211, {"er2", i})).edges.size();
  double freq = double(present) / double(reps);
  CHECK(std::abs(freq - 0.5) < 3.0 * std::sqrt(0.25 / double(reps)));

  // Mean edge count at lambda = 0 is C(n,2)/n.
  const vertex_id n = 4096;
  double total_edges = 0.0;
  const int draws = 60;
  for (int i = 0; i < draws; ++i)
    total_edges += double(sample_er_critical(n, 0.0, derive_seed(211, {"ern", i})).edges.size());
  double expected = double(n) * double(n - 1) / 2.0 / double(n);
  double sd = std::sqrt(expected);  // binomial, p small
  CHECK(std::abs(total_edges / draws - expected) < 3.0 * sd / std::sqrt(double(draws)));

  CHECK_THROWS_AS(sample_er_critical(2, -10.0, 1), error);  // p out of range

  // Determinism.
  auto a = sample_er_critical(512, 0.5, 99);
  auto b = sample_er_critical(512, 0.5, 99);
  CHECK(edge_signature(a.n, a.edges) == edge_signature(b.n, b.edges));
}

TEST_CASE("components and surplus") {
  GraphSample forest;
  forest.n = 5;
  forest.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
  auto spec = components_with_surplus(forest);
  CHECK(spec.sizes == std::vector<std::uint64_t>{2, 2, 1});
  for (auto s : spec.surpluses) CHECK(s == 0);

  GraphSample tri_iso;
  tri_iso.n = 4;
  tri_iso.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
  auto spec2 = components_with_surplus(tri_iso);
  CHECK(spec2.sizes == std::vector<std::uint64_t>{3, 1});
  CHECK(spec2.surpluses == std::vector<std::uint64_t>{1, 0});

  // Sum of sizes = n; surplus matches the cycle-space dimension.
  Rng rng(223);
  for (int rep = 0; rep < 40; ++rep) {
    vertex_id n = 6 + vertex_id(rng.next_below(15));
    GraphSample g;
    g.n = n;
    for (int e = 0; e < int(n); ++e) {
      vertex_id u = vertex_id(rng.next_below(n));
      vertex_id v = vertex_id(rng.next_below(n));
      if (u != v) g.edges.push_back({u, v, 1.0});
    }
    auto sp = components_with_surplus(g);
    std::uint64_t size_sum = 0, surplus_sum = 0;
    for (auto s : sp.sizes) size_sum += s;
    for (auto s : sp.surpluses) surplus_sum += s;
    CHECK(size_sum == n);
    CHECK(surplus_sum == oracle::cycle_space_dimension(n, g.edges));
  }
}

TEST_CASE("largest component size exponent trend (small ladder)") {
  // Slope of log E[C_1] vs log n near 2/3; a light version of the
  // acceptance run.
  std::vector<double> lx, ly;
  for (vertex_id n : {2048u, 4096u, 8192u}) {
    double acc = 0.0;
    const int draws = 60;
    for (int i = 0; i < draws; ++i) {
      auto g = sample_er_critical(n, 0.0, derive_seed(227, {"slope", n, i}));
      acc += double(components_with_surplus(g).sizes[0]);
    }
    lx.push_back(std::log(double(n)));
    ly.push_back(std::log(acc / draws));
  }
  double slope = (ly[2] - ly[0]) / (lx[2] - lx[0]);
  CHECK(slope > 0.45);
  CHECK(slope < 0.9);
}

TEST_CASE("ER surplus of the largest component: increasing, bounded trend") {
  std::vector<double> means;
  for (vertex_id n : {2048u, 8192u}) {
    double acc = 0.0;
    const int draws = 80;
    for (int i = 0; i < draws; ++i) {
      auto g = sample_er_critical(n, 0.0, derive_seed(229, {"surp", n, i}));
      auto sp = components_with_surplus(g);
      acc += double(sp.surpluses[0]);
    }
    means.push_back(acc / draws);
  }
  CHECK(means[1] >= means[0] - 0.25);  // increasing up to noise
  CHECK(means[1] < 6.0);               // tightness
}

TEST_CASE("uniform labelled trees via prufer") {
  // All 3 labelled trees on 3 vertices equally likely.
  std::map<std::uint64_t, std::uint64_t> freq;
  const std::uint64_t reps = 30000;
  for (std::uint64_t i = 0; i < reps; ++i) {
    auto t = sample_uniform_labelled_tree(3, derive_seed(233, {"prufer", i}));
    // Identify by the center label.
    vertex_id center = 0;
    std::map<vertex_id, int> deg;
    for (vertex_id v = 1; v < 3; ++v) {
      deg[t.label[t.shape.parent[v]]]++;
      deg[t.label[v]]++;
    }
    for (auto [lab, d] : deg)
      if (d == 2) center = lab;
    freq[center]++;
  }
  CHECK(freq.size() == 3);
  std::vector<std::uint64_t> counts;
  for (auto& [k, v] : freq) counts.push_back(v);
  CHECK(oracle::chi_square(counts, std::vector<double>(3, 1.0 / 3.0), reps) <
        oracle::chi_square_crit_999(2));
}

TEST_CASE("tilted tree law matches enumeration on m = 3") {
  // Labelled trees on {0,1,2}: areas 1 (center 0) and 0 (centers 1, 2).
  const double p = 0.3;
  std::vector<double> weights{1.0 / 0.7, 1.0, 1.0};
  double z = weights[0] + weights[1] + weights[2];

  std::map<vertex_id, std::uint64_t> freq;
  const std::uint64_t reps = 100000;
  for (std::uint64_t i = 0; i < reps; ++i) {
    auto t = sample_tilted_tree(3, p, derive_seed(239, {"tilt", i}), 1024);
    std::map<vertex_id, int> deg;
    for (vertex_id v = 1; v < 3; ++v) {
      deg[t.label[t.shape.parent[v]]]++;
      deg[t.label[v]]++;
    }
    for (auto [lab, d] : deg)
      if (d == 2) freq[lab]++;
  }
  std::vector<std::uint64_t> counts{freq[0], freq[1], freq[2]};
  std::vector<double> probs{weights[0] / z, weights[1] / z, weights[2] / z};
  CHECK(oracle::chi_square(counts, probs, reps) < oracle::chi_square_crit_999(2));
}

TEST_CASE("tilt weight stays bounded at the critical coupling") {
  // E[(1-p)^{-a(T)}] under the uniform law with p = m^{-3/2} remains O(1).
  for (vertex_id m : {64u, 256u, 1024u}) {
    double p = std::pow(double(m), -1.5);
    double rate = -std::log1p(-p);
    double acc = 0.0;
    const int draws = 300;
    for (int i = 0; i < draws; ++i) {
      auto t = sample_uniform_labelled_tree(m, derive_seed(241, {"bound", m, i}));
      acc += std::exp(rate * double(t.area));
    }
    CHECK(acc / draws < 10.0);
  }
}

TEST_CASE("connected G(m,p) law matches enumeration on m = 3") {
  // Connected graphs on 3 labelled vertices: 3 spanning trees and K3.
  // P(G | connected) with G(3, p): trees p^2 (1-p), triangle p^3.
  const double p = 0.3;
  double w_tree = p * p * (1 - p), w_tri = p * p * p;
  double z = 3 * w_tree + w_tri;

  std::map<std::string, std::uint64_t> freq;
  const std::uint64_t reps = 100000;
  for (std::uint64_t i = 0; i < reps; ++i) {
    auto g = sample_connected_gmp(3, p, derive_seed(251, {"gmp", i}), 1024);
    CHECK(graph_connected(g.n, g.edges));
    freq[edge_signature(g.n, g.edges)]++;
  }
  REQUIRE(freq.size() == 4);
  std::vector<std::uint64_t> counts;
  std::vector<double> probs;
  for (auto& [sig, c] : freq) {
    counts.push_back(c);
    probs.push_back(sig.find("0-1;0-2;1-2;") != std::string::npos ? w_tri / z : w_tree / z);
  }
  CHECK(oracle::chi_square(counts, probs, reps) < oracle::chi_square_crit_999(3));
}

TEST_CASE("connected G(m,p) structural invariants") {
  Rng rng(257);
  for (int rep = 0; rep < 40; ++rep) {
    vertex_id m = 4 + vertex_id(rng.next_below(20));
    auto g = sample_connected_gmp(m, 0.08, derive_seed(257, {"gmps", rep}), 256);
    CHECK(graph_connected(g.n, g.edges));
    CHECK(g.edges.size() >= m - 1);
    auto sp = components_with_surplus(g);
    CHECK(sp.surpluses[0] == g.edges.size() - m + 1);
  }
}

TEST_CASE("configuration model") {
  DegreeSequence pair;
  pair.d = {1, 1};
  auto g = sample_configuration_model(pair, 5);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].u != g.edges[0].v);

  DegreeSequence odd;
  odd.d = {2, 1};
  CHECK_THROWS_AS(sample_configuration_model(odd, 1), error);

  // P(simple) = 2/3 for d = (2,1,1).
  DegreeSequence d211;
  d211.d = {2, 1, 1};
  std::uint64_t simple = 0;
  const std::uint64_t reps = 100000;
  for (std::uint64_t i = 0; i < reps; ++i) {
    auto s = sample_configuration_model(d211, derive_seed(263, {"cfg", i}));
    bool has_loop = false;
    std::set<std::pair<vertex_id, vertex_id>> seen;
    bool has_multi = false;
    for (const Edge& e : s.edges) {
      if (e.u == e.v) has_loop = true;
      auto key = std::minmax(e.u, e.v);
      if (!seen.insert({key.first, key.second}).second) has_multi = true;
    }
    if (!has_loop && !has_multi) ++simple;
  }
  double freq = double(simple) / double(reps);
  CHECK(std::abs(freq - 2.0 / 3.0) < 0.01);

  // Degrees are exact, counting self-loops twice.
  Rng rng(269);
  for (int rep = 0; rep < 20; ++rep) {
    DegreeSequence d;
    d.d.resize(8);
    std::uint64_t sum = 0;
    for (auto& v : d.d) {
      v = 1 + std::uint32_t(rng.next_below(4));
      sum += v;
    }
    if (sum % 2) d.d[0]++;
    auto s = sample_configuration_model(d, derive_seed(269, {"deg", rep}));
    std::vector<std::uint32_t> got(8, 0);
    for (const Edge& e : s.edges) {
      if (e.u == e.v) {
        got[e.u] += 2;
      } else {
        got[e.u]++;
        got[e.v]++;
      }
    }
    CHECK(got == d.d);
  }
}

TEST_CASE("critical degree law validation") {
  std::vector<double> law{0.0, 0.75, 0.0, 0.25};
  auto d = sample_critical_degrees(1000, law, 0.0, 31337);
  CHECK(d.ell() % 2 == 0);
  for (auto v : d.d) CHECK((v == 1 || v == 3));
  // A non-critical table is rejected.
  std::vector<double> bad{0.0, 0.5, 0.5};
  CHECK_THROWS_AS(sample_critical_degrees(1000, bad, 0.0, 1), error);
}

TEST_CASE("admissible pairs") {
  // Path tree: single leaf, nothing admissible.
  PlaneTree path;
  path.parent = {0, 0, 1, 2};
  path.children = {{1}, {2}, {3}, {}};
  CHECK(admissible_pairs(path).empty());

  // Root with two leaf children: depth-1 leaves have no grandparent.
  PlaneTree cherry;
  cherry.parent = {0, 0, 0};
  cherry.children = {{1, 2}, {}, {}};
  CHECK(admissible_pairs(cherry).empty());

  // Naive re-derivation agreement on random trees.
  for (int rep = 0; rep < 60; ++rep) {
    auto t = sample_conditioned_gw(OffspringDistribution::poisson1(), 8 + (rep % 5),
                                   derive_seed(271, {"adm", rep}));
    auto depth = t.depths();
    auto fast = admissible_pairs(t);
    std::set<std::pair<vertex_id, vertex_id>> fast_set(fast.begin(), fast.end());

    std::set<std::pair<vertex_id, vertex_id>> naive;
    for (vertex_id x = 0; x < t.n_vertices(); ++x) {
      if (!t.is_leaf(x) || depth[x] < 2) continue;
      for (vertex_id y = 0; y < t.n_vertices(); ++y) {
        if (y == x || !t.is_leaf(y) || depth[y] < 2) continue;
        if (!(t.parent[x] < t.parent[y])) continue;
        vertex_id gx = t.parent[t.parent[x]];
        vertex_id gy = t.parent[t.parent[y]];
        // gy on the root line of gx: climb from gx to the root.
        bool on_line = false;
        vertex_id w = gx;
        while (true) {
          if (w == gy) on_line = true;
          if (w == 0) break;
          w = t.parent[w];
        }
        if (on_line) naive.insert({x, y});
      }
    }
    CHECK(fast_set == naive);
  }
}

TEST_CASE("admissible tuple counting") {
  for (int rep = 0; rep < 30; ++rep) {
    auto t = sample_conditioned_gw(OffspringDistribution::poisson1(), 10,
                                   derive_seed(277, {"cnt", rep}));
    auto pairs = admissible_pairs(t);
    CHECK(count_admissible_tuples(t, pairs, 0) == 1.0);
    CHECK(count_admissible_tuples(t, pairs, 1) == double(pairs.size()));

    // k = 2 closed form vs direct enumeration.
    double direct = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      for (std::size_t j = i + 1; j < pairs.size(); ++j) {
        std::set<vertex_id> leaves{pairs[i].first, pairs[i].second, pairs[j].first,
                                   pairs[j].second};
        if (leaves.size() == 4) direct += 1.0;
      }
    CHECK(count_admissible_tuples(t, pairs, 2) == doctest::Approx(direct));
  }
  PlaneTree tiny;
  tiny.parent = {0, 0};
  tiny.children = {{1}, {}};
  CHECK_THROWS_AS(count_admissible_tuples(tiny, {}, 5), error);
}

TEST_CASE("prescribed connected: degrees always exact") {
  DegreeSequence d;
  d.d = {1, 2, 2, 2, 3};
  for (int rep = 0; rep < 50; ++rep) {
    auto g = sample_prescribed_connected(d, derive_seed(281, {"deg", rep}), 64);
    CHECK(graph_connected(g.n, g.edges));
    std::vector<std::uint32_t> got(d.d.size(), 0);
    for (const Edge& e : g.edges) {
      got[e.u]++;
      got[e.v]++;
    }
    CHECK(got == d.d);
    auto sp = components_with_surplus(g);
    CHECK(sp.surpluses[0] == 1);  // k = 1 for this sequence
  }
}

TEST_CASE("prescribed connected k=0 is uniform over trees with the degrees") {
  DegreeSequence d;
  d.d = {1, 1, 2, 2};
  // Labelled trees with degrees (1,1,2,2): exactly the two paths
  // 0-2-3-1 and 0-3-2-1.
  std::map<std::string, std::uint64_t> freq;
  const std::uint64_t reps = 100000;
  for (std::uint64_t i = 0; i < reps; ++i) {
    auto g = sample_prescribed_connected(d, derive_seed(283, {"k0", i}), 16);
    freq[edge_signature(g.n, g.edges)]++;
  }
  REQUIRE(freq.size() == 2);
  std::vector<std::uint64_t> counts;
  for (auto& [k, v] : freq) counts.push_back(v);
  CHECK(oracle::chi_square(counts, std::vector<double>(2, 0.5), reps) <
        oracle::chi_square_crit_999(1));
}

TEST_CASE("prescribed connected rejects malformed input") {
  DegreeSequence no_one;
  no_one.d = {2, 2, 2};
  CHECK_THROWS_AS(sample_prescribed_connected(no_one, 1, 16), error);
  DegreeSequence short_sum;
  short_sum.d = {1, 1, 1, 1};
  CHECK_THROWS_AS(sample_prescribed_connected(short_sum, 1, 16), error);
}
