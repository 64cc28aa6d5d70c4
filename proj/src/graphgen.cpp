#include "graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

namespace bl {

GraphSample sample_er_critical(vertex_id n, double lambda, std::uint64_t seed) {
  require(n >= 2, errc::invalid_argument, "need at least two vertices");
  double p = 1.0 / double(n) + lambda * std::pow(double(n), -4.0 / 3.0);
  require(p > 0.0 && p < 1.0, errc::invalid_probability,
          "edge probability " + std::to_string(p) + " outside (0,1)");

  GraphSample g;
  g.n = n;
  Rng rng(seed);
  const double log1mp = std::log1p(-p);
  const std::uint64_t total = std::uint64_t(n) * (n - 1) / 2;
  // Lexicographic pair index k <-> (u, v): skip ahead by Geometric(p) gaps.
  std::uint64_t k = 0;
  while (true) {
    double u = rng.next_double();
    while (u <= 0.0) u = rng.next_double();
    k += std::uint64_t(std::floor(std::log(u) / log1mp)) + 1;
    if (k > total) break;
    std::uint64_t idx = k - 1;
    // Row a is the largest with a*(2n-a-1)/2 <= idx.
    std::uint64_t a = std::uint64_t(
        std::floor(double(n) - 0.5 - std::sqrt(std::max(0.0, (double(n) - 0.5) * (double(n) - 0.5) -
                                                                 2.0 * double(idx)))));
    auto row_start = [&](std::uint64_t r) { return r * (2 * std::uint64_t(n) - r - 1) / 2; };
    while (row_start(a + 1) <= idx) ++a;
    while (a > 0 && row_start(a) > idx) --a;
    std::uint64_t b = a + 1 + (idx - row_start(a));
    g.edges.push_back({vertex_id(a), vertex_id(b), 1.0});
  }
  return g;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent, rank_;

  explicit UnionFind(std::size_t n) : parent(n), rank_(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }
};

}  // namespace

ComponentSpectrum components_with_surplus(const GraphSample& g) {
  UnionFind uf(g.n);
  for (const Edge& e : g.edges) uf.unite(e.u, e.v);

  std::map<std::uint32_t, std::uint32_t> root_to_idx;
  std::vector<std::uint64_t> size, edges, min_vertex;
  std::vector<std::uint32_t> comp_of(g.n);
  for (vertex_id v = 0; v < g.n; ++v) {
    std::uint32_t r = uf.find(v);
    auto [it, fresh] = root_to_idx.try_emplace(r, std::uint32_t(size.size()));
    if (fresh) {
      size.push_back(0);
      edges.push_back(0);
      min_vertex.push_back(v);
    }
    comp_of[v] = it->second;
    size[it->second]++;
  }
  for (const Edge& e : g.edges) edges[comp_of[e.u]]++;

  std::vector<std::uint32_t> order(size.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (size[a] != size[b]) return size[a] > size[b];
    return min_vertex[a] < min_vertex[b];
  });

  ComponentSpectrum spec;
  std::vector<std::uint32_t> rank_of(size.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) {
    rank_of[order[i]] = i;
    spec.sizes.push_back(size[order[i]]);
    spec.surpluses.push_back(edges[order[i]] - size[order[i]] + 1);
  }
  spec.member.resize(g.n);
  for (vertex_id v = 0; v < g.n; ++v) spec.member[v] = rank_of[comp_of[v]];
  return spec;
}

ExtractedComponent extract_component(const GraphSample& g, const ComponentSpectrum& spectrum,
                                     std::uint32_t rank) {
  require(rank < spectrum.sizes.size(), errc::invalid_argument, "component rank out of range");
  std::vector<vertex_id> original;
  std::vector<vertex_id> local(g.n, 0);
  for (vertex_id v = 0; v < g.n; ++v) {
    if (spectrum.member[v] == rank) {
      local[v] = vertex_id(original.size());
      original.push_back(v);
    }
  }
  std::vector<Edge> edges;
  for (const Edge& e : g.edges)
    if (spectrum.member[e.u] == rank) edges.push_back({local[e.u], local[e.v], e.w});
  if (original.size() == 1) {
    // A single vertex is below the WeightedGraph floor; callers skip these.
    fail(errc::fewer_than_two_vertices, "component has a single vertex");
  }
  return {WeightedGraph::build(vertex_id(original.size()), edges, g.multigraph),
          std::move(original)};
}

namespace {

// Plane-tree view of a labelled tree: explore from label `root` visiting
// neighbors in increasing label order.
LabelledTreeSample planeify(vertex_id m, const std::vector<std::vector<vertex_id>>& adj,
                            vertex_id root) {
  LabelledTreeSample out;
  out.shape.parent.assign(m, 0);
  out.shape.children.assign(m, {});
  out.label.assign(m, 0);

  std::vector<vertex_id> preorder_of(m, m);
  std::vector<std::pair<vertex_id, vertex_id>> stack;  // (label, parent preorder id)
  stack.push_back({root, 0});
  vertex_id next = 0;
  while (!stack.empty()) {
    auto [lab, par] = stack.back();
    stack.pop_back();
    vertex_id id = next++;
    preorder_of[lab] = id;
    out.label[id] = lab;
    out.shape.parent[id] = (id == 0) ? 0 : par;
    if (id != 0) out.shape.children[par].push_back(id);
    // Push unvisited neighbors in decreasing label order so the smallest is
    // explored first.
    std::vector<vertex_id> nb;
    for (vertex_id y : adj[lab])
      if (preorder_of[y] == m) nb.push_back(y);
    std::sort(nb.begin(), nb.end(), std::greater<>());
    for (vertex_id y : nb) stack.push_back({y, id});
  }
  return out;
}

std::vector<std::vector<vertex_id>> prufer_tree(vertex_id m, Rng& rng) {
  std::vector<std::vector<vertex_id>> adj(m);
  if (m == 2) {
    adj[0].push_back(1);
    adj[1].push_back(0);
    return adj;
  }
  std::vector<vertex_id> code(m - 2);
  for (auto& c : code) c = vertex_id(rng.next_below(m));
  std::vector<std::uint32_t> deg(m, 1);
  for (vertex_id c : code) deg[c]++;
  // Standard decode with a min-heap replaced by a linear pointer sweep.
  std::vector<char> used(m, 0);
  vertex_id ptr = 0;
  while (deg[ptr] != 1) ++ptr;
  vertex_id leaf = ptr;
  for (vertex_id c : code) {
    adj[leaf].push_back(c);
    adj[c].push_back(leaf);
    if (--deg[c] == 1 && c < ptr) {
      leaf = c;
    } else {
      ++ptr;
      while (deg[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  adj[leaf].push_back(m - 1);
  adj[m - 1].push_back(leaf);
  return adj;
}

}  // namespace

LabelledTreeSample sample_uniform_labelled_tree(vertex_id m, std::uint64_t seed) {
  require(m >= 2, errc::invalid_argument, "labelled tree needs at least two vertices");
  Rng rng(seed);
  auto adj = prufer_tree(m, rng);
  LabelledTreeSample s = planeify(m, adj, 0);
  s.area = depth_first_walk_and_area(s.shape).area;
  s.ess = 1.0;
  return s;
}

LabelledTreeSample sample_tilted_tree(vertex_id m, double p, std::uint64_t seed,
                                      std::uint32_t pool_size) {
  require(p > 0.0 && p < 1.0, errc::invalid_probability, "p must lie in (0,1)");
  require(m >= 2, errc::invalid_argument, "m must be at least 2");
  require(pool_size >= 2, errc::invalid_argument, "pool too small");

  const double rate = -std::log1p(-p);  // log weight per unit area
  std::vector<double> logw(pool_size);
  std::vector<std::uint64_t> areas(pool_size);
  double maxlw = -1e300;
  for (std::uint32_t i = 0; i < pool_size; ++i) {
    Rng r(derive_seed(seed, {"tilt-pool", i}));
    auto adj = prufer_tree(m, r);
    LabelledTreeSample s = planeify(m, adj, 0);
    areas[i] = depth_first_walk_and_area(s.shape).area;
    logw[i] = rate * double(areas[i]);
    maxlw = std::max(maxlw, logw[i]);
  }
  double wsum = 0.0, wsq = 0.0;
  std::vector<double> w(pool_size);
  for (std::uint32_t i = 0; i < pool_size; ++i) {
    w[i] = std::exp(logw[i] - maxlw);
    wsum += w[i];
    wsq += w[i] * w[i];
  }
  double ess = wsum * wsum / wsq;
  require(ess >= 10.0, errc::degenerate_weights,
          "importance pool degenerate (ESS " + std::to_string(ess) + ")");

  Rng pick(derive_seed(seed, {"tilt-pick"}));
  double u = pick.next_double() * wsum;
  std::uint32_t chosen = pool_size - 1;
  double acc = 0.0;
  for (std::uint32_t i = 0; i < pool_size; ++i) {
    acc += w[i];
    if (u < acc) {
      chosen = i;
      break;
    }
  }
  Rng r(derive_seed(seed, {"tilt-pool", chosen}));
  auto adj = prufer_tree(m, r);
  LabelledTreeSample s = planeify(m, adj, 0);
  s.area = areas[chosen];
  s.ess = ess;
  return s;
}

GraphSample sample_connected_gmp(vertex_id m, double p, std::uint64_t seed,
                                 std::uint32_t pool_size) {
  LabelledTreeSample t = sample_tilted_tree(m, p, seed, pool_size);
  GraphSample g;
  g.n = m;
  for (vertex_id v = 1; v < m; ++v)
    g.edges.push_back({t.label[t.shape.parent[v]], t.label[v], 1.0});
  Rng rng(derive_seed(seed, {"gmp-edges"}));
  for (auto [a, b] : permitted_edges(t.shape))
    if (rng.next_double() < p) g.edges.push_back({t.label[a], t.label[b], 1.0});
  return g;
}

std::uint64_t DegreeSequence::ell() const {
  std::uint64_t total = 0;
  for (auto v : d) total += v;
  return total;
}

GraphSample sample_configuration_model(const DegreeSequence& d, std::uint64_t seed) {
  require(d.ell() % 2 == 0, errc::odd_degree_sum, "degree sum must be even");
  require(d.d.size() >= 2, errc::invalid_argument, "need at least two vertices");
  std::vector<vertex_id> stubs;
  stubs.reserve(d.ell());
  for (vertex_id v = 0; v < d.d.size(); ++v)
    for (std::uint32_t i = 0; i < d.d[v]; ++i) stubs.push_back(v);
  Rng rng(seed);
  for (std::size_t i = stubs.size(); i > 1; --i)
    std::swap(stubs[i - 1], stubs[rng.next_below(i)]);
  GraphSample g;
  g.n = vertex_id(d.d.size());
  g.multigraph = true;
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
    g.edges.push_back({stubs[i], stubs[i + 1], 1.0});
  return g;
}

std::vector<std::pair<vertex_id, vertex_id>> admissible_pairs(const PlaneTree& t) {
  const vertex_id n = t.n_vertices();
  auto depth = t.depths();

  // Euler intervals for ancestor tests; preorder ids make tin the identity.
  std::vector<vertex_id> tout(n, 0);
  for (vertex_id v = n; v-- > 0;) {
    tout[v] = v;
    for (vertex_id c : t.children[v]) tout[v] = std::max(tout[v], tout[c]);
  }
  auto is_ancestor_or_self = [&](vertex_id a, vertex_id d) { return a <= d && d <= tout[a]; };

  std::vector<vertex_id> leaves;
  for (vertex_id v = 0; v < n; ++v)
    if (t.is_leaf(v) && depth[v] >= 2) leaves.push_back(v);

  std::vector<std::pair<vertex_id, vertex_id>> out;
  for (vertex_id x : leaves) {
    vertex_id gx = t.parent[t.parent[x]];
    for (vertex_id y : leaves) {
      if (x == y) continue;
      if (t.parent[x] >= t.parent[y]) continue;  // preorder = depth-first order
      vertex_id gy = t.parent[t.parent[y]];
      if (is_ancestor_or_self(gy, gx)) out.push_back({x, y});
    }
  }
  return out;
}

namespace {

std::uint64_t enumerate_tuples(const std::vector<std::pair<vertex_id, vertex_id>>& pairs,
                               std::uint32_t k, std::size_t from, std::vector<char>& used,
                               std::uint64_t& budget) {
  if (k == 0) return 1;
  std::uint64_t total = 0;
  for (std::size_t i = from; i < pairs.size(); ++i) {
    require(budget-- > 0, errc::size_limit_exceeded, "admissible tuple enumeration too large");
    auto [x, y] = pairs[i];
    if (used[x] || used[y]) continue;
    used[x] = used[y] = 1;
    total += enumerate_tuples(pairs, k - 1, i + 1, used, budget);
    used[x] = used[y] = 0;
  }
  return total;
}

}  // namespace

double count_admissible_tuples(const PlaneTree& t,
                               const std::vector<std::pair<vertex_id, vertex_id>>& pairs,
                               std::uint32_t k) {
  if (k == 0) return 1.0;
  if (k == 1) return double(pairs.size());
  require(k <= 4, errc::invalid_argument, "surplus above 4 is out of desk scale");
  if (k == 2) {
    // Subsets of two pairs minus those sharing a leaf. No two distinct
    // admissible pairs share both leaves, so the leaf-wise count is exact.
    double total = 0.5 * double(pairs.size()) * double(pairs.size() - 1);
    std::map<vertex_id, std::uint64_t> occ;
    for (auto [x, y] : pairs) {
      occ[x]++;
      occ[y]++;
    }
    for (auto [leaf, c] : occ) total -= 0.5 * double(c) * double(c - 1);
    return total;
  }
  std::vector<char> used(t.n_vertices(), 0);
  std::uint64_t budget = 100000000;
  return double(enumerate_tuples(pairs, k, 0, used, budget));
}

GraphSample sample_prescribed_connected(const DegreeSequence& dt, std::uint64_t seed,
                                        std::uint32_t pool_size) {
  const std::size_t mt = dt.d.size();
  require(mt >= 3, errc::invalid_argument, "need at least three vertices");
  require(dt.d[0] == 1, errc::invalid_argument, "first vertex must have degree 1");
  for (auto v : dt.d) require(v >= 1, errc::invalid_argument, "degrees must be at least 1");
  std::uint64_t ell = dt.ell();
  require(ell >= 2 * (mt - 1) && (ell - 2 * (mt - 1)) % 2 == 0, errc::infeasible_surplus,
          "degree sum must equal 2(m-1) + 2k");
  const std::uint32_t k = std::uint32_t((ell - 2 * (mt - 1)) / 2);

  // Children multiset: d_i - 1 for i = 2..mt, plus 2k glued leaves.
  ECD s;
  for (std::size_t i = 1; i < mt; ++i) {
    std::size_t c = dt.d[i] - 1;
    if (s.s.size() <= c) s.s.resize(c + 1, 0);
    s.s[c]++;
  }
  if (s.s.empty()) s.s.resize(1, 0);
  s.s[0] += 2 * k;
  require(s.tenable(), errc::infeasible_surplus, "derived children sequence is not tenable");

  // Resample theta with P proportional to |A_k(theta)|.
  Rng pick(derive_seed(seed, {"pc-pick"}));
  std::uint32_t chosen = 0;
  std::vector<std::pair<vertex_id, vertex_id>> chosen_pairs;
  if (k == 0) {
    chosen = 0;
  } else {
    std::vector<double> w(pool_size);
    double wsum = 0.0;
    for (std::uint32_t i = 0; i < pool_size; ++i) {
      PlaneTree theta = uniform_plane_tree_with_ecd(s, derive_seed(seed, {"pc-pool", i}));
      auto pairs = admissible_pairs(theta);
      w[i] = count_admissible_tuples(theta, pairs, k);
      wsum += w[i];
    }
    require(wsum > 0.0, errc::no_admissible_tuples,
            "no pool tree admits " + std::to_string(k) + " disjoint admissible pairs");
    double u = pick.next_double() * wsum;
    double acc = 0.0;
    chosen = pool_size - 1;
    for (std::uint32_t i = 0; i < pool_size; ++i) {
      acc += w[i];
      if (u < acc) {
        chosen = i;
        break;
      }
    }
  }
  PlaneTree theta = uniform_plane_tree_with_ecd(s, derive_seed(seed, {"pc-pool", chosen}));

  if (k > 0) {
    auto pairs = admissible_pairs(theta);
    // Uniform k-subset with distinct leaves: rejection from the pair list,
    // falling back to full enumeration if acceptance is poor.
    Rng zr(derive_seed(seed, {"pc-z"}));
    bool got = false;
    for (std::uint32_t attempt = 0; attempt < 100000 && !got; ++attempt) {
      std::set<std::size_t> idx;
      while (idx.size() < k) idx.insert(std::size_t(zr.next_below(pairs.size())));
      std::set<vertex_id> leaves;
      for (auto i : idx) {
        leaves.insert(pairs[i].first);
        leaves.insert(pairs[i].second);
      }
      if (leaves.size() == 2 * k) {
        chosen_pairs.clear();
        for (auto i : idx) chosen_pairs.push_back(pairs[i]);
        got = true;
      }
    }
    require(got, errc::no_admissible_tuples, "could not draw disjoint admissible pairs");
    std::sort(chosen_pairs.begin(), chosen_pairs.end());
  }

  // Labels: x_i -> mt+2i-2, y_i -> mt+2i-1 (0-based); remaining vertices get
  // labels 1..mt-1 uniformly within equal-children classes.
  const vertex_id m = theta.n_vertices();
  std::vector<vertex_id> label(m, vertex_id(-1));
  for (std::uint32_t i = 0; i < k; ++i) {
    label[chosen_pairs[i].first] = vertex_id(mt + 2 * i);
    label[chosen_pairs[i].second] = vertex_id(mt + 2 * i + 1);
  }
  std::map<std::size_t, std::vector<vertex_id>> class_labels;
  for (std::size_t j = 1; j < mt; ++j) class_labels[dt.d[j] - 1].push_back(vertex_id(j));
  Rng lr(derive_seed(seed, {"pc-labels"}));
  for (auto& [c, labs] : class_labels)
    for (std::size_t i = labs.size(); i > 1; --i)
      std::swap(labs[i - 1], labs[lr.next_below(i)]);
  std::map<std::size_t, std::size_t> next_in_class;
  for (vertex_id v = 0; v < m; ++v) {
    if (label[v] != vertex_id(-1)) continue;
    std::size_t c = theta.children[v].size();
    auto& labs = class_labels[c];
    std::size_t& cursor = next_in_class[c];
    require(cursor < labs.size(), errc::internal, "label class exhausted");
    label[v] = labs[cursor++];
  }

  // L(theta, z): drop glued leaves, connect their parents; then attach the
  // degree-one vertex 0 to the root.
  std::vector<char> deleted(m, 0);
  for (auto [x, y] : chosen_pairs) deleted[x] = deleted[y] = 1;
  GraphSample g;
  g.n = vertex_id(mt);
  for (vertex_id v = 1; v < m; ++v)
    if (!deleted[v]) g.edges.push_back({label[theta.parent[v]], label[v], 1.0});
  for (auto [x, y] : chosen_pairs)
    g.edges.push_back({label[theta.parent[x]], label[theta.parent[y]], 1.0});
  g.edges.push_back({0, label[theta.root()], 1.0});

  std::set<std::pair<vertex_id, vertex_id>> dedup;
  for (const Edge& e : g.edges) {
    auto key = std::minmax(e.u, e.v);
    if (!dedup.insert({key.first, key.second}).second || e.u == e.v) {
      g.multigraph = true;
      break;
    }
  }
  return g;
}

DegreeSequence sample_critical_degrees(vertex_id n, std::span<const double> table, double lambda,
                                       std::uint64_t seed) {
  double total = 0.0, m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    require(table[i] >= 0.0, errc::invalid_argument, "negative probability");
    total += table[i];
    m1 += double(i) * table[i];
    m2 += double(i) * double(i) * table[i];
  }
  require(std::abs(total - 1.0) <= 1e-9, errc::invalid_argument, "table must sum to 1");
  double window = 1.0 + lambda * std::pow(double(n), -1.0 / 3.0);
  require(std::abs((m2 - m1) / m1 - window) <= 1e-9, errc::invalid_argument,
          "table violates the scaling window identity");

  Rng rng(seed);
  DegreeSequence d;
  d.d.resize(n);
  for (std::uint32_t attempt = 0; attempt < 4096; ++attempt) {
    std::uint64_t sum = 0;
    for (vertex_id v = 0; v < n; ++v) {
      double u = rng.next_double();
      double acc = 0.0;
      std::uint32_t val = std::uint32_t(table.size() - 1);
      for (std::size_t i = 0; i < table.size(); ++i) {
        acc += table[i];
        if (u < acc) {
          val = std::uint32_t(i);
          break;
        }
      }
      d.d[v] = val;
      sum += val;
    }
    if (sum % 2 == 0) return d;
  }
  fail(errc::internal, "could not draw an even degree sum");
}

}  // namespace bl
