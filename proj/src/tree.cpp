#include "tree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bl {

PlaneTree PlaneTree::from_children_counts(std::span<const std::uint32_t> counts) {
  // counts are children numbers in preorder; a valid Lukasiewicz word keeps
  // the open-vertex stack nonempty until the last step.
  PlaneTree t;
  const std::size_t n = counts.size();
  t.parent.assign(n, 0);
  t.children.assign(n, {});
  std::vector<std::pair<vertex_id, std::uint32_t>> stack;  // (vertex, children still owed)
  vertex_id next = 0;
  stack.push_back({0, counts[0]});
  ++next;
  while (!stack.empty()) {
    auto& [v, owed] = stack.back();
    if (owed == 0) {
      stack.pop_back();
      continue;
    }
    --owed;
    require(next < n, errc::internal, "children counts do not form a tree");
    vertex_id c = next++;
    t.parent[c] = v;
    t.children[v].push_back(c);
    stack.push_back({c, counts[c]});
  }
  require(next == n, errc::internal, "children counts do not form a tree");
  return t;
}

WeightedGraph PlaneTree::to_graph() const {
  std::vector<Edge> edges;
  edges.reserve(parent.size() - 1);
  for (vertex_id v = 1; v < n_vertices(); ++v) edges.push_back({parent[v], v, 1.0});
  return WeightedGraph::build(n_vertices(), edges);
}

std::vector<std::uint32_t> PlaneTree::depths() const {
  std::vector<std::uint32_t> d(n_vertices(), 0);
  for (vertex_id v = 1; v < n_vertices(); ++v) d[v] = d[parent[v]] + 1;  // preorder ids
  return d;
}

OffspringDistribution OffspringDistribution::poisson1() { return {Kind::poisson1, {}, true}; }

OffspringDistribution OffspringDistribution::geometric_half() {
  return {Kind::geometric_half, {}, true};
}

OffspringDistribution OffspringDistribution::table(std::vector<double> probs,
                                                   bool aperiodic_declared) {
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    require(probs[i] >= 0.0, errc::invalid_argument, "negative offspring probability");
    total += probs[i];
    mean += double(i) * probs[i];
  }
  require(std::abs(total - 1.0) <= 1e-9, errc::invalid_argument,
          "offspring table must sum to 1");
  require(std::abs(mean - 1.0) <= 1e-9, errc::invalid_argument,
          "offspring table must have mean 1");
  require(!probs.empty() && probs[0] > 0.0, errc::invalid_argument,
          "offspring table needs mass at 0");
  return {Kind::table, std::move(probs), aperiodic_declared};
}

std::uint32_t OffspringDistribution::sample(Rng& rng) const {
  switch (kind) {
    case Kind::poisson1:
      return std::uint32_t(rng.next_poisson(1.0));
    case Kind::geometric_half: {
      std::uint32_t k = 0;
      while (rng.next_double() < 0.5) ++k;
      return k;
    }
    case Kind::table: {
      double u = rng.next_double();
      double acc = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return std::uint32_t(i);
      }
      return std::uint32_t(probs.size() - 1);
    }
  }
  return 0;
}

double OffspringDistribution::sigma2() const {
  switch (kind) {
    case Kind::poisson1:
      return 1.0;
    case Kind::geometric_half:
      return 2.0;
    case Kind::table: {
      double m2 = 0.0;
      for (std::size_t i = 0; i < probs.size(); ++i) m2 += double(i) * double(i) * probs[i];
      return m2 - 1.0;
    }
  }
  return 0.0;
}

namespace {

// Unique rotation of a children multiset whose increments sum to -1 such
// that every proper prefix of (c_i - 1) stays nonnegative: start right after
// the first position where the prefix sum attains its minimum.
std::vector<std::uint32_t> cycle_lemma_rotate(std::span<const std::uint32_t> counts) {
  const std::size_t n = counts.size();
  long long sum = 0, best = 0;
  std::size_t best_at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += (long long)counts[i] - 1;
    if (sum < best) {
      best = sum;
      best_at = i + 1;
    }
  }
  std::vector<std::uint32_t> rotated(n);
  for (std::size_t i = 0; i < n; ++i) rotated[i] = counts[(best_at + i) % n];
  return rotated;
}

std::uint64_t positive_support_gcd(const OffspringDistribution& d) {
  switch (d.kind) {
    case OffspringDistribution::Kind::poisson1:
    case OffspringDistribution::Kind::geometric_half:
      return 1;
    case OffspringDistribution::Kind::table: {
      std::uint64_t g = 0;
      for (std::size_t i = 1; i < d.probs.size(); ++i)
        if (d.probs[i] > 0.0) g = std::gcd(g, std::uint64_t(i));
      return g == 0 ? 1 : g;
    }
  }
  return 1;
}

}  // namespace

PlaneTree sample_conditioned_gw(const OffspringDistribution& offspring, std::uint32_t n,
                                std::uint64_t seed) {
  if (n == 0) {
    PlaneTree t;
    t.parent = {0};
    t.children = {{}};
    return t;
  }
  require(n % positive_support_gcd(offspring) == 0, errc::infeasible_size,
          "offspring support cannot reach total progeny " + std::to_string(n + 1));

  const std::uint32_t m = n + 1;
  Rng rng(seed);
  std::vector<std::uint32_t> counts(m);
  const std::uint64_t budget = 1000000;
  for (std::uint64_t attempt = 0; attempt < budget; ++attempt) {
    std::uint64_t sum = 0;
    bool over = false;
    for (std::uint32_t i = 0; i < m; ++i) {
      counts[i] = offspring.sample(rng);
      sum += counts[i];
      if (sum > n) {
        over = true;
        break;
      }
    }
    if (over || sum != n) continue;
    return PlaneTree::from_children_counts(cycle_lemma_rotate(counts));
  }
  fail(errc::rejection_budget_exceeded,
       "conditioned sampling exhausted " + std::to_string(budget) + " proposals");
}

bool ECD::tenable() const {
  if (s.empty() || s[0] == 0) return false;
  std::uint64_t total = 0, weighted = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    total += s[i];
    weighted += std::uint64_t(i) * s[i];
  }
  return total == 1 + weighted;
}

std::uint64_t ECD::n_vertices() const {
  std::uint64_t total = 0;
  for (auto v : s) total += v;
  return total;
}

ECD ECD::of(const PlaneTree& t) {
  ECD e;
  for (vertex_id v = 0; v < t.n_vertices(); ++v) {
    std::size_t c = t.children[v].size();
    if (e.s.size() <= c) e.s.resize(c + 1, 0);
    e.s[c]++;
  }
  return e;
}

PlaneTree uniform_plane_tree_with_ecd(const ECD& s, std::uint64_t seed) {
  require(s.tenable(), errc::not_tenable, "children counts are not tenable");
  std::vector<std::uint32_t> counts;
  counts.reserve(s.n_vertices());
  for (std::size_t i = 0; i < s.s.size(); ++i)
    for (std::uint64_t k = 0; k < s.s[i]; ++k) counts.push_back(std::uint32_t(i));
  Rng rng(seed);
  for (std::size_t i = counts.size(); i > 1; --i)
    std::swap(counts[i - 1], counts[rng.next_below(i)]);
  return PlaneTree::from_children_counts(cycle_lemma_rotate(counts));
}

ContourPath contour_process(const PlaneTree& t) {
  ContourPath p;
  const vertex_id n = t.n_vertices();
  p.n_edges = n - 1;
  p.values.reserve(2 * std::size_t(p.n_edges) + 1);
  p.tour.reserve(2 * std::size_t(p.n_edges) + 1);

  // Unit-speed exploration from left to right: down to the next unvisited
  // child, otherwise back up to the parent.
  std::vector<std::uint32_t> next_child(n, 0);
  std::vector<std::uint32_t> depth = t.depths();
  vertex_id v = t.root();
  p.values.push_back(0);
  p.tour.push_back(v);
  while (true) {
    if (next_child[v] < t.children[v].size()) {
      v = t.children[v][next_child[v]++];
    } else if (v != t.root()) {
      v = t.parent[v];
    } else {
      break;
    }
    p.values.push_back(depth[v]);
    p.tour.push_back(v);
  }

  const double scale = p.n_edges > 0 ? 1.0 / std::sqrt(double(p.n_edges)) : 1.0;
  p.normalized.resize(p.values.size());
  for (std::size_t i = 0; i < p.values.size(); ++i) p.normalized[i] = double(p.values[i]) * scale;
  return p;
}

vertex_id contour_projection(const ContourPath& p, std::size_t time_index) {
  require(time_index < p.tour.size(), errc::index_out_of_range,
          "contour index " + std::to_string(time_index) + " out of range");
  return p.tour[time_index];
}

LukasiewiczPath depth_first_walk_and_area(const PlaneTree& t) {
  LukasiewiczPath lp;
  const vertex_id n = t.n_vertices();
  lp.x_values.reserve(n);
  std::vector<vertex_id> stack{t.root()};
  while (!stack.empty()) {
    std::uint32_t open = std::uint32_t(stack.size()) - 1;
    lp.x_values.push_back(open);
    lp.area += open;
    vertex_id v = stack.back();
    stack.pop_back();
    const auto& ch = t.children[v];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return lp;
}

std::vector<std::pair<vertex_id, vertex_id>> permitted_edges(const PlaneTree& t) {
  std::vector<std::pair<vertex_id, vertex_id>> out;
  std::vector<vertex_id> stack{t.root()};
  while (!stack.empty()) {
    vertex_id v = stack.back();
    stack.pop_back();
    for (vertex_id u : stack) out.push_back({v, u});
    const auto& ch = t.children[v];
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

double holder_norm(const ContourPath& p, double alpha) {
  const std::size_t len = p.normalized.size();
  if (len < 2) return 0.0;
  const double span = double(len - 1);
  double best = 0.0;
  if (len <= 2 * 4096 + 1) {
    for (std::size_t i = 0; i < len; ++i) {
      for (std::size_t j = i + 1; j < len; ++j) {
        double num = std::abs(p.normalized[i] - p.normalized[j]);
        if (num == 0.0) continue;
        best = std::max(best, num / std::pow(double(j - i) / span, alpha));
      }
    }
    return best;
  }
  Rng rng(0x9e3779b97f4a7c15ULL);  // fixed stream: deterministic lower bound
  for (std::size_t k = 0; k < 1000000; ++k) {
    std::size_t i = std::size_t(rng.next_below(len));
    std::size_t j = std::size_t(rng.next_below(len));
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    double num = std::abs(p.normalized[i] - p.normalized[j]);
    if (num == 0.0) continue;
    best = std::max(best, num / std::pow(double(j - i) / span, alpha));
  }
  return best;
}

}  // namespace bl
