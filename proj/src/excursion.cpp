#include "excursion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace bl {

double Excursion::integral() const {
  double acc = 0.0;
  for (std::uint32_t i = 0; i < grid_n; ++i) acc += values[i] + values[i + 1];
  return 0.5 * acc * dt();
}

double Excursion::max_value() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

Excursion sample_excursion(double zeta, std::uint32_t grid_n, std::uint64_t seed) {
  require(zeta > 0.0, errc::invalid_argument, "zeta must be positive");
  require(grid_n >= 4, errc::invalid_argument, "grid too coarse");

  const std::uint32_t n = grid_n;
  std::vector<double> bridge(n + 1);
  for (std::uint32_t attempt = 0;; ++attempt) {
    require(attempt < 64, errc::internal, "excursion sampling kept hitting interior zeros");
    Rng rng(derive_seed(seed, {"excursion", attempt}));
    // Random-walk bridge on [0,1]: Gaussian increments, drift-corrected to
    // land at zero.
    double w = 0.0;
    const double step = std::sqrt(1.0 / double(n));
    bridge[0] = 0.0;
    for (std::uint32_t i = 1; i <= n; ++i) {
      w += step * rng.next_gaussian();
      bridge[i] = w;
    }
    for (std::uint32_t i = 0; i <= n; ++i) bridge[i] -= (double(i) / double(n)) * w;

    // Vervaat transform: rotate at the first minimum.
    std::uint32_t argmin = 0;
    for (std::uint32_t i = 1; i < n; ++i)
      if (bridge[i] < bridge[argmin]) argmin = i;
    Excursion e;
    e.zeta = zeta;
    e.grid_n = n;
    e.values.resize(n + 1);
    const double base = bridge[argmin];
    const double scale = std::sqrt(zeta);
    bool ok = true;
    for (std::uint32_t i = 0; i <= n; ++i) {
      double v = bridge[(argmin + i) % n] - base;
      if (i == 0 || i == n) v = 0.0;
      if (i > 0 && i < n && v <= 0.0) {
        ok = false;
        break;
      }
      e.values[i] = scale * v;
    }
    if (ok) return e;
  }
}

TiltedExcursion sample_tilted_excursion(double zeta, std::uint32_t grid_n, std::uint64_t seed,
                                        std::uint32_t pool_size) {
  require(pool_size >= 2, errc::invalid_argument, "pool too small");
  std::vector<double> logw(pool_size);
  double maxlw = -1e300;
  for (std::uint32_t i = 0; i < pool_size; ++i) {
    Excursion e = sample_excursion(zeta, grid_n, derive_seed(seed, {"tilt-exc", i}));
    logw[i] = e.integral();
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
          "tilted excursion pool degenerate (ESS " + std::to_string(ess) + ")");
  Rng pick(derive_seed(seed, {"tilt-exc-pick"}));
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
  return {sample_excursion(zeta, grid_n, derive_seed(seed, {"tilt-exc", chosen})), ess};
}

Excursion theta_scale(const Excursion& e, double a) {
  require(a > 0.0, errc::invalid_argument, "scale must be positive");
  Excursion out;
  out.zeta = a * e.zeta;
  out.grid_n = e.grid_n;
  out.values.resize(e.values.size());
  const double s = std::sqrt(a);
  for (std::size_t i = 0; i < e.values.size(); ++i) out.values[i] = s * e.values[i];
  return out;
}

double DiscretizedContinuumTree::total_mass() const {
  double m = 0.0;
  for (const Node& n : nodes) m += n.mass;
  return m;
}

double DiscretizedContinuumTree::min_between(std::uint32_t a, std::uint32_t b) const {
  if (a > b) std::swap(a, b);
  if (a == b) return excursion_values[a];
  std::uint32_t k = 31 - std::uint32_t(__builtin_clz(b - a + 1));
  std::uint32_t i = rmq_[k][a];
  std::uint32_t j = rmq_[k][b + 1 - (1u << k)];
  return std::min(excursion_values[i], excursion_values[j]);
}

double DiscretizedContinuumTree::distance(std::uint32_t node_a, std::uint32_t node_b) const {
  const Node& a = nodes[node_a];
  const Node& b = nodes[node_b];
  return a.height + b.height - 2.0 * min_between(a.grid_time, b.grid_time);
}

WeightedGraph DiscretizedContinuumTree::to_graph() const {
  std::vector<Edge> edges;
  edges.reserve(nodes.size() - 1);
  for (std::uint32_t v = 1; v < nodes.size(); ++v)
    edges.push_back({nodes[v].parent, v, 1.0 / nodes[v].up_len});
  return WeightedGraph::build(vertex_id(nodes.size()), edges);
}

std::vector<double> DiscretizedContinuumTree::node_masses() const {
  std::vector<double> m(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) m[i] = nodes[i].mass;
  return m;
}

DiscretizedContinuumTree excursion_to_tree(const Excursion& e, std::uint32_t n_leaves) {
  require(n_leaves >= 2, errc::resolution_too_coarse, "need at least two sampled times");
  require(n_leaves <= e.grid_n, errc::resolution_too_coarse,
          "cannot sample more times than grid points");

  DiscretizedContinuumTree t;
  t.zeta = e.zeta;
  t.grid_n = e.grid_n;
  t.excursion_values = e.values;

  // Sparse table for range minima (argmin variant so branch nodes get a
  // concrete grid time).
  const std::uint32_t len = e.grid_n + 1;
  std::uint32_t levels = 1;
  while ((1u << levels) <= len) ++levels;
  t.rmq_.assign(levels, std::vector<std::uint32_t>(len));
  for (std::uint32_t i = 0; i < len; ++i) t.rmq_[0][i] = i;
  for (std::uint32_t k = 1; k < levels; ++k) {
    for (std::uint32_t i = 0; i + (1u << k) <= len; ++i) {
      std::uint32_t l = t.rmq_[k - 1][i];
      std::uint32_t r = t.rmq_[k - 1][i + (1u << (k - 1))];
      t.rmq_[k][i] = e.values[l] <= e.values[r] ? l : r;
    }
  }
  auto argmin_between = [&](std::uint32_t a, std::uint32_t b) {
    if (a == b) return a;
    std::uint32_t k = 31 - std::uint32_t(__builtin_clz(b - a + 1));
    std::uint32_t i = t.rmq_[k][a];
    std::uint32_t j = t.rmq_[k][b + 1 - (1u << k)];
    return e.values[i] <= e.values[j] ? i : j;
  };

  const double leaf_mass = e.zeta / double(n_leaves);
  t.nodes.push_back({0, 0.0, 0, 0.0, leaf_mass});  // root carries time 0
  t.sample_node.assign(n_leaves, 0);
  t.sample_grid.assign(n_leaves, 0);

  std::vector<std::uint32_t> stack{0};  // root path of the previous leaf
  std::uint32_t prev_grid = 0;
  for (std::uint32_t j = 1; j < n_leaves; ++j) {
    std::uint32_t g = std::uint32_t((std::uint64_t(j) * e.grid_n) / n_leaves);
    t.sample_grid[j] = g;
    double h = e.values[g];
    std::uint32_t mpos = argmin_between(prev_grid, g);
    double m = e.values[mpos];
    prev_grid = g;

    std::uint32_t last_popped = std::uint32_t(-1);
    while (t.nodes[stack.back()].height > m) {
      last_popped = stack.back();
      stack.pop_back();
    }
    std::uint32_t attach = stack.back();
    if (t.nodes[attach].height < m) {
      // Split the edge towards last_popped with a mass-zero branch point.
      std::uint32_t branch = std::uint32_t(t.nodes.size());
      t.nodes.push_back({mpos, m, attach, m - t.nodes[attach].height, 0.0});
      t.nodes[last_popped].parent = branch;
      t.nodes[last_popped].up_len = t.nodes[last_popped].height - m;
      stack.push_back(branch);
      attach = branch;
    }
    if (h == t.nodes[attach].height) {
      // Zero tree distance: the sampled time joins the attach class.
      t.nodes[attach].mass += leaf_mass;
      t.sample_node[j] = attach;
    } else {
      std::uint32_t leaf = std::uint32_t(t.nodes.size());
      t.nodes.push_back({g, h, attach, h - t.nodes[attach].height, leaf_mass});
      stack.push_back(leaf);
      t.sample_node[j] = leaf;
    }
  }
  return t;
}

PointSet sample_pointset(const Excursion& e, double c3, std::uint64_t seed) {
  require(c3 > 0.0, errc::invalid_argument, "rate must be positive");
  Rng rng(seed);
  PointSet ps;
  ps.rate = c3;
  std::uint64_t count = rng.next_poisson(c3 * e.integral());

  // Discrete density over interior grid points, proportional to e.
  std::vector<double> cum(e.grid_n + 1, 0.0);
  for (std::uint32_t i = 1; i < e.grid_n; ++i) cum[i] = cum[i - 1] + e.values[i];
  cum[e.grid_n] = cum[e.grid_n - 1];
  const double total = cum[e.grid_n];
  require(total > 0.0, errc::invalid_argument, "degenerate excursion");

  for (std::uint64_t k = 0; k < count; ++k) {
    double u = rng.next_double() * total;
    std::uint32_t lo = 1, hi = e.grid_n - 1;
    while (lo < hi) {
      std::uint32_t mid = (lo + hi) / 2;
      if (cum[mid] > u)
        hi = mid;
      else
        lo = mid + 1;
    }
    double tcoord = double(lo) * e.dt();
    double x = rng.next_double() * e.values[lo];
    ps.points.push_back({tcoord, x});
  }
  return ps;
}

GluedSpace glue_continuum(const DiscretizedContinuumTree& tree, const PointSet& ps) {
  GluedSpace gs;
  gs.base = tree;

  const std::uint32_t n_nodes = std::uint32_t(tree.nodes.size());
  for (const auto& pt : ps.points) {
    require(pt.t >= 0.0 && pt.t <= tree.zeta && pt.x >= 0.0, errc::unresolvable_identification,
            "identification mark outside the excursion domain");
    // u: node of the sampled time nearest to t.
    double pos = pt.t / tree.zeta * double(tree.sample_grid.size());
    std::size_t j = std::min<std::size_t>(tree.sample_grid.size() - 1,
                                          std::size_t(std::llround(pos)));
    // Snap to the sampled grid index closest to t's grid position.
    std::uint32_t target = std::uint32_t(std::llround(pt.t / tree.zeta * double(tree.grid_n)));
    while (j + 1 < tree.sample_grid.size() &&
           std::abs(long(tree.sample_grid[j + 1]) - long(target)) <
               std::abs(long(tree.sample_grid[j]) - long(target)))
      ++j;
    while (j > 0 && std::abs(long(tree.sample_grid[j - 1]) - long(target)) <
                        std::abs(long(tree.sample_grid[j]) - long(target)))
      --j;
    std::uint32_t u = tree.sample_node[j];

    // v: root-path node with height nearest x.
    std::uint32_t v = u, best = u;
    double best_gap = std::abs(tree.nodes[u].height - pt.x);
    while (v != 0) {
      v = tree.nodes[v].parent;
      double gap = std::abs(tree.nodes[v].height - pt.x);
      if (gap < best_gap) {
        best_gap = gap;
        best = v;
      }
    }
    if (best != u) gs.identifications.push_back({u, best});
  }

  // Contract identified pairs.
  std::vector<std::uint32_t> uf(n_nodes);
  std::iota(uf.begin(), uf.end(), 0);
  auto find = [&](std::uint32_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (auto [u, v] : gs.identifications) uf[find(u)] = find(v);

  gs.node_class.assign(n_nodes, 0);
  std::vector<std::uint32_t> class_of_root(n_nodes, n_nodes);
  std::uint32_t n_classes = 0;
  for (std::uint32_t v = 0; v < n_nodes; ++v) {
    std::uint32_t r = find(v);
    if (class_of_root[r] == n_nodes) class_of_root[r] = n_classes++;
    gs.node_class[v] = class_of_root[r];
  }
  gs.class_mass.assign(n_classes, 0.0);
  for (std::uint32_t v = 0; v < n_nodes; ++v)
    gs.class_mass[gs.node_class[v]] += tree.nodes[v].mass;

  std::vector<Edge> edges;
  for (std::uint32_t v = 1; v < n_nodes; ++v)
    edges.push_back({gs.node_class[tree.nodes[v].parent], gs.node_class[v],
                     1.0 / tree.nodes[v].up_len});
  gs.graph = WeightedGraph::build(n_classes, edges, /*multigraph=*/true);
  return gs;
}

std::vector<double> GluedSpace::distances_from(std::uint32_t cls) const {
  return shortest_path_from(graph, cls);
}

double GluedSpace::distance(std::uint32_t a, std::uint32_t b) const {
  return distances_from(a)[b];
}

ReflectedExcursions simulate_reflected_parabolic(double lambda, double c1, double c2, double c3,
                                                 double horizon, double dt, std::uint64_t seed) {
  require(c1 > 0.0 && c2 > 0.0 && c3 > 0.0, errc::invalid_argument, "coefficients must be positive");
  require(dt > 0.0 && dt <= 1e-3 * horizon, errc::invalid_argument,
          "dt must be at most horizon/1000");

  Rng rng(seed);
  const double diffusion = std::sqrt(c2) / c1 * std::sqrt(dt);
  const double quad = c2 / (2.0 * c1 * c1 * c1);

  double b = 0.0, runmin = 0.0, tcur = 0.0;
  double last_zero = 0.0;
  double hcur = horizon;
  int extensions = 0;

  std::vector<double> lengths;
  std::vector<double> areas;
  double exc_start = 0.0, exc_area = 0.0, prev_r = 0.0;
  bool in_exc = false;

  while (true) {
    while (tcur < hcur) {
      double tnext = tcur + dt;
      b += diffusion * rng.next_gaussian() + lambda * dt - quad * (tnext * tnext - tcur * tcur);
      tcur = tnext;
      double r = b - std::min(runmin, b);
      if (b < runmin) runmin = b;
      if (r > 0.0 && !in_exc) {
        in_exc = true;
        exc_start = tcur - dt;
        exc_area = 0.5 * (prev_r + r) * dt;
      } else if (r > 0.0) {
        exc_area += 0.5 * (prev_r + r) * dt;
      } else {
        last_zero = tcur;
        if (in_exc) {
          in_exc = false;
          lengths.push_back(tcur - exc_start);
          areas.push_back(exc_area);
        }
      }
      prev_r = r;
    }
    if (last_zero <= 0.9 * hcur && !in_exc) break;
    require(++extensions <= 32, errc::horizon_too_short,
            "parabolic drift did not dominate within the extended horizon");
    hcur *= 1.5;
  }

  ReflectedExcursions out;
  out.horizon_used = hcur;
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b2) { return lengths[a] > lengths[b2]; });
  for (std::size_t i : order) {
    out.lengths.push_back(lengths[i]);
    out.marks.push_back(rng.next_poisson(c3 * areas[i]));
  }
  return out;
}

}  // namespace bl
