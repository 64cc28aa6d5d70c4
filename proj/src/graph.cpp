#include "graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <string>

namespace bl {

WeightedGraph WeightedGraph::build(vertex_id n, std::span<const Edge> edges, bool multigraph) {
  require(n >= 2, errc::fewer_than_two_vertices, "graph needs at least two vertices");
  require(!edges.empty(), errc::invalid_argument, "empty edge list");

  WeightedGraph g;
  g.n_ = n;
  g.multigraph_ = multigraph;
  g.edges_.assign(edges.begin(), edges.end());

  std::set<std::pair<vertex_id, vertex_id>> seen;
  for (const Edge& e : g.edges_) {
    require(e.u < n && e.v < n, errc::invalid_argument,
            "edge endpoint " + std::to_string(std::max(e.u, e.v)) + " out of range");
    require(e.w > 0.0 && std::isfinite(e.w), errc::nonpositive_weight,
            "edge weights must be positive");
    if (!multigraph) {
      require(e.u != e.v, errc::invalid_argument, "self-loop on a simple graph");
      auto key = std::minmax(e.u, e.v);
      require(seen.insert({key.first, key.second}).second, errc::invalid_argument,
              "parallel edge on a simple graph");
    }
  }

  std::vector<std::size_t> deg(n, 0);
  for (const Edge& e : g.edges_) {
    if (e.u == e.v) {
      deg[e.u] += 1;
    } else {
      deg[e.u] += 1;
      deg[e.v] += 1;
    }
  }
  g.off_.assign(n + 1, 0);
  for (vertex_id x = 0; x < n; ++x) g.off_[x + 1] = g.off_[x] + deg[x];
  g.adj_.resize(g.off_[n]);
  g.adj_w_.resize(g.off_[n]);
  std::vector<std::size_t> cur(g.off_.begin(), g.off_.end() - 1);
  for (const Edge& e : g.edges_) {
    if (e.u == e.v) {
      g.adj_[cur[e.u]] = e.u;
      g.adj_w_[cur[e.u]++] = 2.0 * e.w;  // both half-edges
    } else {
      g.adj_[cur[e.u]] = e.v;
      g.adj_w_[cur[e.u]++] = e.w;
      g.adj_[cur[e.v]] = e.u;
      g.adj_w_[cur[e.v]++] = e.w;
    }
  }

  g.mu_.assign(n, 0.0);
  for (vertex_id x = 0; x < n; ++x)
    for (double w : g.neighbor_weights(x)) g.mu_[x] += w;
  g.total_mass_ = 0.0;
  for (double m : g.mu_) g.total_mass_ += m;

  // Connectivity (self-loops do not connect anything new).
  std::vector<char> seen_v(n, 0);
  std::vector<vertex_id> stack{0};
  seen_v[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    vertex_id x = stack.back();
    stack.pop_back();
    for (vertex_id y : g.neighbors(x)) {
      if (!seen_v[y]) {
        seen_v[y] = 1;
        ++reached;
        stack.push_back(y);
      }
    }
  }
  require(reached == n, errc::disconnected_graph,
          "graph is disconnected (" + std::to_string(reached) + "/" + std::to_string(n) +
              " vertices reachable)");
  return g;
}

VertexMeasure stationary_measure(const WeightedGraph& g) {
  VertexMeasure m;
  m.mu.resize(g.n_vertices());
  for (vertex_id x = 0; x < g.n_vertices(); ++x) m.mu[x] = g.mu(x);
  m.total_mass = g.total_mass();
  m.pi.resize(g.n_vertices());
  for (vertex_id x = 0; x < g.n_vertices(); ++x) m.pi[x] = m.mu[x] / m.total_mass;
  return m;
}

double dirichlet_energy(const WeightedGraph& g, std::span<const double> f,
                        std::span<const double> h) {
  require(f.size() == g.n_vertices() && h.size() == g.n_vertices(), errc::dimension_mismatch,
          "vertex function size must equal vertex count");
  double acc = 0.0;
  for (const Edge& e : g.edges()) {
    if (e.u == e.v) continue;
    acc += (f[e.u] - f[e.v]) * (h[e.u] - h[e.v]) * e.w;
  }
  return acc;
}

namespace {

// Jacobi-preconditioned CG on the Laplacian grounded at `ground`.
// Solves L_g x = b with x[ground] fixed to 0; b given on all vertices.
std::vector<double> grounded_cg(const WeightedGraph& g, const std::vector<double>& b,
                                vertex_id ground) {
  const vertex_id n = g.n_vertices();
  std::vector<double> diag(n, 0.0);
  for (const Edge& e : g.edges()) {
    if (e.u == e.v) continue;
    diag[e.u] += e.w;
    diag[e.v] += e.w;
  }

  auto apply = [&](const std::vector<double>& x, std::vector<double>& out) {
    for (vertex_id v = 0; v < n; ++v) out[v] = diag[v] * x[v];
    for (const Edge& e : g.edges()) {
      if (e.u == e.v) continue;
      out[e.u] -= e.w * x[e.v];
      out[e.v] -= e.w * x[e.u];
    }
    out[ground] = x[ground];  // identity row keeps the system grounded
  };

  std::vector<double> x(n, 0.0), r(b), z(n), p(n), ap(n);
  r[ground] = 0.0;
  for (vertex_id v = 0; v < n; ++v) z[v] = (v == ground) ? 0.0 : r[v] / diag[v];
  p = z;
  double rz = 0.0;
  for (vertex_id v = 0; v < n; ++v) rz += r[v] * z[v];

  const double tol = 1e-10;
  const std::size_t max_iter = 10 * std::size_t(n) + 16;
  for (std::size_t it = 0; it < max_iter; ++it) {
    double rnorm = 0.0;
    for (vertex_id v = 0; v < n; ++v) rnorm += r[v] * r[v];
    if (std::sqrt(rnorm) <= tol) return x;
    apply(p, ap);
    double pap = 0.0;
    for (vertex_id v = 0; v < n; ++v) pap += p[v] * ap[v];
    if (pap <= 0.0) break;
    double alpha = rz / pap;
    for (vertex_id v = 0; v < n; ++v) {
      x[v] += alpha * p[v];
      r[v] -= alpha * ap[v];
    }
    for (vertex_id v = 0; v < n; ++v) z[v] = (v == ground) ? 0.0 : r[v] / diag[v];
    double rz_new = 0.0;
    for (vertex_id v = 0; v < n; ++v) rz_new += r[v] * z[v];
    double beta = rz_new / rz;
    rz = rz_new;
    for (vertex_id v = 0; v < n; ++v) p[v] = z[v] + beta * p[v];
  }
  double rnorm = 0.0;
  for (vertex_id v = 0; v < n; ++v) rnorm += r[v] * r[v];
  if (std::sqrt(rnorm) <= tol) return x;
  fail(errc::solver_not_converged,
       "conjugate gradient did not reach residual 1e-10 in " + std::to_string(max_iter) +
           " iterations");
}

double tree_path_resistance(const WeightedGraph& g, vertex_id a, vertex_id b) {
  const vertex_id n = g.n_vertices();
  std::vector<vertex_id> parent(n, n);
  std::vector<double> up(n, 0.0);
  std::vector<vertex_id> q{a};
  parent[a] = a;
  for (std::size_t head = 0; head < q.size(); ++head) {
    vertex_id x = q[head];
    if (x == b) break;
    auto nb = g.neighbors(x);
    auto wt = g.neighbor_weights(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (parent[nb[i]] == n) {
        parent[nb[i]] = x;
        up[nb[i]] = 1.0 / wt[i];
        q.push_back(nb[i]);
      }
    }
  }
  double r = 0.0;
  for (vertex_id x = b; x != a; x = parent[x]) r += up[x];
  return r;
}

}  // namespace

std::vector<double> resistance_potential(const WeightedGraph& g, vertex_id a, vertex_id b) {
  require(a != b, errc::invalid_argument, "resistance endpoints must differ");
  require(a < g.n_vertices() && b < g.n_vertices(), errc::invalid_argument,
          "vertex id out of range");
  std::vector<double> rhs(g.n_vertices(), 0.0);
  rhs[a] = 1.0;
  std::vector<double> phi = grounded_cg(g, rhs, b);
  double r = phi[a];
  for (double& v : phi) v /= r;  // scale to f(a)=1, f(b)=0
  return phi;
}

double effective_resistance(const WeightedGraph& g, vertex_id a, vertex_id b) {
  require(a != b, errc::invalid_argument, "resistance endpoints must differ");
  require(a < g.n_vertices() && b < g.n_vertices(), errc::invalid_argument,
          "vertex id out of range");
  if (g.is_tree()) return tree_path_resistance(g, a, b);
  std::vector<double> rhs(g.n_vertices(), 0.0);
  rhs[a] = 1.0;
  return grounded_cg(g, rhs, b)[a];
}

std::vector<double> shortest_path_from(const WeightedGraph& g, vertex_id source) {
  const vertex_id n = g.n_vertices();
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  dist[source] = 0.0;
  using Item = std::pair<double, vertex_id>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push({0.0, source});
  while (!pq.empty()) {
    auto [d, x] = pq.top();
    pq.pop();
    if (d > dist[x]) continue;
    auto nb = g.neighbors(x);
    auto wt = g.neighbor_weights(x);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] == x) continue;
      double nd = d + 1.0 / wt[i];
      if (nd < dist[nb[i]]) {
        dist[nb[i]] = nd;
        pq.push({nd, nb[i]});
      }
    }
  }
  return dist;
}

MetricMatrix graph_metric(const WeightedGraph& g, MetricKind kind) {
  const vertex_id n = g.n_vertices();
  MetricMatrix m;
  m.kind = kind;
  m.n = n;
  m.values.assign(std::size_t(n) * n, 0.0);

  if (kind == MetricKind::shortest_path || g.is_tree()) {
    for (vertex_id s = 0; s < n; ++s) {
      std::vector<double> d = shortest_path_from(g, s);
      for (vertex_id t = 0; t < n; ++t) m.at(s, t) = d[t];
    }
    return m;
  }

  require(n <= 5000, errc::size_limit_exceeded,
          "full resistance matrix limited to 5000 vertices; use pairwise queries");
  // One grounded solve per source against ground 0 yields the Green matrix.
  const vertex_id ground = 0;
  std::vector<std::vector<double>> green(n);
  for (vertex_id s = 1; s < n; ++s) {
    std::vector<double> rhs(n, 0.0);
    rhs[s] = 1.0;
    green[s] = grounded_cg(g, rhs, ground);
  }
  for (vertex_id i = 0; i < n; ++i) {
    for (vertex_id j = i + 1; j < n; ++j) {
      double gii = (i == ground) ? 0.0 : green[i][i];
      double gjj = (j == ground) ? 0.0 : green[j][j];
      double gij = (i == ground) ? 0.0 : green[i][j];
      double r = gii + gjj - 2.0 * gij;
      m.at(i, j) = r;
      m.at(j, i) = r;
    }
  }
  return m;
}

double diameter(const WeightedGraph& g, vertex_id exact_limit) {
  const vertex_id n = g.n_vertices();
  auto farthest = [&](vertex_id s) {
    std::vector<double> d = shortest_path_from(g, s);
    vertex_id arg = s;
    for (vertex_id v = 0; v < n; ++v)
      if (d[v] > d[arg]) arg = v;
    return std::make_pair(arg, d[arg]);
  };
  if (n <= exact_limit && !g.is_tree()) {
    double best = 0.0;
    for (vertex_id s = 0; s < n; ++s) best = std::max(best, farthest(s).second);
    return best;
  }
  // Double sweep, exact on trees.
  auto [u, d0] = farthest(0);
  return farthest(u).second;
}

ResistanceOracle::ResistanceOracle(const WeightedGraph& g) : n_(g.n_vertices()) {
  parent_.assign(n_, n_);
  parent_w_.assign(n_, 0.0);
  order_.clear();
  order_.reserve(n_);

  // Merge parallel edges; BFS spanning tree from vertex 0 (the ground).
  std::vector<std::vector<std::pair<vertex_id, double>>> adj(n_);
  {
    std::map<std::pair<vertex_id, vertex_id>, std::size_t> merged;
    std::vector<Edge> simple;
    for (const Edge& e : g.edges()) {
      if (e.u == e.v) continue;
      auto key = std::minmax(e.u, e.v);
      auto [it, inserted] = merged.try_emplace({key.first, key.second}, simple.size());
      if (inserted)
        simple.push_back({key.first, key.second, e.w});
      else
        simple[it->second].w += e.w;
    }
    for (const Edge& e : simple) {
      adj[e.u].push_back({e.v, e.w});
      adj[e.v].push_back({e.u, e.w});
    }
    std::vector<char> in_tree_v(n_, 0);
    in_tree_v[0] = 1;
    std::vector<vertex_id> q{0};
    parent_[0] = 0;
    std::set<std::pair<vertex_id, vertex_id>> tree_edges;
    for (std::size_t head = 0; head < q.size(); ++head) {
      vertex_id x = q[head];
      order_.push_back(x);
      for (auto [y, w] : adj[x]) {
        if (!in_tree_v[y]) {
          in_tree_v[y] = 1;
          parent_[y] = x;
          parent_w_[y] = w;
          auto key = std::minmax(x, y);
          tree_edges.insert({key.first, key.second});
          q.push_back(y);
        }
      }
    }
    require(order_.size() == n_, errc::disconnected_graph, "resistance oracle needs connectivity");
    for (const Edge& e : simple) {
      auto key = std::minmax(e.u, e.v);
      if (!tree_edges.count({key.first, key.second})) {
        extra_u_.push_back(e.u);
        extra_v_.push_back(e.v);
        extra_w_.push_back(e.w);
      }
    }
  }

  // Up-sweep pivots for the grounded tree Laplacian (ground = root 0).
  std::vector<double> mu(n_, 0.0);
  for (vertex_id v = 1; v < n_; ++v) {
    mu[v] += parent_w_[v];
    mu[parent_[v]] += parent_w_[v];
  }
  diag_ = mu;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    vertex_id v = *it;
    if (v == 0) continue;
    diag_[parent_[v]] -= parent_w_[v] * parent_w_[v] / diag_[v];
  }

  const std::size_t k = extra_u_.size();
  if (k > 0) {
    ys_.resize(k);
    for (std::size_t i = 0; i < k; ++i) ys_[i] = tree_solve(extra_u_[i], extra_v_[i]);
    // Capacitance S = W^{-1} + B^T T^{-1} B, dense LU with partial pivoting.
    s_factor_.assign(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        double bij = ys_[j][extra_u_[i]] - ys_[j][extra_v_[i]];
        s_factor_[i * k + j] = bij + (i == j ? 1.0 / extra_w_[i] : 0.0);
      }
    }
    s_piv_.resize(k);
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < k; ++r)
        if (std::abs(s_factor_[r * k + col]) > std::abs(s_factor_[piv * k + col])) piv = r;
      s_piv_[col] = int(piv);
      if (piv != col)
        for (std::size_t c = 0; c < k; ++c) std::swap(s_factor_[col * k + c], s_factor_[piv * k + c]);
      require(s_factor_[col * k + col] != 0.0, errc::internal, "singular capacitance matrix");
      for (std::size_t r = col + 1; r < k; ++r) {
        double f = s_factor_[r * k + col] / s_factor_[col * k + col];
        s_factor_[r * k + col] = f;
        for (std::size_t c = col + 1; c < k; ++c) s_factor_[r * k + c] -= f * s_factor_[col * k + c];
      }
    }
  }
}

std::vector<double> ResistanceOracle::tree_solve(vertex_id a, vertex_id b) const {
  // Solve T_g x = e_a - e_b with the root grounded: up-sweep the rhs, then
  // down-sweep the potentials.
  std::vector<double> e(n_, 0.0);
  e[a] += 1.0;
  e[b] -= 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    vertex_id v = *it;
    if (v == 0) continue;
    e[parent_[v]] += parent_w_[v] * e[v] / diag_[v];
  }
  std::vector<double> x(n_, 0.0);
  for (vertex_id v : order_) {
    if (v == 0) continue;
    x[v] = (e[v] + parent_w_[v] * x[parent_[v]]) / diag_[v];
  }
  return x;
}

double ResistanceOracle::resistance(vertex_id a, vertex_id b) const {
  require(a < n_ && b < n_, errc::invalid_argument, "vertex id out of range");
  if (a == b) return 0.0;
  std::vector<double> z = tree_solve(a, b);
  double r = z[a] - z[b];
  const std::size_t k = extra_u_.size();
  if (k == 0) return r;
  std::vector<double> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = z[extra_u_[i]] - z[extra_v_[i]];
  // Solve S y = c with the stored LU.
  for (std::size_t col = 0; col < k; ++col) {
    std::swap(c[col], c[std::size_t(s_piv_[col])]);
    for (std::size_t r2 = col + 1; r2 < k; ++r2) c[r2] -= s_factor_[r2 * k + col] * c[col];
  }
  for (std::size_t col = k; col-- > 0;) {
    for (std::size_t c2 = col + 1; c2 < k; ++c2) c[col] -= s_factor_[col * k + c2] * c[c2];
    c[col] /= s_factor_[col * k + col];
  }
  double corr = 0.0;
  for (std::size_t i = 0; i < k; ++i) corr += c[i] * (ys_[i][a] - ys_[i][b]);
  return r - corr;
}

}  // namespace bl
