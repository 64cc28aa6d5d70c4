#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "error.hpp"

namespace bl {

using vertex_id = std::uint32_t;

struct Edge {
  vertex_id u;
  vertex_id v;
  double w;
};

// Finite connected graph with symmetric positive edge weights. Immutable
// after construction; all operations on it are pure.
//
// Self-loops are allowed only on multigraphs and follow half-edge
// accounting: a loop of weight w contributes 2w to the vertex weight and the
// walk traverses it with probability 2w/mu_x.
class WeightedGraph {
 public:
  static WeightedGraph build(vertex_id n, std::span<const Edge> edges, bool multigraph = false);

  vertex_id n_vertices() const { return n_; }
  std::size_t n_edges() const { return edges_.size(); }
  bool is_multigraph() const { return multigraph_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Adjacency row for x: neighbor ids and the weights mu_xy (a self-loop
  // appears once with weight 2w).
  std::span<const vertex_id> neighbors(vertex_id x) const {
    return {adj_.data() + off_[x], adj_.data() + off_[x + 1]};
  }
  std::span<const double> neighbor_weights(vertex_id x) const {
    return {adj_w_.data() + off_[x], adj_w_.data() + off_[x + 1]};
  }
  std::size_t degree(vertex_id x) const { return off_[x + 1] - off_[x]; }

  double mu(vertex_id x) const { return mu_[x]; }
  double total_mass() const { return total_mass_; }
  bool is_tree() const { return !multigraph_ && edges_.size() + 1 == n_; }

 private:
  vertex_id n_ = 0;
  bool multigraph_ = false;
  std::vector<Edge> edges_;
  std::vector<std::size_t> off_;
  std::vector<vertex_id> adj_;
  std::vector<double> adj_w_;
  std::vector<double> mu_;
  double total_mass_ = 0.0;
};

struct VertexMeasure {
  std::vector<double> mu;
  double total_mass = 0.0;
  std::vector<double> pi;
};

VertexMeasure stationary_measure(const WeightedGraph& g);

double dirichlet_energy(const WeightedGraph& g, std::span<const double> f,
                        std::span<const double> h);

// Two-point effective resistance. Trees take the series path; otherwise the
// grounded Laplacian system is solved by Jacobi-preconditioned conjugate
// gradient to residual 1e-10 (at most 10n iterations).
double effective_resistance(const WeightedGraph& g, vertex_id a, vertex_id b);

// Potential realizing R(a,b): f(a)=1, f(b)=0, harmonic elsewhere.
std::vector<double> resistance_potential(const WeightedGraph& g, vertex_id a, vertex_id b);

enum class MetricKind { shortest_path, resistance };

struct MetricMatrix {
  MetricKind kind;
  vertex_id n = 0;
  std::vector<double> values;  // row-major n*n

  double at(vertex_id i, vertex_id j) const { return values[std::size_t(i) * n + j]; }
  double& at(vertex_id i, vertex_id j) { return values[std::size_t(i) * n + j]; }
};

// Full metric matrix. Edge length is 1/weight, so shortest-path and
// resistance agree on trees and both count hops on unit-weight graphs.
MetricMatrix graph_metric(const WeightedGraph& g, MetricKind kind);

// Single-source shortest-path distances (1/weight edge lengths).
std::vector<double> shortest_path_from(const WeightedGraph& g, vertex_id source);

// Shortest-path diameter: exact all-pairs when n <= exact_limit, otherwise a
// double-sweep estimate (exact on trees, a lower bound in general).
double diameter(const WeightedGraph& g, vertex_id exact_limit = 4096);

// Exact on-demand resistance for connected graphs that are a tree plus a few
// extra edges: O(n) spanning-tree solves corrected by a rank-k update.
class ResistanceOracle {
 public:
  explicit ResistanceOracle(const WeightedGraph& g);

  double resistance(vertex_id a, vertex_id b) const;
  std::size_t surplus_edges() const { return extra_u_.size(); }

 private:
  std::vector<double> tree_solve(vertex_id a, vertex_id b) const;

  vertex_id n_ = 0;
  std::vector<vertex_id> order_;    // BFS order from the grounded root
  std::vector<vertex_id> parent_;
  std::vector<double> parent_w_;
  std::vector<double> diag_;        // up-sweep pivots
  std::vector<vertex_id> extra_u_, extra_v_;
  std::vector<double> extra_w_;
  std::vector<std::vector<double>> ys_;  // T^{-1} b_i per extra edge
  std::vector<double> s_factor_;         // dense LU of the capacitance matrix
  std::vector<int> s_piv_;
};

}  // namespace bl
