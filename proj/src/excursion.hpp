#pragma once

#include <cstdint>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace bl {

// Positive excursion on a uniform grid of N+1 points over [0, zeta].
struct Excursion {
  double zeta = 1.0;
  std::uint32_t grid_n = 0;  // N
  std::vector<double> values;

  double dt() const { return zeta / double(grid_n); }
  double integral() const;  // trapezoid
  double max_value() const;
};

// Normalized Brownian excursion scaled to length zeta: a random-walk bridge
// on the grid rotated at its minimum (Vervaat transform).
Excursion sample_excursion(double zeta, std::uint32_t grid_n, std::uint64_t seed);

// Area-tilted excursion, weight exp(integral of e), by self-normalized
// importance resampling over a pool of Brownian excursions.
struct TiltedExcursion {
  Excursion excursion;
  double ess = 0.0;
};
TiltedExcursion sample_tilted_excursion(double zeta, std::uint32_t grid_n, std::uint64_t seed,
                                        std::uint32_t pool_size);

// Theta_a: length a*zeta, values sqrt(a) e(t/a); exact on the grid.
Excursion theta_scale(const Excursion& e, double a);

// The real tree coded by an excursion, discretized at n_leaves sampled grid
// times and quotiented by the zero-distance relation. Branch points between
// sampled times are materialized as mass-zero nodes so that the node graph
// with edge lengths realizes the coded metric exactly on the sampled times.
struct DiscretizedContinuumTree {
  struct Node {
    std::uint32_t grid_time;
    double height;
    std::uint32_t parent;  // node index, root points to itself
    double up_len;
    double mass;
  };

  double zeta = 0.0;
  std::uint32_t grid_n = 0;
  std::vector<double> excursion_values;
  std::vector<Node> nodes;                  // node 0 is the root
  std::vector<std::uint32_t> sample_node;   // sampled time j -> node
  std::vector<std::uint32_t> sample_grid;   // sampled time j -> grid index

  double total_mass() const;
  // d(s,t) = e(s) + e(t) - 2 min_{[s,t]} e, evaluated on node times.
  double distance(std::uint32_t node_a, std::uint32_t node_b) const;
  double min_between(std::uint32_t grid_a, std::uint32_t grid_b) const;

  // Representative graph: one vertex per node, conductance 1/edge-length.
  WeightedGraph to_graph() const;
  std::vector<double> node_masses() const;

 private:
  // Sparse-table range minimum over excursion_values.
  std::vector<std::vector<std::uint32_t>> rmq_;
  friend DiscretizedContinuumTree excursion_to_tree(const Excursion&, std::uint32_t);
};

DiscretizedContinuumTree excursion_to_tree(const Excursion& e, std::uint32_t n_leaves);

struct PointSet {
  struct Point {
    double t;
    double x;
  };
  std::vector<Point> points;
  double rate = 1.0;
};

// Count ~ Poisson(c3 * integral), positions with density proportional to
// e(t) (grid-snapped), marks uniform under the graph.
PointSet sample_pointset(const Excursion& e, double c3, std::uint64_t seed);

// The tree glued along the pointset identifications: u from the
// t-coordinate, v the root-path ancestor of u at height nearest x.
struct GluedSpace {
  DiscretizedContinuumTree base;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> identifications;  // node pairs
  std::vector<std::uint32_t> node_class;  // tree node -> glued vertex
  std::vector<double> class_mass;
  WeightedGraph graph;  // contracted representative graph

  // Quotient metric = shortest path on the contracted graph.
  std::vector<double> distances_from(std::uint32_t cls) const;
  double distance(std::uint32_t cls_a, std::uint32_t cls_b) const;
};

GluedSpace glue_continuum(const DiscretizedContinuumTree& tree, const PointSet& ps);

// Brownian motion with parabolic drift (sqrt(c2)/c1) B_t + lambda t
// - c2 t^2 / (2 c1^3), reflected at its running minimum; returns excursion
// lengths sorted descending with Poisson(c3 * area) mark counts.
struct ReflectedExcursions {
  std::vector<double> lengths;
  std::vector<std::uint64_t> marks;
  double horizon_used = 0.0;
};

ReflectedExcursions simulate_reflected_parabolic(double lambda, double c1, double c2, double c3,
                                                 double horizon, double dt, std::uint64_t seed);

}  // namespace bl
