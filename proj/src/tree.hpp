#pragma once

#include <cstdint>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace bl {

// Rooted ordered tree. Vertices are numbered in depth-first (preorder)
// order, so vertex 0 is the root and the exploration order is the identity.
struct PlaneTree {
  std::vector<vertex_id> parent;               // parent[0] == 0
  std::vector<std::vector<vertex_id>> children;

  vertex_id n_vertices() const { return vertex_id(parent.size()); }
  vertex_id root() const { return 0; }
  bool is_leaf(vertex_id v) const { return children[v].empty(); }

  static PlaneTree from_children_counts(std::span<const std::uint32_t> counts);
  WeightedGraph to_graph() const;              // unit weights
  std::vector<std::uint32_t> depths() const;
};

struct OffspringDistribution {
  enum class Kind { poisson1, geometric_half, table };
  Kind kind = Kind::poisson1;
  std::vector<double> probs;  // table mode only
  bool aperiodic = true;

  static OffspringDistribution poisson1();
  static OffspringDistribution geometric_half();
  // Mean must equal 1 within 1e-9; aperiodicity is declared by the caller.
  static OffspringDistribution table(std::vector<double> probs, bool aperiodic_declared);

  std::uint32_t sample(Rng& rng) const;
  double sigma2() const;
};

// Galton-Watson tree conditioned on total progeny n+1: iid children counts
// conditioned on their sum (multinomial rejection), then the unique cyclic
// rotation that makes the Lukasiewicz word valid.
PlaneTree sample_conditioned_gw(const OffspringDistribution& offspring, std::uint32_t n,
                                std::uint64_t seed);

// Empirical children distribution: ecd[i] = number of vertices with i children.
struct ECD {
  std::vector<std::uint64_t> s;

  bool tenable() const;
  std::uint64_t n_vertices() const;
  static ECD of(const PlaneTree& t);
};

// Uniform sample from the plane trees with a given ECD: random permutation
// of the children multiset plus the cycle-lemma rotation.
PlaneTree uniform_plane_tree_with_ecd(const ECD& s, std::uint64_t seed);

struct ContourPath {
  std::vector<std::uint32_t> values;   // V(0..2n), unit steps
  std::vector<vertex_id> tour;         // vertex occupied at each contour step
  std::vector<double> normalized;      // V(i)/sqrt(n) on the 2n+1 grid
  std::uint32_t n_edges = 0;
};

ContourPath contour_process(const PlaneTree& t);

vertex_id contour_projection(const ContourPath& p, std::size_t time_index);

struct LukasiewiczPath {
  std::vector<std::uint32_t> x_values;  // open-vertex count minus one, per step
  std::uint64_t area = 0;
};

LukasiewiczPath depth_first_walk_and_area(const PlaneTree& t);

// The a(T) non-tree edges whose addition leaves the depth-first tree
// unchanged: at step i, the explored vertex against every other open vertex.
std::vector<std::pair<vertex_id, vertex_id>> permitted_edges(const PlaneTree& t);

// sup over grid pairs of |v(s)-v(t)|/|t-s|^alpha. Exact up to 4096 edges;
// larger paths are subsampled (1e6 uniform pairs) and the result is a lower
// bound.
double holder_norm(const ContourPath& p, double alpha);

}  // namespace bl
