#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"
#include "tree.hpp"

namespace bl {

// Raw generator output: may be disconnected, may carry self-loops and
// parallel edges when multigraph is set.
struct GraphSample {
  vertex_id n = 0;
  std::vector<Edge> edges;
  bool multigraph = false;
};

// G(n, p) with p = 1/n + lambda n^{-4/3}, sampled by geometric skips over
// the lexicographic pair order (O(n + m) at criticality).
GraphSample sample_er_critical(vertex_id n, double lambda, std::uint64_t seed);

struct ComponentSpectrum {
  std::vector<std::uint64_t> sizes;     // descending, ties by smallest vertex id
  std::vector<std::uint64_t> surpluses; // matched: edges - size + 1
  std::vector<std::uint32_t> member;    // vertex -> component rank
};

ComponentSpectrum components_with_surplus(const GraphSample& g);

// Component extraction with the original vertex ids of the chosen component.
struct ExtractedComponent {
  WeightedGraph graph;
  std::vector<vertex_id> original_id;
};
ExtractedComponent extract_component(const GraphSample& g, const ComponentSpectrum& spectrum,
                                     std::uint32_t rank);

// A labelled tree T on [m] explored depth-first from label 0 with
// smallest-label-first order; `shape` holds the exploration as a plane tree
// (preorder ids) and `label[i]` the original label of preorder vertex i.
struct LabelledTreeSample {
  PlaneTree shape;
  std::vector<vertex_id> label;
  std::uint64_t area = 0;
  double ess = 0.0;  // effective sample size of the importance pool
};

// Uniform labelled tree on [m] (Prufer sequence).
LabelledTreeSample sample_uniform_labelled_tree(vertex_id m, std::uint64_t seed);

// P(T) proportional to (1-p)^{-a(T)}: self-normalized importance resampling
// over pool_size uniform labelled trees. The effective sample size of the
// pool is reported on the sample.
LabelledTreeSample sample_tilted_tree(vertex_id m, double p, std::uint64_t seed,
                                      std::uint32_t pool_size);

// G(m,p) conditioned connected: tilted tree plus each permitted edge
// independently with probability p. Unit weights, vertices carry the
// original labels.
GraphSample sample_connected_gmp(vertex_id m, double p, std::uint64_t seed,
                                 std::uint32_t pool_size);

struct DegreeSequence {
  std::vector<std::uint32_t> d;

  std::uint64_t ell() const;
};

// Uniform pairing of half-edges; self-loops and parallel edges are kept and
// the result is flagged as a multigraph.
GraphSample sample_configuration_model(const DegreeSequence& d, std::uint64_t seed);

// Ordered admissible leaf pairs (x, y): par(x) before par(y) in depth-first
// order and gpar(y) on the ancestral line from the root to gpar(x). Leaves
// at depth < 2 have no grandparent and are never admissible.
std::vector<std::pair<vertex_id, vertex_id>> admissible_pairs(const PlaneTree& t);

// Number of k-subsets of admissible pairs using 2k distinct leaves.
// Closed-form for k <= 2, guarded enumeration for k <= 4.
double count_admissible_tuples(const PlaneTree& t,
                               const std::vector<std::pair<vertex_id, vertex_id>>& pairs,
                               std::uint32_t k);

// Uniform connected graph with prescribed degrees d (d[0] must be 1, all
// entries >= 1, sum = 2(m-1) + 2k): sample theta with P proportional to
// |A_k(theta)| by importance resampling, z uniform among admissible
// k-tuples, glue, attach the degree-one root.
GraphSample sample_prescribed_connected(const DegreeSequence& d, std::uint64_t seed,
                                        std::uint32_t pool_size);

// n iid degrees from a probability table over {0,1,...}; the whole sequence
// is redrawn until the total is even. The table must satisfy the scaling
// window identity E[D(D-1)]/E[D] = 1 + lambda n^{-1/3} within 1e-9.
DegreeSequence sample_critical_degrees(vertex_id n, std::span<const double> table, double lambda,
                                       std::uint64_t seed);

}  // namespace bl
