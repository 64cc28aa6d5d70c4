#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graph.hpp"
#include "rng.hpp"

namespace bl {

// O(1) weighted neighbor sampling (Vose alias tables, one per vertex).
class NeighborSampler {
 public:
  explicit NeighborSampler(const WeightedGraph& g);
  vertex_id step(vertex_id x, Rng& rng) const;

 private:
  const WeightedGraph* g_;
  std::vector<std::size_t> off_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

struct WalkPath {
  vertex_id start = 0;
  std::vector<vertex_id> steps;  // X_0 .. X_horizon
  std::uint64_t seed = 0;
};

WalkPath run_walk(const WeightedGraph& g, vertex_id start, std::uint64_t horizon,
                  std::uint64_t seed);

// Exact local times at integer time t: counts over X_0..X_{t-1}, values
// count/mu_x. The occupation identity sum_x mu_x L_t(x) = t holds exactly
// because division is deferred to value().
struct LocalTimeField {
  std::vector<std::uint64_t> counts;
  std::uint64_t t = 0;

  double value(const WeightedGraph& g, vertex_id x) const { return double(counts[x]) / g.mu(x); }
};

LocalTimeField local_times(const WeightedGraph& g, const WalkPath& path, std::uint64_t t);

struct BlanketTimeResult {
  double epsilon = 0.0;
  std::optional<std::uint64_t> tau_blanket;  // empty on timeout
  std::optional<std::uint64_t> cover_time;
  std::uint64_t t_max = 0;
  std::uint64_t seed = 0;
};

// First integer t >= 1 with m^G L_t(x) >= eps*t at every vertex, detected
// with a lazy min-heap of per-vertex failure deadlines. Cover time is the
// first t with every count positive, recorded on the same trajectory.
BlanketTimeResult blanket_time_variable(const WeightedGraph& g, vertex_id start, double epsilon,
                                        std::uint64_t t_max, std::uint64_t seed);

std::optional<std::uint64_t> cover_time(const WeightedGraph& g, vertex_id start,
                                        std::uint64_t t_max, std::uint64_t seed);

// Step budget policy: 64 n^{3/2} on trees, 64 n diam otherwise.
std::uint64_t default_t_max(const WeightedGraph& g);

struct BlanketEstimate {
  struct PerStart {
    vertex_id start;
    double mean;
    double stderr_;
    std::uint64_t replicates;
    std::uint64_t timeouts;
  };
  std::vector<PerStart> per_start;
  double t_bl_estimate = 0.0;  // max over starts of the mean
  vertex_id argmax_start = 0;
};

// Mean and standard error of tau_bl per starting vertex over independent
// replicates; replicate i from start x uses seed derive(master, x, i).
BlanketEstimate expected_blanket_time(const WeightedGraph& g, double epsilon,
                                      std::uint64_t replicates, std::uint64_t t_max,
                                      std::uint64_t master_seed);

// Discrete analogue of the smoothed occupation ratio: kernel
// f(y) = max(0, delta - d(x,y)) against the first t steps of the path.
double smoothed_occupation(const WeightedGraph& g, const WalkPath& path, vertex_id x, double delta,
                           std::uint64_t t, const MetricMatrix& metric);

// Walk with an external vertex measure: the jump chain is still driven by
// the conductances, but time advances by nu_x/mu_x per step and the blanket
// condition is count_x/mu_x >= eps * clock. This approximates the blanket
// time of the process attached to (conductances, nu) and is what the
// excursion trees use.
struct MeasuredBlanketResult {
  std::optional<double> blanket_clock;
  std::uint64_t steps_taken = 0;
  std::uint64_t seed = 0;
};

MeasuredBlanketResult measured_blanket_time(const WeightedGraph& g,
                                            std::span<const double> vertex_mass, vertex_id start,
                                            double epsilon, std::uint64_t step_budget,
                                            std::uint64_t seed);

}  // namespace bl
