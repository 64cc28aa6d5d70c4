#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "excursion.hpp"
#include "graph.hpp"
#include "graphgen.hpp"
#include "metric.hpp"
#include "tree.hpp"
#include "walk.hpp"

namespace bl {

// Deterministic parallel map: fn(i) for i in [0, count), work split across
// threads, each index's work a pure function of derived seeds.
void parallel_for(std::uint64_t count, unsigned threads, const std::function<void(std::uint64_t)>& fn);

double median_of(std::vector<double> v);
double two_sample_ks(std::vector<double> a, std::vector<double> b);
double ks_critical_95(std::size_t n1, std::size_t n2);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r_squared = 0.0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

enum class ModelKind { gw_tree, er_component, config_model, excursion_tree };

const char* model_name(ModelKind m);
std::optional<ModelKind> model_from_name(const std::string& name);

// Declared scaling regimes: alpha(n) beta(n) = m^{G_n}.
double beta_scale(ModelKind m, double n);
double alpha_scale(ModelKind m, double n);

struct ExperimentPlan {
  ModelKind model = ModelKind::gw_tree;
  std::vector<std::uint32_t> sizes;
  double epsilon = 0.3;
  std::uint32_t replicates = 100;
  std::uint64_t master_seed = 0;
  double lambda = 0.0;                // er/config critical window
  std::vector<double> degree_table;   // config model; empty = built-in critical law
  double t_max_factor = 1.0;          // multiplies the default budget policy
  unsigned threads = 0;               // 0 = hardware concurrency
};

struct ReplicateRecord {
  std::uint32_t size = 0;
  std::uint32_t index = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> tau_blanket;
  std::optional<std::uint64_t> cover_time;
  std::uint32_t instance_vertices = 0;  // walked graph (component) size
  double wall_ms = 0.0;
};

struct ScalingFit {
  LinearFit fit;  // log median tau vs log size
  std::vector<std::uint32_t> sizes;
  std::vector<double> medians;
  std::vector<double> iqr_low, iqr_high;
  std::uint64_t censored = 0;
};

struct ScalingResult {
  ScalingFit fit;
  std::vector<ReplicateRecord> records;
};

// Blanket-time samples across the size ladder with a log-log median fit.
// Censored (timed-out) replicates are excluded from the fit and counted.
ScalingResult run_scaling_experiment(const ExperimentPlan& plan);

// Instance sampling shared by the experiments: the walked graph plus its
// distinguished start vertex.
struct ModelInstance {
  WeightedGraph graph;
  vertex_id start = 0;
};
ModelInstance sample_model_instance(const ExperimentPlan& plan, std::uint32_t size,
                                    std::uint64_t seed);

struct KsTable {
  struct Row {
    std::uint32_t n_low = 0, n_high = 0;
    double ks = 0.0;
  };
  std::vector<Row> rows;
  bool monotone_decreasing = true;
};

// KS distances between rescaled ECDFs of consecutive sizes; samples must
// already be rescaled by beta(n)^{-1}.
KsTable ks_convergence(const std::map<std::uint32_t, std::vector<double>>& samples_by_size);

struct ConcentrationTable {
  std::vector<double> lambdas;
  std::vector<double> tails;
  LinearFit log_tail_fit;   // over lambdas with positive tails
  double c1_fit = 0.0;      // exp(intercept)
  double c2_fit = 0.0;      // -slope
  double c1_envelope = 0.0; // smallest c1 with tail <= c1 exp(-c2 lambda) everywhere
  std::uint32_t envelope_violations = 0;
  std::uint32_t replicates = 0;
};

// Tail of the rescaled local-time fluctuation between a random vertex pair
// of a conditioned GW tree over [0, T] in commute-time units.
ConcentrationTable concentration_check(std::uint32_t n, double T, const std::vector<double>& lambdas,
                                       std::uint32_t replicates, std::uint64_t master_seed,
                                       unsigned threads);

struct ModulusTable {
  std::vector<double> deltas;
  std::vector<double> probabilities;
  std::vector<double> stderrs;
  std::uint32_t replicates = 0;
};

// Empirical P(sup over sampled pairs closer than delta (rescaled) of the
// rescaled local-time gap over [0,T] >= eps), per delta. The per-delta pair
// pools nest, so the modulus is nondecreasing in delta on every sample.
ModulusTable equicontinuity_modulus(const ExperimentPlan& plan, std::uint32_t size,
                                    const std::vector<double>& deltas, double T, double eps,
                                    std::uint32_t replicates);

struct ThetaIdentityResult {
  double ks_matched = 0.0;    // tau^{Theta_a}(eps/a) vs a^{3/2} tau(eps)
  double ks_control = 0.0;    // epsilon deliberately left unscaled
  double ks_critical = 0.0;   // 95% two-sample threshold
  std::uint32_t replicates = 0;
};

ThetaIdentityResult blanket_scaling_identity_check(const Excursion& e, double a, double epsilon,
                                                   std::uint32_t replicates,
                                                   std::uint32_t n_leaves, std::uint64_t master_seed,
                                                   unsigned threads);

// Quadruple at a given discretization rung of a fixed excursion: the space
// restricted to shared contour-time slots, with the path and local times of
// one reference walk (simulated at the finest rung) projected onto it.
struct QuadrupleLadder {
  std::vector<Quadruple> quadruples;       // one per rung
  std::vector<std::vector<std::uint32_t>> params;  // contour parameterization per rung
};

QuadrupleLadder build_quadruple_ladder(const Excursion& e,
                                       const std::vector<std::uint32_t>& rungs,
                                       std::uint32_t contour_slots, double horizon,
                                       std::uint64_t walk_seed);

// Median dk upper bound between consecutive rungs over walk replicates.
std::vector<double> dk_ladder_trend(const Excursion& e, const std::vector<std::uint32_t>& rungs,
                                    std::uint32_t contour_slots, double horizon,
                                    std::uint32_t replicates, std::uint64_t master_seed,
                                    unsigned threads);

}  // namespace bl
