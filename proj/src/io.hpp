#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "excursion.hpp"
#include "experiment.hpp"
#include "graph.hpp"
#include "graphgen.hpp"
#include "metric.hpp"
#include "tree.hpp"

namespace bl::io {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kSeedScheme = "splitmix64-counter/v1";

std::string read_file(const std::string& path);
// Write via a temp file and rename, so partial outputs never appear.
void write_file_atomic(const std::string& path, const std::string& content);
std::uint64_t fnv1a64(std::string_view data);

// Deterministic shortest-round-trip double formatting used by every output.
std::string format_double(double v);

// Graph text format: header "n m", then m lines "u v w". Self-loops or
// parallel edges flip the multigraph flag on load.
std::string graph_to_text(const GraphSample& g);
std::string graph_to_text(const WeightedGraph& g);
GraphSample graph_sample_from_text(const std::string& text);
WeightedGraph graph_from_text(const std::string& text);

// Tree text format: "n; p_1 ... p_{n-1}" (parents of vertices 1..n-1).
std::string tree_to_text(const PlaneTree& t);
PlaneTree tree_from_text(const std::string& text);

// Excursion CSV: "# zeta=<z> n=<N>" then one value per line.
std::string excursion_to_csv(const Excursion& e);
Excursion excursion_from_csv(const std::string& text);

std::string quadruple_to_json(const Quadruple& q);
Quadruple quadruple_from_json(const std::string& text);

// Plan JSON; unknown keys are rejected naming the nearest valid key.
std::string plan_to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const std::string& text);

// Record streams. Wall-clock timings are deliberately not serialized so
// replays are byte-identical.
std::string scaling_records_csv(const std::vector<ReplicateRecord>& records);
std::string scaling_records_jsonl(const std::vector<ReplicateRecord>& records);

struct BlanketRow {
  std::uint32_t replicate;
  vertex_id start;
  double epsilon;
  std::optional<std::uint64_t> tau_blanket;
  std::optional<std::uint64_t> cover_time;
  std::uint64_t seed;
};
std::string blanket_rows_csv(const std::vector<BlanketRow>& rows);

struct ManifestEntry {
  std::string file;
  std::uint64_t checksum;
};
std::string manifest_json(const std::string& command, const std::string& config_json,
                          const std::vector<ManifestEntry>& outputs);

// Minimal SVG: ECDF as horizontal step segments (class "step"), log-log
// scatter with a fitted line (class "fit").
std::string svg_ecdf(std::vector<double> samples, const std::string& title);
std::string svg_loglog(const std::vector<double>& x, const std::vector<double>& y,
                       const LinearFit& fit, const std::string& title);

}  // namespace bl::io
