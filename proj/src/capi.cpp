#include "blanketlab.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "excursion.hpp"
#include "experiment.hpp"
#include "graph.hpp"
#include "graphgen.hpp"
#include "io.hpp"
#include "metric.hpp"
#include "tree.hpp"
#include "walk.hpp"

struct bl_graph {
  bl::WeightedGraph g;
};
struct bl_tree {
  bl::PlaneTree t;
};
struct bl_excursion {
  bl::Excursion e;
};

namespace {

thread_local std::string g_last_error;

bl_status status_of(bl::errc code) {
  using bl::errc;
  switch (code) {
    case errc::parse_error:
    case errc::unknown_key:
      return code == errc::unknown_key ? BL_ERR_UNKNOWN_KEY : BL_ERR_PARSE;
    case errc::disconnected_graph:
      return BL_ERR_DISCONNECTED;
    case errc::timeout:
    case errc::too_many_timeouts:
      return BL_ERR_TIMEOUT;
    case errc::io_error:
      return BL_ERR_IO;
    case errc::solver_not_converged:
    case errc::degenerate_weights:
    case errc::rejection_budget_exceeded:
      return BL_ERR_NUMERIC;
    case errc::internal:
      return BL_ERR_INTERNAL;
    default:
      return BL_ERR_INVALID_ARGUMENT;
  }
}

template <typename Fn>
bl_status wrap(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return BL_OK;
  } catch (const bl::error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BL_ERR_INTERNAL;
  }
}

// Shared by bl_experiment_run and the replay path.
struct ExperimentOutputs {
  std::string records_csv, records_jsonl, summary_csv, ecdf_svg, loglog_svg;
};

ExperimentOutputs run_plan(const bl::ExperimentPlan& plan) {
  bl::ScalingResult res = bl::run_scaling_experiment(plan);
  ExperimentOutputs out;
  out.records_csv = bl::io::scaling_records_csv(res.records);
  out.records_jsonl = bl::io::scaling_records_jsonl(res.records);

  std::ostringstream summary;
  summary << "# schema=blanket-lab/summary.v1\n";
  summary << "size,median_tau,iqr_low,iqr_high\n";
  for (std::size_t i = 0; i < res.fit.sizes.size(); ++i)
    summary << res.fit.sizes[i] << "," << bl::io::format_double(res.fit.medians[i]) << ","
            << bl::io::format_double(res.fit.iqr_low[i]) << ","
            << bl::io::format_double(res.fit.iqr_high[i]) << "\n";
  summary << "# slope=" << bl::io::format_double(res.fit.fit.slope)
          << " stderr=" << bl::io::format_double(res.fit.fit.stderr_slope)
          << " r2=" << bl::io::format_double(res.fit.fit.r_squared)
          << " censored=" << res.fit.censored << "\n";
  out.summary_csv = summary.str();

  std::vector<double> rescaled;
  const std::uint32_t largest = plan.sizes.back();
  for (const auto& r : res.records)
    if (r.size == largest && r.tau_blanket)
      rescaled.push_back(double(*r.tau_blanket) /
                         bl::beta_scale(plan.model, double(largest)));
  out.ecdf_svg = bl::io::svg_ecdf(
      rescaled, std::string("rescaled blanket times, n=") + std::to_string(largest));
  std::vector<double> xs(res.fit.sizes.begin(), res.fit.sizes.end());
  out.loglog_svg = bl::io::svg_loglog(xs, res.fit.medians, res.fit.fit, "median blanket time");
  return out;
}

void write_experiment_outputs(const std::string& dir, const std::string& command,
                              const bl::ExperimentPlan& plan, const ExperimentOutputs& out) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  bl::io::write_file_atomic(path("records.csv"), out.records_csv);
  bl::io::write_file_atomic(path("records.jsonl"), out.records_jsonl);
  bl::io::write_file_atomic(path("summary.csv"), out.summary_csv);
  bl::io::write_file_atomic(path("ecdf.svg"), out.ecdf_svg);
  bl::io::write_file_atomic(path("loglog.svg"), out.loglog_svg);
  std::vector<bl::io::ManifestEntry> entries{
      {"records.csv", bl::io::fnv1a64(out.records_csv)},
      {"records.jsonl", bl::io::fnv1a64(out.records_jsonl)},
      {"summary.csv", bl::io::fnv1a64(out.summary_csv)},
      {"ecdf.svg", bl::io::fnv1a64(out.ecdf_svg)},
      {"loglog.svg", bl::io::fnv1a64(out.loglog_svg)},
  };
  // Manifest last: its presence marks a complete run.
  bl::io::write_file_atomic(path("manifest.json"),
                            bl::io::manifest_json(command, bl::io::plan_to_json(plan), entries));
}

}  // namespace

extern "C" {

const char* bl_last_error(void) { return g_last_error.c_str(); }
const char* bl_version(void) { return bl::io::kToolVersion; }

bl_status bl_graph_from_edges(uint32_t n_vertices, const uint32_t* u, const uint32_t* v,
                              const double* w, size_t n_edges, int multigraph, bl_graph** out) {
  return wrap([&] {
    std::vector<bl::Edge> edges(n_edges);
    for (size_t i = 0; i < n_edges; ++i) edges[i] = {u[i], v[i], w ? w[i] : 1.0};
    *out = new bl_graph{bl::WeightedGraph::build(n_vertices, edges, multigraph != 0)};
  });
}

bl_status bl_graph_read(const char* path, bl_graph** out) {
  return wrap([&] { *out = new bl_graph{bl::io::graph_from_text(bl::io::read_file(path))}; });
}

bl_status bl_graph_write(const bl_graph* g, const char* path) {
  return wrap([&] { bl::io::write_file_atomic(path, bl::io::graph_to_text(g->g)); });
}

void bl_graph_free(bl_graph* g) { delete g; }

bl_status bl_graph_stats_get(const bl_graph* g, bl_graph_stats* out) {
  return wrap([&] {
    out->n_vertices = g->g.n_vertices();
    out->n_edges = g->g.n_edges();
    out->total_mass = g->g.total_mass();
    out->diameter = bl::diameter(g->g);
  });
}

bl_status bl_graph_resistance(const bl_graph* g, uint32_t a, uint32_t b, double* out) {
  return wrap([&] { *out = bl::effective_resistance(g->g, a, b); });
}

bl_status bl_gen_er_critical(uint32_t n, double lambda, uint64_t seed, const char* path) {
  return wrap([&] {
    bl::GraphSample s = bl::sample_er_critical(n, lambda, seed);
    bl::io::write_file_atomic(path, bl::io::graph_to_text(s));
  });
}

bl_status bl_gen_configuration(const uint32_t* degrees, size_t n, uint64_t seed,
                               const char* path) {
  return wrap([&] {
    bl::DegreeSequence d;
    d.d.assign(degrees, degrees + n);
    bl::GraphSample s = bl::sample_configuration_model(d, seed);
    bl::io::write_file_atomic(path, bl::io::graph_to_text(s));
  });
}

bl_status bl_gen_prescribed_connected(const uint32_t* degrees, size_t n, uint64_t seed,
                                      uint32_t pool_size, const char* path) {
  return wrap([&] {
    bl::DegreeSequence d;
    d.d.assign(degrees, degrees + n);
    bl::GraphSample s = bl::sample_prescribed_connected(d, seed, pool_size);
    bl::io::write_file_atomic(path, bl::io::graph_to_text(s));
  });
}

bl_status bl_graph_read_largest_component(const char* path, bl_graph** out) {
  return wrap([&] {
    bl::GraphSample s = bl::io::graph_sample_from_text(bl::io::read_file(path));
    bl::ComponentSpectrum spec = bl::components_with_surplus(s);
    *out = new bl_graph{bl::extract_component(s, spec, 0).graph};
  });
}

bl_status bl_tree_sample_gw(const char* offspring, uint32_t size, uint64_t seed, bl_tree** out) {
  return wrap([&] {
    bl::require(size >= 1, bl::errc::invalid_argument, "size must be positive");
    bl::OffspringDistribution dist;
    if (std::strcmp(offspring, "poisson1") == 0)
      dist = bl::OffspringDistribution::poisson1();
    else if (std::strcmp(offspring, "geometric-half") == 0)
      dist = bl::OffspringDistribution::geometric_half();
    else
      bl::fail(bl::errc::invalid_argument,
               std::string("unknown offspring '") + offspring + "' (poisson1, geometric-half)");
    *out = new bl_tree{bl::sample_conditioned_gw(dist, size - 1, seed)};
  });
}

bl_status bl_tree_write(const bl_tree* t, const char* path) {
  return wrap([&] { bl::io::write_file_atomic(path, bl::io::tree_to_text(t->t)); });
}

bl_status bl_tree_read(const char* path, bl_tree** out) {
  return wrap([&] { *out = new bl_tree{bl::io::tree_from_text(bl::io::read_file(path))}; });
}

bl_status bl_tree_to_graph(const bl_tree* t, bl_graph** out) {
  return wrap([&] { *out = new bl_graph{t->t.to_graph()}; });
}

bl_status bl_tree_area(const bl_tree* t, uint64_t* out) {
  return wrap([&] { *out = bl::depth_first_walk_and_area(t->t).area; });
}

void bl_tree_free(bl_tree* t) { delete t; }

bl_status bl_blanket_run(const bl_graph* g, uint32_t start, double epsilon, uint64_t t_max,
                         uint64_t seed, bl_blanket_result* out) {
  return wrap([&] {
    if (t_max == 0) t_max = bl::default_t_max(g->g);
    bl::BlanketTimeResult r = bl::blanket_time_variable(g->g, start, epsilon, t_max, seed);
    out->epsilon = r.epsilon;
    out->timed_out = r.tau_blanket ? 0 : 1;
    out->tau_blanket = r.tau_blanket.value_or(0);
    out->cover_timed_out = r.cover_time ? 0 : 1;
    out->cover_time = r.cover_time.value_or(0);
    out->t_max = r.t_max;
    out->seed = r.seed;
  });
}

bl_status bl_walk_run(const bl_graph* g, uint32_t start, uint64_t horizon, uint64_t seed,
                      uint32_t* steps_out) {
  return wrap([&] {
    bl::WalkPath p = bl::run_walk(g->g, start, horizon, seed);
    std::copy(p.steps.begin(), p.steps.end(), steps_out);
  });
}

bl_status bl_blanket_replicates_csv(const bl_graph* g, uint32_t start, double epsilon,
                                    uint32_t replicates, uint64_t t_max, uint64_t master_seed,
                                    unsigned threads, const char* csv_path) {
  return wrap([&] {
    if (t_max == 0) t_max = bl::default_t_max(g->g);
    std::vector<bl::io::BlanketRow> rows(replicates);
    const std::uint32_t n = g->g.n_vertices();
    bl::parallel_for(replicates, threads, [&](std::uint64_t i) {
      std::uint32_t s = (start == UINT32_MAX) ? std::uint32_t(i % n) : start;
      std::uint64_t seed = bl::derive_seed(master_seed, {"blanket", s, std::uint32_t(i)});
      bl::BlanketTimeResult r = bl::blanket_time_variable(g->g, s, epsilon, t_max, seed);
      rows[i] = {std::uint32_t(i), s, epsilon, r.tau_blanket, r.cover_time, seed};
    });
    bl::io::write_file_atomic(csv_path, bl::io::blanket_rows_csv(rows));
  });
}

bl_status bl_excursion_sample(double zeta, uint32_t grid_n, uint64_t seed, bl_excursion** out) {
  return wrap([&] { *out = new bl_excursion{bl::sample_excursion(zeta, grid_n, seed)}; });
}

bl_status bl_excursion_sample_tilted(double zeta, uint32_t grid_n, uint64_t seed,
                                     uint32_t pool_size, bl_excursion** out) {
  return wrap([&] {
    *out = new bl_excursion{bl::sample_tilted_excursion(zeta, grid_n, seed, pool_size).excursion};
  });
}

bl_status bl_excursion_write(const bl_excursion* e, const char* path) {
  return wrap([&] { bl::io::write_file_atomic(path, bl::io::excursion_to_csv(e->e)); });
}

bl_status bl_excursion_read(const char* path, bl_excursion** out) {
  return wrap(
      [&] { *out = new bl_excursion{bl::io::excursion_from_csv(bl::io::read_file(path))}; });
}

bl_status bl_excursion_integral(const bl_excursion* e, double* out) {
  return wrap([&] { *out = e->e.integral(); });
}

void bl_excursion_free(bl_excursion* e) { delete e; }

bl_status bl_compare_quadruples(const char* qa_json_path, const char* qb_json_path,
                                const char* corr, bl_dk_breakdown* out) {
  return wrap([&] {
    bl::require(std::strcmp(corr, "contour") == 0, bl::errc::invalid_argument,
                "only the 'contour' correspondence is built in");
    bl::Quadruple qa = bl::io::quadruple_from_json(bl::io::read_file(qa_json_path));
    bl::Quadruple qb = bl::io::quadruple_from_json(bl::io::read_file(qb_json_path));
    // Contour parameterization: the path order serves as the shared clock.
    bl::Correspondence c = bl::contour_correspondence(qa.path.values, qb.path.values);
    // Coverage of non-visited points via nearest visited time is not
    // available here, so fall back to pairing every point with the root.
    std::vector<char> ca(qa.space.n, 0), cb(qb.space.n, 0);
    for (auto [x, y] : c.pairs) {
      ca[x] = 1;
      cb[y] = 1;
    }
    for (std::uint32_t x = 0; x < qa.space.n; ++x)
      if (!ca[x]) c.pairs.push_back({x, qb.root});
    for (std::uint32_t y = 0; y < qb.space.n; ++y)
      if (!cb[y]) c.pairs.push_back({qa.root, y});
    bool rooted = false;
    for (auto [x, y] : c.pairs) rooted |= (x == qa.root && y == qb.root);
    if (!rooted) c.pairs.push_back({qa.root, qb.root});
    bl::DkBounds b = bl::dk_upper_bound(qa, qb, c);
    out->prokhorov = b.prokhorov;
    out->skorokhod = b.skorokhod;
    out->pair_displacement = b.pair_displacement;
    out->local_time_sup = b.local_time_sup;
    out->total = b.total();
    out->prokhorov_exact = b.prokhorov_exact ? 1 : 0;
  });
}

bl_status bl_experiment_run(const char* plan_path, const char* out_dir, unsigned threads) {
  return wrap([&] {
    bl::ExperimentPlan plan = bl::io::plan_from_json(bl::io::read_file(plan_path));
    if (threads != 0) plan.threads = threads;
    ExperimentOutputs out = run_plan(plan);
    write_experiment_outputs(out_dir, "experiment run", plan, out);
  });
}

bl_status bl_experiment_replay(const char* manifest_path, const char* out_dir, unsigned threads) {
  return wrap([&] {
    auto manifest = bl::io::read_file(manifest_path);
    // Pull the embedded plan back out of the manifest.
    auto pos = manifest.find("\"config\"");
    bl::require(pos != std::string::npos, bl::errc::parse_error, "manifest has no config");
    // Parse via the json library by reserializing the config subtree.
    std::string plan_json;
    {
      int depth = 0;
      std::size_t start = manifest.find('{', pos);
      bl::require(start != std::string::npos, bl::errc::parse_error, "manifest config malformed");
      for (std::size_t i = start; i < manifest.size(); ++i) {
        if (manifest[i] == '{') ++depth;
        if (manifest[i] == '}') --depth;
        if (depth == 0) {
          plan_json = manifest.substr(start, i - start + 1);
          break;
        }
      }
    }
    bl::ExperimentPlan plan = bl::io::plan_from_json(plan_json);
    if (threads != 0) plan.threads = threads;
    ExperimentOutputs out = run_plan(plan);
    write_experiment_outputs(out_dir, "experiment replay", plan, out);

    // Byte-identity for CSV/JSONL against the original manifest; SVG is
    // structurally compared by the caller if desired.
    auto expect = [&](const std::string& name, const std::string& content) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%016llx",
                    (unsigned long long)bl::io::fnv1a64(content));
      std::string needle = "\"file\": \"" + name + "\"";
      std::size_t p = manifest.find(needle);
      bl::require(p != std::string::npos, bl::errc::parse_error, "manifest misses " + name);
      std::size_t q = manifest.find("\"fnv1a64\": \"", p);
      bl::require(q != std::string::npos && q - p < 96, bl::errc::parse_error,
                  "manifest checksum malformed for " + name);
      std::string recorded = manifest.substr(q + 12, 16);
      bl::require(recorded == buf, bl::errc::internal,
                  "replay of " + name + " is not byte-identical");
    };
    expect("records.csv", out.records_csv);
    expect("records.jsonl", out.records_jsonl);
    expect("summary.csv", out.summary_csv);
  });
}

uint64_t bl_derive_seed(uint64_t master, const char* label, uint64_t index) {
  return bl::derive_seed(master, {label, index});
}

}  // extern "C"
