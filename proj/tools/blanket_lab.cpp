// blanket-lab: weighted random walks, blanket times, critical random graphs
// and excursion-coded trees, behind the blanketlab C API.

#include <CLI11.hpp>

#include <cinttypes>
#include <functional>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "blanketlab.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitTimeout = 4;

int exit_code_of(bl_status s) {
  switch (s) {
    case BL_OK:
      return kExitOk;
    case BL_ERR_INVALID_ARGUMENT:
    case BL_ERR_PARSE:
    case BL_ERR_UNKNOWN_KEY:
      return kExitConfig;
    case BL_ERR_TIMEOUT:
      return kExitTimeout;
    default:
      return kExitRuntime;
  }
}

int check(bl_status s) {
  if (s != BL_OK) {
    std::cerr << "blanket-lab: " << bl_last_error() << "\n";
    return exit_code_of(s);
  }
  return kExitOk;
}

std::vector<uint32_t> read_degree_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) {
    std::cerr << "blanket-lab: cannot open degree file " << path << "\n";
    std::exit(kExitConfig);
  }
  std::vector<uint32_t> d;
  uint32_t v;
  while (in >> v) d.push_back(v);
  if (d.empty()) {
    std::cerr << "blanket-lab: degree file " << path << " is empty\n";
    std::exit(kExitConfig);
  }
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"blanket-lab: blanket times of random walks on critical random graphs"};
  app.require_subcommand(1);

  uint64_t seed = 0;
  unsigned threads = 0;
  app.add_option("--seed", seed, "master seed (default 0)");
  app.add_option("--threads", threads, "worker threads (0 = hardware)");

  // graph stats <file>
  auto* graph_cmd = app.add_subcommand("graph", "graph file utilities");
  auto* graph_stats = graph_cmd->add_subcommand("stats", "print n, m, total mass, diameter");
  std::string graph_file;
  graph_stats->add_option("file", graph_file, "graph text file")->required();

  // tree sample --offspring poisson1 --size 1024 --seed 7 [--out]
  auto* tree_cmd = app.add_subcommand("tree", "plane tree ensembles");
  auto* tree_sample = tree_cmd->add_subcommand("sample", "conditioned Galton-Watson tree");
  std::string offspring = "poisson1", tree_out = "tree.txt";
  uint32_t tree_size = 1024;
  tree_sample->add_option("--offspring", offspring, "poisson1 | geometric-half");
  tree_sample->add_option("--size", tree_size, "number of vertices")->required();
  tree_sample->add_option("--out", tree_out, "output file (parent array format)");

  // gen er|config|connected
  auto* gen_cmd = app.add_subcommand("gen", "random graph ensembles");
  auto* gen_er = gen_cmd->add_subcommand("er", "critical Erdos-Renyi window");
  uint32_t er_n = 4096;
  double er_lambda = 0.0;
  std::string gen_out = "g.txt";
  gen_er->add_option("--n", er_n, "vertex count")->required();
  gen_er->add_option("--lambda", er_lambda, "window location");
  gen_er->add_option("--out", gen_out, "output graph file");
  auto* gen_config = gen_cmd->add_subcommand("config", "configuration model");
  std::string degree_file;
  gen_config->add_option("--degrees", degree_file, "degree file, one integer per vertex")
      ->required();
  gen_config->add_option("--out", gen_out, "output graph file");
  auto* gen_conn = gen_cmd->add_subcommand("connected", "uniform connected graph with degrees");
  uint32_t pool = 4096, surplus_hint = 0;
  gen_conn->add_option("--degrees", degree_file, "degree file")->required();
  gen_conn->add_option("--surplus", surplus_hint, "expected surplus (informational)");
  gen_conn->add_option("--pool", pool, "importance pool size");
  gen_conn->add_option("--out", gen_out, "output graph file");

  // walk --graph g --start 0 --horizon H [--out]
  auto* walk_cmd = app.add_subcommand("walk", "simulate one weighted walk");
  std::string walk_graph, walk_out;
  uint32_t walk_start = 0;
  uint64_t walk_horizon = 1000;
  walk_cmd->add_option("--graph", walk_graph, "graph file")->required();
  walk_cmd->add_option("--start", walk_start, "start vertex");
  walk_cmd->add_option("--horizon", walk_horizon, "number of steps");
  walk_cmd->add_option("--out", walk_out, "write steps as CSV (default stdout)");

  // blanket --graph g --eps 0.3 --replicates 1000 --out csv
  auto* blanket_cmd = app.add_subcommand("blanket", "blanket time replicates");
  std::string blanket_graph, blanket_out = "blanket.csv";
  double eps = 0.3;
  uint32_t replicates = 1000;
  uint64_t t_max = 0;
  bool all_starts = false;
  uint32_t blanket_start = 0;
  blanket_cmd->add_option("--graph", blanket_graph, "graph file")->required();
  blanket_cmd->add_option("--eps", eps, "blanket fraction in (0,1)");
  blanket_cmd->add_option("--replicates", replicates, "independent replicates");
  blanket_cmd->add_option("--t-max", t_max, "step budget (0 = policy default)");
  blanket_cmd->add_option("--start", blanket_start, "start vertex");
  blanket_cmd->add_flag("--all-starts", all_starts, "cycle the start vertex across replicates");
  blanket_cmd->add_option("--out", blanket_out, "output CSV");

  // excursion sample --zeta 1 --n 16384 [--tilted --pool]
  auto* exc_cmd = app.add_subcommand("excursion", "Brownian excursions");
  auto* exc_sample = exc_cmd->add_subcommand("sample", "sample one excursion");
  double zeta = 1.0;
  uint32_t grid_n = 16384;
  bool tilted = false;
  uint32_t exc_pool = 1024;
  std::string exc_out = "excursion.csv";
  exc_sample->add_option("--zeta", zeta, "excursion length");
  exc_sample->add_option("--n", grid_n, "grid resolution");
  exc_sample->add_flag("--tilted", tilted, "area-tilted law");
  exc_sample->add_option("--pool", exc_pool, "importance pool (tilted only)");
  exc_sample->add_option("--out", exc_out, "output CSV");

  // compare --a qa.json --b qb.json --corr contour
  auto* compare_cmd = app.add_subcommand("compare", "quadruple distance upper bound");
  std::string qa_path, qb_path, corr = "contour";
  compare_cmd->add_option("--a", qa_path, "first quadruple JSON")->required();
  compare_cmd->add_option("--b", qb_path, "second quadruple JSON")->required();
  compare_cmd->add_option("--corr", corr, "correspondence (contour)");

  // experiment run plan.json --out dir | experiment replay manifest --out dir
  auto* exp_cmd = app.add_subcommand("experiment", "reproducible experiment plans");
  auto* exp_run = exp_cmd->add_subcommand("run", "run a plan file");
  std::string plan_path, exp_out = "out";
  exp_run->add_option("plan", plan_path, "plan JSON")->required();
  exp_run->add_option("--out", exp_out, "output directory");
  auto* exp_replay = exp_cmd->add_subcommand("replay", "re-run from a manifest and verify");
  std::string manifest_path;
  exp_replay->add_option("manifest", manifest_path, "manifest.json of a previous run")->required();
  exp_replay->add_option("--out", exp_out, "output directory");

  // Let --seed/--threads appear after any subcommand.
  std::function<void(CLI::App*)> fall = [&](CLI::App* a) {
    a->fallthrough();
    for (auto* sc : a->get_subcommands([](const CLI::App*) { return true; })) fall(sc);
  };
  fall(&app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  if (graph_stats->parsed()) {
    bl_graph* g = nullptr;
    bl_status s = bl_graph_read(graph_file.c_str(), &g);
    if (s == BL_ERR_DISCONNECTED) {
      std::printf("disconnected input; reporting the largest component\n");
      s = bl_graph_read_largest_component(graph_file.c_str(), &g);
    }
    if (int rc = check(s)) return rc;
    bl_graph_stats st{};
    if (int rc = check(bl_graph_stats_get(g, &st))) {
      bl_graph_free(g);
      return rc;
    }
    std::printf("n=%u m=%" PRIu64 " total_mass=%.17g diameter=%.17g\n", st.n_vertices, st.n_edges,
                st.total_mass, st.diameter);
    bl_graph_free(g);
    return kExitOk;
  }

  if (tree_sample->parsed()) {
    bl_tree* t = nullptr;
    if (int rc = check(bl_tree_sample_gw(offspring.c_str(), tree_size, seed, &t))) return rc;
    int rc = check(bl_tree_write(t, tree_out.c_str()));
    bl_tree_free(t);
    if (rc == kExitOk) std::printf("wrote %s\n", tree_out.c_str());
    return rc;
  }

  if (gen_er->parsed())
    return check(bl_gen_er_critical(er_n, er_lambda, seed, gen_out.c_str()));
  if (gen_config->parsed()) {
    auto d = read_degree_file(degree_file);
    return check(bl_gen_configuration(d.data(), d.size(), seed, gen_out.c_str()));
  }
  if (gen_conn->parsed()) {
    auto d = read_degree_file(degree_file);
    return check(bl_gen_prescribed_connected(d.data(), d.size(), seed, pool, gen_out.c_str()));
  }

  if (walk_cmd->parsed()) {
    bl_graph* g = nullptr;
    if (int rc = check(bl_graph_read(walk_graph.c_str(), &g))) return rc;
    std::vector<uint32_t> steps(walk_horizon + 1);
    int rc = check(bl_walk_run(g, walk_start, walk_horizon, seed, steps.data()));
    bl_graph_free(g);
    if (rc != kExitOk) return rc;
    if (walk_out.empty()) {
      for (size_t i = 0; i < steps.size(); ++i) std::printf("%zu,%u\n", i, steps[i]);
    } else {
      std::ofstream out(walk_out);
      out << "# schema=blanket-lab/walk.v1\nstep,vertex\n";
      for (size_t i = 0; i < steps.size(); ++i) out << i << "," << steps[i] << "\n";
    }
    return kExitOk;
  }

  if (blanket_cmd->parsed()) {
    bl_graph* g = nullptr;
    if (int rc = check(bl_graph_read(blanket_graph.c_str(), &g))) return rc;
    uint32_t start = all_starts ? UINT32_MAX : blanket_start;
    int rc = check(bl_blanket_replicates_csv(g, start, eps, replicates, t_max, seed, threads,
                                             blanket_out.c_str()));
    bl_graph_free(g);
    if (rc == kExitOk) std::printf("wrote %s\n", blanket_out.c_str());
    return rc;
  }

  if (exc_sample->parsed()) {
    bl_excursion* e = nullptr;
    bl_status s = tilted ? bl_excursion_sample_tilted(zeta, grid_n, seed, exc_pool, &e)
                         : bl_excursion_sample(zeta, grid_n, seed, &e);
    if (int rc = check(s)) return rc;
    int rc = check(bl_excursion_write(e, exc_out.c_str()));
    bl_excursion_free(e);
    if (rc == kExitOk) std::printf("wrote %s\n", exc_out.c_str());
    return rc;
  }

  if (compare_cmd->parsed()) {
    bl_dk_breakdown b{};
    if (int rc = check(bl_compare_quadruples(qa_path.c_str(), qb_path.c_str(), corr.c_str(), &b)))
      return rc;
    std::printf("prokhorov=%.17g%s\nskorokhod=%.17g\npair_displacement=%.17g\n"
                "local_time_sup=%.17g\ntotal=%.17g\n",
                b.prokhorov, b.prokhorov_exact ? "" : " (upper bound)", b.skorokhod,
                b.pair_displacement, b.local_time_sup, b.total);
    return kExitOk;
  }

  if (exp_run->parsed())
    return check(bl_experiment_run(plan_path.c_str(), exp_out.c_str(), threads));
  if (exp_replay->parsed())
    return check(bl_experiment_replay(manifest_path.c_str(), exp_out.c_str(), threads));

  std::cerr << app.help();
  return kExitConfig;
}
