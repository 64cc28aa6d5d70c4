#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "blanketlab.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path dir;
  TempDir() : dir(fs::temp_directory_path() / "bl_capi_test") { fs::create_directories(dir); }
  ~TempDir() { fs::remove_all(dir); }
  std::string path(const char* name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("c api: graphs round trip with stats") {
  TempDir tmp;
  const uint32_t u[] = {0, 1, 0};
  const uint32_t v[] = {1, 2, 2};
  const double w[] = {1.0, 1.0, 1.0};
  bl_graph* g = nullptr;
  REQUIRE(bl_graph_from_edges(3, u, v, w, 3, 0, &g) == BL_OK);
  bl_graph_stats st{};
  REQUIRE(bl_graph_stats_get(g, &st) == BL_OK);
  CHECK(st.n_vertices == 3);
  CHECK(st.n_edges == 3);
  CHECK(st.total_mass == doctest::Approx(6.0));
  CHECK(st.diameter == doctest::Approx(1.0));

  double r = 0.0;
  REQUIRE(bl_graph_resistance(g, 0, 1, &r) == BL_OK);
  CHECK(r == doctest::Approx(2.0 / 3.0));

  REQUIRE(bl_graph_write(g, tmp.path("tri.txt").c_str()) == BL_OK);
  bl_graph* g2 = nullptr;
  REQUIRE(bl_graph_read(tmp.path("tri.txt").c_str(), &g2) == BL_OK);
  bl_graph_stats st2{};
  REQUIRE(bl_graph_stats_get(g2, &st2) == BL_OK);
  CHECK(st2.total_mass == doctest::Approx(st.total_mass));
  bl_graph_free(g);
  bl_graph_free(g2);
}

TEST_CASE("c api: error codes and messages") {
  bl_graph* g = nullptr;
  CHECK(bl_graph_read("/nonexistent/path/graph.txt", &g) == BL_ERR_IO);
  CHECK(std::strlen(bl_last_error()) > 0);

  const uint32_t u[] = {0};
  const uint32_t v[] = {1};
  const double w[] = {-1.0};
  CHECK(bl_graph_from_edges(2, u, v, w, 1, 0, &g) == BL_ERR_INVALID_ARGUMENT);

  // Disconnected input is its own status.
  const uint32_t u2[] = {0, 2};
  const uint32_t v2[] = {1, 3};
  const double w2[] = {1.0, 1.0};
  CHECK(bl_graph_from_edges(4, u2, v2, w2, 2, 0, &g) == BL_ERR_DISCONNECTED);

  bl_tree* t = nullptr;
  CHECK(bl_tree_sample_gw("weibull", 8, 1, &t) == BL_ERR_INVALID_ARGUMENT);
}

TEST_CASE("c api: blanket run on K2") {
  const uint32_t u[] = {0};
  const uint32_t v[] = {1};
  bl_graph* g = nullptr;
  REQUIRE(bl_graph_from_edges(2, u, v, nullptr, 1, 0, &g) == BL_OK);
  bl_blanket_result r{};
  REQUIRE(bl_blanket_run(g, 0, 0.5, 0, 7, &r) == BL_OK);
  CHECK(r.timed_out == 0);
  CHECK(r.tau_blanket == 2);
  CHECK(r.cover_time == 2);
  bl_graph_free(g);
}

TEST_CASE("c api: walks are deterministic per seed") {
  const uint32_t u[] = {0, 1, 0};
  const uint32_t v[] = {1, 2, 2};
  bl_graph* g = nullptr;
  REQUIRE(bl_graph_from_edges(3, u, v, nullptr, 3, 0, &g) == BL_OK);
  std::vector<uint32_t> a(101), b(101);
  REQUIRE(bl_walk_run(g, 0, 100, 42, a.data()) == BL_OK);
  REQUIRE(bl_walk_run(g, 0, 100, 42, b.data()) == BL_OK);
  CHECK(a == b);
  CHECK(a[0] == 0);
  bl_graph_free(g);
}

TEST_CASE("c api: trees, excursions, generators") {
  TempDir tmp;
  bl_tree* t = nullptr;
  REQUIRE(bl_tree_sample_gw("poisson1", 50, 11, &t) == BL_OK);
  uint64_t area = 0;
  REQUIRE(bl_tree_area(t, &area) == BL_OK);
  REQUIRE(bl_tree_write(t, tmp.path("t.txt").c_str()) == BL_OK);
  bl_tree* t2 = nullptr;
  REQUIRE(bl_tree_read(tmp.path("t.txt").c_str(), &t2) == BL_OK);
  uint64_t area2 = 0;
  REQUIRE(bl_tree_area(t2, &area2) == BL_OK);
  CHECK(area == area2);
  bl_graph* tg = nullptr;
  REQUIRE(bl_tree_to_graph(t, &tg) == BL_OK);
  bl_graph_stats st{};
  REQUIRE(bl_graph_stats_get(tg, &st) == BL_OK);
  CHECK(st.n_vertices == 50);
  CHECK(st.n_edges == 49);
  bl_graph_free(tg);
  bl_tree_free(t);
  bl_tree_free(t2);

  REQUIRE(bl_gen_er_critical(256, 0.0, 3, tmp.path("er.txt").c_str()) == BL_OK);
  bl_graph* comp = nullptr;
  REQUIRE(bl_graph_read_largest_component(tmp.path("er.txt").c_str(), &comp) == BL_OK);
  bl_graph_free(comp);

  const uint32_t degs[] = {2, 1, 1};
  REQUIRE(bl_gen_configuration(degs, 3, 5, tmp.path("cfg.txt").c_str()) == BL_OK);
  const uint32_t pdegs[] = {1, 1, 2, 2};
  REQUIRE(bl_gen_prescribed_connected(pdegs, 4, 5, 32, tmp.path("pc.txt").c_str()) == BL_OK);
  bl_graph* pc = nullptr;
  REQUIRE(bl_graph_read(tmp.path("pc.txt").c_str(), &pc) == BL_OK);
  bl_graph_stats pst{};
  REQUIRE(bl_graph_stats_get(pc, &pst) == BL_OK);
  CHECK(pst.n_vertices == 4);
  CHECK(pst.n_edges == 3);
  bl_graph_free(pc);

  bl_excursion* e = nullptr;
  REQUIRE(bl_excursion_sample(1.0, 128, 9, &e) == BL_OK);
  double integral = 0.0;
  REQUIRE(bl_excursion_integral(e, &integral) == BL_OK);
  CHECK(integral > 0.0);
  REQUIRE(bl_excursion_write(e, tmp.path("e.csv").c_str()) == BL_OK);
  bl_excursion* e2 = nullptr;
  REQUIRE(bl_excursion_read(tmp.path("e.csv").c_str(), &e2) == BL_OK);
  double integral2 = 0.0;
  REQUIRE(bl_excursion_integral(e2, &integral2) == BL_OK);
  CHECK(integral2 == doctest::Approx(integral));
  bl_excursion_free(e);
  bl_excursion_free(e2);
}

TEST_CASE("c api: blanket replicate stream") {
  TempDir tmp;
  const uint32_t u[] = {0, 1, 0};
  const uint32_t v[] = {1, 2, 2};
  bl_graph* g = nullptr;
  REQUIRE(bl_graph_from_edges(3, u, v, nullptr, 3, 0, &g) == BL_OK);
  auto csv = tmp.path("b.csv");
  REQUIRE(bl_blanket_replicates_csv(g, 0, 0.5, 50, 0, 42, 2, csv.c_str()) == BL_OK);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# schema=blanket-lab/blanket.v1");
  std::getline(in, line);
  CHECK(line == "replicate,start,epsilon,tau_blanket,cover_time,seed");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 50);
  bl_graph_free(g);
}

TEST_CASE("c api: experiment run and byte-identical replay") {
  TempDir tmp;
  {
    std::ofstream plan(tmp.path("plan.json"));
    plan << R"({"model":"gw-tree","sizes":[16,32],"epsilon":0.3,"replicates":20,"master_seed":5})";
  }
  REQUIRE(bl_experiment_run(tmp.path("plan.json").c_str(), tmp.path("run1").c_str(), 2) == BL_OK);
  REQUIRE(fs::exists(tmp.dir / "run1" / "manifest.json"));
  REQUIRE(bl_experiment_replay((tmp.dir / "run1" / "manifest.json").string().c_str(),
                               tmp.path("run2").c_str(), 1) == BL_OK);
  // Replay verified the checksums itself; double-check the bytes anyway.
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  CHECK(slurp(tmp.dir / "run1" / "records.csv") == slurp(tmp.dir / "run2" / "records.csv"));
  CHECK(slurp(tmp.dir / "run1" / "records.jsonl") == slurp(tmp.dir / "run2" / "records.jsonl"));

  CHECK(bl_experiment_run(tmp.path("nope.json").c_str(), tmp.path("run3").c_str(), 1) ==
        BL_ERR_IO);
}

TEST_CASE("c api: derived seeds and version") {
  CHECK(bl_derive_seed(1, "walk", 0) == bl_derive_seed(1, "walk", 0));
  CHECK(bl_derive_seed(1, "walk", 0) != bl_derive_seed(1, "walk", 1));
  CHECK(std::strlen(bl_version()) > 0);
}
