/* blanket-lab C API: weighted-graph random-walk laboratory.
 *
 * All functions return bl_status; on failure bl_last_error() holds a
 * message for the calling thread. Handles are opaque and freed with the
 * matching *_free function. Every sampler is a pure function of its seed.
 */
#ifndef BLANKETLAB_H
#define BLANKETLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bl_status {
  BL_OK = 0,
  BL_ERR_INVALID_ARGUMENT = 1,
  BL_ERR_PARSE = 2,
  BL_ERR_DISCONNECTED = 3,
  BL_ERR_TIMEOUT = 4,
  BL_ERR_IO = 5,
  BL_ERR_NUMERIC = 6,
  BL_ERR_UNKNOWN_KEY = 7,
  BL_ERR_INTERNAL = 8
} bl_status;

const char* bl_last_error(void);
const char* bl_version(void);

/* ---------- graphs ---------- */

typedef struct bl_graph bl_graph;

bl_status bl_graph_from_edges(uint32_t n_vertices, const uint32_t* u, const uint32_t* v,
                              const double* w, size_t n_edges, int multigraph, bl_graph** out);
bl_status bl_graph_read(const char* path, bl_graph** out);
bl_status bl_graph_write(const bl_graph* g, const char* path);
void bl_graph_free(bl_graph* g);

typedef struct bl_graph_stats {
  uint32_t n_vertices;
  uint64_t n_edges;
  double total_mass;
  double diameter;
} bl_graph_stats;

bl_status bl_graph_stats_get(const bl_graph* g, bl_graph_stats* out);
bl_status bl_graph_resistance(const bl_graph* g, uint32_t a, uint32_t b, double* out);

/* Generators write a possibly-disconnected edge list straight to a file in
 * the graph text format; the largest component can be loaded with
 * bl_graph_read_largest_component. */
bl_status bl_gen_er_critical(uint32_t n, double lambda, uint64_t seed, const char* path);
bl_status bl_gen_configuration(const uint32_t* degrees, size_t n, uint64_t seed, const char* path);
bl_status bl_gen_prescribed_connected(const uint32_t* degrees, size_t n, uint64_t seed,
                                      uint32_t pool_size, const char* path);
bl_status bl_graph_read_largest_component(const char* path, bl_graph** out);

/* ---------- trees ---------- */

typedef struct bl_tree bl_tree;

/* offspring: "poisson1" or "geometric-half". size = number of vertices. */
bl_status bl_tree_sample_gw(const char* offspring, uint32_t size, uint64_t seed, bl_tree** out);
bl_status bl_tree_write(const bl_tree* t, const char* path);
bl_status bl_tree_read(const char* path, bl_tree** out);
bl_status bl_tree_to_graph(const bl_tree* t, bl_graph** out);
bl_status bl_tree_area(const bl_tree* t, uint64_t* out);
void bl_tree_free(bl_tree* t);

/* ---------- walks and blanket times ---------- */

typedef struct bl_blanket_result {
  double epsilon;
  int timed_out;
  uint64_t tau_blanket; /* valid when !timed_out */
  int cover_timed_out;
  uint64_t cover_time;
  uint64_t t_max;
  uint64_t seed;
} bl_blanket_result;

/* t_max = 0 selects the built-in budget policy. */
bl_status bl_blanket_run(const bl_graph* g, uint32_t start, double epsilon, uint64_t t_max,
                         uint64_t seed, bl_blanket_result* out);

/* Walk steps X_0..X_horizon into a caller buffer of horizon+1 entries. */
bl_status bl_walk_run(const bl_graph* g, uint32_t start, uint64_t horizon, uint64_t seed,
                      uint32_t* steps_out);

/* Independent replicates (seed derived per (start, index)) streamed to CSV;
 * start = UINT32_MAX runs every start vertex round-robin. */
bl_status bl_blanket_replicates_csv(const bl_graph* g, uint32_t start, double epsilon,
                                    uint32_t replicates, uint64_t t_max, uint64_t master_seed,
                                    unsigned threads, const char* csv_path);

/* ---------- excursions ---------- */

typedef struct bl_excursion bl_excursion;

bl_status bl_excursion_sample(double zeta, uint32_t grid_n, uint64_t seed, bl_excursion** out);
bl_status bl_excursion_sample_tilted(double zeta, uint32_t grid_n, uint64_t seed,
                                     uint32_t pool_size, bl_excursion** out);
bl_status bl_excursion_write(const bl_excursion* e, const char* path);
bl_status bl_excursion_read(const char* path, bl_excursion** out);
bl_status bl_excursion_integral(const bl_excursion* e, double* out);
void bl_excursion_free(bl_excursion* e);

/* ---------- comparison ---------- */

typedef struct bl_dk_breakdown {
  double prokhorov;
  double skorokhod;
  double pair_displacement;
  double local_time_sup;
  double total;
  int prokhorov_exact;
} bl_dk_breakdown;

/* corr: "contour" (match by normalized path time) is the only built-in. */
bl_status bl_compare_quadruples(const char* qa_json_path, const char* qb_json_path,
                                const char* corr, bl_dk_breakdown* out);

/* ---------- experiments ---------- */

/* Runs a plan JSON file; writes records.csv, records.jsonl, summary.csv,
 * ecdf.svg, loglog.svg and manifest.json under out_dir. */
bl_status bl_experiment_run(const char* plan_path, const char* out_dir, unsigned threads);

/* Re-run from a manifest; outputs must replay byte-identically. */
bl_status bl_experiment_replay(const char* manifest_path, const char* out_dir, unsigned threads);

uint64_t bl_derive_seed(uint64_t master, const char* label, uint64_t index);

#ifdef __cplusplus
}
#endif

#endif /* BLANKETLAB_H */
