#include "experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

namespace bl {

void parallel_for(std::uint64_t count, unsigned threads,
                  const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex err_mu;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      while (true) {
        std::uint64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double ks = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    ks = std::max(ks, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return ks;
}

double ks_critical_95(std::size_t n1, std::size_t n2) {
  return 1.358 * std::sqrt(double(n1 + n2) / (double(n1) * double(n2)));
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, errc::invalid_argument,
          "need at least two points to fit");
  const double n = double(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  double den = n * sxx - sx * sx;
  require(std::abs(den) > 1e-12, errc::invalid_argument, "degenerate fit: identical x values");
  LinearFit f;
  f.slope = (n * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double pred = f.intercept + f.slope * x[i];
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
  }
  f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  double var_res = x.size() > 2 ? ss_res / (n - 2.0) : 0.0;
  f.stderr_slope = std::sqrt(var_res / (sxx - sx * sx / n));
  return f;
}

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::gw_tree: return "gw-tree";
    case ModelKind::er_component: return "er-component";
    case ModelKind::config_model: return "config-model";
    case ModelKind::excursion_tree: return "excursion-tree";
  }
  return "?";
}

std::optional<ModelKind> model_from_name(const std::string& name) {
  if (name == "gw-tree") return ModelKind::gw_tree;
  if (name == "er-component") return ModelKind::er_component;
  if (name == "config-model") return ModelKind::config_model;
  if (name == "excursion-tree") return ModelKind::excursion_tree;
  return std::nullopt;
}

double beta_scale(ModelKind m, double n) {
  switch (m) {
    case ModelKind::gw_tree:
    case ModelKind::excursion_tree:
      return std::pow(n, 1.5);
    case ModelKind::er_component:
    case ModelKind::config_model:
      return n;
  }
  return n;
}

double alpha_scale(ModelKind m, double n) {
  switch (m) {
    case ModelKind::gw_tree:
    case ModelKind::excursion_tree:
      return std::pow(n, -0.5);
    case ModelKind::er_component:
    case ModelKind::config_model:
      return std::pow(n, -1.0 / 3.0);
  }
  return 1.0;
}

namespace {

// Built-in critical degree law: P(D=1)=3/4, P(D=3)=1/4 gives
// E[D(D-1)] = E[D] exactly (lambda = 0).
const std::vector<double> kCriticalDegreeTable{0.0, 0.75, 0.0, 0.25};

}  // namespace

ModelInstance sample_model_instance(const ExperimentPlan& plan, std::uint32_t size,
                                    std::uint64_t seed) {
  switch (plan.model) {
    case ModelKind::gw_tree: {
      require(size >= 2, errc::invalid_argument, "tree size must be at least 2");
      PlaneTree t = sample_conditioned_gw(OffspringDistribution::poisson1(), size - 1, seed);
      return {t.to_graph(), 0};
    }
    case ModelKind::er_component: {
      for (std::uint32_t attempt = 0;; ++attempt) {
        require(attempt < 64, errc::internal, "largest ER component kept degenerating");
        GraphSample s = sample_er_critical(size, plan.lambda, derive_seed(seed, {"er", attempt}));
        ComponentSpectrum spec = components_with_surplus(s);
        if (spec.sizes[0] < 2) continue;
        return {extract_component(s, spec, 0).graph, 0};
      }
    }
    case ModelKind::config_model: {
      const auto& table = plan.degree_table.empty() ? kCriticalDegreeTable : plan.degree_table;
      for (std::uint32_t attempt = 0;; ++attempt) {
        require(attempt < 64, errc::internal, "largest component kept degenerating");
        DegreeSequence d =
            sample_critical_degrees(size, table, plan.lambda, derive_seed(seed, {"deg", attempt}));
        GraphSample s = sample_configuration_model(d, derive_seed(seed, {"cfg", attempt}));
        ComponentSpectrum spec = components_with_surplus(s);
        if (spec.sizes[0] < 2) continue;
        return {extract_component(s, spec, 0).graph, 0};
      }
    }
    case ModelKind::excursion_tree: {
      Excursion e = sample_excursion(1.0, std::max<std::uint32_t>(16, 4 * size),
                                     derive_seed(seed, {"exc"}));
      return {excursion_to_tree(e, size).to_graph(), 0};
    }
  }
  fail(errc::internal, "unknown model");
}

ScalingResult run_scaling_experiment(const ExperimentPlan& plan) {
  require(!plan.sizes.empty(), errc::invalid_argument, "plan has no sizes");
  require(plan.replicates >= 1, errc::invalid_argument, "plan has no replicates");
  for (std::size_t i = 1; i < plan.sizes.size(); ++i)
    require(plan.sizes[i] > plan.sizes[i - 1], errc::invalid_argument,
            "sizes must be strictly increasing");

  const std::uint64_t total = std::uint64_t(plan.sizes.size()) * plan.replicates;
  ScalingResult out;
  out.records.resize(total);

  parallel_for(total, plan.threads, [&](std::uint64_t flat) {
    const std::uint32_t size_idx = std::uint32_t(flat / plan.replicates);
    const std::uint32_t rep = std::uint32_t(flat % plan.replicates);
    const std::uint32_t size = plan.sizes[size_idx];
    ReplicateRecord& rec = out.records[flat];
    rec.size = size;
    rec.index = rep;
    rec.seed = derive_seed(plan.master_seed, {model_name(plan.model), size, rep});

    auto t0 = std::chrono::steady_clock::now();
    ModelInstance inst = sample_model_instance(plan, size, derive_seed(rec.seed, {"instance"}));
    rec.instance_vertices = inst.graph.n_vertices();
    std::uint64_t t_max =
        std::uint64_t(plan.t_max_factor * double(default_t_max(inst.graph))) + 1;
    BlanketTimeResult r = blanket_time_variable(inst.graph, inst.start, plan.epsilon, t_max,
                                                derive_seed(rec.seed, {"walk"}));
    rec.tau_blanket = r.tau_blanket;
    rec.cover_time = r.cover_time;
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  });

  std::vector<double> log_sizes, log_medians;
  for (std::size_t si = 0; si < plan.sizes.size(); ++si) {
    std::vector<double> taus;
    for (std::uint32_t rep = 0; rep < plan.replicates; ++rep) {
      const auto& rec = out.records[si * plan.replicates + rep];
      if (rec.tau_blanket)
        taus.push_back(double(*rec.tau_blanket));
      else
        ++out.fit.censored;
    }
    require(!taus.empty(), errc::too_many_timeouts, "every replicate timed out at one size");
    std::sort(taus.begin(), taus.end());
    out.fit.sizes.push_back(plan.sizes[si]);
    out.fit.medians.push_back(median_of(taus));
    out.fit.iqr_low.push_back(taus[taus.size() / 4]);
    out.fit.iqr_high.push_back(taus[(3 * taus.size()) / 4]);
    log_sizes.push_back(std::log(double(plan.sizes[si])));
    log_medians.push_back(std::log(out.fit.medians.back()));
  }
  if (100 * out.fit.censored > total)
    fail(errc::too_many_timeouts, "more than 1% of replicates timed out");
  out.fit.fit = least_squares(log_sizes, log_medians);
  return out;
}

KsTable ks_convergence(const std::map<std::uint32_t, std::vector<double>>& samples_by_size) {
  require(samples_by_size.size() >= 2, errc::insufficient_samples, "need at least two sizes");
  for (const auto& [n, v] : samples_by_size)
    require(v.size() >= 200, errc::insufficient_samples,
            "need at least 200 samples per size (size " + std::to_string(n) + ")");
  KsTable table;
  auto it = samples_by_size.begin();
  auto prev = it++;
  for (; it != samples_by_size.end(); ++it, ++prev) {
    KsTable::Row row;
    row.n_low = prev->first;
    row.n_high = it->first;
    row.ks = two_sample_ks(prev->second, it->second);
    if (!table.rows.empty() && row.ks > table.rows.back().ks + 1e-15)
      table.monotone_decreasing = false;
    table.rows.push_back(row);
  }
  return table;
}

ConcentrationTable concentration_check(std::uint32_t n, double T,
                                       const std::vector<double>& lambdas,
                                       std::uint32_t replicates, std::uint64_t master_seed,
                                       unsigned threads) {
  require(!lambdas.empty(), errc::invalid_argument, "empty lambda grid");
  ConcentrationTable table;
  table.lambdas = lambdas;
  table.replicates = replicates;

  // Normalized sup-gap per replicate: r^{-1} sup_t |L(y)-L(z)| / sqrt(d/r).
  std::vector<double> normalized(replicates);
  parallel_for(replicates, threads, [&](std::uint64_t rep) {
    std::uint64_t seed = derive_seed(master_seed, {"conc", rep});
    PlaneTree t = sample_conditioned_gw(OffspringDistribution::poisson1(), n - 1,
                                        derive_seed(seed, {"tree"}));
    WeightedGraph g = t.to_graph();
    Rng pick(derive_seed(seed, {"pair"}));
    vertex_id y = vertex_id(pick.next_below(g.n_vertices()));
    vertex_id z = vertex_id(pick.next_below(g.n_vertices()));
    while (z == y) z = vertex_id(pick.next_below(g.n_vertices()));

    double r = diameter(g, 0);
    double m = g.total_mass();
    std::vector<double> dist = shortest_path_from(g, y);
    double dyz_tilde = dist[z] / r;
    std::uint64_t steps = std::uint64_t(std::ceil(r * m * T));

    NeighborSampler sampler(g);
    Rng rng(derive_seed(seed, {"walk"}));
    std::uint64_t cy = 0, cz = 0;
    double sup = 0.0;
    const double inv_mu_y = 1.0 / g.mu(y), inv_mu_z = 1.0 / g.mu(z);
    vertex_id here = 0;
    for (std::uint64_t s = 0; s < steps; ++s) {
      if (here == y) {
        ++cy;
        sup = std::max(sup, std::abs(double(cy) * inv_mu_y - double(cz) * inv_mu_z));
      } else if (here == z) {
        ++cz;
        sup = std::max(sup, std::abs(double(cy) * inv_mu_y - double(cz) * inv_mu_z));
      }
      here = sampler.step(here, rng);
    }
    normalized[rep] = (sup / r) / std::sqrt(dyz_tilde);
  });

  table.tails.resize(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    std::uint64_t hits = 0;
    for (double v : normalized)
      if (v >= lambdas[i]) ++hits;
    table.tails[i] = double(hits) / double(replicates);
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (table.tails[i] > 0.0) {
      xs.push_back(lambdas[i]);
      ys.push_back(std::log(table.tails[i]));
    }
  }
  require(xs.size() >= 3, errc::insufficient_samples, "too few positive tail points to fit");
  table.log_tail_fit = least_squares(xs, ys);
  table.c2_fit = -table.log_tail_fit.slope;
  table.c1_fit = std::exp(table.log_tail_fit.intercept);
  table.c1_envelope = 0.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    table.c1_envelope =
        std::max(table.c1_envelope, table.tails[i] * std::exp(table.c2_fit * lambdas[i]));
  for (std::size_t i = 0; i < lambdas.size(); ++i)
    if (table.tails[i] > table.c1_envelope * std::exp(-table.c2_fit * lambdas[i]) + 1e-12)
      ++table.envelope_violations;
  return table;
}

ModulusTable equicontinuity_modulus(const ExperimentPlan& plan, std::uint32_t size,
                                    const std::vector<double>& deltas, double T, double eps,
                                    std::uint32_t replicates) {
  require(!deltas.empty(), errc::invalid_argument, "empty delta grid");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    require(deltas[i] > deltas[i - 1], errc::invalid_argument, "deltas must increase");

  ModulusTable table;
  table.deltas = deltas;
  table.replicates = replicates;
  const double alpha = alpha_scale(plan.model, double(size));
  const double beta = beta_scale(plan.model, double(size));
  const std::uint32_t pairs_per_delta = 24;

  std::vector<std::vector<std::uint8_t>> hits(deltas.size(),
                                              std::vector<std::uint8_t>(replicates, 0));
  parallel_for(replicates, plan.threads, [&](std::uint64_t rep) {
    std::uint64_t seed = derive_seed(plan.master_seed, {"modulus", size, rep});
    ModelInstance inst = sample_model_instance(plan, size, derive_seed(seed, {"instance"}));
    const WeightedGraph& g = inst.graph;
    Rng pick(derive_seed(seed, {"pairs"}));

    // Nested pair pools: for each delta, vertex pairs with rescaled
    // shortest-path distance below it (a lower bound on the sup over all
    // qualifying pairs; shortest-path dominates resistance).
    struct TrackedPair {
      vertex_id y, z;
      double sup = 0.0;
    };
    std::vector<TrackedPair> pool;
    std::vector<std::size_t> pool_end(deltas.size(), 0);
    for (std::size_t di = 0; di < deltas.size(); ++di) {
      double radius = deltas[di] / alpha;
      std::uint32_t added = 0, tries = 0;
      while (added < pairs_per_delta && tries < 8 * pairs_per_delta) {
        ++tries;
        vertex_id y = vertex_id(pick.next_below(g.n_vertices()));
        std::vector<double> dist = shortest_path_from(g, y);
        std::vector<vertex_id> close;
        for (vertex_id z = 0; z < g.n_vertices(); ++z)
          if (z != y && dist[z] < radius) close.push_back(z);
        if (close.empty()) continue;
        vertex_id z = close[pick.next_below(close.size())];
        pool.push_back({y, z, 0.0});
        ++added;
      }
      pool_end[di] = pool.size();
    }

    // One walk; update pair sups whenever an endpoint is visited.
    std::vector<std::vector<std::uint32_t>> watches(g.n_vertices());
    for (std::size_t pi = 0; pi < pool.size(); ++pi) {
      watches[pool[pi].y].push_back(std::uint32_t(pi));
      watches[pool[pi].z].push_back(std::uint32_t(pi));
    }
    NeighborSampler sampler(g);
    Rng rng(derive_seed(seed, {"walk"}));
    std::vector<std::uint64_t> counts(g.n_vertices(), 0);
    std::uint64_t steps = std::uint64_t(std::ceil(beta * T));
    vertex_id here = inst.start;
    for (std::uint64_t s = 0; s < steps; ++s) {
      counts[here]++;
      for (std::uint32_t pi : watches[here]) {
        TrackedPair& p = pool[pi];
        double gap = std::abs(double(counts[p.y]) / g.mu(p.y) - double(counts[p.z]) / g.mu(p.z));
        p.sup = std::max(p.sup, gap);
      }
      here = sampler.step(here, rng);
    }

    for (std::size_t di = 0; di < deltas.size(); ++di) {
      bool hit = false;
      for (std::size_t pi = 0; pi < pool_end[di]; ++pi)
        if (alpha * pool[pi].sup >= eps) hit = true;
      hits[di][rep] = hit ? 1 : 0;
    }
  });

  for (std::size_t di = 0; di < deltas.size(); ++di) {
    double p = 0.0;
    for (auto h : hits[di]) p += h;
    p /= double(replicates);
    table.probabilities.push_back(p);
    table.stderrs.push_back(std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(replicates)));
  }
  return table;
}

ThetaIdentityResult blanket_scaling_identity_check(const Excursion& e, double a, double epsilon,
                                                   std::uint32_t replicates,
                                                   std::uint32_t n_leaves,
                                                   std::uint64_t master_seed, unsigned threads) {
  require(a > 1.0, errc::invalid_argument, "scale must exceed 1");
  require(epsilon / a > 0.0 && epsilon / a < 1.0, errc::invalid_argument,
          "epsilon/a must lie in (0,1)");

  DiscretizedContinuumTree base = excursion_to_tree(e, n_leaves);
  DiscretizedContinuumTree scaled = excursion_to_tree(theta_scale(e, a), n_leaves);
  WeightedGraph g_base = base.to_graph();
  WeightedGraph g_scaled = scaled.to_graph();
  std::vector<double> m_base = base.node_masses();
  std::vector<double> m_scaled = scaled.node_masses();
  const std::uint64_t budget = 1u << 26;

  std::vector<double> side_base(replicates, -1.0), side_scaled(replicates, -1.0),
      side_control(replicates, -1.0);
  parallel_for(replicates, threads, [&](std::uint64_t rep) {
    auto r1 = measured_blanket_time(g_base, m_base, 0, epsilon, budget,
                                    derive_seed(master_seed, {"theta-base", rep}));
    if (r1.blanket_clock) side_base[rep] = *r1.blanket_clock * std::pow(a, 1.5);
    auto r2 = measured_blanket_time(g_scaled, m_scaled, 0, epsilon / a, budget,
                                    derive_seed(master_seed, {"theta-scaled", rep}));
    if (r2.blanket_clock) side_scaled[rep] = *r2.blanket_clock;
    auto r3 = measured_blanket_time(g_scaled, m_scaled, 0, epsilon, budget,
                                    derive_seed(master_seed, {"theta-control", rep}));
    if (r3.blanket_clock) side_control[rep] = *r3.blanket_clock;
  });

  auto collect = [](const std::vector<double>& v) {
    std::vector<double> out;
    for (double x : v)
      if (x >= 0.0) out.push_back(x);
    return out;
  };
  std::vector<double> sb = collect(side_base), ss = collect(side_scaled),
                      sc = collect(side_control);
  require(sb.size() >= 30 && ss.size() >= 30 && sc.size() >= 30, errc::insufficient_samples,
          "too many timeouts in the identity check");

  ThetaIdentityResult res;
  res.replicates = replicates;
  res.ks_matched = two_sample_ks(sb, ss);
  res.ks_control = two_sample_ks(sb, sc);
  res.ks_critical = ks_critical_95(sb.size(), ss.size());
  return res;
}

namespace {

struct RungView {
  DiscretizedContinuumTree tree;
  std::vector<std::uint32_t> slot_point;   // contour slot -> quadruple point
  std::vector<std::uint32_t> points;       // quadruple point -> tree node
  std::vector<double> point_mass;
  DistanceMatrix dist;
};

RungView make_rung(const Excursion& e, std::uint32_t leaves, std::uint32_t slots) {
  RungView rv;
  rv.tree = excursion_to_tree(e, leaves);

  // Snap each contour slot to the nearest sampled time's node.
  std::vector<std::uint32_t> slot_node(slots);
  const std::size_t L = rv.tree.sample_node.size();
  for (std::uint32_t k = 0; k < slots; ++k) {
    double u = slots > 1 ? double(k) / double(slots - 1) : 0.0;
    std::size_t j = std::min<std::size_t>(L - 1, std::size_t(std::llround(u * double(L - 1))));
    slot_node[k] = rv.tree.sample_node[j];
  }
  std::map<std::uint32_t, std::uint32_t> node_to_point;
  rv.slot_point.resize(slots);
  for (std::uint32_t k = 0; k < slots; ++k) {
    auto [it, fresh] = node_to_point.try_emplace(slot_node[k], std::uint32_t(rv.points.size()));
    if (fresh) rv.points.push_back(slot_node[k]);
    rv.slot_point[k] = it->second;
  }
  // Masses: each sampled time's leaf mass lands on its slot's point.
  rv.point_mass.assign(rv.points.size(), 0.0);
  const double leaf_mass = rv.tree.zeta / double(L);
  for (std::size_t j = 0; j < L; ++j) {
    double u = double(j) / double(L - 1);
    std::uint32_t k = std::uint32_t(std::llround(u * double(slots - 1)));
    rv.point_mass[rv.slot_point[k]] += leaf_mass;
  }
  rv.dist = DistanceMatrix::zero(std::uint32_t(rv.points.size()));
  for (std::uint32_t i = 0; i < rv.points.size(); ++i)
    for (std::uint32_t j = i + 1; j < rv.points.size(); ++j) {
      double d = rv.tree.distance(rv.points[i], rv.points[j]);
      rv.dist.at(i, j) = d;
      rv.dist.at(j, i) = d;
    }
  return rv;
}

}  // namespace

QuadrupleLadder build_quadruple_ladder(const Excursion& e,
                                       const std::vector<std::uint32_t>& rungs,
                                       std::uint32_t contour_slots, double horizon,
                                       std::uint64_t walk_seed) {
  require(rungs.size() >= 2, errc::invalid_argument, "need at least two rungs");
  std::vector<RungView> views;
  for (std::uint32_t r : rungs) views.push_back(make_rung(e, r, contour_slots));

  // Reference walk at the finest rung, with the measured clock.
  const RungView& fine = views.back();
  WeightedGraph g = fine.tree.to_graph();
  std::vector<double> nu = fine.tree.node_masses();
  NeighborSampler sampler(g);
  Rng rng(walk_seed);

  // Map every fine tree node to its contour slot (via grid time).
  const std::uint32_t n_nodes = std::uint32_t(fine.tree.nodes.size());
  std::vector<std::uint32_t> node_slot(n_nodes);
  for (std::uint32_t v = 0; v < n_nodes; ++v) {
    double u = double(fine.tree.nodes[v].grid_time) / double(fine.tree.grid_n);
    node_slot[v] = std::uint32_t(std::llround(u * double(contour_slots - 1)));
  }

  const std::size_t time_grid_len = 128;
  const std::size_t path_len = 128;
  std::vector<double> time_grid(time_grid_len);
  for (std::size_t i = 0; i < time_grid_len; ++i)
    time_grid[i] = horizon * double(i) / double(time_grid_len - 1);

  std::vector<double> slot_occ(contour_slots, 0.0);
  std::vector<std::vector<double>> occ_snapshots(time_grid_len,
                                                 std::vector<double>(contour_slots, 0.0));
  std::vector<std::uint32_t> path_slots(path_len, node_slot[0]);

  vertex_id here = 0;
  double clock = 0.0;
  std::size_t grid_cursor = 0, path_cursor = 0;
  while (clock < horizon) {
    while (grid_cursor < time_grid_len && time_grid[grid_cursor] <= clock)
      occ_snapshots[grid_cursor++] = slot_occ;
    while (path_cursor < path_len &&
           horizon * double(path_cursor) / double(path_len) <= clock)
      path_slots[path_cursor++] = node_slot[here];
    double hold = nu[here] / g.mu(here);
    slot_occ[node_slot[here]] += hold;
    clock += hold;
    here = sampler.step(here, rng);
  }
  while (grid_cursor < time_grid_len) occ_snapshots[grid_cursor++] = slot_occ;
  while (path_cursor < path_len) path_slots[path_cursor++] = node_slot[here];

  QuadrupleLadder ladder;
  for (const RungView& rv : views) {
    Quadruple q;
    q.space = rv.dist;
    q.mass = rv.point_mass;
    q.root = rv.slot_point[0];

    q.path.horizon = horizon;
    for (std::size_t i = 0; i < path_len; ++i) {
      std::uint32_t pt = rv.slot_point[path_slots[i]];
      double tt = horizon * double(i) / double(path_len);
      if (q.path.values.empty() || q.path.values.back() != pt) {
        if (q.path.times.empty()) {
          q.path.times.push_back(0.0);
          q.path.values.push_back(pt);
        } else {
          q.path.times.push_back(tt);
          q.path.values.push_back(pt);
        }
      }
    }

    q.time_grid = time_grid;
    q.local_times.assign(rv.points.size(), std::vector<double>(time_grid_len, 0.0));
    for (std::size_t gi = 0; gi < time_grid_len; ++gi) {
      // Aggregate slot occupation onto points, normalized by point mass.
      for (std::uint32_t k = 0; k < contour_slots; ++k) {
        std::uint32_t pt = rv.slot_point[k];
        q.local_times[pt][gi] += occ_snapshots[gi][k];
      }
    }
    for (std::uint32_t pt = 0; pt < rv.points.size(); ++pt)
      for (std::size_t gi = 0; gi < time_grid_len; ++gi)
        q.local_times[pt][gi] /= std::max(rv.point_mass[pt], 1e-12);

    ladder.quadruples.push_back(std::move(q));
    ladder.params.push_back(rv.slot_point);
  }
  return ladder;
}

std::vector<double> dk_ladder_trend(const Excursion& e, const std::vector<std::uint32_t>& rungs,
                                    std::uint32_t contour_slots, double horizon,
                                    std::uint32_t replicates, std::uint64_t master_seed,
                                    unsigned threads) {
  std::vector<std::vector<double>> values(rungs.size() - 1,
                                          std::vector<double>(replicates, 0.0));
  parallel_for(replicates, threads, [&](std::uint64_t rep) {
    QuadrupleLadder ladder = build_quadruple_ladder(e, rungs, contour_slots, horizon,
                                                    derive_seed(master_seed, {"ladder", rep}));
    for (std::size_t i = 0; i + 1 < rungs.size(); ++i) {
      Correspondence c = contour_correspondence(ladder.params[i], ladder.params[i + 1]);
      DkBounds b = dk_upper_bound(ladder.quadruples[i], ladder.quadruples[i + 1], c);
      values[i][rep] = b.total();
    }
  });
  std::vector<double> medians;
  for (auto& v : values) medians.push_back(median_of(v));
  return medians;
}

}  // namespace bl
