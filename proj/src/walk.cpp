#include "walk.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace bl {

NeighborSampler::NeighborSampler(const WeightedGraph& g) : g_(&g) {
  const vertex_id n = g.n_vertices();
  off_.assign(n + 1, 0);
  for (vertex_id x = 0; x < n; ++x) off_[x + 1] = off_[x] + g.degree(x);
  prob_.resize(off_[n]);
  alias_.resize(off_[n]);
  std::vector<double> p;
  std::vector<std::uint32_t> small, large;
  for (vertex_id x = 0; x < n; ++x) {
    auto wt = g.neighbor_weights(x);
    const std::size_t k = wt.size();
    p.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) p[i] = wt[i] * double(k) / g.mu(x);
    small.clear();
    large.clear();
    for (std::size_t i = 0; i < k; ++i) (p[i] < 1.0 ? small : large).push_back(std::uint32_t(i));
    double* prob = prob_.data() + off_[x];
    std::uint32_t* alias = alias_.data() + off_[x];
    for (std::size_t i = 0; i < k; ++i) {
      prob[i] = 1.0;
      alias[i] = std::uint32_t(i);
    }
    while (!small.empty() && !large.empty()) {
      std::uint32_t s = small.back();
      small.pop_back();
      std::uint32_t l = large.back();
      large.pop_back();
      prob[s] = p[s];
      alias[s] = l;
      p[l] = (p[l] + p[s]) - 1.0;
      (p[l] < 1.0 ? small : large).push_back(l);
    }
  }
}

vertex_id NeighborSampler::step(vertex_id x, Rng& rng) const {
  const std::size_t k = off_[x + 1] - off_[x];
  std::size_t slot = std::size_t(rng.next_below(k));
  double u = rng.next_double();
  const std::size_t base = off_[x];
  std::size_t pick = (u < prob_[base + slot]) ? slot : alias_[base + slot];
  return g_->neighbors(x)[pick];
}

WalkPath run_walk(const WeightedGraph& g, vertex_id start, std::uint64_t horizon,
                  std::uint64_t seed) {
  require(start < g.n_vertices(), errc::invalid_argument, "start vertex out of range");
  NeighborSampler sampler(g);
  Rng rng(seed);
  WalkPath path;
  path.start = start;
  path.seed = seed;
  path.steps.reserve(horizon + 1);
  path.steps.push_back(start);
  vertex_id x = start;
  for (std::uint64_t i = 0; i < horizon; ++i) {
    x = sampler.step(x, rng);
    path.steps.push_back(x);
  }
  return path;
}

LocalTimeField local_times(const WeightedGraph& g, const WalkPath& path, std::uint64_t t) {
  require(t < path.steps.size() + 1, errc::invalid_argument, "t beyond path length");
  LocalTimeField f;
  f.counts.assign(g.n_vertices(), 0);
  f.t = t;
  for (std::uint64_t i = 0; i < t; ++i) f.counts[path.steps[i]]++;
  return f;
}

namespace {

// The blanket condition at integer time t for a vertex with visit count c:
// mG*c >= eps*t*mu_x, evaluated in double. Both detectors and the DP oracles
// use this exact comparison.
inline bool holds_at(double mg_count, double eps_mu, std::uint64_t t) {
  return mg_count >= eps_mu * double(t);
}

// Largest t satisfying the condition (the vertex's failure deadline).
inline std::uint64_t deadline_of(double mg_count, double eps_mu) {
  double raw = mg_count / eps_mu;
  if (raw <= 0.0) return 0;
  auto d = std::uint64_t(raw);
  while (d > 0 && !holds_at(mg_count, eps_mu, d)) --d;
  while (holds_at(mg_count, eps_mu, d + 1)) ++d;
  return d;
}

}  // namespace

BlanketTimeResult blanket_time_variable(const WeightedGraph& g, vertex_id start, double epsilon,
                                        std::uint64_t t_max, std::uint64_t seed) {
  require(epsilon > 0.0 && epsilon < 1.0, errc::invalid_argument, "epsilon must lie in (0,1)");
  require(t_max >= 1, errc::invalid_argument, "t_max must be at least 1");
  require(start < g.n_vertices(), errc::invalid_argument, "start vertex out of range");

  const vertex_id n = g.n_vertices();
  const double mg = g.total_mass();
  NeighborSampler sampler(g);
  Rng rng(seed);

  BlanketTimeResult res;
  res.epsilon = epsilon;
  res.t_max = t_max;
  res.seed = seed;

  std::vector<std::uint64_t> counts(n, 0);
  std::vector<double> eps_mu(n);
  for (vertex_id x = 0; x < n; ++x) eps_mu[x] = epsilon * g.mu(x);

  // Lazy min-heap over per-vertex deadlines; stale entries are discarded on
  // pop by comparing against the current deadline.
  using Item = std::pair<std::uint64_t, vertex_id>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<std::uint64_t> deadline(n, 0);
  for (vertex_id x = 0; x < n; ++x) heap.push({0, x});

  vertex_id here = start;
  std::uint64_t unvisited = n;
  std::uint64_t t = 0;
  while (t < t_max) {
    // Count the position occupied at time t; afterwards counts cover X_0..X_t
    // and represent L_{t+1}.
    if (counts[here]++ == 0) --unvisited;
    std::uint64_t nd = deadline_of(mg * double(counts[here]), eps_mu[here]);
    if (nd != deadline[here]) {
      deadline[here] = nd;
      heap.push({nd, here});
    }
    ++t;
    if (unvisited == 0) {
      if (!res.cover_time) res.cover_time = t;
      while (heap.top().first != deadline[heap.top().second]) heap.pop();
      if (heap.top().first >= t) {
        res.tau_blanket = t;
        return res;
      }
    }
    here = sampler.step(here, rng);
  }
  return res;  // timeout: tau_blanket (and possibly cover_time) unset
}

std::optional<std::uint64_t> cover_time(const WeightedGraph& g, vertex_id start,
                                        std::uint64_t t_max, std::uint64_t seed) {
  require(start < g.n_vertices(), errc::invalid_argument, "start vertex out of range");
  NeighborSampler sampler(g);
  Rng rng(seed);
  std::vector<char> seen(g.n_vertices(), 0);
  vertex_id here = start;
  std::uint64_t unvisited = g.n_vertices();
  for (std::uint64_t t = 0; t < t_max; ++t) {
    if (!seen[here]) {
      seen[here] = 1;
      --unvisited;
    }
    if (unvisited == 0) return t + 1;
    here = sampler.step(here, rng);
  }
  return std::nullopt;
}

std::uint64_t default_t_max(const WeightedGraph& g) {
  double n = double(g.n_vertices());
  if (g.is_tree()) return std::uint64_t(64.0 * n * std::sqrt(n)) + 64;
  double diam = diameter(g, 0);  // double sweep only
  return std::uint64_t(64.0 * n * std::max(diam, 1.0)) + 64;
}

BlanketEstimate expected_blanket_time(const WeightedGraph& g, double epsilon,
                                      std::uint64_t replicates, std::uint64_t t_max,
                                      std::uint64_t master_seed) {
  require(replicates >= 1, errc::invalid_argument, "need at least one replicate");
  BlanketEstimate est;
  std::uint64_t total = 0, timeouts = 0;
  for (vertex_id start = 0; start < g.n_vertices(); ++start) {
    double sum = 0.0, sumsq = 0.0;
    std::uint64_t ok = 0, local_timeouts = 0;
    for (std::uint64_t i = 0; i < replicates; ++i) {
      std::uint64_t seed = derive_seed(master_seed, {"blanket", start, i});
      auto r = blanket_time_variable(g, start, epsilon, t_max, seed);
      ++total;
      if (!r.tau_blanket) {
        ++timeouts;
        ++local_timeouts;
        continue;
      }
      double v = double(*r.tau_blanket);
      sum += v;
      sumsq += v * v;
      ++ok;
    }
    BlanketEstimate::PerStart ps;
    ps.start = start;
    ps.replicates = ok;
    ps.timeouts = local_timeouts;
    ps.mean = ok ? sum / double(ok) : 0.0;
    double var = ok > 1 ? std::max(0.0, (sumsq - sum * sum / double(ok)) / double(ok - 1)) : 0.0;
    ps.stderr_ = ok > 1 ? std::sqrt(var / double(ok)) : 0.0;
    est.per_start.push_back(ps);
    if (ps.mean >= est.t_bl_estimate) {
      est.t_bl_estimate = ps.mean;
      est.argmax_start = start;
    }
  }
  if (100 * timeouts > total)
    fail(errc::too_many_timeouts, "more than 1% of blanket replicates timed out (" +
                                      std::to_string(timeouts) + "/" + std::to_string(total) + ")");
  return est;
}

double smoothed_occupation(const WeightedGraph& g, const WalkPath& path, vertex_id x, double delta,
                           std::uint64_t t, const MetricMatrix& metric) {
  require(delta > 0.0, errc::invalid_argument, "delta must be positive");
  require(t <= path.steps.size(), errc::invalid_argument, "t beyond path length");
  require(metric.n == g.n_vertices(), errc::dimension_mismatch, "metric size mismatch");

  const vertex_id n = g.n_vertices();
  std::vector<double> kernel(n, 0.0);
  std::size_t support = 0;
  vertex_id only = x;
  for (vertex_id y = 0; y < n; ++y) {
    double f = delta - metric.at(x, y);
    if (f > 0.0) {
      kernel[y] = f;
      ++support;
      only = y;
    }
  }
  require(support > 0, errc::empty_kernel, "no vertex within delta of x");

  std::vector<std::uint64_t> counts(n, 0);
  for (std::uint64_t s = 0; s < t; ++s) counts[path.steps[s]]++;

  if (support == 1) return double(counts[only]) / g.mu(only);  // kernel cancels

  double num = 0.0, den = 0.0;
  for (vertex_id y = 0; y < n; ++y) {
    if (kernel[y] == 0.0) continue;
    num += kernel[y] * double(counts[y]);
    den += kernel[y] * g.mu(y);
  }
  return num / den;
}

MeasuredBlanketResult measured_blanket_time(const WeightedGraph& g,
                                            std::span<const double> vertex_mass, vertex_id start,
                                            double epsilon, std::uint64_t step_budget,
                                            std::uint64_t seed) {
  require(vertex_mass.size() == g.n_vertices(), errc::dimension_mismatch,
          "vertex mass size mismatch");
  require(epsilon > 0.0 && epsilon < 1.0, errc::invalid_argument, "epsilon must lie in (0,1)");

  const vertex_id n = g.n_vertices();
  NeighborSampler sampler(g);
  Rng rng(seed);

  std::vector<std::uint64_t> counts(n, 0);
  std::vector<double> hold(n), inv_mu(n);
  for (vertex_id x = 0; x < n; ++x) {
    hold[x] = vertex_mass[x] / g.mu(x);
    inv_mu[x] = 1.0 / g.mu(x);
  }

  // Deadline in clock units: vertex x fails once clock > count_x/(mu_x eps).
  using Item = std::pair<double, vertex_id>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::vector<double> deadline(n, 0.0);
  for (vertex_id x = 0; x < n; ++x) heap.push({0.0, x});

  MeasuredBlanketResult res;
  res.seed = seed;
  vertex_id here = start;
  std::uint64_t unvisited = n;
  double clock = 0.0;
  for (std::uint64_t t = 0; t < step_budget; ++t) {
    if (counts[here]++ == 0) --unvisited;
    clock += hold[here];
    double nd = double(counts[here]) * inv_mu[here] / epsilon;
    if (nd != deadline[here]) {
      deadline[here] = nd;
      heap.push({nd, here});
    }
    if (unvisited == 0) {
      while (heap.top().first != deadline[heap.top().second]) heap.pop();
      if (heap.top().first >= clock) {
        res.blanket_clock = clock;
        res.steps_taken = t + 1;
        return res;
      }
    }
    here = sampler.step(here, rng);
  }
  res.steps_taken = step_budget;
  return res;
}

}  // namespace bl
