#include "metric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace bl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dinic max-flow on a small dense bipartite network, double capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add(int u, int v, double cap) {
    edges_.push_back({v, head_[u], cap});
    head_[u] = int(edges_.size()) - 1;
    edges_.push_back({u, head_[v], 0.0});
    head_[v] = int(edges_.size()) - 1;
  }

  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      it_ = head_;
      double f;
      while ((f = dfs(s, t, kInf)) > 1e-14) flow += f;
    }
    return flow;
  }

 private:
  struct E {
    int to, next;
    double cap;
  };
  std::vector<E> edges_;
  std::vector<int> head_, level_, it_;

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> q{s};
    level_[s] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
      int u = q[h];
      for (int e = head_[u]; e != -1; e = edges_[e].next) {
        if (edges_[e].cap > 1e-14 && level_[edges_[e].to] == -1) {
          level_[edges_[e].to] = level_[u] + 1;
          q.push_back(edges_[e].to);
        }
      }
    }
    return level_[t] != -1;
  }

  double dfs(int u, int t, double pushed) {
    if (u == t) return pushed;
    for (int& e = it_[u]; e != -1; e = edges_[e].next) {
      int v = edges_[e].to;
      if (edges_[e].cap > 1e-14 && level_[v] == level_[u] + 1) {
        double got = dfs(v, t, std::min(pushed, edges_[e].cap));
        if (got > 1e-14) {
          edges_[e].cap -= got;
          edges_[e ^ 1].cap += got;
          return got;
        }
      }
    }
    return 0.0;
  }
};

// max_A mu(A) - nu(A^eps) via min-cut.
double deficiency(const std::vector<double>& mu, const std::vector<double>& nu,
                  const DistanceMatrix& m, double eps) {
  const int n = int(mu.size());
  MaxFlow mf(2 * n + 2);
  const int src = 2 * n, dst = 2 * n + 1;
  double mu_total = 0.0;
  for (int i = 0; i < n; ++i) {
    mu_total += mu[i];
    if (mu[i] > 0.0) mf.add(src, i, mu[i]);
    if (nu[i] > 0.0) mf.add(n + i, dst, nu[i]);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (m.at(i, j) <= eps) mf.add(i, n + j, kInf);
  return mu_total - mf.run(src, dst);
}

bool prokhorov_feasible(const std::vector<double>& mu, const std::vector<double>& nu,
                        const DistanceMatrix& m, double eps) {
  return deficiency(mu, nu, m, eps) <= eps + 1e-13 && deficiency(nu, mu, m, eps) <= eps + 1e-13;
}

}  // namespace

ProkhorovResult prokhorov_distance(const std::vector<double>& mu, const std::vector<double>& nu,
                                   const DistanceMatrix& metric) {
  require(mu.size() == metric.n && nu.size() == metric.n, errc::dimension_mismatch,
          "measures must live on the metric's points");
  require(metric.n <= 1000, errc::size_limit_exceeded, "prokhorov limited to 1000 points");

  double diam = 0.0, mass_gap = 0.0;
  for (double v : metric.d) diam = std::max(diam, v);
  {
    double a = 0.0, b = 0.0;
    for (double v : mu) a += v;
    for (double v : nu) b += v;
    mass_gap = std::abs(a - b);
  }

  if (metric.n > 60) {
    // Greedy coupling: repeatedly move the largest unmatched mass to its
    // nearest partner, then read off the smallest feasible enlargement.
    std::vector<double> ma = mu, mb = nu;
    std::vector<std::pair<double, double>> moved;  // (distance, mass)
    while (true) {
      int i = -1;
      for (int k = 0; k < int(ma.size()); ++k)
        if (ma[k] > 1e-15 && (i < 0 || ma[k] > ma[i])) i = k;
      if (i < 0) break;
      int j = -1;
      for (int k = 0; k < int(mb.size()); ++k)
        if (mb[k] > 1e-15 && (j < 0 || metric.at(i, k) < metric.at(i, j))) j = k;
      if (j < 0) break;
      double m = std::min(ma[i], mb[j]);
      moved.push_back({metric.at(i, j), m});
      ma[i] -= m;
      mb[j] -= m;
    }
    std::sort(moved.begin(), moved.end());
    double leftover = 0.0;
    for (double v : ma) leftover += std::max(0.0, v);
    // tail(eps) = mass moved farther that eps, plus unmatched mass.
    double best = diam + mass_gap;
    double tail = leftover;
    for (auto& mv : moved) tail += mv.second;
    std::vector<double> cands{0.0};
    for (auto& mv : moved) cands.push_back(mv.first);
    std::sort(cands.begin(), cands.end());
    for (double eps : cands) {
      double t = leftover;
      for (auto& mv : moved)
        if (mv.first > eps) t += mv.second;
      best = std::min(best, std::max(eps, t));
    }
    return {best, false};
  }

  double lo = 0.0, hi = std::max(1e-9, diam + mass_gap + 1e-6);
  if (prokhorov_feasible(mu, nu, metric, 0.0)) return {0.0, true};
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    if (prokhorov_feasible(mu, nu, metric, mid))
      hi = mid;
    else
      lo = mid;
  }
  return {hi, true};
}

double skorokhod_j1(const StepPath& a, const StepPath& b, const DistanceMatrix& metric) {
  require(!a.times.empty() && !b.times.empty(), errc::invalid_argument, "empty path");
  require(a.times.size() <= 1000 && b.times.size() <= 1000, errc::too_many_breakpoints,
          "paths limited to 1000 breakpoints");
  require(std::abs(a.horizon - b.horizon) <= 1e-12, errc::invalid_argument,
          "paths must share the horizon");

  const std::size_t m = a.times.size(), n = b.times.size();
  auto d = [&](std::size_t i, std::size_t j) { return metric.at(a.values[i], b.values[j]); };

  // Piece end times.
  auto a_end = [&](std::size_t i) { return i + 1 < m ? a.times[i + 1] : a.horizon; };
  auto b_end = [&](std::size_t j) { return j + 1 < n ? b.times[j + 1] : b.horizon; };

  // Minimal metric sup over staircases whose breakpoint shifts stay within
  // theta.
  std::vector<double> dp(m * n, kInf);
  auto M_of = [&](double theta) {
    std::fill(dp.begin(), dp.end(), kInf);
    dp[0] = d(0, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == 0 && j == 0) continue;
        double best = kInf;
        if (i > 0 && dp[(i - 1) * n + j] < kInf) {
          // lambda crosses a.times[i] inside b-piece j.
          if (a.times[i] >= b.times[j] - theta && a.times[i] <= b_end(j) + theta)
            best = std::min(best, dp[(i - 1) * n + j]);
        }
        if (j > 0 && dp[i * n + (j - 1)] < kInf) {
          if (b.times[j] >= a.times[i] - theta && b.times[j] <= a_end(i) + theta)
            best = std::min(best, dp[i * n + (j - 1)]);
        }
        if (i > 0 && j > 0 && dp[(i - 1) * n + (j - 1)] < kInf) {
          if (std::abs(a.times[i] - b.times[j]) <= theta)
            best = std::min(best, dp[(i - 1) * n + (j - 1)]);
        }
        if (best < kInf) dp[i * n + j] = std::max(best, d(i, j));
      }
    }
    return dp[m * n - 1];
  };

  std::set<double> cand_set{0.0};
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 1; j < n; ++j) cand_set.insert(std::abs(a.times[i] - b.times[j]));
  double best = kInf;
  for (double theta : cand_set) {
    if (theta >= best) break;  // candidates ascend; theta alone already loses
    double metric_sup = M_of(theta);
    if (metric_sup < kInf) best = std::min(best, theta + metric_sup);
  }
  return best;
}

double correspondence_distortion(const Correspondence& c, const DistanceMatrix& da,
                                 const DistanceMatrix& db) {
  double sup = 0.0;
  for (auto [x, xp] : c.pairs)
    for (auto [y, yp] : c.pairs)
      sup = std::max(sup, std::abs(da.at(x, y) - db.at(xp, yp)));
  return sup;
}

namespace {

std::vector<double> resample_linear(const std::vector<double>& grid,
                                    const std::vector<double>& values,
                                    const std::vector<double>& target) {
  std::vector<double> out(target.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    double t = target[i];
    while (k + 1 < grid.size() && grid[k + 1] < t) ++k;
    if (k + 1 >= grid.size()) {
      out[i] = values.back();
    } else {
      double span = grid[k + 1] - grid[k];
      double w = span > 0.0 ? (t - grid[k]) / span : 0.0;
      w = std::clamp(w, 0.0, 1.0);
      out[i] = (1.0 - w) * values[k] + w * values[k + 1];
    }
  }
  return out;
}

}  // namespace

DkBounds dk_upper_bound(const Quadruple& qa, const Quadruple& qb, const Correspondence& c,
                        bool rooted) {
  require(!c.pairs.empty(), errc::invalid_argument, "empty correspondence");
  const std::uint32_t na = qa.space.n, nb = qb.space.n;
  {
    std::vector<char> seen_a(na, 0), seen_b(nb, 0);
    for (auto [x, y] : c.pairs) {
      require(x < na && y < nb, errc::invalid_argument, "correspondence pair out of range");
      seen_a[x] = 1;
      seen_b[y] = 1;
    }
    for (std::uint32_t x = 0; x < na; ++x)
      require(seen_a[x], errc::invalid_argument, "correspondence misses a point of A");
    for (std::uint32_t y = 0; y < nb; ++y)
      require(seen_b[y], errc::invalid_argument, "correspondence misses a point of B");
    if (rooted) {
      bool has_root = false;
      for (auto [x, y] : c.pairs) has_root |= (x == qa.root && y == qb.root);
      require(has_root, errc::invalid_argument, "rooted correspondence must pair the roots");
    }
  }

  DkBounds out;
  const double r = 0.5 * correspondence_distortion(c, qa.space, qb.space);

  // Correspondence sum space: A ids 0..na-1, B ids na..na+nb-1; matched
  // pairs sit at distance r.
  DistanceMatrix z = DistanceMatrix::zero(na + nb);
  for (std::uint32_t i = 0; i < na; ++i)
    for (std::uint32_t j = 0; j < na; ++j) z.at(i, j) = qa.space.at(i, j);
  for (std::uint32_t i = 0; i < nb; ++i)
    for (std::uint32_t j = 0; j < nb; ++j) z.at(na + i, na + j) = qb.space.at(i, j);
  for (std::uint32_t i = 0; i < na; ++i) {
    for (std::uint32_t j = 0; j < nb; ++j) {
      double best = kInf;
      for (auto [x, y] : c.pairs)
        best = std::min(best, qa.space.at(i, x) + r + qb.space.at(y, j));
      z.at(i, na + j) = best;
      z.at(na + j, i) = best;
    }
  }

  std::vector<double> mu(na + nb, 0.0), nu(na + nb, 0.0);
  for (std::uint32_t i = 0; i < na; ++i) mu[i] = qa.mass[i];
  for (std::uint32_t j = 0; j < nb; ++j) nu[na + j] = qb.mass[j];
  ProkhorovResult pk = prokhorov_distance(mu, nu, z);
  out.prokhorov = pk.value;
  out.prokhorov_exact = pk.exact;

  StepPath pb = qb.path;
  for (auto& v : pb.values) v += na;
  out.skorokhod = skorokhod_j1(qa.path, pb, z);

  for (auto [x, y] : c.pairs)
    out.pair_displacement = std::max(out.pair_displacement, z.at(x, na + y));

  // Local times on a shared uniform grid (linear interpolation).
  const std::size_t grid_len = 1000;
  double horizon = std::min(qa.time_grid.back(), qb.time_grid.back());
  std::vector<double> grid(grid_len);
  for (std::size_t i = 0; i < grid_len; ++i)
    grid[i] = horizon * double(i) / double(grid_len - 1);
  std::vector<std::vector<double>> la(na), lb(nb);
  for (std::uint32_t x = 0; x < na; ++x)
    la[x] = resample_linear(qa.time_grid, qa.local_times[x], grid);
  for (std::uint32_t y = 0; y < nb; ++y)
    lb[y] = resample_linear(qb.time_grid, qb.local_times[y], grid);
  for (auto [x, y] : c.pairs) {
    double sup = 0.0;
    for (std::size_t i = 0; i < grid_len; ++i)
      sup = std::max(sup, std::abs(la[x][i] - lb[y][i]));
    out.local_time_sup = std::max(out.local_time_sup, sup);
  }
  return out;
}

Correspondence contour_correspondence(const std::vector<std::uint32_t>& param_a,
                                      const std::vector<std::uint32_t>& param_b) {
  require(!param_a.empty() && !param_b.empty(), errc::missing_parameterization,
          "both sides need a contour parameterization");
  Correspondence c;
  std::set<std::pair<std::uint32_t, std::uint32_t>> dedup;
  const std::size_t steps = std::max(param_a.size(), param_b.size());
  auto at = [](const std::vector<std::uint32_t>& p, double s) {
    std::size_t idx = std::size_t(std::llround(s * double(p.size() - 1)));
    return p[std::min(idx, p.size() - 1)];
  };
  for (std::size_t k = 0; k < steps; ++k) {
    double s = steps > 1 ? double(k) / double(steps - 1) : 0.0;
    auto pr = std::make_pair(at(param_a, s), at(param_b, s));
    if (dedup.insert(pr).second) c.pairs.push_back(pr);
  }
  // First-occurrence coverage for points a coarse grid could miss.
  for (std::size_t i = 0; i < param_a.size(); ++i) {
    double s = param_a.size() > 1 ? double(i) / double(param_a.size() - 1) : 0.0;
    auto pr = std::make_pair(param_a[i], at(param_b, s));
    if (dedup.insert(pr).second) c.pairs.push_back(pr);
  }
  for (std::size_t j = 0; j < param_b.size(); ++j) {
    double s = param_b.size() > 1 ? double(j) / double(param_b.size() - 1) : 0.0;
    auto pr = std::make_pair(at(param_a, s), param_b[j]);
    if (dedup.insert(pr).second) c.pairs.push_back(pr);
  }
  return c;
}

}  // namespace bl
