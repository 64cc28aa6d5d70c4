#include "io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace bl::io {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), errc::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), errc::io_error, "cannot write " + tmp);
    out << content;
  }
  require(std::rename(tmp.c_str(), path.c_str()) == 0, errc::io_error, "cannot rename to " + path);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string graph_to_text(const GraphSample& g) {
  std::ostringstream ss;
  ss << g.n << " " << g.edges.size() << "\n";
  for (const Edge& e : g.edges) ss << e.u << " " << e.v << " " << format_double(e.w) << "\n";
  return ss.str();
}

std::string graph_to_text(const WeightedGraph& g) {
  GraphSample s;
  s.n = g.n_vertices();
  s.edges = g.edges();
  s.multigraph = g.is_multigraph();
  return graph_to_text(s);
}

GraphSample graph_sample_from_text(const std::string& text) {
  std::istringstream ss(text);
  GraphSample g;
  std::size_t m = 0;
  require(bool(ss >> g.n >> m), errc::parse_error, "graph header must be 'n m'");
  g.edges.reserve(m);
  std::set<std::pair<vertex_id, vertex_id>> seen;
  for (std::size_t i = 0; i < m; ++i) {
    Edge e{};
    require(bool(ss >> e.u >> e.v >> e.w), errc::parse_error,
            "edge line " + std::to_string(i) + " malformed");
    if (e.u == e.v) g.multigraph = true;
    auto key = std::minmax(e.u, e.v);
    if (!seen.insert({key.first, key.second}).second) g.multigraph = true;
    g.edges.push_back(e);
  }
  return g;
}

WeightedGraph graph_from_text(const std::string& text) {
  GraphSample s = graph_sample_from_text(text);
  return WeightedGraph::build(s.n, s.edges, s.multigraph);
}

std::string tree_to_text(const PlaneTree& t) {
  std::ostringstream ss;
  ss << t.n_vertices() << ";";
  for (vertex_id v = 1; v < t.n_vertices(); ++v) ss << " " << t.parent[v];
  ss << "\n";
  return ss.str();
}

PlaneTree tree_from_text(const std::string& text) {
  std::istringstream ss(text);
  std::uint32_t n = 0;
  char sep = 0;
  require(bool(ss >> n >> sep) && sep == ';', errc::parse_error, "tree header must be 'n;'");
  require(n >= 1, errc::parse_error, "empty tree");
  PlaneTree t;
  t.parent.assign(n, 0);
  t.children.assign(n, {});
  for (vertex_id v = 1; v < n; ++v) {
    require(bool(ss >> t.parent[v]), errc::parse_error, "missing parent entry");
    require(t.parent[v] < v, errc::parse_error, "parents must precede children");
    t.children[t.parent[v]].push_back(v);
  }
  return t;
}

std::string excursion_to_csv(const Excursion& e) {
  std::ostringstream ss;
  ss << "# zeta=" << format_double(e.zeta) << " n=" << e.grid_n << "\n";
  for (double v : e.values) ss << format_double(v) << "\n";
  return ss.str();
}

Excursion excursion_from_csv(const std::string& text) {
  std::istringstream ss(text);
  std::string header;
  std::getline(ss, header);
  Excursion e;
  require(std::sscanf(header.c_str(), "# zeta=%lf n=%u", &e.zeta, &e.grid_n) == 2,
          errc::parse_error, "excursion header must be '# zeta=<z> n=<N>'");
  e.values.resize(e.grid_n + 1);
  for (std::uint32_t i = 0; i <= e.grid_n; ++i)
    require(bool(ss >> e.values[i]), errc::parse_error, "missing excursion value");
  return e;
}

std::string quadruple_to_json(const Quadruple& q) {
  json j;
  j["n"] = q.space.n;
  j["distances"] = json::array();
  for (std::uint32_t i = 0; i < q.space.n; ++i) {
    json row = json::array();
    for (std::uint32_t k = 0; k < q.space.n; ++k) row.push_back(q.space.at(i, k));
    j["distances"].push_back(row);
  }
  j["mass"] = q.mass;
  j["path"] = {{"times", q.path.times}, {"values", q.path.values}, {"horizon", q.path.horizon}};
  j["time_grid"] = q.time_grid;
  j["local_times"] = q.local_times;
  j["root"] = q.root;
  return j.dump(2) + "\n";
}

Quadruple quadruple_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    fail(errc::parse_error, std::string("quadruple json: ") + ex.what());
  }
  try {
    Quadruple q;
    std::uint32_t n = j.at("n").get<std::uint32_t>();
    q.space = DistanceMatrix::zero(n);
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t k = 0; k < n; ++k)
        q.space.at(i, k) = j.at("distances").at(i).at(k).get<double>();
    q.mass = j.at("mass").get<std::vector<double>>();
    q.path.times = j.at("path").at("times").get<std::vector<double>>();
    q.path.values = j.at("path").at("values").get<std::vector<std::uint32_t>>();
    q.path.horizon = j.at("path").at("horizon").get<double>();
    q.time_grid = j.at("time_grid").get<std::vector<double>>();
    q.local_times = j.at("local_times").get<std::vector<std::vector<double>>>();
    q.root = j.at("root").get<std::uint32_t>();
    require(q.mass.size() == n && q.local_times.size() == n, errc::parse_error,
            "quadruple arrays must match n");
    return q;
  } catch (const json::exception& ex) {
    fail(errc::parse_error, std::string("quadruple json: ") + ex.what());
  }
}

namespace {

const std::vector<std::string> kPlanKeys{"model",       "sizes",      "epsilon",
                                         "replicates",  "master_seed", "lambda",
                                         "degree_table", "t_max_factor", "threads"};

std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::string plan_to_json(const ExperimentPlan& plan) {
  json j;
  j["model"] = model_name(plan.model);
  j["sizes"] = plan.sizes;
  j["epsilon"] = plan.epsilon;
  j["replicates"] = plan.replicates;
  j["master_seed"] = plan.master_seed;
  j["lambda"] = plan.lambda;
  if (!plan.degree_table.empty()) j["degree_table"] = plan.degree_table;
  j["t_max_factor"] = plan.t_max_factor;
  j["threads"] = plan.threads;
  return j.dump(2) + "\n";
}

ExperimentPlan plan_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    fail(errc::parse_error, std::string("plan json: ") + ex.what());
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(kPlanKeys.begin(), kPlanKeys.end(), it.key()) == kPlanKeys.end()) {
      std::string nearest = kPlanKeys[0];
      std::size_t best = std::size_t(-1);
      for (const auto& k : kPlanKeys) {
        std::size_t d = edit_distance(it.key(), k);
        if (d < best) {
          best = d;
          nearest = k;
        }
      }
      fail(errc::unknown_key, "unknown plan key '" + it.key() + "' (did you mean '" + nearest + "'?)");
    }
  }
  try {
    ExperimentPlan plan;
    auto model = model_from_name(j.at("model").get<std::string>());
    require(model.has_value(), errc::parse_error, "unknown model name");
    plan.model = *model;
    plan.sizes = j.at("sizes").get<std::vector<std::uint32_t>>();
    plan.epsilon = j.value("epsilon", 0.3);
    plan.replicates = j.value("replicates", 100u);
    plan.master_seed = j.value("master_seed", std::uint64_t(0));
    plan.lambda = j.value("lambda", 0.0);
    if (j.contains("degree_table")) plan.degree_table = j["degree_table"].get<std::vector<double>>();
    plan.t_max_factor = j.value("t_max_factor", 1.0);
    plan.threads = j.value("threads", 0u);
    return plan;
  } catch (const json::exception& ex) {
    fail(errc::parse_error, std::string("plan json: ") + ex.what());
  }
}

namespace {

std::string opt_to_string(const std::optional<std::uint64_t>& v) {
  return v ? std::to_string(*v) : std::string("timeout");
}

}  // namespace

std::string scaling_records_csv(const std::vector<ReplicateRecord>& records) {
  std::ostringstream ss;
  ss << "# schema=blanket-lab/scaling.v1\n";
  ss << "size,replicate,seed,tau_blanket,cover_time,instance_vertices\n";
  for (const auto& r : records)
    ss << r.size << "," << r.index << "," << r.seed << "," << opt_to_string(r.tau_blanket) << ","
       << opt_to_string(r.cover_time) << "," << r.instance_vertices << "\n";
  return ss.str();
}

std::string scaling_records_jsonl(const std::vector<ReplicateRecord>& records) {
  std::ostringstream ss;
  for (const auto& r : records) {
    json j;
    j["size"] = r.size;
    j["replicate"] = r.index;
    j["seed"] = r.seed;
    if (r.tau_blanket)
      j["tau_blanket"] = *r.tau_blanket;
    else
      j["tau_blanket"] = nullptr;
    if (r.cover_time)
      j["cover_time"] = *r.cover_time;
    else
      j["cover_time"] = nullptr;
    j["instance_vertices"] = r.instance_vertices;
    ss << j.dump() << "\n";
  }
  return ss.str();
}

std::string blanket_rows_csv(const std::vector<BlanketRow>& rows) {
  std::ostringstream ss;
  ss << "# schema=blanket-lab/blanket.v1\n";
  ss << "replicate,start,epsilon,tau_blanket,cover_time,seed\n";
  for (const auto& r : rows)
    ss << r.replicate << "," << r.start << "," << format_double(r.epsilon) << ","
       << opt_to_string(r.tau_blanket) << "," << opt_to_string(r.cover_time) << "," << r.seed
       << "\n";
  return ss.str();
}

std::string manifest_json(const std::string& command, const std::string& config_json,
                          const std::vector<ManifestEntry>& outputs) {
  json j;
  j["tool"] = "blanket-lab";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["seed_scheme"] = kSeedScheme;
  j["config"] = json::parse(config_json);
  j["outputs"] = json::array();
  for (const auto& e : outputs) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, e.checksum);
    j["outputs"].push_back({{"file", e.file}, {"fnv1a64", buf}});
  }
  return j.dump(2) + "\n";
}

namespace {

constexpr double kW = 640.0, kH = 420.0, kPad = 48.0;

double map_x(double v, double lo, double hi) {
  return kPad + (v - lo) / std::max(hi - lo, 1e-300) * (kW - 2 * kPad);
}
double map_y(double v, double lo, double hi) {
  return kH - kPad - (v - lo) / std::max(hi - lo, 1e-300) * (kH - 2 * kPad);
}

void svg_header(std::ostringstream& ss, const std::string& title) {
  ss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
     << "\">\n";
  ss << "<text x=\"" << kW / 2 << "\" y=\"20\" text-anchor=\"middle\">" << title << "</text>\n";
  ss << "<line class=\"axis\" x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad
     << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
  ss << "<line class=\"axis\" x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
     << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
}

}  // namespace

std::string svg_ecdf(std::vector<double> samples, const std::string& title) {
  require(!samples.empty(), errc::invalid_argument, "empty sample set");
  std::sort(samples.begin(), samples.end());
  const double lo = samples.front(), hi = samples.back();
  std::ostringstream ss;
  svg_header(ss, title);
  // One horizontal segment per distinct value; vertical risers drawn apart.
  std::size_t i = 0;
  double prev_x = lo;
  while (i < samples.size()) {
    std::size_t j = i;
    while (j < samples.size() && samples[j] == samples[i]) ++j;
    double level = double(j) / double(samples.size());
    double x0 = map_x(samples[i], lo, hi);
    double x1 = (j < samples.size()) ? map_x(samples[j], lo, hi) : map_x(hi, lo, hi);
    if (i > 0) {
      double prev_level = double(i) / double(samples.size());
      ss << "<line class=\"riser\" x1=\"" << x0 << "\" y1=\"" << map_y(prev_level, 0, 1)
         << "\" x2=\"" << x0 << "\" y2=\"" << map_y(level, 0, 1)
         << "\" stroke=\"gray\" stroke-dasharray=\"2\"/>\n";
    }
    ss << "<line class=\"step\" x1=\"" << x0 << "\" y1=\"" << map_y(level, 0, 1) << "\" x2=\""
       << std::max(x1, x0 + 2.0) << "\" y2=\"" << map_y(level, 0, 1)
       << "\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
    prev_x = x1;
    i = j;
  }
  (void)prev_x;
  ss << "</svg>\n";
  return ss.str();
}

std::string svg_loglog(const std::vector<double>& x, const std::vector<double>& y,
                       const LinearFit& fit, const std::string& title) {
  require(x.size() == y.size() && !x.empty(), errc::invalid_argument, "bad plot input");
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    lx[i] = std::log10(x[i]);
    ly[i] = std::log10(y[i]);
  }
  double xlo = *std::min_element(lx.begin(), lx.end());
  double xhi = *std::max_element(lx.begin(), lx.end());
  double ylo = *std::min_element(ly.begin(), ly.end());
  double yhi = *std::max_element(ly.begin(), ly.end());
  std::ostringstream ss;
  svg_header(ss, title);
  for (std::size_t i = 0; i < lx.size(); ++i)
    ss << "<circle class=\"pt\" cx=\"" << map_x(lx[i], xlo, xhi) << "\" cy=\""
       << map_y(ly[i], ylo, yhi) << "\" r=\"3\" fill=\"crimson\"/>\n";
  // Fit computed in natural log; convert to log10 for drawing.
  auto fit_y = [&](double lx10) {
    double ln_x = lx10 * std::log(10.0);
    double ln_y = fit.intercept + fit.slope * ln_x;
    return ln_y / std::log(10.0);
  };
  ss << "<line class=\"fit\" x1=\"" << map_x(xlo, xlo, xhi) << "\" y1=\""
     << map_y(fit_y(xlo), ylo, yhi) << "\" x2=\"" << map_x(xhi, xlo, xhi) << "\" y2=\""
     << map_y(fit_y(xhi), ylo, yhi) << "\" stroke=\"black\"/>\n";
  ss << "</svg>\n";
  return ss.str();
}

}  // namespace bl::io
