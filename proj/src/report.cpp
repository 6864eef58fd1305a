#include "gwplan/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <set>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "gwplan/netgraph.hpp"
#include "gwplan/orbital.hpp"
#include "json.hpp"

namespace gwplan {

using nlohmann::ordered_json;

RouteError::RouteError(int traffic, int t, const std::string& what)
    : std::runtime_error(fmt::format("traffic {} at t={}: {}", traffic, t, what)),
      traffic_(traffic),
      t_(t) {}

namespace {

Hop make_hop(const Edge& e) { return {e.id, e.kind, e.u, e.v, e.latency_s}; }

}  // namespace

std::vector<RouteTrace> extract_routes(const PlanningModel& model, const Solution& solution) {
  std::vector<RouteTrace> out;
  for (int t = 1; t <= model.steps(); ++t) {
    const SnapshotGraph& g = model.graph(t);
    for (const auto& d : model.scenario.traffic) {
      const int i = d.id;
      RouteTrace trace;
      trace.traffic = i;
      trace.t = t;
      trace.served = solution.b[t - 1][i] > kServedFlowMbps;
      if (!trace.served) {
        out.push_back(std::move(trace));
        continue;
      }
      const auto& assigned = solution.assigned_edges[t - 1][i];
      std::set<int> unused(assigned.begin(), assigned.end());
      const NodeRef target{NodeKind::kGateway, d.destination};
      NodeRef at{NodeKind::kUser, i};
      trace.nodes.push_back(at);
      while (!(at == target)) {
        int next = -1;
        int choices = 0;
        for (int e : g.out_edges(at)) {
          if (!unused.count(e)) continue;
          if (next < 0) next = e;
          ++choices;
        }
        if (next < 0)
          throw RouteError(i, t, fmt::format("assigned path stops at {}", to_string(at)));
        if (choices > 1) trace.branching = true;
        unused.erase(next);
        const Edge& e = g.edge(next);
        trace.hops.push_back(make_hop(e));
        at = e.v;
        trace.nodes.push_back(at);
      }
      for (int e : unused) trace.extra_hops.push_back(make_hop(g.edge(e)));
      if (!trace.extra_hops.empty()) trace.branching = true;
      for (const Hop& h : trace.hops) trace.total_latency_s += h.latency_s;
      for (const Hop& h : trace.extra_hops) trace.total_latency_s += h.latency_s;
      out.push_back(std::move(trace));
    }
  }
  return out;
}

CaseReport compute_metrics(const PlanningModel& model, const Solution& solution) {
  const Scenario& sc = model.scenario;
  CaseReport report;
  report.weights = sc.weights;
  report.has_solution = true;
  report.gateways = solution.selected_gateways();
  report.cost = solution.cost;

  const int steps = model.steps(), users = sc.num_users();
  double raw_sum = 0.0, served_sum = 0.0;
  int served_total = 0;
  for (int t = 1; t <= steps; ++t) {
    StepMetrics step;
    step.t = t;
    double sum = 0.0, served = 0.0;
    for (int i = 0; i < users; ++i) {
      const double latency = solution.latency_s[t - 1][i];
      const double b = solution.b[t - 1][i];
      report.traffic.push_back({i, t, b, solution.s[t - 1][i], latency});
      sum += latency;
      if (b > kServedFlowMbps) {
        served += latency;
        ++step.served;
      }
    }
    step.avg_latency_raw_s = users > 0 ? sum / users : 0.0;
    if (step.served > 0) step.avg_latency_served_s = served / step.served;
    raw_sum += sum;
    served_sum += served;
    served_total += step.served;
    report.steps.push_back(step);
  }
  if (steps > 0 && users > 0) report.mean_latency_raw_s = raw_sum / (steps * users);
  if (served_total > 0) report.mean_latency_served_s = served_sum / served_total;
  return report;
}

std::vector<WeightCase> reference_weight_cases() {
  return {{"A", 0.5, 0.4, 0.1}, {"B", 0.3, 0.4, 0.3}, {"C", 0.1, 0.4, 0.5}};
}

std::vector<WeightCase> parse_weight_cases(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(fmt::format("cases: {}", e.what()));
  }
  const YAML::Node list = root["cases"];
  if (!list || !list.IsSequence()) throw ParseError("cases: expected a 'cases' list");
  std::vector<WeightCase> out;
  for (std::size_t k = 0; k < list.size(); ++k) {
    const YAML::Node item = list[k];
    if (!item.IsMap()) throw ParseError(fmt::format("cases[{}]: expected a map", k));
    WeightCase c;
    c.label = fmt::format("case{}", k);
    for (const auto& kv : item) {
      const std::string key = kv.first.as<std::string>();
      try {
        if (key == "label") c.label = kv.second.as<std::string>();
        else if (key == "w_g") c.w_gateway = kv.second.as<double>();
        else if (key == "w_f") c.w_flow = kv.second.as<double>();
        else if (key == "w_l") c.w_latency = kv.second.as<double>();
        else throw ParseError(fmt::format("cases[{}]: unknown key {}", k, key));
      } catch (const YAML::Exception& e) {
        throw ParseError(fmt::format("cases[{}].{}: {}", k, key, e.what()));
      }
    }
    CostWeights w;
    w.w_gateway = c.w_gateway;
    w.w_flow = c.w_flow;
    w.w_latency = c.w_latency;
    validate(w);
    out.push_back(c);
  }
  if (out.empty()) throw ParseError("cases: list is empty");
  return out;
}

std::vector<WeightCase> load_weight_cases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_weight_cases(text);
}

CaseReport run_case(const Scenario& base, const WeightCase& weights, const SolverConfig& config,
                    CaseArtifacts* artifacts) {
  Scenario scenario = base;
  scenario.weights.w_gateway = weights.w_gateway;
  scenario.weights.w_flow = weights.w_flow;
  scenario.weights.w_latency = weights.w_latency;
  validate(scenario);

  const Ephemeris eph = propagate(scenario.constellation, scenario.time);
  PlanningModel model = build_model(scenario, build_all(scenario, eph));
  BnbResult result = solve_milp(model.milp, config);

  CaseReport report;
  if (result.has_incumbent()) {
    const Solution solution = extract_solution(model, result.incumbent);
    report = compute_metrics(model, solution);
    report.routes = extract_routes(model, solution);
  }
  report.label = weights.label;
  report.weights = scenario.weights;
  report.status = result.status;
  report.objective = result.objective;
  report.bound = result.bound;
  report.gap = result.gap;
  report.nodes = result.nodes;
  report.lp_iterations = result.lp_iterations;
  report.seconds = result.seconds;
  if (artifacts != nullptr) *artifacts = {std::move(model), std::move(result)};
  return report;
}

RunReport sweep(const Scenario& scenario, const std::vector<WeightCase>& cases,
                const SolverConfig& config) {
  std::vector<std::future<CaseReport>> jobs;
  for (const WeightCase& c : cases)
    jobs.push_back(std::async(std::launch::async,
                              [&scenario, c, &config] { return run_case(scenario, c, config); }));
  RunReport report;
  report.scenario_digest = scenario_digest(scenario);
  for (auto& job : jobs) report.cases.push_back(job.get());
  std::stable_sort(report.cases.begin(), report.cases.end(),
                   [](const CaseReport& a, const CaseReport& b) {
                     return a.weights.w_latency < b.weights.w_latency;
                   });
  return report;
}

// ---------------------------------------------------------------------------
// Output files

namespace {

ordered_json number_or_null(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(); }

ordered_json number_or_null(const std::optional<double>& v) {
  return v ? number_or_null(*v) : ordered_json();
}

std::string csv_number(double v) { return std::isfinite(v) ? fmt::format("{}", v) : ""; }

std::string csv_number(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

std::optional<double> to_ms(const std::optional<double>& s) {
  if (!s) return std::nullopt;
  return *s * 1000.0;
}

std::string join_ids(const std::vector<int>& ids, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < ids.size(); ++k) out += (k ? sep : "") + std::to_string(ids[k]);
  return out;
}

ordered_json hop_json(const Hop& h) {
  return {{"edge", h.edge},
          {"kind", to_string(h.kind)},
          {"from", to_string(h.from)},
          {"to", to_string(h.to)},
          {"latency_ms", h.latency_s * 1000.0}};
}

void write_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << text;
    out.flush();
    if (!out) throw std::runtime_error(fmt::format("write failed for {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::string metrics_json(const RunReport& report) {
  ordered_json j;
  j["schema"] = report.schema;
  j["scenario_digest"] = report.scenario_digest;
  auto& cases = j["cases"] = ordered_json::array();
  for (const CaseReport& c : report.cases) {
    ordered_json jc;
    jc["label"] = c.label;
    jc["weights"] = {{"w_g", c.weights.w_gateway},
                     {"w_f", c.weights.w_flow},
                     {"w_l", c.weights.w_latency},
                     {"latency_norm_s", c.weights.latency_norm_s}};
    jc["status"] = to_string(c.status);
    jc["has_solution"] = c.has_solution;
    jc["solver"] = {{"objective", number_or_null(c.objective)},
                    {"bound", number_or_null(c.bound)},
                    {"gap", number_or_null(c.gap)},
                    {"nodes", c.nodes},
                    {"lp_iterations", c.lp_iterations}};
    jc["gateways"] = c.gateways;
    jc["active_gateways"] = c.gateways.size();
    jc["J_g"] = c.cost.gateways;
    jc["J_f"] = c.cost.flow_gap;
    jc["J_l"] = c.cost.latency;
    jc["J"] = c.cost.total;
    jc["mean_latency_ms_raw"] = c.mean_latency_raw_s * 1000.0;
    jc["mean_latency_ms_served"] = number_or_null(to_ms(c.mean_latency_served_s));
    auto& steps = jc["steps"] = ordered_json::array();
    for (const StepMetrics& s : c.steps) {
      steps.push_back({{"t", s.t},
                       {"avg_latency_ms_raw", s.avg_latency_raw_s * 1000.0},
                       {"avg_latency_ms_served", number_or_null(to_ms(s.avg_latency_served_s))},
                       {"served", s.served}});
    }
    auto& traffic = jc["traffic"] = ordered_json::array();
    for (const TrafficMetrics& m : c.traffic) {
      traffic.push_back({{"i", m.traffic},
                         {"t", m.t},
                         {"b", m.b},
                         {"s", m.s},
                         {"latency_ms", m.latency_s * 1000.0}});
    }
    cases.push_back(std::move(jc));
  }
  return j.dump(2) + "\n";
}

std::string latency_series_csv(const RunReport& report) {
  std::string out = "schema,case,t,avg_latency_ms_raw,avg_latency_ms_served,served\n";
  for (const CaseReport& c : report.cases) {
    for (const StepMetrics& s : c.steps) {
      out += fmt::format("1,{},{},{},{},{}\n", c.label, s.t, csv_number(s.avg_latency_raw_s * 1000.0),
                         csv_number(to_ms(s.avg_latency_served_s)), s.served);
    }
  }
  return out;
}

std::string routes_jsonl(const RunReport& report) {
  std::string out;
  for (const CaseReport& c : report.cases) {
    for (const RouteTrace& r : c.routes) {
      if (!r.served) continue;
      ordered_json j;
      j["schema"] = 1;
      j["case"] = c.label;
      j["traffic"] = r.traffic;
      j["t"] = r.t;
      auto& nodes = j["nodes"] = ordered_json::array();
      for (const NodeRef& n : r.nodes) nodes.push_back(to_string(n));
      auto& hops = j["hops"] = ordered_json::array();
      for (const Hop& h : r.hops) hops.push_back(hop_json(h));
      j["branching"] = r.branching;
      if (r.branching) {
        auto& extra = j["extra_hops"] = ordered_json::array();
        for (const Hop& h : r.extra_hops) extra.push_back(hop_json(h));
      }
      j["total_latency_ms"] = r.total_latency_s * 1000.0;
      out += j.dump() + "\n";
    }
  }
  return out;
}

std::string comparison_csv(const RunReport& report) {
  std::string out =
      "schema,case,w_g,w_f,w_l,status,active_gateways,gateway_ids,mean_latency_ms_raw,"
      "mean_latency_ms_served,J_g,J_f,J_l,J,gap\n";
  for (const CaseReport& c : report.cases) {
    out += fmt::format("1,{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", c.label, c.weights.w_gateway,
                       c.weights.w_flow, c.weights.w_latency, to_string(c.status),
                       c.gateways.size(), join_ids(c.gateways, ";"),
                       c.has_solution ? csv_number(c.mean_latency_raw_s * 1000.0) : "",
                       csv_number(to_ms(c.mean_latency_served_s)),
                       c.has_solution ? csv_number(c.cost.gateways) : "",
                       c.has_solution ? csv_number(c.cost.flow_gap) : "",
                       c.has_solution ? csv_number(c.cost.latency) : "",
                       c.has_solution ? csv_number(c.cost.total) : "", csv_number(c.gap));
  }
  return out;
}

void emit(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_atomically(dir / "metrics.json", metrics_json(report));
  write_atomically(dir / "latency_series.csv", latency_series_csv(report));
  write_atomically(dir / "routes.jsonl", routes_jsonl(report));
  write_atomically(dir / "comparison.csv", comparison_csv(report));
}

}  // namespace gwplan
