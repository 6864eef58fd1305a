// Solutions turned into routes, metrics and output files, plus the
// end-to-end pipeline used by the CLI.

#ifndef GWPLAN_REPORT_HPP_
#define GWPLAN_REPORT_HPP_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwplan/milp.hpp"
#include "gwplan/solver.hpp"

namespace gwplan {

struct Hop {
  int edge = 0;
  EdgeKind kind = EdgeKind::kUserLink;
  NodeRef from, to;
  double latency_s = 0.0;
};

struct RouteTrace {
  int traffic = 0;
  int t = 0;
  bool served = false;
  // Path from the user to its destination gateway. When the assigned edges
  // fork, the path follows the lowest edge id and the remaining assigned
  // edges go to extra_hops.
  std::vector<NodeRef> nodes;
  std::vector<Hop> hops;
  std::vector<Hop> extra_hops;
  bool branching = false;
  double total_latency_s = 0.0;  // over hops and extra_hops
};

class RouteError : public std::runtime_error {
 public:
  RouteError(int traffic, int t, const std::string& what);
  int traffic() const { return traffic_; }
  int t() const { return t_; }

 private:
  int traffic_, t_;
};

// One trace per (traffic, step), step-major.
std::vector<RouteTrace> extract_routes(const PlanningModel& model, const Solution& solution);

struct StepMetrics {
  int t = 0;
  double avg_latency_raw_s = 0.0;     // unserved traffic counted as 0
  std::optional<double> avg_latency_served_s;  // served traffic only
  int served = 0;
};

struct TrafficMetrics {
  int traffic = 0;
  int t = 0;
  double b = 0.0;
  double s = 0.0;
  double latency_s = 0.0;
};

struct CaseReport {
  std::string label;
  CostWeights weights;
  MipStatus status = MipStatus::kInfeasible;
  bool has_solution = false;
  double objective = kInf;  // solver incumbent objective
  double bound = -kInf;
  double gap = kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;  // wall time; not written to metrics.json

  std::vector<int> gateways;
  CostBreakdown cost;
  double mean_latency_raw_s = 0.0;
  std::optional<double> mean_latency_served_s;
  std::vector<StepMetrics> steps;
  std::vector<TrafficMetrics> traffic;
  std::vector<RouteTrace> routes;
};

struct RunReport {
  int schema = 1;
  std::string scenario_digest;
  std::vector<CaseReport> cases;
};

// Traffic counts as served when its allocated flow exceeds this (Mbps).
inline constexpr double kServedFlowMbps = 1e-6;

// Metrics from raw solution values; solver fields are left untouched.
CaseReport compute_metrics(const PlanningModel& model, const Solution& solution);

struct WeightCase {
  std::string label;
  double w_gateway = 0.0, w_flow = 0.0, w_latency = 0.0;
};

// Cases A, B and C: w_f fixed at 0.4 while weight moves from w_g to w_l.
std::vector<WeightCase> reference_weight_cases();

// YAML: cases: [{label: A, w_g: 0.5, w_f: 0.4, w_l: 0.1}, ...]
std::vector<WeightCase> load_weight_cases(const std::filesystem::path& path);
std::vector<WeightCase> parse_weight_cases(const std::string& text);

struct CaseArtifacts {
  PlanningModel model;
  BnbResult result;
};

// propagate -> snapshots -> model -> solve -> metrics. TimeLimit and
// Infeasible are reported in the result, not thrown.
CaseReport run_case(const Scenario& scenario, const WeightCase& weights,
                    const SolverConfig& config, CaseArtifacts* artifacts = nullptr);

// Cases run concurrently; the report lists them sorted by w_latency.
RunReport sweep(const Scenario& scenario, const std::vector<WeightCase>& cases,
                const SolverConfig& config);

std::string metrics_json(const RunReport& report);
std::string latency_series_csv(const RunReport& report);
std::string routes_jsonl(const RunReport& report);
std::string comparison_csv(const RunReport& report);

// Writes the four files above into dir (created if needed); each file is
// written to a temporary name and renamed into place.
void emit(const RunReport& report, const std::filesystem::path& dir);

}  // namespace gwplan

#endif  // GWPLAN_REPORT_HPP_
