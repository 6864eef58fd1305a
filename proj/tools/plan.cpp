// plan: command-line front end.
//
//   plan run      --scenario FILE [--weights wg,wf,wl] [--mps-out FILE] --out DIR
//   plan sweep    --scenario FILE --cases FILE --out DIR
//   plan check    --model FILE.mps --assignment FILE
//   plan solve    --model FILE.mps [--assignment-out FILE]
//   plan scenario --preset default|desk --out FILE
//
// Exit codes: 0 optimal (or clean check), 2 stopped at a limit, 3 infeasible
// (or violated rows in check), 1 error.

#include <cstdio>
#include <exception>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gwplan/milp.hpp"
#include "gwplan/mps.hpp"
#include "gwplan/report.hpp"
#include "gwplan/scenario.hpp"
#include "gwplan/solver.hpp"

namespace {

using namespace gwplan;

constexpr int kExitOptimal = 0;
constexpr int kExitError = 1;
constexpr int kExitLimit = 2;
constexpr int kExitInfeasible = 3;

int exit_code(MipStatus status) {
  switch (status) {
    case MipStatus::kOptimal: return kExitOptimal;
    case MipStatus::kTimeLimit: return kExitLimit;
    case MipStatus::kInfeasible: return kExitInfeasible;
  }
  return kExitError;
}

struct SolverFlags {
  double time_limit = 0.0;
  long node_limit = 0;
  std::string node_order = "best-bound";
  std::string branching = "most-fractional";
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  double mip_gap = 1e-6;

  void attach(CLI::App* app) {
    app->add_option("--time-limit", time_limit, "Wall-clock limit in seconds (0 = none)");
    app->add_option("--node-limit", node_limit, "Branch-and-bound node limit (0 = none)");
    app->add_option("--node-order", node_order, "best-bound or depth-first")
        ->check(CLI::IsMember({"best-bound", "depth-first"}));
    app->add_option("--branching", branching, "most-fractional or pseudo-cost")
        ->check(CLI::IsMember({"most-fractional", "pseudo-cost"}));
    app->add_option("--feasibility-tol", feasibility_tol)->check(CLI::PositiveNumber);
    app->add_option("--integrality-tol", integrality_tol)->check(CLI::PositiveNumber);
    app->add_option("--mip-gap", mip_gap)->check(CLI::PositiveNumber);
  }

  SolverConfig config() const {
    SolverConfig c;
    if (time_limit > 0) c.time_limit_s = time_limit;
    if (node_limit > 0) c.node_limit = node_limit;
    c.node_order = *parse_node_order(node_order);
    c.branching = *parse_branching(branching);
    c.feasibility_tol = feasibility_tol;
    c.integrality_tol = integrality_tol;
    c.mip_gap = mip_gap;
    return c;
  }
};

WeightCase parse_weights(const std::string& text) {
  WeightCase w;
  w.label = "run";
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  if (!(in >> w.w_gateway >> c1 >> w.w_flow >> c2 >> w.w_latency) || c1 != ',' || c2 != ',' ||
      !(in >> std::ws).eof())
    throw CLI::ValidationError("--weights", "expected wg,wf,wl");
  return w;
}

void print_case(const CaseReport& c) {
  fmt::print("case {}: status={} objective={} gap={} nodes={}\n", c.label, to_string(c.status),
             c.objective, c.gap, c.nodes);
  if (!c.has_solution) return;
  std::string ids;
  for (int g : c.gateways) ids += (ids.empty() ? "" : ",") + std::to_string(g);
  fmt::print("  gateways [{}]  J_g={} J_f={} J_l={} J={}\n", ids, c.cost.gateways, c.cost.flow_gap,
             c.cost.latency, c.cost.total);
  fmt::print("  mean latency {:.3f} ms (all users)\n", c.mean_latency_raw_s * 1000.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gateway placement and routing planner"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, weights_text, mps_out, cases_path, model_path,
      assignment_path, assignment_out, preset = "default";
  double check_tol = 1e-7;
  SolverFlags run_flags, sweep_flags, solve_flags;

  CLI::App* run = app.add_subcommand("run", "Solve one weight case and write reports");
  run->add_option("--scenario", scenario_path, "Scenario YAML")->required()->check(CLI::ExistingFile);
  run->add_option("--weights", weights_text, "w_g,w_f,w_l (default: scenario weights)");
  run->add_option("--mps-out", mps_out, "Also write the model in MPS format");
  run->add_option("--out", out_dir, "Output directory")->required();
  run_flags.attach(run);

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "Solve several weight cases");
  sweep_cmd->add_option("--scenario", scenario_path)->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--cases", cases_path, "Weight cases YAML")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out_dir)->required();
  sweep_flags.attach(sweep_cmd);

  CLI::App* check = app.add_subcommand("check", "Verify an assignment against an MPS model");
  check->add_option("--model", model_path, "MPS file")->required()->check(CLI::ExistingFile);
  check->add_option("--assignment", assignment_path, "name value file")->required()->check(CLI::ExistingFile);
  check->add_option("--tol", check_tol, "Violation tolerance")->check(CLI::PositiveNumber);

  CLI::App* solve = app.add_subcommand("solve", "Solve an MPS model");
  solve->add_option("--model", model_path, "MPS file")->required()->check(CLI::ExistingFile);
  solve->add_option("--assignment-out", assignment_out, "Write the incumbent here");
  solve_flags.attach(solve);

  CLI::App* scen = app.add_subcommand("scenario", "Write a built-in scenario as YAML");
  scen->add_option("--preset", preset, "default or desk")->check(CLI::IsMember({"default", "desk"}));
  scen->add_option("--out", out_dir, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const Scenario scenario = load_scenario(scenario_path);
      WeightCase weights{"run", scenario.weights.w_gateway, scenario.weights.w_flow,
                         scenario.weights.w_latency};
      if (!weights_text.empty()) weights = parse_weights(weights_text);
      CaseArtifacts artifacts;
      RunReport report;
      report.scenario_digest = scenario_digest(scenario);
      report.cases.push_back(run_case(scenario, weights, run_flags.config(), &artifacts));
      emit(report, out_dir);
      if (artifacts.result.has_incumbent())
        write_assignment(artifacts.model.milp, artifacts.result.incumbent,
                         std::filesystem::path(out_dir) / "assignment.txt");
      if (!mps_out.empty()) write_mps(artifacts.model.milp, mps_out);
      print_case(report.cases.front());
      return exit_code(report.cases.front().status);
    }
    if (*sweep_cmd) {
      const Scenario scenario = load_scenario(scenario_path);
      const RunReport report = sweep(scenario, load_weight_cases(cases_path), sweep_flags.config());
      emit(report, out_dir);
      int code = kExitOptimal;
      for (const CaseReport& c : report.cases) {
        print_case(c);
        code = std::max(code, exit_code(c.status));
      }
      return code;
    }
    if (*check) {
      const MilpModel model = read_mps(model_path);
      const auto values = assignment_values(model, read_assignment(assignment_path));
      const auto violations = check_solution(model, values, check_tol);
      for (const Violation& v : violations) fmt::print("{} {}\n", v.name, v.amount);
      fmt::print("{} violation(s); objective {}\n", violations.size(), model.objective_value(values));
      return violations.empty() ? kExitOptimal : kExitInfeasible;
    }
    if (*solve) {
      const MilpModel model = read_mps(model_path);
      const BnbResult result = solve_milp(model, solve_flags.config());
      fmt::print("status={} objective={} bound={} gap={} nodes={}\n", to_string(result.status),
                 result.objective, result.bound, result.gap, result.nodes);
      if (!assignment_out.empty() && result.has_incumbent())
        write_assignment(model, result.incumbent, assignment_out);
      return exit_code(result.status);
    }
    if (*scen) {
      save_scenario(preset == "desk" ? desk_scenario() : default_scenario(), out_dir);
      return kExitOptimal;
    }
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitError;
  }
  return kExitError;
}
