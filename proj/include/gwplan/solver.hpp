// LP relaxation and branch-and-bound over a MilpModel.

#ifndef GWPLAN_SOLVER_HPP_
#define GWPLAN_SOLVER_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwplan/milp.hpp"
#include "gwplan/simplex.hpp"

namespace gwplan {

enum class Branching { kMostFractional, kPseudoCost };
enum class NodeOrder { kBestBound, kDepthFirst };

const char* to_string(Branching branching);
const char* to_string(NodeOrder order);
std::optional<NodeOrder> parse_node_order(const std::string& text);
std::optional<Branching> parse_branching(const std::string& text);

struct SolverConfig {
  double feasibility_tol = 1e-7;
  double integrality_tol = 1e-6;
  double mip_gap = 1e-6;
  std::optional<long> node_limit;
  std::optional<double> time_limit_s;
  Branching branching = Branching::kMostFractional;
  NodeOrder node_order = NodeOrder::kBestBound;
  bool presolve = true;
  // Re-solve the continuous part with integers fixed before accepting an
  // incumbent, so reported values satisfy rows to LP precision.
  bool polish = true;
  // Record (nodes, bound, incumbent) after every node.
  bool record_trace = false;
  // Candidate starting incumbent; ignored unless it passes check_solution.
  std::vector<double> start;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };
const char* to_string(LpStatus status);

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  std::vector<double> values;
  long iterations = 0;
};

// Computational form of the continuous relaxation.
SparseLp to_sparse_lp(const MilpModel& model);
SimplexOptions simplex_options(const SolverConfig& config);

// Solves the continuous relaxation (integrality dropped). Throws
// NumericalError if the simplex cannot reach a verdict.
LpResult solve_lp(const MilpModel& model, const SolverConfig& config = {});

enum class MipStatus { kOptimal, kInfeasible, kTimeLimit };
const char* to_string(MipStatus status);

struct TracePoint {
  long nodes = 0;
  double bound = 0.0;
  double incumbent = kInf;
};

struct BnbResult {
  MipStatus status = MipStatus::kInfeasible;
  std::vector<double> incumbent;  // empty if none was found
  double objective = kInf;        // incumbent objective
  double bound = -kInf;           // proven lower bound
  double gap = kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
  std::vector<TracePoint> trace;

  bool has_incumbent() const { return !incumbent.empty(); }
};

BnbResult solve_milp(const MilpModel& model, const SolverConfig& config = {});

// Relative gap |incumbent - bound| / max(1, |incumbent|).
double relative_gap(double incumbent, double bound);

struct Violation {
  std::string name;  // row name, "bound:<col>" or "integrality:<col>"
  double amount = 0.0;
};

// Every row, bound and integrality requirement violated by more than `tol`.
std::vector<Violation> check_solution(const MilpModel& model, std::span<const double> values,
                                      double tol = 1e-6);

// Root presolve: bound propagation over all rows and coefficient tightening
// of inequality rows on binary columns. Columns and rows keep their indices,
// so solutions of the result are solutions of the input. Returns nullopt if
// propagation proves infeasibility.
std::optional<MilpModel> presolve(const MilpModel& model);

}  // namespace gwplan

#endif  // GWPLAN_SOLVER_HPP_
