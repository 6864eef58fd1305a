#include <algorithm>
#include <cmath>

#include "gwplan/solver.hpp"

namespace gwplan {

const char* to_string(Branching branching) {
  return branching == Branching::kPseudoCost ? "pseudo-cost" : "most-fractional";
}

const char* to_string(NodeOrder order) {
  return order == NodeOrder::kDepthFirst ? "depth-first" : "best-bound";
}

std::optional<NodeOrder> parse_node_order(const std::string& text) {
  if (text == "best-bound" || text == "bestbound" || text == "BestBound")
    return NodeOrder::kBestBound;
  if (text == "depth-first" || text == "depthfirst" || text == "DepthFirst")
    return NodeOrder::kDepthFirst;
  return std::nullopt;
}

std::optional<Branching> parse_branching(const std::string& text) {
  if (text == "most-fractional" || text == "MostFractional") return Branching::kMostFractional;
  if (text == "pseudo-cost" || text == "PseudoCost") return Branching::kPseudoCost;
  return std::nullopt;
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
  }
  return "?";
}

const char* to_string(MipStatus status) {
  switch (status) {
    case MipStatus::kOptimal: return "Optimal";
    case MipStatus::kInfeasible: return "Infeasible";
    case MipStatus::kTimeLimit: return "TimeLimit";
  }
  return "?";
}

double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent) || !std::isfinite(bound)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

SparseLp to_sparse_lp(const MilpModel& model) {
  const int n = model.num_columns();
  std::vector<std::vector<std::pair<int, double>>> by_column(n);
  SparseLp lp;
  lp.num_rows = model.num_rows();
  for (int r = 0; r < model.num_rows(); ++r) {
    const LinConstraint& row = model.constraints()[r];
    for (const Term& term : row.terms) {
      if (term.coef != 0.0) by_column[term.column].emplace_back(r, term.coef);
    }
    lp.row_lb.push_back(row.sense == Sense::kLe ? -kInf : row.rhs);
    lp.row_ub.push_back(row.sense == Sense::kGe ? kInf : row.rhs);
  }
  std::vector<double> cost(n, 0.0);
  for (const Term& term : model.objective()) cost[term.column] += term.coef;
  for (int j = 0; j < n; ++j) {
    const Column& c = model.column(j);
    lp.add_column(cost[j], c.lb, c.ub, by_column[j]);
  }
  return lp;
}

SimplexOptions simplex_options(const SolverConfig& config) {
  SimplexOptions opt;
  opt.primal_tol = std::min(1e-9, config.feasibility_tol);
  opt.dual_tol = 1e-9;
  return opt;
}

LpResult solve_lp(const MilpModel& model, const SolverConfig& config) {
  if (!(config.feasibility_tol > 0.0)) throw std::invalid_argument("feasibility_tol must be > 0");
  Simplex simplex(to_sparse_lp(model), simplex_options(config));
  LpResult result;
  switch (simplex.solve_primal()) {
    case SimplexStatus::kOptimal:
      result.status = LpStatus::kOptimal;
      result.values = simplex.primal_values();
      result.objective = model.objective_value(result.values);
      break;
    case SimplexStatus::kInfeasible: result.status = LpStatus::kInfeasible; break;
    case SimplexStatus::kUnbounded: result.status = LpStatus::kUnbounded; break;
    default: throw NumericalError("simplex iteration limit reached");
  }
  result.iterations = simplex.iterations();
  return result;
}

}  // namespace gwplan
