#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <set>

#include "gwplan/solver.hpp"

namespace gwplan {

// ---------------------------------------------------------------------------
// Presolve

namespace {

struct Activity {
  double finite = 0.0;  // sum of finite contributions
  int infinite = 0;     // number of infinite contributions
};

class Propagator {
 public:
  Propagator(std::vector<LinConstraint>& rows, std::vector<double>& lb, std::vector<double>& ub,
             const std::vector<bool>& integer)
      : rows_(rows), lb_(lb), ub_(ub), integer_(integer) {}

  // False when a row or bound pair is proven infeasible.
  bool run(int max_passes = 25) {
    for (int pass = 0; pass < max_passes; ++pass) {
      bool changed = false;
      for (const LinConstraint& row : rows_) {
        if (!propagate(row, changed)) return false;
      }
      if (!changed) break;
    }
    return true;
  }

 private:
  double min_contrib(const Term& t) const { return t.coef > 0 ? t.coef * lb_[t.column] : t.coef * ub_[t.column]; }
  double max_contrib(const Term& t) const { return t.coef > 0 ? t.coef * ub_[t.column] : t.coef * lb_[t.column]; }

  static void accumulate(Activity& act, double contrib) {
    if (std::isfinite(contrib)) act.finite += contrib;
    else ++act.infinite;
  }

  // Activity of the row without term t, or nullopt if unbounded.
  static std::optional<double> residual(const Activity& act, double contrib) {
    if (std::isfinite(contrib)) {
      if (act.infinite > 0) return std::nullopt;
      return act.finite - contrib;
    }
    if (act.infinite > 1) return std::nullopt;
    return act.finite;
  }

  bool tighten(int j, double new_lb, double new_ub, bool& changed) {
    if (integer_[j]) {
      new_lb = std::ceil(new_lb - 1e-6);
      new_ub = std::floor(new_ub + 1e-6);
    } else {
      new_lb -= 1e-9 * std::max(1.0, std::abs(new_lb));
      new_ub += 1e-9 * std::max(1.0, std::abs(new_ub));
    }
    auto improves = [](double old_value, double new_value) {
      return !std::isfinite(old_value) || std::abs(new_value - old_value) > 1e-7 * std::max(1.0, std::abs(old_value));
    };
    if (new_lb > lb_[j] && improves(lb_[j], new_lb)) {
      lb_[j] = new_lb;
      changed = true;
    }
    if (new_ub < ub_[j] && improves(ub_[j], new_ub)) {
      ub_[j] = new_ub;
      changed = true;
    }
    if (lb_[j] > ub_[j]) {
      if (lb_[j] > ub_[j] + 1e-6 * std::max(1.0, std::abs(ub_[j]))) return false;
      lb_[j] = ub_[j] = integer_[j] ? std::round(ub_[j]) : 0.5 * (lb_[j] + ub_[j]);
    }
    return true;
  }

  bool propagate(const LinConstraint& row, bool& changed) {
    Activity min_act, max_act;
    for (const Term& t : row.terms) {
      accumulate(min_act, min_contrib(t));
      accumulate(max_act, max_contrib(t));
    }
    const double tol = 1e-6 * std::max(1.0, std::abs(row.rhs));
    const bool upper = row.sense != Sense::kGe;  // activity <= rhs
    const bool lower = row.sense != Sense::kLe;  // activity >= rhs
    if (upper && min_act.infinite == 0 && min_act.finite > row.rhs + tol) return false;
    if (lower && max_act.infinite == 0 && max_act.finite < row.rhs - tol) return false;

    for (const Term& t : row.terms) {
      if (t.coef == 0.0) continue;
      const int j = t.column;
      double new_lb = -kInf, new_ub = kInf;
      if (upper) {
        if (auto rest = residual(min_act, min_contrib(t))) {
          const double bound = (row.rhs - *rest) / t.coef;
          (t.coef > 0 ? new_ub : new_lb) = bound;
        }
      }
      if (lower) {
        if (auto rest = residual(max_act, max_contrib(t))) {
          const double bound = (row.rhs - *rest) / t.coef;
          if (t.coef > 0) new_lb = std::max(new_lb, bound);
          else new_ub = std::min(new_ub, bound);
        }
      }
      if (new_lb == -kInf && new_ub == kInf) continue;
      if (!tighten(j, new_lb, new_ub, changed)) return false;
    }
    return true;
  }

  std::vector<LinConstraint>& rows_;
  std::vector<double>& lb_;
  std::vector<double>& ub_;
  const std::vector<bool>& integer_;
};

// On a row  sum a_j x_j <= rhs  with binary x_k: if the row cannot be tight
// for one value of x_k, shrink a_k (and rhs) until it can. The set of
// integer-feasible points is unchanged; the relaxation gets tighter.
void tighten_coefficients(LinConstraint& row, const std::vector<double>& lb,
                          const std::vector<double>& ub, const std::vector<bool>& integer) {
  if (row.sense == Sense::kEq) return;
  const double sign = row.sense == Sense::kLe ? 1.0 : -1.0;
  double rhs = sign * row.rhs;
  double max_act = 0.0;
  for (const Term& t : row.terms) {
    const double a = sign * t.coef;
    const double contrib = a > 0 ? a * ub[t.column] : a * lb[t.column];
    if (!std::isfinite(contrib)) return;
    max_act += contrib;
  }
  for (Term& t : row.terms) {
    const int j = t.column;
    if (!integer[j] || lb[j] != 0.0 || ub[j] != 1.0) continue;
    const double a = sign * t.coef;
    const double eps = 1e-9 * std::max({1.0, std::abs(rhs), std::abs(a)});
    if (max_act <= rhs + eps) break;  // row is redundant
    if (a > 0) {
      const double d = rhs - (max_act - a);
      if (d > eps) {
        t.coef = sign * (a - d);
        rhs -= d;
        max_act -= d;
      }
    } else if (a < 0) {
      const double d = rhs - (max_act + a);
      if (d > eps) t.coef = sign * (a + d);
    }
  }
  row.rhs = sign * rhs;
  std::erase_if(row.terms, [](const Term& t) { return t.coef == 0.0; });
}

}  // namespace

std::optional<MilpModel> presolve(const MilpModel& model) {
  const int n = model.num_columns();
  std::vector<double> lb(n), ub(n);
  std::vector<bool> integer(n);
  for (int j = 0; j < n; ++j) {
    const Column& c = model.column(j);
    integer[j] = c.is_binary();
    lb[j] = integer[j] ? std::max(0.0, std::ceil(c.lb - 1e-9)) : c.lb;
    ub[j] = integer[j] ? std::min(1.0, std::floor(c.ub + 1e-9)) : c.ub;
    if (lb[j] > ub[j]) return std::nullopt;
  }
  std::vector<LinConstraint> rows = model.constraints();
  Propagator propagator(rows, lb, ub, integer);
  if (!propagator.run()) return std::nullopt;
  for (LinConstraint& row : rows) tighten_coefficients(row, lb, ub, integer);
  if (!propagator.run()) return std::nullopt;

  MilpModel out;
  out.name = model.name;
  for (int j = 0; j < n; ++j) {
    Column c = model.column(j);
    c.lb = lb[j];
    c.ub = ub[j];
    out.add_column(std::move(c));
  }
  for (LinConstraint& row : rows) out.add_constraint(std::move(row));
  out.set_objective(model.objective(), model.objective_constant());
  return out;
}

// ---------------------------------------------------------------------------
// Branch and bound

namespace {

struct Fixing {
  int column;
  double value;
  std::shared_ptr<const Fixing> parent;
};

struct Node {
  long id = 0;
  double bound = -kInf;
  int depth = 0;
  std::shared_ptr<const Fixing> fixings;
  std::shared_ptr<const BasisState> basis;
  // Branching record for pseudo-cost updates.
  int branch_column = -1;
  bool branch_up = false;
  double branch_delta = 0.0;
  double parent_objective = 0.0;
};

class PseudoCosts {
 public:
  explicit PseudoCosts(int n) : sum_(2 * n, 0.0), count_(2 * n, 0) {}

  void update(int j, bool up, double delta, double gain) {
    if (delta <= 0.0) return;
    const int k = 2 * j + (up ? 1 : 0);
    sum_[k] += std::max(gain, 0.0) / delta;
    ++count_[k];
  }

  double estimate(int j, bool up) const {
    const int k = 2 * j + (up ? 1 : 0);
    if (count_[k] > 0) return sum_[k] / count_[k];
    double total = 0.0;
    long n = 0;
    for (std::size_t i = up ? 1 : 0; i < sum_.size(); i += 2) {
      total += sum_[i];
      n += count_[i];
    }
    return n > 0 ? total / n : 1.0;
  }

 private:
  std::vector<double> sum_;
  std::vector<long> count_;
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& original, const MilpModel& work, const SolverConfig& config)
      : original_(original),
        config_(config),
        simplex_(to_sparse_lp(work), simplex_options(config)),
        pseudo_(work.num_columns()) {
    for (int j = 0; j < work.num_columns(); ++j) {
      root_lb_.push_back(work.column(j).lb);
      root_ub_.push_back(work.column(j).ub);
      if (work.column(j).is_binary()) binaries_.push_back(j);
    }
  }

  BnbResult run();

 private:
  using Clock = std::chrono::steady_clock;

  void apply(const std::shared_ptr<const Fixing>& fixings);
  SimplexStatus solve_node(const Node& node);
  void consider(std::vector<double> values);
  std::vector<double> polish(std::vector<double> values);
  int choose_branch(const std::vector<double>& values) const;
  double prune_threshold() const {
    return objective_ - config_.mip_gap * std::max(1.0, std::abs(objective_));
  }
  void push(Node node);
  Node pop(bool plunge);
  double open_bound() const { return by_bound_.empty() ? kInf : by_bound_.begin()->first; }
  void record(long nodes);

  const MilpModel& original_;
  const SolverConfig& config_;
  Simplex simplex_;
  PseudoCosts pseudo_;
  std::vector<double> root_lb_, root_ub_;
  std::vector<int> binaries_;
  std::vector<int> applied_;
  const BasisState* loaded_basis_ = nullptr;

  std::map<long, Node> open_;
  std::set<std::pair<double, long>> by_bound_;
  long next_id_ = 0;

  std::vector<double> incumbent_;
  double objective_ = kInf;
  double reported_bound_ = -kInf;
  BnbResult result_;
};

void BranchAndBound::apply(const std::shared_ptr<const Fixing>& fixings) {
  for (int j : applied_) simplex_.set_col_bounds(j, root_lb_[j], root_ub_[j]);
  applied_.clear();
  for (const Fixing* f = fixings.get(); f != nullptr; f = f->parent.get()) {
    simplex_.set_col_bounds(f->column, f->value, f->value);
    applied_.push_back(f->column);
  }
}

SimplexStatus BranchAndBound::solve_node(const Node& node) {
  apply(node.fixings);
  if (node.basis && node.basis.get() != loaded_basis_) simplex_.set_basis(*node.basis);
  SimplexStatus status = node.basis ? simplex_.solve_dual() : simplex_.solve_primal();
  if (status == SimplexStatus::kNotDualFeasible || status == SimplexStatus::kIterationLimit)
    status = simplex_.solve_primal();
  if (status == SimplexStatus::kIterationLimit)
    throw NumericalError("simplex iteration limit reached in branch-and-bound");
  if (status == SimplexStatus::kUnbounded)
    throw std::runtime_error("LP relaxation is unbounded");
  return status;
}

std::vector<double> BranchAndBound::polish(std::vector<double> values) {
  for (int j : binaries_) values[j] = std::round(values[j]);
  if (!config_.polish) return values;
  for (int j : binaries_) simplex_.set_col_bounds(j, values[j], values[j]);
  const SimplexStatus status = simplex_.solve_dual();
  std::vector<double> polished = values;
  if (status == SimplexStatus::kOptimal) {
    polished = simplex_.primal_values();
    for (int j : binaries_) polished[j] = values[j];
  }
  for (int j : binaries_) simplex_.set_col_bounds(j, root_lb_[j], root_ub_[j]);
  applied_.clear();
  loaded_basis_ = nullptr;
  return status == SimplexStatus::kOptimal ? polished : values;
}

void BranchAndBound::consider(std::vector<double> values) {
  for (int j : binaries_) values[j] = std::round(values[j]);
  if (!check_solution(original_, values, config_.feasibility_tol).empty()) return;
  const double obj = original_.objective_value(values);
  if (obj < objective_) {
    objective_ = obj;
    incumbent_ = std::move(values);
  }
}

int BranchAndBound::choose_branch(const std::vector<double>& values) const {
  int best = -1;
  double best_score = -1.0;
  for (int j : binaries_) {
    const double frac = values[j] - std::floor(values[j]);
    if (frac <= config_.integrality_tol || frac >= 1.0 - config_.integrality_tol) continue;
    double score;
    if (config_.branching == Branching::kPseudoCost) {
      const double down = pseudo_.estimate(j, false) * frac;
      const double up = pseudo_.estimate(j, true) * (1.0 - frac);
      score = std::max(down, 1e-6) * std::max(up, 1e-6);
    } else {
      score = std::min(frac, 1.0 - frac);
    }
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void BranchAndBound::push(Node node) {
  by_bound_.emplace(node.bound, node.id);
  open_.emplace(node.id, std::move(node));
}

Node BranchAndBound::pop(bool plunge) {
  auto it = open_.end();
  if (config_.node_order == NodeOrder::kDepthFirst || plunge) {
    it = std::prev(open_.end());
  } else {
    it = open_.find(by_bound_.begin()->second);
  }
  Node node = std::move(it->second);
  by_bound_.erase({node.bound, node.id});
  open_.erase(it);
  return node;
}

void BranchAndBound::record(long nodes) {
  const double bound = std::min(open_bound(), objective_);
  if (bound > reported_bound_) reported_bound_ = bound;
  if (config_.record_trace) result_.trace.push_back({nodes, reported_bound_, objective_});
}

BnbResult BranchAndBound::run() {
  const auto start = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - start).count(); };

  if (!config_.start.empty() && static_cast<int>(config_.start.size()) == original_.num_columns())
    consider(config_.start);

  Node root;
  root.id = next_id_++;
  push(std::move(root));
  long nodes = 0;
  bool limit_hit = false;

  while (!open_.empty()) {
    if ((config_.node_limit && nodes >= *config_.node_limit) ||
        (config_.time_limit_s && elapsed() >= *config_.time_limit_s)) {
      limit_hit = true;
      break;
    }
    if (std::isfinite(objective_) && open_bound() >= prune_threshold()) {
      record(nodes);
      open_.clear();
      by_bound_.clear();
      break;
    }
    // Dive until the first incumbent, then follow the configured order.
    Node node = pop(incumbent_.empty());
    if (std::isfinite(objective_) && node.bound >= prune_threshold()) {
      record(nodes);
      continue;
    }
    ++nodes;
    const SimplexStatus status = solve_node(node);
    auto basis = std::make_shared<const BasisState>(simplex_.basis());
    loaded_basis_ = basis.get();
    if (status == SimplexStatus::kInfeasible) {
      record(nodes);
      continue;
    }
    const double lp_obj = simplex_.objective() + original_.objective_constant();
    if (node.branch_column >= 0)
      pseudo_.update(node.branch_column, node.branch_up, node.branch_delta,
                     lp_obj - node.parent_objective);
    const double bound = std::max(node.bound, lp_obj);
    if (std::isfinite(objective_) && bound >= prune_threshold()) {
      record(nodes);
      continue;
    }
    std::vector<double> values = simplex_.primal_values();
    const int j = choose_branch(values);
    if (j < 0) {
      consider(polish(std::move(values)));
      record(nodes);
      continue;
    }

    const double frac = values[j] - std::floor(values[j]);
    const bool up_first = frac >= 0.5;
    // The child pushed last is explored next under depth-first order.
    for (const bool up : {!up_first, up_first}) {
      Node child;
      child.id = next_id_++;
      child.bound = bound;
      child.depth = node.depth + 1;
      child.fixings = std::make_shared<const Fixing>(Fixing{j, up ? 1.0 : 0.0, node.fixings});
      child.basis = basis;
      child.branch_column = j;
      child.branch_up = up;
      child.branch_delta = up ? 1.0 - frac : frac;
      child.parent_objective = lp_obj;
      push(std::move(child));
    }
    record(nodes);
  }

  result_.nodes = nodes;
  result_.lp_iterations = simplex_.iterations();
  result_.seconds = elapsed();
  if (!incumbent_.empty()) {
    result_.incumbent = incumbent_;
    result_.objective = objective_;
  }
  if (limit_hit) {
    result_.status = MipStatus::kTimeLimit;
    result_.bound = std::min(open_bound(), objective_);
    result_.bound = std::max(result_.bound, reported_bound_);
  } else if (incumbent_.empty()) {
    result_.status = MipStatus::kInfeasible;
    result_.bound = kInf;
  } else {
    result_.status = MipStatus::kOptimal;
    result_.bound = reported_bound_;
  }
  result_.gap = relative_gap(result_.objective, result_.bound);
  return result_;
}

}  // namespace

BnbResult solve_milp(const MilpModel& model, const SolverConfig& config) {
  if (!(config.feasibility_tol > 0.0) || !(config.integrality_tol > 0.0) ||
      !(config.mip_gap > 0.0))
    throw std::invalid_argument("solver tolerances must be positive");
  std::optional<MilpModel> work;
  if (config.presolve) {
    work = presolve(model);
    if (!work) {
      BnbResult result;
      result.status = MipStatus::kInfeasible;
      result.bound = kInf;
      return result;
    }
  }
  BranchAndBound bnb(model, work ? *work : model, config);
  return bnb.run();
}

}  // namespace gwplan
