#include "gwplan/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace gwplan {

namespace {

constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr double kDegenerateStep = 1e-12;
constexpr double kEtaDrop = 1e-14;

}  // namespace

void SparseLp::add_column(double c, double lb, double ub,
                          const std::vector<std::pair<int, double>>& entries) {
  for (const auto& [row, coef] : entries) {
    row_index.push_back(row);
    value.push_back(coef);
  }
  col_start.push_back(static_cast<int>(row_index.size()));
  cost.push_back(c);
  col_lb.push_back(lb);
  col_ub.push_back(ub);
  ++num_cols;
}

// LU of the basis at the last refactorization, followed by eta matrices for
// every pivot since.
class Simplex::Factor {
 public:
  explicit Factor(int m) : m_(m) {}

  bool factor(const SparseLp& lp, const std::vector<int>& head, int n) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(lp.row_index.size() + m_);
    for (int r = 0; r < m_; ++r) {
      const int j = head[r];
      if (j < n) {
        for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k)
          triplets.emplace_back(lp.row_index[k], r, lp.value[k]);
      } else {
        triplets.emplace_back(j - n, r, -1.0);
      }
    }
    Eigen::SparseMatrix<double> basis(m_, m_);
    basis.setFromTriplets(triplets.begin(), triplets.end());
    basis.makeCompressed();
    etas_.clear();
    if (m_ == 0) return true;
    lu_.analyzePattern(basis);
    lu_.factorize(basis);
    return lu_.info() == Eigen::Success;
  }

  void ftran(std::vector<double>& v) const {
    if (m_ > 0) {
      Eigen::Map<Eigen::VectorXd> vec(v.data(), m_);
      Eigen::VectorXd sol = lu_.solve(vec);
      vec = sol;
    }
    for (const Eta& eta : etas_) {
      const double pivot_value = v[eta.row] / eta.pivot;
      v[eta.row] = pivot_value;
      if (pivot_value == 0.0) continue;
      for (const auto& [i, a] : eta.entries) v[i] -= a * pivot_value;
    }
  }

  void btran(std::vector<double>& v) const {
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double acc = v[it->row];
      for (const auto& [i, a] : it->entries) acc -= a * v[i];
      v[it->row] = acc / it->pivot;
    }
    if (m_ > 0) {
      Eigen::Map<Eigen::VectorXd> vec(v.data(), m_);
      Eigen::VectorXd sol = lu_.transpose().solve(vec);
      vec = sol;
    }
  }

  void update(int row, const std::vector<double>& alpha) {
    Eta eta;
    eta.row = row;
    eta.pivot = alpha[row];
    for (int i = 0; i < m_; ++i) {
      if (i != row && std::abs(alpha[i]) > kEtaDrop) eta.entries.emplace_back(i, alpha[i]);
    }
    etas_.push_back(std::move(eta));
  }

  int num_etas() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<std::pair<int, double>> entries;
  };

  int m_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
};

Simplex::Simplex(SparseLp lp, SimplexOptions options)
    : n_(lp.num_cols), m_(lp.num_rows), lp_(std::move(lp)), opt_(options) {
  if (static_cast<int>(lp_.col_start.size()) != n_ + 1 ||
      static_cast<int>(lp_.cost.size()) != n_ || static_cast<int>(lp_.col_lb.size()) != n_ ||
      static_cast<int>(lp_.col_ub.size()) != n_ || static_cast<int>(lp_.row_lb.size()) != m_ ||
      static_cast<int>(lp_.row_ub.size()) != m_)
    throw std::invalid_argument("inconsistent LP dimensions");
  for (int r : lp_.row_index) {
    if (r < 0 || r >= m_) throw std::invalid_argument("LP row index out of range");
  }

  double cmax = 0.0;
  for (double c : lp_.cost) cmax = std::max(cmax, std::abs(c));
  cost_scale_ = cmax > 0.0 ? 1.0 / cmax : 1.0;

  const int total = n_ + m_;
  cost_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) cost_[j] = lp_.cost[j] * cost_scale_;
  lb_.resize(total);
  ub_.resize(total);
  for (int j = 0; j < n_; ++j) {
    lb_[j] = lp_.col_lb[j];
    ub_[j] = lp_.col_ub[j];
  }
  for (int r = 0; r < m_; ++r) {
    lb_[n_ + r] = lp_.row_lb[r];
    ub_[n_ + r] = lp_.row_ub[r];
  }
  x_.assign(total, 0.0);
  status_.assign(total, VarStatus::kAtLower);
  head_.assign(m_, 0);
  dual_.assign(m_, 0.0);
  factor_ = std::make_unique<Factor>(m_);
  reset_to_slack_basis();
}

Simplex::~Simplex() = default;

void Simplex::place_nonbasic(int j) {
  VarStatus& st = status_[j];
  const bool has_lb = std::isfinite(lb_[j]), has_ub = std::isfinite(ub_[j]);
  if (st == VarStatus::kAtUpper && !has_ub) st = has_lb ? VarStatus::kAtLower : VarStatus::kFree;
  if (st == VarStatus::kAtLower && !has_lb) st = has_ub ? VarStatus::kAtUpper : VarStatus::kFree;
  if (st == VarStatus::kFree && (has_lb || has_ub))
    st = has_lb ? VarStatus::kAtLower : VarStatus::kAtUpper;
  switch (st) {
    case VarStatus::kAtLower: x_[j] = lb_[j]; break;
    case VarStatus::kAtUpper: x_[j] = ub_[j]; break;
    case VarStatus::kFree: x_[j] = 0.0; break;
    case VarStatus::kBasic: break;
  }
}

void Simplex::set_col_bounds(int j, double lb, double ub) {
  lb_.at(j) = lb;
  ub_.at(j) = ub;
  if (status_[j] != VarStatus::kBasic) place_nonbasic(j);
  values_valid_ = false;
}

void Simplex::reset_to_slack_basis() {
  for (int j = 0; j < n_; ++j) {
    status_[j] = VarStatus::kAtLower;
    place_nonbasic(j);
  }
  for (int r = 0; r < m_; ++r) {
    status_[n_ + r] = VarStatus::kBasic;
    head_[r] = n_ + r;
  }
  factor_->factor(lp_, head_, n_);
  values_valid_ = false;
}

bool Simplex::set_basis(const BasisState& basis) {
  if (static_cast<int>(basis.size()) != n_ + m_) return false;
  std::vector<int> head;
  head.reserve(m_);
  for (int j = 0; j < n_ + m_; ++j) {
    if (basis[j] == VarStatus::kBasic) head.push_back(j);
  }
  if (static_cast<int>(head.size()) != m_) return false;
  status_ = basis;
  head_ = std::move(head);
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] != VarStatus::kBasic) place_nonbasic(j);
  }
  values_valid_ = false;
  if (!factor_->factor(lp_, head_, n_)) {
    reset_to_slack_basis();
    return false;
  }
  return true;
}

void Simplex::refactor() {
  if (!factor_->factor(lp_, head_, n_)) {
    // A singular basis can only come from accumulated round-off; restart.
    reset_to_slack_basis();
  }
  compute_basic_values();
}

double Simplex::column_dot(int j, const std::vector<double>& v) const {
  if (j >= n_) return -v[j - n_];
  double acc = 0.0;
  for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k)
    acc += lp_.value[k] * v[lp_.row_index[k]];
  return acc;
}

void Simplex::load_column(int j, std::vector<double>& dense) const {
  std::fill(dense.begin(), dense.end(), 0.0);
  if (j >= n_) {
    dense[j - n_] = -1.0;
    return;
  }
  for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k)
    dense[lp_.row_index[k]] = lp_.value[k];
}

void Simplex::compute_basic_values() {
  std::vector<double> rhs(m_, 0.0);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
    for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k)
      rhs[lp_.row_index[k]] -= lp_.value[k] * x_[j];
  }
  for (int r = 0; r < m_; ++r) {
    if (status_[n_ + r] != VarStatus::kBasic) rhs[r] += x_[n_ + r];
  }
  factor_->ftran(rhs);
  for (int r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
  values_valid_ = true;
}

void Simplex::compute_duals(const std::vector<double>& basic_costs) {
  dual_ = basic_costs;
  factor_->btran(dual_);
}

double Simplex::reduced_cost(int j) const { return cost_[j] - column_dot(j, dual_); }

double Simplex::max_primal_infeasibility() const {
  double worst = 0.0;
  for (int r = 0; r < m_; ++r) {
    const int j = head_[r];
    worst = std::max({worst, lb_[j] - x_[j], x_[j] - ub_[j]});
  }
  return worst;
}

void Simplex::pivot(int row, int entering, const std::vector<double>& alpha) {
  head_[row] = entering;
  status_[entering] = VarStatus::kBasic;
  factor_->update(row, alpha);
  ++iterations_;
  if (factor_->num_etas() >= opt_.refactor_interval) refactor();
}

void Simplex::perturb_bounds() {
  saved_lb_ = lb_;
  saved_ub_ = ub_;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unit(0.5, 1.0);
  for (int j = 0; j < n_ + m_; ++j) {
    if (lb_[j] == ub_[j]) continue;
    if (std::isfinite(lb_[j])) lb_[j] -= opt_.perturbation * (1.0 + std::abs(lb_[j])) * unit(rng);
    if (std::isfinite(ub_[j])) ub_[j] += opt_.perturbation * (1.0 + std::abs(ub_[j])) * unit(rng);
    if (status_[j] != VarStatus::kBasic) place_nonbasic(j);
  }
  perturbed_ = true;
}

void Simplex::restore_bounds() {
  lb_ = std::move(saved_lb_);
  ub_ = std::move(saved_ub_);
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] != VarStatus::kBasic) place_nonbasic(j);
  }
  perturbed_ = false;
  compute_basic_values();
}

SimplexStatus Simplex::solve_primal() {
  SimplexStatus status = primal_loop(opt_.perturbation > 0.0);
  if (!perturbed_) return status;
  restore_bounds();
  if (status != SimplexStatus::kOptimal) return status;
  // Same basis, original bounds: still dual feasible, maybe slightly primal
  // infeasible.
  if (max_primal_infeasibility() <= opt_.primal_tol) return status;
  status = solve_dual();
  if (status == SimplexStatus::kNotDualFeasible) status = primal_loop(false);
  return status;
}

SimplexStatus Simplex::primal_loop(bool may_perturb) {
  refactor();
  bool fresh = true;
  int degenerate_run = 0;
  int numerical_retries = 0;
  bool bland = false;
  std::vector<double> basic_cost(m_), alpha(m_);
  const long start = iterations_;

  while (true) {
    if (iterations_ - start >= opt_.iteration_limit) return SimplexStatus::kIterationLimit;

    bool phase1 = false;
    for (int r = 0; r < m_; ++r) {
      const int j = head_[r];
      if (x_[j] < lb_[j] - opt_.primal_tol) {
        basic_cost[r] = -1.0;
        phase1 = true;
      } else if (x_[j] > ub_[j] + opt_.primal_tol) {
        basic_cost[r] = 1.0;
        phase1 = true;
      } else {
        basic_cost[r] = 0.0;
      }
    }
    if (!phase1) {
      for (int r = 0; r < m_; ++r) basic_cost[r] = cost_[head_[r]];
    }
    compute_duals(basic_cost);

    int entering = -1;
    double entering_d = 0.0, best = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      const VarStatus st = status_[j];
      if (st == VarStatus::kBasic || lb_[j] == ub_[j]) continue;
      const double d = (phase1 ? 0.0 : cost_[j]) - column_dot(j, dual_);
      const bool eligible = (st == VarStatus::kAtLower && d < -opt_.dual_tol) ||
                            (st == VarStatus::kAtUpper && d > opt_.dual_tol) ||
                            (st == VarStatus::kFree && std::abs(d) > opt_.dual_tol);
      if (!eligible) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best) {
        best = std::abs(d);
        entering = j;
        entering_d = d;
      }
    }

    if (entering < 0) {
      if (!fresh) {
        refactor();
        fresh = true;
        continue;
      }
      return phase1 ? SimplexStatus::kInfeasible : SimplexStatus::kOptimal;
    }

    const double dir = entering_d < 0.0 ? 1.0 : -1.0;
    load_column(entering, alpha);
    factor_->ftran(alpha);

    // Effective bounds of a basic variable; phase 1 relaxes the violated side.
    auto effective = [&](int j, double& lo, double& up) {
      lo = lb_[j];
      up = ub_[j];
      if (phase1) {
        if (x_[j] < lb_[j] - opt_.primal_tol) {
          lo = -kInfinity;
          up = lb_[j];
        } else if (x_[j] > ub_[j] + opt_.primal_tol) {
          lo = ub_[j];
          up = kInfinity;
        }
      }
    };

    double theta_max = kInfinity;
    if (!bland) {
      for (int r = 0; r < m_; ++r) {
        if (std::abs(alpha[r]) <= opt_.pivot_tol) continue;
        const double delta = -dir * alpha[r];
        const int j = head_[r];
        double lo, up;
        effective(j, lo, up);
        if (delta < 0.0 && lo > -kInfinity)
          theta_max = std::min(theta_max, (x_[j] - lo + opt_.primal_tol) / -delta);
        else if (delta > 0.0 && up < kInfinity)
          theta_max = std::min(theta_max, (up - x_[j] + opt_.primal_tol) / delta);
      }
    }

    int leave = -1;
    double theta = kInfinity, leave_bound = 0.0, leave_size = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (std::abs(alpha[r]) <= opt_.pivot_tol) continue;
      const double delta = -dir * alpha[r];
      const int j = head_[r];
      double lo, up;
      effective(j, lo, up);
      double ratio, bound;
      if (delta < 0.0 && lo > -kInfinity) {
        ratio = (x_[j] - lo) / -delta;
        bound = lo;
      } else if (delta > 0.0 && up < kInfinity) {
        ratio = (up - x_[j]) / delta;
        bound = up;
      } else {
        continue;
      }
      ratio = std::max(ratio, 0.0);
      if (bland) {
        if (ratio < theta || (ratio == theta && leave >= 0 && j < head_[leave])) {
          theta = ratio;
          leave = r;
          leave_bound = bound;
        }
      } else if (ratio <= theta_max && std::abs(alpha[r]) > leave_size) {
        leave_size = std::abs(alpha[r]);
        theta = ratio;
        leave = r;
        leave_bound = bound;
      }
    }

    const double range = ub_[entering] - lb_[entering];
    if (leave < 0 && !std::isfinite(range)) {
      if (!phase1) return SimplexStatus::kUnbounded;
      if (++numerical_retries > 5) throw NumericalError("phase 1 ray without a blocking row");
      refactor();
      fresh = true;
      continue;
    }

    if (leave < 0 || range <= theta) {
      // Bound flip of the entering variable; the basis is unchanged.
      x_[entering] += dir * range;
      for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * range * alpha[r];
      status_[entering] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
      x_[entering] = dir > 0 ? ub_[entering] : lb_[entering];
      ++iterations_;
      fresh = false;
      degenerate_run = 0;
      bland = false;
      continue;
    }

    x_[entering] += dir * theta;
    for (int r = 0; r < m_; ++r) x_[head_[r]] -= dir * theta * alpha[r];
    const int leaving = head_[leave];
    x_[leaving] = leave_bound;
    status_[leaving] = leave_bound == lb_[leaving] ? VarStatus::kAtLower : VarStatus::kAtUpper;
    pivot(leave, entering, alpha);
    fresh = false;

    if (theta < kDegenerateStep) {
      if (++degenerate_run > opt_.degenerate_before_bland) {
        if (may_perturb && !perturbed_) {
          perturb_bounds();
          refactor();
          degenerate_run = 0;
        } else {
          bland = true;
        }
      }
    } else {
      degenerate_run = 0;
      bland = false;
    }
  }
}

SimplexStatus Simplex::solve_dual() {
  refactor();
  bool fresh = true;
  std::vector<double> basic_cost(m_), rho(m_), alpha(m_), reduced(n_ + m_, 0.0),
      row_alpha(n_ + m_, 0.0);
  const long start = iterations_;

  while (true) {
    if (iterations_ - start >= opt_.iteration_limit) return SimplexStatus::kIterationLimit;

    for (int r = 0; r < m_; ++r) basic_cost[r] = cost_[head_[r]];
    compute_duals(basic_cost);

    bool flipped = false;
    for (int j = 0; j < n_ + m_; ++j) {
      const VarStatus st = status_[j];
      if (st == VarStatus::kBasic) continue;
      const double d = reduced_cost(j);
      reduced[j] = d;
      if (lb_[j] == ub_[j]) continue;
      if (st == VarStatus::kAtLower && d < -opt_.dual_tol) {
        if (!std::isfinite(ub_[j])) return SimplexStatus::kNotDualFeasible;
        status_[j] = VarStatus::kAtUpper;
        x_[j] = ub_[j];
        flipped = true;
      } else if (st == VarStatus::kAtUpper && d > opt_.dual_tol) {
        if (!std::isfinite(lb_[j])) return SimplexStatus::kNotDualFeasible;
        status_[j] = VarStatus::kAtLower;
        x_[j] = lb_[j];
        flipped = true;
      } else if (st == VarStatus::kFree && std::abs(d) > opt_.dual_tol) {
        return SimplexStatus::kNotDualFeasible;
      }
    }
    if (flipped) compute_basic_values();

    int leave = -1;
    double worst = opt_.primal_tol;
    for (int r = 0; r < m_; ++r) {
      const int j = head_[r];
      const double infeas = std::max(lb_[j] - x_[j], x_[j] - ub_[j]);
      if (infeas > worst) {
        worst = infeas;
        leave = r;
      }
    }
    if (leave < 0) {
      if (!fresh) {
        refactor();
        fresh = true;
        continue;
      }
      return SimplexStatus::kOptimal;
    }

    const int leaving = head_[leave];
    const bool below = x_[leaving] < lb_[leaving];
    std::fill(rho.begin(), rho.end(), 0.0);
    rho[leave] = 1.0;
    factor_->btran(rho);

    // Candidates move x_leaving toward the violated bound without breaking
    // dual feasibility.
    double theta_max = kInfinity;
    for (int j = 0; j < n_ + m_; ++j) {
      const VarStatus st = status_[j];
      if (st == VarStatus::kBasic || lb_[j] == ub_[j]) {
        row_alpha[j] = 0.0;
        continue;
      }
      const double a = column_dot(j, rho);
      row_alpha[j] = a;
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const double signed_a = below ? a : -a;
      double numer;
      if (st == VarStatus::kAtLower && signed_a < 0.0)
        numer = std::max(reduced[j], 0.0);
      else if (st == VarStatus::kAtUpper && signed_a > 0.0)
        numer = std::max(-reduced[j], 0.0);
      else if (st == VarStatus::kFree)
        numer = std::abs(reduced[j]);
      else
        continue;
      theta_max = std::min(theta_max, (numer + opt_.dual_tol) / std::abs(a));
    }

    int entering = -1;
    double best_size = 0.0;
    for (int j = 0; j < n_ + m_; ++j) {
      const double a = row_alpha[j];
      if (std::abs(a) <= opt_.pivot_tol) continue;
      const VarStatus st = status_[j];
      const double signed_a = below ? a : -a;
      double numer;
      if (st == VarStatus::kAtLower && signed_a < 0.0)
        numer = std::max(reduced[j], 0.0);
      else if (st == VarStatus::kAtUpper && signed_a > 0.0)
        numer = std::max(-reduced[j], 0.0);
      else if (st == VarStatus::kFree)
        numer = std::abs(reduced[j]);
      else
        continue;
      if (numer / std::abs(a) <= theta_max && std::abs(a) > best_size) {
        best_size = std::abs(a);
        entering = j;
      }
    }

    if (entering < 0) {
      if (!fresh) {
        refactor();
        fresh = true;
        continue;
      }
      return SimplexStatus::kInfeasible;
    }

    load_column(entering, alpha);
    factor_->ftran(alpha);
    const double pivot_value = alpha[leave];
    if (std::abs(pivot_value - row_alpha[entering]) >
            1e-7 * (1.0 + std::abs(row_alpha[entering])) &&
        !fresh) {
      refactor();
      fresh = true;
      continue;
    }
    if (std::abs(pivot_value) <= opt_.pivot_tol)
      throw NumericalError("dual simplex pivot vanished");

    const double target = below ? lb_[leaving] : ub_[leaving];
    const double step = (x_[leaving] - target) / pivot_value;
    x_[entering] += step;
    for (int r = 0; r < m_; ++r) x_[head_[r]] -= alpha[r] * step;
    x_[leaving] = target;
    status_[leaving] = below ? VarStatus::kAtLower : VarStatus::kAtUpper;
    pivot(leave, entering, alpha);
    fresh = false;
  }
}

std::vector<double> Simplex::primal_values() const {
  std::vector<double> values(x_.begin(), x_.begin() + n_);
  for (int j = 0; j < n_; ++j) values[j] = std::clamp(values[j], lb_[j], ub_[j]);
  return values;
}

double Simplex::objective() const {
  double acc = 0.0;
  for (int j = 0; j < n_; ++j) acc += lp_.cost[j] * x_[j];
  return acc;
}

}  // namespace gwplan
