// Bounded-variable revised simplex over a sparse LP in computational form
//
//   minimize c'x  subject to  A x - s = 0,  l <= x <= u,  rl <= s <= ru.
//
// Variables 0..n-1 are structural, n..n+m-1 are the row logicals s. The basis
// inverse is kept as a sparse LU factorization of the basis matrix plus a
// product-form eta file, refactorized periodically.
//
// Two algorithms share the basis machinery:
//   * primal simplex with a composite phase 1 (minimizes the sum of bound
//     violations of basic variables), Dantzig pricing, Harris ratio test, and
//     Bland's rule after a run of degenerate pivots;
//   * dual simplex, used to re-optimize after bound changes from a basis that
//     is still dual feasible. Needs every nonbasic variable to sit at a finite
//     bound that matches its reduced-cost sign, and reports kNotDualFeasible
//     otherwise so the caller can fall back to primal.

#ifndef GWPLAN_SIMPLEX_HPP_
#define GWPLAN_SIMPLEX_HPP_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace gwplan {

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SparseLp {
  int num_cols = 0;
  int num_rows = 0;
  // Compressed sparse columns of A.
  std::vector<int> col_start{0};
  std::vector<int> row_index;
  std::vector<double> value;

  std::vector<double> cost;
  std::vector<double> col_lb, col_ub;
  std::vector<double> row_lb, row_ub;

  void add_column(double c, double lb, double ub,
                  const std::vector<std::pair<int, double>>& entries);
};

enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

enum class SimplexStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kNotDualFeasible,
};

struct SimplexOptions {
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  long iteration_limit = 1'000'000;
  int degenerate_before_bland = 50;
  // Relative size of the random bound shift applied once primal pivots
  // stall. Zero disables it.
  double perturbation = 1e-6;
};

// Statuses of all n+m variables; the basic set is implied.
using BasisState = std::vector<VarStatus>;

class Simplex {
 public:
  Simplex(SparseLp lp, SimplexOptions options = {});
  ~Simplex();
  Simplex(const Simplex&) = delete;
  Simplex& operator=(const Simplex&) = delete;

  int num_cols() const { return n_; }
  int num_rows() const { return m_; }

  // Structural bounds. Nonbasic variables snap to the bound matching their
  // status; basic values are recomputed lazily by the next solve.
  void set_col_bounds(int j, double lb, double ub);
  double col_lb(int j) const { return lb_[j]; }
  double col_ub(int j) const { return ub_[j]; }

  // All logicals basic, structurals at a finite bound.
  void reset_to_slack_basis();
  BasisState basis() const { return status_; }
  // Returns false (and keeps the slack basis) if the basis is unusable.
  bool set_basis(const BasisState& basis);

  SimplexStatus solve_primal();
  SimplexStatus solve_dual();

  // Structural values and objective (in the original cost scale).
  std::vector<double> primal_values() const;
  double objective() const;
  long iterations() const { return iterations_; }

 private:
  class Factor;

  void refactor();
  void compute_basic_values();
  void compute_duals(const std::vector<double>& basic_costs);
  double reduced_cost(int j) const;
  double column_dot(int j, const std::vector<double>& v) const;
  void load_column(int j, std::vector<double>& dense) const;
  void place_nonbasic(int j);
  double max_primal_infeasibility() const;
  void pivot(int row, int entering, const std::vector<double>& alpha);
  SimplexStatus primal_loop(bool may_perturb);
  void perturb_bounds();
  void restore_bounds();

  int n_, m_;
  SparseLp lp_;
  SimplexOptions opt_;
  double cost_scale_ = 1.0;

  std::vector<double> cost_;  // scaled, size n+m
  std::vector<double> lb_, ub_;
  std::vector<double> x_;
  std::vector<VarStatus> status_;
  std::vector<int> head_;  // basic variable per basis row
  std::vector<double> dual_;

  std::unique_ptr<Factor> factor_;
  bool values_valid_ = false;
  long iterations_ = 0;
  bool perturbed_ = false;
  std::vector<double> saved_lb_, saved_ub_;
};

}  // namespace gwplan

#endif  // GWPLAN_SIMPLEX_HPP_
