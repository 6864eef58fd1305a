// Mixed-integer model for joint gateway placement, routing and flow
// allocation, in a solver-neutral form.
//
// Decision variables, per time step t unless noted:
//   x[l]        gateway l is placed (binary, time-invariant)
//   b[i,t]      flow allocated to traffic i (Mbps)
//   y[i,e,t]    link e is assigned to traffic i (binary)
//   f[i,e,t]    flow of traffic i on link e (Mbps)
//   z[e,t]      feeder link e is in use (binary)
//   s[i,t]      normalized flow gap of traffic i (slack of max(0, 1 - b/r))
//
// Row names are "<family>_<indices>", e.g. "fgw_i0_e17_t2". Families:
//   fgw  feeder link needs a placed gateway    fzu  feeder link marks z
//   gat  Big-M flow gating                     ul1  one uplink per traffic
//   fs1  one feeder per satellite              fg1  one feeder per gateway
//   cul  uplink capacity per satellite         cis  ISL capacity
//   cfl  feeder capacity                       src  flow leaves the user
//   fcn  flow conservation at satellites       ycn  path conservation
//   dst  delivery at the destination           dy1  single delivery link
//   rlf  relay flow balance                    rtl  no terrestrial inflow
//   rly  relay path balance                    gap  flow gap slack

#ifndef GWPLAN_MILP_HPP_
#define GWPLAN_MILP_HPP_

#include <limits>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gwplan/netgraph.hpp"
#include "gwplan/scenario.hpp"

namespace gwplan {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Symbol { kGateway, kFlowAlloc, kLinkAssign, kLinkFlow, kFeederUse, kFlowGap, kGeneric };
enum class Domain { kBinary, kContinuous };
enum class Sense { kLe, kEq, kGe };

const char* to_string(Symbol symbol);

struct Column {
  std::string name;
  Symbol symbol = Symbol::kGeneric;
  Domain domain = Domain::kContinuous;
  double lb = 0.0;
  double ub = kInf;
  // Indices; -1 where the symbol does not carry them. t is 1-based, 0 for
  // time-invariant columns.
  int user = -1;
  int edge = -1;
  int gateway = -1;
  int t = 0;

  bool is_binary() const { return domain == Domain::kBinary; }
};

struct Term {
  int column = 0;
  double coef = 0.0;
};

struct LinConstraint {
  std::string name;
  std::string family;  // "fgw", "cis", ...; empty for generic rows
  std::vector<Term> terms;
  Sense sense = Sense::kLe;
  double rhs = 0.0;
};

class MilpModel {
 public:
  int add_column(Column column);
  // Throws std::invalid_argument on duplicate or unknown columns and
  // non-finite coefficients.
  int add_constraint(LinConstraint row);

  void set_objective(std::vector<Term> terms, double constant = 0.0);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<LinConstraint>& constraints() const { return constraints_; }
  const std::vector<Term>& objective() const { return objective_; }
  double objective_constant() const { return objective_constant_; }

  int num_columns() const { return static_cast<int>(columns_.size()); }
  int num_rows() const { return static_cast<int>(constraints_.size()); }
  Column& column(int j) { return columns_.at(j); }
  const Column& column(int j) const { return columns_.at(j); }

  double objective_value(std::span<const double> values) const;
  double row_activity(int row, std::span<const double> values) const;

  // Column index by name, -1 when absent.
  int find_column(const std::string& name) const;

  std::string name = "GWPLAN";

 private:
  std::vector<Column> columns_;
  std::vector<LinConstraint> constraints_;
  std::vector<Term> objective_;
  double objective_constant_ = 0.0;
  std::unordered_map<std::string, int> name_index_;
};

// The MILP together with the index tables that tie its columns back to the
// scenario. Snapshots are stored in directed form.
struct PlanningModel {
  Scenario scenario;
  std::vector<SnapshotGraph> snapshots;
  MilpModel milp;

  std::vector<int> x;                            // [l]
  std::vector<std::vector<int>> b, s;            // [t-1][i]
  std::vector<std::vector<std::vector<int>>> y;  // [t-1][i][e]
  std::vector<std::vector<std::vector<int>>> f;  // [t-1][i][e]
  std::vector<std::vector<int>> z;               // [t-1][e], -1 for non-feeder

  int steps() const { return static_cast<int>(snapshots.size()); }
  const SnapshotGraph& graph(int t) const { return snapshots.at(t - 1); }
};

// Columns only. Snapshots may be undirected; they are expanded here.
//
// y and f exist for every (traffic, edge) pair; pairs that put traffic i on
// another user's uplink are fixed to zero by their bounds.
PlanningModel build_variables(const Scenario& scenario,
                              const std::vector<SnapshotGraph>& snapshots);

void add_feasibility_constraints(PlanningModel& model);   // fgw, fzu, gat
void add_connection_constraints(PlanningModel& model);    // ul1, fs1, fg1
void add_capacity_constraints(PlanningModel& model);      // cul, cis, cfl
void add_flow_conservation(PlanningModel& model);         // src, fcn, ycn
void add_delivery_constraints(PlanningModel& model);      // dst, dy1, rlf, rtl, rly
void build_objective(PlanningModel& model);               // gap rows + objective

// All of the above, in order.
PlanningModel build_model(const Scenario& scenario,
                          const std::vector<SnapshotGraph>& snapshots);

// Cost components re-derived from raw variable values.
struct CostBreakdown {
  double gateways = 0.0;  // J_g
  double flow_gap = 0.0;  // J_f
  double latency = 0.0;   // J_l
  double total = 0.0;     // J
};

struct Solution {
  std::vector<double> values;  // raw column values
  std::vector<double> x;                            // [l]
  std::vector<std::vector<double>> b, s;            // [t-1][i]; s recomputed
  std::vector<std::vector<std::vector<double>>> y;  // [t-1][i][e]
  std::vector<std::vector<std::vector<double>>> f;  // [t-1][i][e]
  std::vector<std::vector<double>> z;               // [t-1][e]
  std::vector<std::vector<double>> latency_s;       // [t-1][i]
  std::vector<std::vector<std::vector<int>>> assigned_edges;  // [t-1][i]
  CostBreakdown cost;
  double objective_row = 0.0;  // model objective evaluated on `values`

  std::vector<int> selected_gateways() const;
};

// Throws std::invalid_argument when the assignment length does not match.
Solution extract_solution(const PlanningModel& model, std::span<const double> values);

// Human-readable LP-format dump.
std::string write_lp_text(const MilpModel& model);

}  // namespace gwplan

#endif  // GWPLAN_MILP_HPP_
