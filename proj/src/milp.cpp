#include "gwplan/milp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace gwplan {

const char* to_string(Symbol symbol) {
  switch (symbol) {
    case Symbol::kGateway: return "x";
    case Symbol::kFlowAlloc: return "b";
    case Symbol::kLinkAssign: return "y";
    case Symbol::kLinkFlow: return "f";
    case Symbol::kFeederUse: return "z";
    case Symbol::kFlowGap: return "s";
    case Symbol::kGeneric: return "c";
  }
  return "?";
}

int MilpModel::add_column(Column column) {
  const int j = num_columns();
  if (!name_index_.emplace(column.name, j).second)
    throw std::invalid_argument(fmt::format("duplicate column name {}", column.name));
  columns_.push_back(std::move(column));
  return j;
}

int MilpModel::add_constraint(LinConstraint row) {
  std::vector<int> seen;
  seen.reserve(row.terms.size());
  for (const Term& term : row.terms) {
    if (term.column < 0 || term.column >= num_columns())
      throw std::invalid_argument(
          fmt::format("{}: unknown column {}", row.name, term.column));
    if (!std::isfinite(term.coef))
      throw std::invalid_argument(fmt::format("{}: non-finite coefficient", row.name));
    seen.push_back(term.column);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
    throw std::invalid_argument(fmt::format("{}: duplicate column", row.name));
  if (!std::isfinite(row.rhs))
    throw std::invalid_argument(fmt::format("{}: non-finite rhs", row.name));
  constraints_.push_back(std::move(row));
  return num_rows() - 1;
}

void MilpModel::set_objective(std::vector<Term> terms, double constant) {
  for (const Term& term : terms) {
    if (term.column < 0 || term.column >= num_columns())
      throw std::invalid_argument("objective: unknown column");
  }
  objective_ = std::move(terms);
  objective_constant_ = constant;
}

double MilpModel::objective_value(std::span<const double> values) const {
  double v = objective_constant_;
  for (const Term& term : objective_) v += term.coef * values[term.column];
  return v;
}

double MilpModel::row_activity(int row, std::span<const double> values) const {
  double v = 0.0;
  for (const Term& term : constraints_.at(row).terms) v += term.coef * values[term.column];
  return v;
}

int MilpModel::find_column(const std::string& name) const {
  const auto it = name_index_.find(name);
  return it == name_index_.end() ? -1 : it->second;
}

// ---------------------------------------------------------------------------

namespace {

Column binary(std::string name, Symbol symbol) {
  Column c;
  c.name = std::move(name);
  c.symbol = symbol;
  c.domain = Domain::kBinary;
  c.lb = 0.0;
  c.ub = 1.0;
  return c;
}

Column continuous(std::string name, Symbol symbol, double ub) {
  Column c;
  c.name = std::move(name);
  c.symbol = symbol;
  c.domain = Domain::kContinuous;
  c.lb = 0.0;
  c.ub = ub;
  return c;
}

// True when traffic i may use edge e at all: uplinks belong to their user.
bool usable(const Edge& e, int i) {
  return e.kind != EdgeKind::kUserLink || e.u.index == i;
}

NodeRef sat(int j) { return {NodeKind::kSatellite, j}; }
NodeRef gateway(int l) { return {NodeKind::kGateway, l}; }

// Collects terms for one row, skipping empty rows on request.
class RowBuilder {
 public:
  RowBuilder(PlanningModel& model, std::string family)
      : model_(model), family_(std::move(family)) {}

  RowBuilder& add(int column, double coef) {
    terms_.push_back({column, coef});
    return *this;
  }
  bool empty() const { return terms_.empty(); }

  void emit(const std::string& suffix, Sense sense, double rhs) {
    LinConstraint row;
    row.name = fmt::format("{}_{}", family_, suffix);
    row.family = family_;
    row.terms = std::move(terms_);
    row.sense = sense;
    row.rhs = rhs;
    model_.milp.add_constraint(std::move(row));
    terms_.clear();
  }
  void emit_nonempty(const std::string& suffix, Sense sense, double rhs) {
    if (empty()) return;
    emit(suffix, sense, rhs);
  }

 private:
  PlanningModel& model_;
  std::string family_;
  std::vector<Term> terms_;
};

}  // namespace

PlanningModel build_variables(const Scenario& scenario,
                              const std::vector<SnapshotGraph>& snapshots) {
  PlanningModel pm;
  pm.scenario = scenario;
  pm.snapshots.reserve(snapshots.size());
  for (const auto& g : snapshots) pm.snapshots.push_back(directed_expansion(g));

  const int num_users = scenario.num_users();
  const int steps = pm.steps();
  MilpModel& m = pm.milp;

  for (const auto& g : scenario.gateways) {
    Column c = binary(fmt::format("x_g{}", g.id), Symbol::kGateway);
    c.gateway = g.id;
    pm.x.push_back(m.add_column(std::move(c)));
  }

  pm.b.assign(steps, std::vector<int>(num_users, -1));
  for (int t = 1; t <= steps; ++t) {
    for (const auto& d : scenario.traffic) {
      Column c = continuous(fmt::format("b_i{}_t{}", d.id, t), Symbol::kFlowAlloc,
                            d.rate_mbps);
      c.user = d.id;
      c.t = t;
      pm.b[t - 1][d.id] = m.add_column(std::move(c));
    }
  }

  const auto per_edge = [&](Symbol symbol, const char* prefix, auto& table) {
    table.resize(steps);
    for (int t = 1; t <= steps; ++t) {
      const auto& edges = pm.graph(t).edges();
      table[t - 1].assign(num_users, std::vector<int>(edges.size(), -1));
      for (int i = 0; i < num_users; ++i) {
        for (const Edge& e : edges) {
          const double ub = usable(e, i) ? (symbol == Symbol::kLinkAssign ? 1.0 : kInf) : 0.0;
          Column c = symbol == Symbol::kLinkAssign
                         ? binary(fmt::format("{}_i{}_e{}_t{}", prefix, i, e.id, t), symbol)
                         : continuous(fmt::format("{}_i{}_e{}_t{}", prefix, i, e.id, t),
                                      symbol, ub);
          c.ub = ub;
          c.user = i;
          c.edge = e.id;
          c.t = t;
          table[t - 1][i][e.id] = m.add_column(std::move(c));
        }
      }
    }
  };
  per_edge(Symbol::kLinkAssign, "y", pm.y);
  per_edge(Symbol::kLinkFlow, "f", pm.f);

  pm.z.resize(steps);
  for (int t = 1; t <= steps; ++t) {
    const auto& edges = pm.graph(t).edges();
    pm.z[t - 1].assign(edges.size(), -1);
    for (const Edge& e : edges) {
      if (e.kind != EdgeKind::kFeeder) continue;
      Column c = binary(fmt::format("z_e{}_t{}", e.id, t), Symbol::kFeederUse);
      c.edge = e.id;
      c.t = t;
      pm.z[t - 1][e.id] = m.add_column(std::move(c));
    }
  }

  pm.s.assign(steps, std::vector<int>(num_users, -1));
  for (int t = 1; t <= steps; ++t) {
    for (const auto& d : scenario.traffic) {
      // s <= 1 is implied at the optimum by b >= 0; the bound tightens the
      // relaxation.
      Column c = continuous(fmt::format("s_i{}_t{}", d.id, t), Symbol::kFlowGap, 1.0);
      c.user = d.id;
      c.t = t;
      pm.s[t - 1][d.id] = m.add_column(std::move(c));
    }
  }
  return pm;
}

void add_feasibility_constraints(PlanningModel& pm) {
  const double big_m = pm.scenario.big_m;
  for (int t = 1; t <= pm.steps(); ++t) {
    const auto& y = pm.y[t - 1];
    const auto& f = pm.f[t - 1];
    for (int i = 0; i < pm.scenario.num_users(); ++i) {
      for (const Edge& e : pm.graph(t).edges()) {
        if (e.kind != EdgeKind::kFeeder) continue;
        const auto suffix = fmt::format("i{}_e{}_t{}", i, e.id, t);
        RowBuilder(pm, "fgw")
            .add(y[i][e.id], 1.0)
            .add(pm.x[e.v.index], -1.0)
            .emit(suffix, Sense::kLe, 0.0);
        RowBuilder(pm, "fzu")
            .add(y[i][e.id], 1.0)
            .add(pm.z[t - 1][e.id], -1.0)
            .emit(suffix, Sense::kLe, 0.0);
      }
    }
    for (int i = 0; i < pm.scenario.num_users(); ++i) {
      for (const Edge& e : pm.graph(t).edges()) {
        if (!usable(e, i)) continue;  // both columns fixed at zero
        RowBuilder(pm, "gat")
            .add(f[i][e.id], 1.0)
            .add(y[i][e.id], -big_m)
            .emit(fmt::format("i{}_e{}_t{}", i, e.id, t), Sense::kLe, 0.0);
      }
    }
  }
}

void add_connection_constraints(PlanningModel& pm) {
  for (int t = 1; t <= pm.steps(); ++t) {
    const auto& g = pm.graph(t);
    const auto& edges = g.edges();
    for (int i = 0; i < pm.scenario.num_users(); ++i) {
      RowBuilder row(pm, "ul1");
      for (int e : g.out_edges({NodeKind::kUser, i})) row.add(pm.y[t - 1][i][e], 1.0);
      row.emit_nonempty(fmt::format("i{}_t{}", i, t), Sense::kLe, 1.0);
    }
    for (int j = 0; j < g.num_satellites(); ++j) {
      RowBuilder row(pm, "fs1");
      for (int e : g.out_edges(sat(j)))
        if (edges[e].kind == EdgeKind::kFeeder) row.add(pm.z[t - 1][e], 1.0);
      row.emit_nonempty(fmt::format("s{}_t{}", j, t), Sense::kLe, 1.0);
    }
    for (int l = 0; l < g.num_gateways(); ++l) {
      RowBuilder row(pm, "fg1");
      for (int e : g.in_edges(gateway(l)))
        if (edges[e].kind == EdgeKind::kFeeder) row.add(pm.z[t - 1][e], 1.0);
      row.emit_nonempty(fmt::format("g{}_t{}", l, t), Sense::kLe, 1.0);
    }
  }
}

void add_capacity_constraints(PlanningModel& pm) {
  const auto& cap = pm.scenario.capacities;
  const int num_users = pm.scenario.num_users();
  for (int t = 1; t <= pm.steps(); ++t) {
    const auto& g = pm.graph(t);
    const auto& edges = g.edges();
    const auto& f = pm.f[t - 1];

    for (int j = 0; j < g.num_satellites(); ++j) {
      RowBuilder row(pm, "cul");
      for (int e : g.in_edges(sat(j))) {
        if (edges[e].kind != EdgeKind::kUserLink) continue;
        row.add(f[edges[e].u.index][e], 1.0);
      }
      row.emit_nonempty(fmt::format("s{}_t{}", j, t), Sense::kLe, cap.user_mbps);
    }

    // One row per undirected ISL: both directions share the capacity.
    std::vector<std::vector<int>> groups;
    std::vector<int> group_of(edges.size(), -1);
    std::vector<int> group_slot;
    for (const Edge& e : edges) {
      if (e.kind != EdgeKind::kInterSatellite) continue;
      if (static_cast<int>(group_slot.size()) <= e.capacity_group)
        group_slot.resize(e.capacity_group + 1, -1);
      int& slot = group_slot[e.capacity_group];
      if (slot < 0) {
        slot = static_cast<int>(groups.size());
        groups.emplace_back();
      }
      groups[slot].push_back(e.id);
    }
    for (const auto& members : groups) {
      RowBuilder row(pm, "cis");
      for (int i = 0; i < num_users; ++i)
        for (int e : members) row.add(f[i][e], 1.0);
      row.emit_nonempty(fmt::format("c{}_t{}", edges[members.front()].capacity_group, t),
                        Sense::kLe, cap.isl_mbps);
    }

    for (const Edge& e : edges) {
      if (e.kind != EdgeKind::kFeeder) continue;
      RowBuilder row(pm, "cfl");
      for (int i = 0; i < num_users; ++i) row.add(f[i][e.id], 1.0);
      row.emit_nonempty(fmt::format("e{}_t{}", e.id, t), Sense::kLe, cap.feeder_mbps);
    }
  }
}

void add_flow_conservation(PlanningModel& pm) {
  for (int t = 1; t <= pm.steps(); ++t) {
    const auto& g = pm.graph(t);
    const auto& edges = g.edges();
    for (int i = 0; i < pm.scenario.num_users(); ++i) {
      const auto& y = pm.y[t - 1][i];
      const auto& f = pm.f[t - 1][i];

      RowBuilder flow(pm, "src");
      flow.add(pm.b[t - 1][i], 1.0);
      for (int e : g.out_edges({NodeKind::kUser, i})) flow.add(f[e], -1.0);
      flow.emit(fmt::format("i{}_t{}", i, t), Sense::kEq, 0.0);

      for (int j = 0; j < g.num_satellites(); ++j) {
        RowBuilder fb(pm, "fcn"), yb(pm, "ycn");
        for (int e : g.in_edges(sat(j))) {
          const Edge& edge = edges[e];
          if (!usable(edge, i)) continue;
          if (edge.kind == EdgeKind::kUserLink || edge.kind == EdgeKind::kInterSatellite) {
            fb.add(f[e], 1.0);
            yb.add(y[e], 1.0);
          }
        }
        for (int e : g.out_edges(sat(j))) {
          const Edge& edge = edges[e];
          if (edge.kind == EdgeKind::kInterSatellite || edge.kind == EdgeKind::kFeeder) {
            fb.add(f[e], -1.0);
            yb.add(y[e], -1.0);
          }
        }
        const auto suffix = fmt::format("i{}_s{}_t{}", i, j, t);
        fb.emit_nonempty(suffix, Sense::kEq, 0.0);
        yb.emit_nonempty(suffix, Sense::kEq, 0.0);
      }
    }
  }
}

void add_delivery_constraints(PlanningModel& pm) {
  for (int t = 1; t <= pm.steps(); ++t) {
    const auto& g = pm.graph(t);
    const auto& edges = g.edges();
    for (const auto& d : pm.scenario.traffic) {
      const int i = d.id;
      const auto& y = pm.y[t - 1][i];
      const auto& f = pm.f[t - 1][i];

      RowBuilder deliver(pm, "dst"), once(pm, "dy1");
      deliver.add(pm.b[t - 1][i], 1.0);
      for (int e : g.in_edges(gateway(d.destination))) {
        const EdgeKind kind = edges[e].kind;
        if (kind != EdgeKind::kFeeder && kind != EdgeKind::kTerrestrial) continue;
        deliver.add(f[e], -1.0);
        once.add(y[e], 1.0);
      }
      deliver.emit(fmt::format("i{}_t{}", i, t), Sense::kEq, 0.0);
      once.emit_nonempty(fmt::format("i{}_t{}", i, t), Sense::kLe, 1.0);

      for (int l = 0; l < g.num_gateways(); ++l) {
        if (l == d.destination) continue;
        RowBuilder relay_f(pm, "rlf"), no_inflow(pm, "rtl"), relay_y(pm, "rly");
        for (int e : g.in_edges(gateway(l))) {
          if (edges[e].kind == EdgeKind::kFeeder) {
            relay_f.add(f[e], 1.0);
            relay_y.add(y[e], 1.0);
          } else if (edges[e].kind == EdgeKind::kTerrestrial) {
            no_inflow.add(f[e], 1.0);
          }
        }
        for (int e : g.out_edges(gateway(l))) {
          if (edges[e].kind != EdgeKind::kTerrestrial) continue;
          relay_f.add(f[e], -1.0);
          relay_y.add(y[e], -1.0);
        }
        const auto suffix = fmt::format("i{}_g{}_t{}", i, l, t);
        relay_f.emit_nonempty(suffix, Sense::kEq, 0.0);
        no_inflow.emit_nonempty(suffix, Sense::kEq, 0.0);
        relay_y.emit_nonempty(suffix, Sense::kEq, 0.0);
      }
    }
  }
}

void build_objective(PlanningModel& pm) {
  const Scenario& sc = pm.scenario;
  const int num_users = sc.num_users();
  const int steps = pm.steps();

  // s >= (r - b) / r, scaled by r.
  for (int t = 1; t <= steps; ++t) {
    for (const auto& d : sc.traffic) {
      RowBuilder(pm, "gap")
          .add(pm.s[t - 1][d.id], d.rate_mbps)
          .add(pm.b[t - 1][d.id], 1.0)
          .emit(fmt::format("i{}_t{}", d.id, t), Sense::kGe, d.rate_mbps);
    }
  }

  const auto& w = sc.weights;
  std::vector<Term> objective;
  if (sc.num_gateways() > 0) {
    const double per_gateway = w.w_gateway / sc.num_gateways();
    for (int col : pm.x) objective.push_back({col, per_gateway});
  }
  if (num_users > 0 && steps > 0) {
    const double per_gap = w.w_flow / (steps * num_users);
    const double per_second = w.w_latency / (steps * num_users * w.latency_norm_s);
    for (int t = 1; t <= steps; ++t) {
      for (int i = 0; i < num_users; ++i) {
        for (const Edge& e : pm.graph(t).edges()) {
          if (!usable(e, i)) continue;
          objective.push_back({pm.y[t - 1][i][e.id], per_second * e.latency_s});
        }
      }
    }
    for (int t = 1; t <= steps; ++t)
      for (int i = 0; i < num_users; ++i) objective.push_back({pm.s[t - 1][i], per_gap});
  }
  std::sort(objective.begin(), objective.end(),
            [](const Term& a, const Term& b) { return a.column < b.column; });
  pm.milp.set_objective(std::move(objective));
}

PlanningModel build_model(const Scenario& scenario,
                          const std::vector<SnapshotGraph>& snapshots) {
  PlanningModel pm = build_variables(scenario, snapshots);
  add_feasibility_constraints(pm);
  add_connection_constraints(pm);
  add_capacity_constraints(pm);
  add_flow_conservation(pm);
  add_delivery_constraints(pm);
  build_objective(pm);
  return pm;
}

// ---------------------------------------------------------------------------

std::vector<int> Solution::selected_gateways() const {
  std::vector<int> ids;
  for (std::size_t l = 0; l < x.size(); ++l)
    if (x[l] > 0.5) ids.push_back(static_cast<int>(l));
  return ids;
}

Solution extract_solution(const PlanningModel& pm, std::span<const double> values) {
  if (static_cast<int>(values.size()) != pm.milp.num_columns())
    throw std::invalid_argument(fmt::format("assignment has {} values, model has {} columns",
                                            values.size(), pm.milp.num_columns()));
  const Scenario& sc = pm.scenario;
  const int steps = pm.steps();
  const int num_users = sc.num_users();

  Solution sol;
  sol.values.assign(values.begin(), values.end());
  for (int col : pm.x) sol.x.push_back(values[col]);

  sol.b.assign(steps, std::vector<double>(num_users));
  sol.s = sol.b;
  sol.latency_s = sol.b;
  sol.y.resize(steps);
  sol.f.resize(steps);
  sol.z.resize(steps);
  sol.assigned_edges.assign(steps, std::vector<std::vector<int>>(num_users));

  double gap_sum = 0.0, latency_sum = 0.0;
  for (int t = 1; t <= steps; ++t) {
    const auto& edges = pm.graph(t).edges();
    sol.y[t - 1].assign(num_users, std::vector<double>(edges.size()));
    sol.f[t - 1] = sol.y[t - 1];
    sol.z[t - 1].assign(edges.size(), 0.0);
    for (const Edge& e : edges)
      if (pm.z[t - 1][e.id] >= 0) sol.z[t - 1][e.id] = values[pm.z[t - 1][e.id]];

    for (const auto& d : sc.traffic) {
      const int i = d.id;
      const double b = values[pm.b[t - 1][i]];
      sol.b[t - 1][i] = b;
      const double gap = std::max(0.0, (d.rate_mbps - b) / d.rate_mbps);
      sol.s[t - 1][i] = gap;
      gap_sum += gap;

      double latency = 0.0;
      for (const Edge& e : edges) {
        const double yv = values[pm.y[t - 1][i][e.id]];
        sol.y[t - 1][i][e.id] = yv;
        sol.f[t - 1][i][e.id] = values[pm.f[t - 1][i][e.id]];
        latency += e.latency_s * yv;
        if (yv > 0.5) sol.assigned_edges[t - 1][i].push_back(e.id);
      }
      sol.latency_s[t - 1][i] = latency;
      latency_sum += latency;
    }
  }

  const auto& w = sc.weights;
  CostBreakdown& c = sol.cost;
  if (sc.num_gateways() > 0) {
    double placed = 0.0;
    for (double v : sol.x) placed += v;
    c.gateways = placed / sc.num_gateways();
  }
  if (num_users > 0 && steps > 0) {
    c.flow_gap = gap_sum / (steps * num_users);
    c.latency = latency_sum / (steps * num_users * w.latency_norm_s);
  }
  c.total = w.w_gateway * c.gateways + w.w_flow * c.flow_gap + w.w_latency * c.latency;
  sol.objective_row = pm.milp.objective_value(values);
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

std::string lp_terms(const MilpModel& m, const std::vector<Term>& terms) {
  std::string out;
  int on_line = 0;
  for (const Term& term : terms) {
    if (term.coef == 0.0) continue;
    const char sign = term.coef < 0 ? '-' : '+';
    const double mag = std::abs(term.coef);
    if (out.empty() && sign == '+') {
      out += mag == 1.0 ? m.column(term.column).name
                        : fmt::format("{} {}", mag, m.column(term.column).name);
    } else {
      out += mag == 1.0 ? fmt::format(" {} {}", sign, m.column(term.column).name)
                        : fmt::format(" {} {} {}", sign, mag, m.column(term.column).name);
    }
    if (++on_line % 8 == 0) out += "\n   ";
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string write_lp_text(const MilpModel& m) {
  std::string out = fmt::format("\\ {}\nMinimize\n obj: {}\n", m.name,
                                lp_terms(m, m.objective()));
  if (m.objective_constant() != 0.0)
    out += fmt::format("   + {}\n", m.objective_constant());
  out += "Subject To\n";
  for (const auto& row : m.constraints()) {
    const char* sense = row.sense == Sense::kLe ? "<=" : row.sense == Sense::kGe ? ">=" : "=";
    out += fmt::format(" {}: {} {} {}\n", row.name, lp_terms(m, row.terms), sense, row.rhs);
  }
  out += "Bounds\n";
  for (const auto& c : m.columns()) {
    if (c.is_binary() && c.lb == 0.0 && c.ub == 1.0) continue;
    if (c.lb == c.ub) {
      out += fmt::format(" {} = {}\n", c.name, c.lb);
    } else if (std::isinf(c.ub)) {
      if (c.lb != 0.0) out += fmt::format(" {} >= {}\n", c.name, c.lb);
    } else {
      out += fmt::format(" {} <= {} <= {}\n", c.lb, c.name, c.ub);
    }
  }
  out += "Binaries\n";
  for (const auto& c : m.columns())
    if (c.is_binary()) out += fmt::format(" {}\n", c.name);
  out += "End\n";
  return out;
}

}  // namespace gwplan
