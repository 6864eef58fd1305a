#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>

#include "gwplan/orbital.hpp"

namespace oracle {

using gwplan::Domain;
using gwplan::EdgeKind;
using gwplan::MilpModel;
using gwplan::Sense;

namespace {

constexpr double kEps = 1e-9;
constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

using Matrix = std::vector<std::vector<double>>;

// Solves a square system by Gaussian elimination with partial pivoting.
std::optional<std::vector<double>> solve_square(Matrix a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) < 1e-10) return std::nullopt;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (int k = col; k < n; ++k) a[r][k] -= factor * a[col][k];
      b[r] -= factor * b[col];
    }
  }
  for (int r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

struct DenseRow {
  std::vector<double> coef;
  Sense sense;
  double rhs;
};

struct DenseLp {
  int n = 0;
  std::vector<DenseRow> rows;
  std::vector<double> cost, lb, ub;
  double constant = 0.0;
};

DenseLp densify(const MilpModel& model) {
  DenseLp lp;
  lp.n = model.num_columns();
  for (const auto& row : model.constraints()) {
    DenseRow d{std::vector<double>(lp.n, 0.0), row.sense, row.rhs};
    for (const auto& t : row.terms) d.coef[t.column] += t.coef;
    lp.rows.push_back(std::move(d));
  }
  lp.cost.assign(lp.n, 0.0);
  for (const auto& t : model.objective()) lp.cost[t.column] += t.coef;
  lp.constant = model.objective_constant();
  for (const auto& c : model.columns()) {
    if (!std::isfinite(c.lb) || !std::isfinite(c.ub))
      throw std::invalid_argument("oracle needs finite bounds");
    lp.lb.push_back(c.lb);
    lp.ub.push_back(c.ub);
  }
  return lp;
}

// Textbook two-phase tableau simplex with Bland's rule, on a bounded LP.
std::optional<double> bland_simplex(const DenseLp& lp) {
  const int n = lp.n;
  // Rows over shifted variables u = x - lb, plus u <= ub - lb.
  std::vector<DenseRow> rows;
  double shift_cost = lp.constant;
  for (int j = 0; j < n; ++j) shift_cost += lp.cost[j] * lp.lb[j];
  for (const DenseRow& r : lp.rows) {
    double rhs = r.rhs;
    for (int j = 0; j < n; ++j) rhs -= r.coef[j] * lp.lb[j];
    rows.push_back({r.coef, r.sense, rhs});
  }
  for (int j = 0; j < n; ++j) {
    std::vector<double> coef(n, 0.0);
    coef[j] = 1.0;
    rows.push_back({coef, Sense::kLe, lp.ub[j] - lp.lb[j]});
  }
  const int m = static_cast<int>(rows.size());
  for (DenseRow& r : rows) {
    if (r.rhs < 0) {
      for (double& v : r.coef) v = -v;
      r.rhs = -r.rhs;
      if (r.sense == Sense::kLe) r.sense = Sense::kGe;
      else if (r.sense == Sense::kGe) r.sense = Sense::kLe;
    }
  }
  // Columns: n structurals, m slack/surplus (zero for equalities), m artificials.
  const int cols = n + 2 * m;
  Matrix tab(m, std::vector<double>(cols + 1, 0.0));
  std::vector<int> basis(m);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n; ++j) tab[r][j] = rows[r].coef[j];
    if (rows[r].sense == Sense::kLe) tab[r][n + r] = 1.0;
    if (rows[r].sense == Sense::kGe) tab[r][n + r] = -1.0;
    tab[r][n + m + r] = 1.0;
    tab[r][cols] = rows[r].rhs;
    basis[r] = n + m + r;
  }

  auto run = [&](const std::vector<double>& cost, const std::vector<bool>& allowed) {
    for (int iter = 0; iter < 100000; ++iter) {
      int enter = -1;
      for (int j = 0; j < cols && enter < 0; ++j) {
        if (!allowed[j]) continue;
        if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
        double d = cost[j];
        for (int r = 0; r < m; ++r) d -= cost[basis[r]] * tab[r][j];
        if (d < -kEps) enter = j;
      }
      if (enter < 0) return true;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int r = 0; r < m; ++r) {
        if (tab[r][enter] <= kEps) continue;
        const double ratio = tab[r][cols] / tab[r][enter];
        if (ratio < best - 1e-12 || (std::abs(ratio - best) <= 1e-12 && basis[r] < basis[leave])) {
          best = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;  // unbounded; cannot happen with bounded columns
      const double p = tab[leave][enter];
      for (double& v : tab[leave]) v /= p;
      for (int r = 0; r < m; ++r) {
        if (r == leave || tab[r][enter] == 0.0) continue;
        const double factor = tab[r][enter];
        for (int k = 0; k <= cols; ++k) tab[r][k] -= factor * tab[leave][k];
      }
      basis[leave] = enter;
    }
    throw std::runtime_error("oracle simplex did not terminate");
  };

  std::vector<double> phase1(cols, 0.0);
  for (int r = 0; r < m; ++r) phase1[n + m + r] = 1.0;
  std::vector<bool> all(cols, true);
  run(phase1, all);
  double infeasibility = 0.0;
  for (int r = 0; r < m; ++r)
    if (basis[r] >= n + m) infeasibility += tab[r][cols];
  if (infeasibility > 1e-7) return std::nullopt;

  // Pivot zero-valued artificials out of the basis where possible.
  for (int r = 0; r < m; ++r) {
    if (basis[r] < n + m) continue;
    for (int j = 0; j < n + m; ++j) {
      if (std::abs(tab[r][j]) > 1e-9) {
        const double p = tab[r][j];
        for (double& v : tab[r]) v /= p;
        for (int k = 0; k < m; ++k) {
          if (k == r || tab[k][j] == 0.0) continue;
          const double factor = tab[k][j];
          for (int c = 0; c <= cols; ++c) tab[k][c] -= factor * tab[r][c];
        }
        basis[r] = j;
        break;
      }
    }
  }
  std::vector<double> phase2(cols, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = lp.cost[j];
  std::vector<bool> allowed(cols, true);
  for (int r = 0; r < m; ++r) allowed[n + m + r] = false;
  run(phase2, allowed);
  double obj = shift_cost;
  for (int r = 0; r < m; ++r)
    if (basis[r] < n) obj += lp.cost[basis[r]] * tab[r][cols];
  return obj;
}

bool feasible_point(const DenseLp& lp, const std::vector<double>& x, double tol) {
  for (int j = 0; j < lp.n; ++j) {
    if (x[j] < lp.lb[j] - tol || x[j] > lp.ub[j] + tol) return false;
  }
  for (const DenseRow& r : lp.rows) {
    double act = 0.0;
    for (int j = 0; j < lp.n; ++j) act += r.coef[j] * x[j];
    const double scale = tol * std::max(1.0, std::abs(r.rhs));
    if (r.sense != Sense::kGe && act > r.rhs + scale) return false;
    if (r.sense != Sense::kLe && act < r.rhs - scale) return false;
  }
  return true;
}

}  // namespace

std::optional<double> lp_by_vertices(const MilpModel& model, double tol) {
  const DenseLp lp = densify(model);
  const int n = lp.n;
  // Candidate tight constraints: rows, then lower and upper bounds.
  struct Tight {
    std::vector<double> coef;
    double rhs;
  };
  std::vector<Tight> mandatory, optional;
  for (const DenseRow& r : lp.rows) (r.sense == Sense::kEq ? mandatory : optional).push_back({r.coef, r.rhs});
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    optional.push_back({e, lp.lb[j]});
    if (lp.ub[j] != lp.lb[j]) optional.push_back({e, lp.ub[j]});
  }
  if (static_cast<int>(mandatory.size()) > n) {
    optional.insert(optional.begin(), mandatory.begin(), mandatory.end());
    mandatory.clear();
  }
  const int need = n - static_cast<int>(mandatory.size());
  const int k = static_cast<int>(optional.size());

  std::optional<double> best;
  std::vector<int> pick(need);
  std::function<void(int, int)> choose = [&](int depth, int from) {
    if (depth == need) {
      Matrix a;
      std::vector<double> b;
      for (const Tight& t : mandatory) {
        a.push_back(t.coef);
        b.push_back(t.rhs);
      }
      for (int idx : pick) {
        a.push_back(optional[idx].coef);
        b.push_back(optional[idx].rhs);
      }
      const auto x = solve_square(a, b);
      if (!x || !feasible_point(lp, *x, tol * 100)) return;
      double obj = lp.constant;
      for (int j = 0; j < n; ++j) obj += lp.cost[j] * (*x)[j];
      if (!best || obj < *best) best = obj;
      return;
    }
    for (int idx = from; idx <= k - (need - depth); ++idx) {
      pick[depth] = idx;
      choose(depth + 1, idx + 1);
    }
  };
  choose(0, 0);
  return best;
}

std::optional<double> milp_by_enumeration(const MilpModel& model) {
  const DenseLp full = densify(model);
  std::vector<int> binaries, continuous;
  for (int j = 0; j < model.num_columns(); ++j)
    (model.column(j).domain == Domain::kBinary ? binaries : continuous).push_back(j);
  if (binaries.size() > 20) throw std::invalid_argument("too many binaries to enumerate");

  std::optional<double> best;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << binaries.size()); ++mask) {
    std::vector<double> fixed(full.n, kUnset);
    bool ok = true;
    for (std::size_t k = 0; k < binaries.size(); ++k) {
      const int j = binaries[k];
      fixed[j] = (mask >> k) & 1 ? 1.0 : 0.0;
      if (fixed[j] < full.lb[j] || fixed[j] > full.ub[j]) ok = false;
    }
    if (!ok) continue;
    DenseLp sub;
    sub.n = static_cast<int>(continuous.size());
    sub.constant = full.constant;
    for (int j : binaries) sub.constant += full.cost[j] * fixed[j];
    for (int j : continuous) {
      sub.cost.push_back(full.cost[j]);
      sub.lb.push_back(full.lb[j]);
      sub.ub.push_back(full.ub[j]);
    }
    for (const DenseRow& r : full.rows) {
      DenseRow d{{}, r.sense, r.rhs};
      for (int j : binaries) d.rhs -= r.coef[j] * fixed[j];
      for (int j : continuous) d.coef.push_back(r.coef[j]);
      sub.rows.push_back(std::move(d));
    }
    const auto value = bland_simplex(sub);
    if (value && (!best || *value < *best)) best = value;
  }
  return best;
}

// ---------------------------------------------------------------------------

MilpModel random_lp(std::mt19937_64& rng, int max_vars, int max_rows) {
  std::uniform_int_distribution<int> nvar(1, max_vars), nrow(1, max_rows);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), bound(0.0, 4.0);
  std::uniform_int_distribution<int> sense(0, 5);
  MilpModel m;
  const int n = nvar(rng), rows = nrow(rng);
  std::vector<double> point;
  for (int j = 0; j < n; ++j) {
    gwplan::Column c;
    c.name = "v" + std::to_string(j);
    c.lb = -bound(rng);
    c.ub = c.lb + 0.5 + bound(rng);
    point.push_back(c.lb + (c.ub - c.lb) * std::uniform_real_distribution<double>(0, 1)(rng));
    m.add_column(c);
  }
  // Most rows pass through a slack around a random interior point; some are
  // left arbitrary so that infeasible instances occur too.
  const bool anchored = std::uniform_int_distribution<int>(0, 4)(rng) != 0;
  for (int r = 0; r < rows; ++r) {
    gwplan::LinConstraint row;
    row.name = "r" + std::to_string(r);
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (std::uniform_int_distribution<int>(0, 9)(rng) < 2) continue;
      const double a = std::round(coef(rng) * 100) / 100;
      row.terms.push_back({j, a});
      act += a * point[j];
    }
    const int s = sense(rng);
    row.sense = s == 0 ? Sense::kEq : s <= 2 ? Sense::kLe : Sense::kGe;
    const double slack = anchored ? bound(rng) : coef(rng) * 2;
    row.rhs = row.sense == Sense::kEq ? act : row.sense == Sense::kLe ? act + slack : act - slack;
    if (row.sense == Sense::kEq && !anchored) row.rhs += coef(rng);
    m.add_constraint(row);
  }
  std::vector<gwplan::Term> obj;
  for (int j = 0; j < n; ++j) obj.push_back({j, std::round(coef(rng) * 100) / 100});
  m.set_objective(obj);
  return m;
}

MilpModel random_milp(std::mt19937_64& rng, int max_binaries, int max_continuous,
                      int max_rows) {
  std::uniform_int_distribution<int> nb(1, max_binaries), nc(0, max_continuous),
      nrow(1, max_rows);
  std::uniform_real_distribution<double> coef(-5.0, 5.0), unit(0.0, 1.0);
  MilpModel m;
  const int binaries = nb(rng), continuous = nc(rng), rows = nrow(rng);
  std::vector<double> point;
  for (int j = 0; j < binaries + continuous; ++j) {
    gwplan::Column c;
    if (j < binaries) {
      c.name = "b" + std::to_string(j);
      c.domain = Domain::kBinary;
      c.ub = 1.0;
      point.push_back(unit(rng) < 0.5 ? 0.0 : 1.0);
    } else {
      c.name = "c" + std::to_string(j);
      c.lb = 0.0;
      c.ub = 1.0 + 9.0 * unit(rng);
      point.push_back(c.ub * unit(rng));
    }
    m.add_column(c);
  }
  const int total = binaries + continuous;
  for (int r = 0; r < rows; ++r) {
    gwplan::LinConstraint row;
    row.name = "r" + std::to_string(r);
    double act = 0.0;
    for (int j = 0; j < total; ++j) {
      if (unit(rng) < 0.4) continue;
      const double a = std::round(coef(rng) * 10) / 10;
      row.terms.push_back({j, a});
      act += a * point[j];
    }
    const double pick = unit(rng);
    row.sense = pick < 0.1 ? Sense::kEq : pick < 0.6 ? Sense::kLe : Sense::kGe;
    const double slack = 2.0 * unit(rng);
    row.rhs = row.sense == Sense::kEq ? act : row.sense == Sense::kLe ? act + slack : act - slack;
    m.add_constraint(row);
  }
  std::vector<gwplan::Term> obj;
  for (int j = 0; j < total; ++j) obj.push_back({j, std::round(coef(rng) * 100) / 100});
  m.set_objective(obj);
  return m;
}

// ---------------------------------------------------------------------------
// Planning model oracle

namespace {

struct Route {
  int uplink_sat = -1;  // -1: unserved
  int feeder_sat = -1;
  int feeder_gateway = -1;
  double latency_s = 0.0;
};

struct Step {
  std::vector<std::vector<Route>> routes;  // [traffic] -> options (index 0 unserved)
};

// Shortest ISL latency between every pair of satellites.
Matrix isl_distances(const gwplan::SnapshotGraph& g) {
  const int ns = g.num_satellites();
  const double inf = std::numeric_limits<double>::infinity();
  Matrix dist(ns, std::vector<double>(ns, inf));
  std::vector<std::vector<std::pair<int, double>>> adj(ns);
  for (const auto& e : g.edges()) {
    if (e.kind != EdgeKind::kInterSatellite) continue;
    adj[e.u.index].emplace_back(e.v.index, e.latency_s);
    if (e.bidirectional || !g.directed()) adj[e.v.index].emplace_back(e.u.index, e.latency_s);
  }
  for (int s = 0; s < ns; ++s) {
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist[s][s] = 0.0;
    queue.emplace(0.0, s);
    while (!queue.empty()) {
      const auto [d, u] = queue.top();
      queue.pop();
      if (d > dist[s][u]) continue;
      for (const auto& [v, w] : adj[u]) {
        if (d + w < dist[s][v]) {
          dist[s][v] = d + w;
          queue.emplace(d + w, v);
        }
      }
    }
  }
  return dist;
}

// Maximizes sum(weight_i * b_i) over a 2-D (or 1-D) packing polytope by
// enumerating vertices. rows: sum_i a_i b_i <= cap.
double best_allocation(const std::vector<double>& weight, const std::vector<double>& upper,
                       const std::vector<std::pair<std::vector<double>, double>>& rows) {
  const int n = static_cast<int>(weight.size());
  std::vector<std::pair<std::vector<double>, double>> all = rows;
  for (int i = 0; i < n; ++i) {
    std::vector<double> e(n, 0.0), ne(n, 0.0);
    e[i] = 1.0;
    ne[i] = -1.0;
    all.emplace_back(e, upper[i]);
    all.emplace_back(ne, 0.0);
  }
  auto feasible = [&](const std::vector<double>& b) {
    for (const auto& [a, cap] : all) {
      double act = 0.0;
      for (int i = 0; i < n; ++i) act += a[i] * b[i];
      if (act > cap + 1e-9) return false;
    }
    return true;
  };
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(n);
  std::function<void(int, int)> choose = [&](int depth, int from) {
    if (depth == n) {
      Matrix a;
      std::vector<double> rhs;
      for (int idx : pick) {
        a.push_back(all[idx].first);
        rhs.push_back(all[idx].second);
      }
      const auto b = solve_square(a, rhs);
      if (!b || !feasible(*b)) return;
      double v = 0.0;
      for (int i = 0; i < n; ++i) v += weight[i] * (*b)[i];
      best = std::max(best, v);
      return;
    }
    for (int idx = from; idx < static_cast<int>(all.size()); ++idx) {
      pick[depth] = idx;
      choose(depth + 1, idx + 1);
    }
  };
  choose(0, 0);
  return best;
}

}  // namespace

double planning_optimum(const gwplan::Scenario& sc,
                        const std::vector<gwplan::SnapshotGraph>& snapshots) {
  const int nu = sc.num_users(), ng = sc.num_gateways();
  const int steps = static_cast<int>(snapshots.size());
  double total_rate = 0.0;
  for (const auto& d : sc.traffic) total_rate += d.rate_mbps;
  if (sc.capacities.isl_mbps < total_rate)
    throw std::invalid_argument("oracle requires non-binding ISL capacity");

  const auto& w = sc.weights;
  const double per_gap = w.w_flow / (steps * nu);
  const double per_second = w.w_latency / (steps * nu * w.latency_norm_s);

  double best_total = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << ng); ++mask) {
    double total = w.w_gateway * __builtin_popcount(mask) / ng;
    for (const auto& g : snapshots) {
      const Matrix dist = isl_distances(g);
      std::vector<std::vector<Route>> options(nu);
      std::vector<std::vector<std::pair<int, double>>> uplinks(nu);  // (sat, latency)
      std::vector<std::tuple<int, int, double>> feeders;            // (sat, gw, latency)
      double tl_latency[16][16] = {};
      for (const auto& e : g.edges()) {
        if (e.kind == EdgeKind::kUserLink) uplinks[e.u.index].emplace_back(e.v.index, e.latency_s);
        if (e.kind == EdgeKind::kFeeder && (mask >> e.v.index & 1))
          feeders.emplace_back(e.u.index, e.v.index, e.latency_s);
        if (e.kind == EdgeKind::kTerrestrial)
          tl_latency[e.u.index][e.v.index] = tl_latency[e.v.index][e.u.index] = e.latency_s;
      }
      for (int i = 0; i < nu; ++i) {
        options[i].push_back(Route{});
        const int dest = sc.traffic[i].destination;
        for (const auto& [up_sat, up_lat] : uplinks[i]) {
          for (const auto& [fl_sat, gw, fl_lat] : feeders) {
            const double isl = dist[up_sat][fl_sat];
            if (!std::isfinite(isl)) continue;
            Route r{up_sat, fl_sat, gw, up_lat + isl + fl_lat};
            if (gw != dest) r.latency_s += tl_latency[gw][dest];
            options[i].push_back(r);
          }
        }
      }
      // Enumerate one option per traffic.
      double best_step = std::numeric_limits<double>::infinity();
      std::vector<int> choice(nu, 0);
      std::function<void(int)> rec = [&](int i) {
        if (i == nu) {
          // Feeder matching: one feeder per satellite and per gateway.
          for (int a = 0; a < nu; ++a) {
            const Route& ra = options[a][choice[a]];
            if (ra.uplink_sat < 0) continue;
            for (int b = a + 1; b < nu; ++b) {
              const Route& rb = options[b][choice[b]];
              if (rb.uplink_sat < 0) continue;
              const bool same_feeder = ra.feeder_sat == rb.feeder_sat && ra.feeder_gateway == rb.feeder_gateway;
              if (!same_feeder && (ra.feeder_sat == rb.feeder_sat || ra.feeder_gateway == rb.feeder_gateway))
                return;
            }
          }
          double cost = 0.0;
          std::vector<int> served;
          for (int a = 0; a < nu; ++a) {
            const Route& r = options[a][choice[a]];
            cost += per_gap;  // s = 1 - b/r; the allocation below earns it back
            if (r.uplink_sat >= 0) {
              cost += per_second * r.latency_s;
              served.push_back(a);
            }
          }
          if (!served.empty()) {
            std::vector<double> weight, upper;
            for (int a : served) {
              weight.push_back(per_gap / sc.traffic[a].rate_mbps);
              upper.push_back(std::min(sc.traffic[a].rate_mbps, sc.big_m));
            }
            std::vector<std::pair<std::vector<double>, double>> rows;
            const int k = static_cast<int>(served.size());
            for (int p = 0; p < k; ++p) {
              std::vector<double> ul(k, 0.0), fl(k, 0.0);
              const Route& rp = options[served[p]][choice[served[p]]];
              for (int q = 0; q < k; ++q) {
                const Route& rq = options[served[q]][choice[served[q]]];
                if (rq.uplink_sat == rp.uplink_sat) ul[q] = 1.0;
                if (rq.feeder_sat == rp.feeder_sat && rq.feeder_gateway == rp.feeder_gateway) fl[q] = 1.0;
              }
              rows.emplace_back(ul, sc.capacities.user_mbps);
              rows.emplace_back(fl, sc.capacities.feeder_mbps);
            }
            cost -= best_allocation(weight, upper, rows);
          }
          best_step = std::min(best_step, cost);
          return;
        }
        for (std::size_t k = 0; k < options[i].size(); ++k) {
          choice[i] = static_cast<int>(k);
          rec(i + 1);
        }
      };
      rec(0);
      total += best_step;
    }
    best_total = std::min(best_total, total);
  }
  return best_total;
}

// ---------------------------------------------------------------------------

gwplan::Scenario tiny_scenario(std::mt19937_64& rng) {
  using gwplan::Scenario;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  static constexpr int kShapes[][2] = {{1, 4}, {1, 6}, {2, 2}, {2, 3}, {3, 2}, {1, 5}};
  const auto& shape = kShapes[std::uniform_int_distribution<int>(0, 5)(rng)];

  Scenario sc;
  auto& c = sc.constellation;
  c.planes = shape[0];
  c.sats_per_plane = shape[1];
  c.altitude_km = uniform(700.0, 1500.0);
  c.inclination_deg = uniform(40.0, 90.0);
  c.raan_first_deg = uniform(0.0, 360.0);
  c.raan_spacing_deg = uniform(10.0, 40.0);  // close planes so cross-plane links exist
  c.phasing_deg = uniform(0.0, 30.0);
  sc.time.steps = std::uniform_int_distribution<int>(1, 2)(rng);
  sc.time.step_s = uniform(30.0, 120.0);

  const auto eph = gwplan::propagate(c, sc.time);
  auto subpoint = [&](int sat, double jitter) {
    const auto p = eph.at(1, sat);
    const double lat = gwplan::rad2deg(std::asin(p.z / p.norm()));
    const double lon = gwplan::rad2deg(std::atan2(p.y, p.x));
    double la = std::clamp(lat + uniform(-jitter, jitter), -89.0, 89.0);
    double lo = lon + uniform(-jitter, jitter);
    if (lo > 180.0) lo -= 360.0;
    if (lo < -180.0) lo += 360.0;
    return std::pair{la, lo};
  };
  std::uniform_int_distribution<int> any_sat(0, c.num_satellites() - 1);

  const int ng = std::uniform_int_distribution<int>(2, 3)(rng);
  for (int l = 0; l < ng; ++l) {
    const auto [lat, lon] = subpoint(any_sat(rng), 6.0);
    sc.gateways.push_back({l, "g" + std::to_string(l), lat, lon, uniform(0.0, 10.0)});
  }
  const int nu = std::uniform_int_distribution<int>(1, 2)(rng);
  double total = 0.0;
  for (int i = 0; i < nu; ++i) {
    const auto [lat, lon] = subpoint(any_sat(rng), 4.0);
    const double rate = std::round(uniform(20.0, 80.0));
    total += rate;
    sc.traffic.push_back({i, lat, lon, rate, std::uniform_int_distribution<int>(0, ng - 1)(rng),
                          uniform(5.0, 15.0)});
  }
  sc.capacities.user_mbps = std::round(uniform(30.0, 160.0));
  sc.capacities.feeder_mbps = std::round(uniform(30.0, 160.0));
  sc.capacities.isl_mbps = total + 10.0;
  sc.big_m = sc.capacities.isl_mbps;

  double wg = uniform(0.05, 1.0), wf = uniform(0.05, 1.0), wl = uniform(0.05, 1.0);
  const double sum = wg + wf + wl;
  sc.weights.w_gateway = wg / sum;
  sc.weights.w_flow = wf / sum;
  sc.weights.w_latency = 1.0 - sc.weights.w_gateway - sc.weights.w_flow;
  sc.weights.latency_norm_s = 0.1;
  gwplan::validate(sc);
  return sc;
}

}  // namespace oracle
