#include <cmath>
#include <random>

#include "doctest.h"
#include "gwplan/solver.hpp"
#include "oracles.hpp"

using namespace gwplan;

namespace {

Column var(const std::string& name, double lb, double ub, bool binary = false) {
  Column c;
  c.name = name;
  c.lb = lb;
  c.ub = ub;
  if (binary) c.domain = Domain::kBinary;
  return c;
}

LinConstraint row(const std::string& name, std::vector<Term> terms, Sense sense, double rhs) {
  LinConstraint r;
  r.name = name;
  r.terms = std::move(terms);
  r.sense = sense;
  r.rhs = rhs;
  return r;
}

void require_clean(const MilpModel& model, const std::vector<double>& values) {
  const auto violations = check_solution(model, values, 1e-7);
  for (const auto& v : violations) MESSAGE(v.name << " " << v.amount);
  REQUIRE(violations.empty());
}

}  // namespace

TEST_SUITE("solve_lp") {
  TEST_CASE("single bounded variable with a lower row") {
    MilpModel m;
    m.add_column(var("x", 0, 10));
    m.add_constraint(row("r", {{0, 1.0}}, Sense::kGe, 3.0));
    m.set_objective({{0, 1.0}});
    const LpResult r = solve_lp(m);
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-12));
  }

  TEST_CASE("two variables meet at a vertex") {
    MilpModel m;
    m.add_column(var("x", 0, 1));
    m.add_column(var("y", 0, 1));
    m.add_constraint(row("r", {{0, 1.0}, {1, 1.0}}, Sense::kLe, 1.0));
    m.set_objective({{0, -1.0}, {1, -1.0}});
    const LpResult r = solve_lp(m);
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.objective == doctest::Approx(-1.0).epsilon(1e-12));
  }

  TEST_CASE("infeasible and unbounded verdicts") {
    MilpModel m;
    m.add_column(var("x", 0, 1));
    m.add_constraint(row("r", {{0, 1.0}}, Sense::kGe, 2.0));
    CHECK(solve_lp(m).status == LpStatus::kInfeasible);

    MilpModel u;
    u.add_column(var("x", 0, kInf));
    u.add_column(var("y", -kInf, kInf));
    u.add_constraint(row("r", {{0, 1.0}, {1, -1.0}}, Sense::kLe, 4.0));
    u.set_objective({{0, -1.0}});
    CHECK(solve_lp(u).status == LpStatus::kUnbounded);
  }

  TEST_CASE("free variables and equality rows") {
    MilpModel m;
    m.add_column(var("x", -kInf, kInf));
    m.add_column(var("y", -kInf, kInf));
    m.add_constraint(row("a", {{0, 1.0}, {1, 2.0}}, Sense::kEq, 4.0));
    m.add_constraint(row("b", {{0, 1.0}, {1, -1.0}}, Sense::kEq, 1.0));
    m.set_objective({{0, 1.0}, {1, 1.0}});
    const LpResult r = solve_lp(m);
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.values[0] == doctest::Approx(2.0));
    CHECK(r.values[1] == doctest::Approx(1.0));
  }

  TEST_CASE("degenerate problem terminates") {
    // Klee-Minty style cube with many ties at the origin.
    const int n = 6;
    MilpModel m;
    for (int j = 0; j < n; ++j) m.add_column(var("x" + std::to_string(j), 0, kInf));
    for (int i = 0; i < n; ++i) {
      std::vector<Term> terms;
      for (int j = 0; j < i; ++j) terms.push_back({j, std::pow(2.0, i - j + 1)});
      terms.push_back({i, 1.0});
      m.add_constraint(row("k" + std::to_string(i), terms, Sense::kLe, std::pow(5.0, i + 1)));
      m.add_constraint(row("z" + std::to_string(i), {{i, 1.0}}, Sense::kLe, 0.0));
    }
    std::vector<Term> obj;
    for (int j = 0; j < n; ++j) obj.push_back({j, -std::pow(2.0, n - 1 - j)});
    m.set_objective(obj);
    const LpResult r = solve_lp(m);
    REQUIRE(r.status == LpStatus::kOptimal);
    CHECK(r.objective == doctest::Approx(0.0));
  }

  TEST_CASE("random dense LPs match vertex enumeration") {
    std::mt19937_64 rng(20240611);
    int optimal = 0, infeasible = 0;
    for (int k = 0; k < 40; ++k) {
      const MilpModel m = oracle::random_lp(rng);
      const auto expected = oracle::lp_by_vertices(m);
      const LpResult r = solve_lp(m);
      if (!expected) {
        CHECK(r.status == LpStatus::kInfeasible);
        ++infeasible;
        continue;
      }
      REQUIRE(r.status == LpStatus::kOptimal);
      CHECK(std::abs(r.objective - *expected) <= 1e-7);
      require_clean(m, r.values);
      ++optimal;
    }
    CHECK(optimal >= 20);
    MESSAGE("optimal " << optimal << ", infeasible " << infeasible);
  }
}

TEST_SUITE("solve_milp") {
  TEST_CASE("two-item knapsack picks the heavier item") {
    MilpModel m;
    m.add_column(var("a", 0, 1, true));
    m.add_column(var("b", 0, 1, true));
    m.add_constraint(row("cap", {{0, 1.0}, {1, 1.0}}, Sense::kLe, 1.0));
    m.set_objective({{0, -3.0}, {1, -4.0}});
    const BnbResult r = solve_milp(m);
    REQUIRE(r.status == MipStatus::kOptimal);
    CHECK(-r.objective == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(r.incumbent[1] == 1.0);
  }

  TEST_CASE("infeasible integer program") {
    MilpModel m;
    m.add_column(var("a", 0, 1, true));
    m.add_column(var("b", 0, 1, true));
    m.add_constraint(row("odd", {{0, 2.0}, {1, 2.0}}, Sense::kEq, 1.0));
    const BnbResult r = solve_milp(m);
    CHECK(r.status == MipStatus::kInfeasible);
    CHECK_FALSE(r.has_incumbent());
  }

  TEST_CASE("random binary MILPs match exhaustive enumeration") {
    std::mt19937_64 rng(77);
    int solved = 0;
    for (int k = 0; k < 40; ++k) {
      const MilpModel m = oracle::random_milp(rng);
      const auto expected = oracle::milp_by_enumeration(m);
      for (const auto order : {NodeOrder::kBestBound, NodeOrder::kDepthFirst}) {
        for (const auto branching : {Branching::kMostFractional, Branching::kPseudoCost}) {
          SolverConfig cfg;
          cfg.node_order = order;
          cfg.branching = branching;
          cfg.record_trace = true;
          const BnbResult r = solve_milp(m, cfg);
          if (!expected) {
            CHECK(r.status == MipStatus::kInfeasible);
            continue;
          }
          REQUIRE(r.status == MipStatus::kOptimal);
          CHECK(std::abs(r.objective - *expected) <= 1e-6);
          CHECK(r.gap <= cfg.mip_gap);
          CHECK(r.gap >= 0.0);
          require_clean(m, r.incumbent);
          for (std::size_t p = 1; p < r.trace.size(); ++p) {
            CHECK(r.trace[p].bound >= r.trace[p - 1].bound);
            CHECK(r.trace[p].incumbent <= r.trace[p - 1].incumbent);
          }
          const LpResult lp = solve_lp(m);
          REQUIRE(lp.status == LpStatus::kOptimal);
          CHECK(lp.objective <= r.objective + 1e-9);
        }
      }
      if (expected) ++solved;
    }
    CHECK(solved >= 20);
  }

  TEST_CASE("presolve keeps the integer optimum") {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 20; ++k) {
      const MilpModel m = oracle::random_milp(rng, 8, 6, 8);
      SolverConfig plain;
      plain.presolve = false;
      const BnbResult a = solve_milp(m, plain);
      const BnbResult b = solve_milp(m);
      REQUIRE(a.status == b.status);
      if (a.status == MipStatus::kOptimal) CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
    }
  }

  TEST_CASE("coefficient tightening shrinks big-M rows") {
    MilpModel m;
    m.add_column(var("f", 0, 50));
    m.add_column(var("y", 0, 1, true));
    m.add_constraint(row("gate", {{0, 1.0}, {1, -1000.0}}, Sense::kLe, 0.0));
    const auto p = presolve(m);
    REQUIRE(p.has_value());
    const auto& terms = p->constraints()[0].terms;
    REQUIRE(terms.size() == 2);
    CHECK(terms[1].coef == doctest::Approx(-50.0));
  }

  TEST_CASE("depth-first search is deterministic") {
    std::mt19937_64 rng(99);
    for (int k = 0; k < 5; ++k) {
      const MilpModel m = oracle::random_milp(rng);
      SolverConfig cfg;
      cfg.node_order = NodeOrder::kDepthFirst;
      const BnbResult a = solve_milp(m, cfg);
      const BnbResult b = solve_milp(m, cfg);
      CHECK(a.nodes == b.nodes);
      CHECK(a.incumbent == b.incumbent);
    }
  }

  TEST_CASE("node limit reports a limit status") {
    std::mt19937_64 rng(3);
    MilpModel m = oracle::random_milp(rng, 12, 0, 6);
    SolverConfig cfg;
    cfg.node_limit = 1;
    cfg.presolve = false;
    const BnbResult r = solve_milp(m, cfg);
    CHECK((r.status == MipStatus::kTimeLimit || r.status == MipStatus::kOptimal ||
           r.status == MipStatus::kInfeasible));
    CHECK(r.nodes <= 1);
  }

  TEST_CASE("tolerances must be positive") {
    MilpModel m;
    SolverConfig cfg;
    cfg.mip_gap = 0.0;
    CHECK_THROWS_AS(solve_milp(m, cfg), std::invalid_argument);
  }
}

TEST_SUITE("check_solution") {
  TEST_CASE("reports each violated row, bound and integrality") {
    MilpModel m;
    m.add_column(var("a", 0, 1, true));
    m.add_column(var("c", 0, 5));
    m.add_constraint(row("le", {{0, 1.0}, {1, 1.0}}, Sense::kLe, 2.0));
    m.add_constraint(row("eq", {{1, 1.0}}, Sense::kEq, 1.0));
    CHECK(check_solution(m, std::vector<double>{1.0, 1.0}).empty());
    const auto v = check_solution(m, std::vector<double>{0.5, 6.0});
    std::vector<std::string> names;
    for (const auto& x : v) names.push_back(x.name);
    CHECK(names == std::vector<std::string>{"le", "eq", "integrality:a", "bound:c"});
    CHECK(v[0].amount == doctest::Approx(4.5));
    CHECK(v[1].amount == doctest::Approx(5.0));
    CHECK_THROWS_AS(check_solution(m, std::vector<double>{0.0}), std::invalid_argument);
  }
}
