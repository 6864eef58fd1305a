#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "gwplan/solver.hpp"

namespace gwplan {

std::vector<Violation> check_solution(const MilpModel& model, std::span<const double> values,
                                      double tol) {
  if (static_cast<int>(values.size()) != model.num_columns())
    throw std::invalid_argument(fmt::format("assignment has {} values, model has {} columns",
                                            values.size(), model.num_columns()));
  std::vector<Violation> out;
  for (int r = 0; r < model.num_rows(); ++r) {
    const LinConstraint& row = model.constraints()[r];
    const double activity = model.row_activity(r, values);
    double excess = 0.0;
    switch (row.sense) {
      case Sense::kLe: excess = activity - row.rhs; break;
      case Sense::kGe: excess = row.rhs - activity; break;
      case Sense::kEq: excess = std::abs(activity - row.rhs); break;
    }
    if (!(excess <= tol)) out.push_back({row.name, std::isnan(excess) ? kInf : excess});
  }
  for (int j = 0; j < model.num_columns(); ++j) {
    const Column& c = model.column(j);
    const double v = values[j];
    if (!std::isfinite(v)) {
      out.push_back({"bound:" + c.name, kInf});
      continue;
    }
    if (v < c.lb - tol) out.push_back({"bound:" + c.name, c.lb - v});
    if (v > c.ub + tol) out.push_back({"bound:" + c.name, v - c.ub});
    if (c.is_binary()) {
      const double frac = std::abs(v - std::round(v));
      if (frac > tol) out.push_back({"integrality:" + c.name, frac});
    }
  }
  return out;
}

}  // namespace gwplan
