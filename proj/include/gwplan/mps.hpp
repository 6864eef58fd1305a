// Fixed-format MPS export/import and plain-text assignments.
//
// Names in the MPS file are 8-character codes so that every field fits the
// fixed column layout:
//   columns  <symbol letter><7 base-36 digits of the column index>, e.g. Y00001A2
//   rows     E<family> padded with '_' to 4 chars + 4 base-36 digits of the
//            row's serial within its family, e.g. ECIS000C; R___xxxx for rows
//            without a family; the objective row is COST.
// The long names are kept in "* ALIAS <code> <name>" comment lines, which
// other readers ignore.
//
// Assignment files hold one "<name> <value>" pair per line; blank lines and
// lines starting with '#' are skipped. Names may be long names or MPS codes.

#ifndef GWPLAN_MPS_HPP_
#define GWPLAN_MPS_HPP_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gwplan/milp.hpp"

namespace gwplan {

class MpsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MpsNames {
  std::vector<std::string> columns;
  std::vector<std::string> rows;
};

MpsNames mps_names(const MilpModel& model);

// Fits `value` into 12 characters with as many significant digits as possible.
std::string mps_number(double value);

std::string write_mps(const MilpModel& model);
void write_mps(const MilpModel& model, const std::filesystem::path& path);

// Accepts fixed or free layout (whitespace-separated fields), N/L/G/E rows,
// RHS, integer MARKER blocks and UP/LO/FX/MI/PL/BV/LI/UI bounds.
// Throws MpsError with the line number on malformed input.
MilpModel parse_mps(const std::string& text);
MilpModel read_mps(const std::filesystem::path& path);

using Assignment = std::vector<std::pair<std::string, double>>;

std::string format_assignment(const MilpModel& model, const std::vector<double>& values);
void write_assignment(const MilpModel& model, const std::vector<double>& values,
                      const std::filesystem::path& path);
Assignment parse_assignment(const std::string& text);
Assignment read_assignment(const std::filesystem::path& path);

// Maps names onto column positions; unlisted columns are 0. Throws MpsError
// for unknown or repeated names.
std::vector<double> assignment_values(const MilpModel& model, const Assignment& assignment);

}  // namespace gwplan

#endif  // GWPLAN_MPS_HPP_
