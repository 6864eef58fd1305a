#include "gwplan/mps.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

namespace gwplan {

namespace {

constexpr char kDigits[] = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";
constexpr const char* kObjectiveRow = "COST";

std::string base36(long value, int width) {
  std::string out(width, '0');
  for (int k = width - 1; k >= 0; --k) {
    out[k] = kDigits[value % 36];
    value /= 36;
  }
  if (value != 0) throw MpsError("index too large for an 8-character MPS name");
  return out;
}

char symbol_letter(Symbol symbol) {
  switch (symbol) {
    case Symbol::kGateway: return 'X';
    case Symbol::kFlowAlloc: return 'B';
    case Symbol::kLinkAssign: return 'Y';
    case Symbol::kLinkFlow: return 'F';
    case Symbol::kFeederUse: return 'Z';
    case Symbol::kFlowGap: return 'S';
    case Symbol::kGeneric: return 'C';
  }
  return 'C';
}

Symbol letter_symbol(char c) {
  switch (c) {
    case 'X': return Symbol::kGateway;
    case 'B': return Symbol::kFlowAlloc;
    case 'Y': return Symbol::kLinkAssign;
    case 'F': return Symbol::kLinkFlow;
    case 'Z': return Symbol::kFeederUse;
    case 'S': return Symbol::kFlowGap;
    default: return Symbol::kGeneric;
  }
}

std::string family_tag(const std::string& family) {
  std::string tag = family.empty() ? "R" : "E" + family;
  if (tag.size() > 4) throw MpsError(fmt::format("row family '{}' too long for MPS", family));
  std::transform(tag.begin(), tag.end(), tag.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  tag.resize(4, '_');
  return tag;
}

// Inverse of family_tag for names that follow the scheme.
std::string tag_family(const std::string& code) {
  if (code.size() != 8 || code[0] != 'E') return "";
  std::string family;
  for (int k = 1; k < 4 && code[k] != '_'; ++k)
    family += static_cast<char>(std::tolower(static_cast<unsigned char>(code[k])));
  return family;
}

std::string fixed_line(const std::string& f1, const std::string& f2, const std::string& f3 = "",
                       const std::string& f4 = "", const std::string& f5 = "",
                       const std::string& f6 = "") {
  std::string line = fmt::format(" {:<2} {:<8}  {:<8}  {:>12}   {:<8}  {:>12}", f1, f2, f3, f4, f5, f6);
  line.erase(line.find_last_not_of(' ') + 1);
  return line + "\n";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

double parse_number(const std::string& text, int line_no) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw MpsError(fmt::format("line {}: bad number '{}'", line_no, text));
  return v;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MpsError(fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void dump(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MpsError(fmt::format("cannot write {}", path.string()));
  out << text;
  if (!out) throw MpsError(fmt::format("write failed for {}", path.string()));
}

}  // namespace

MpsNames mps_names(const MilpModel& model) {
  MpsNames names;
  for (int j = 0; j < model.num_columns(); ++j)
    names.columns.push_back(symbol_letter(model.column(j).symbol) + base36(j, 7));
  std::map<std::string, long> serial;
  for (const LinConstraint& row : model.constraints()) {
    const std::string tag = family_tag(row.family);
    names.rows.push_back(tag + base36(serial[tag]++, 4));
  }
  return names;
}

std::string mps_number(double value) {
  if (!std::isfinite(value)) throw MpsError("non-finite number in MPS output");
  std::string text = fmt::format("{}", value);
  if (text.size() <= 12) return text;
  // Fixed notation wastes characters on leading zeros, so also try the
  // exponent form with its padding removed ("2.5e-4" rather than "2.5e-04").
  for (int precision = 12; precision >= 1; --precision) {
    text = fmt::format("{:.{}g}", value, precision);
    if (text.size() <= 12) return text;
    std::string sci = fmt::format("{:.{}e}", value, precision - 1);
    const auto e = sci.find('e');
    std::string exponent = sci.substr(e + 1);
    const bool negative = exponent[0] == '-';
    exponent.erase(0, exponent.find_first_not_of("+-0"));
    if (exponent.empty()) exponent = "0";
    sci = sci.substr(0, e) + (negative ? "e-" : "e") + exponent;
    if (sci.size() <= 12) return sci;
  }
  throw MpsError(fmt::format("cannot fit {} into 12 characters", value));
}

std::string write_mps(const MilpModel& model) {
  const MpsNames names = mps_names(model);
  std::string out;
  out += fmt::format("NAME          {}\n", model.name.substr(0, 8));
  for (int j = 0; j < model.num_columns(); ++j)
    out += fmt::format("* ALIAS {} {}\n", names.columns[j], model.column(j).name);
  for (int r = 0; r < model.num_rows(); ++r)
    out += fmt::format("* ALIAS {} {}\n", names.rows[r], model.constraints()[r].name);

  out += "ROWS\n";
  out += fixed_line("N", kObjectiveRow);
  for (int r = 0; r < model.num_rows(); ++r) {
    const Sense sense = model.constraints()[r].sense;
    out += fixed_line(sense == Sense::kLe ? "L" : sense == Sense::kGe ? "G" : "E", names.rows[r]);
  }

  std::vector<double> cost(model.num_columns(), 0.0);
  for (const Term& t : model.objective()) cost[t.column] += t.coef;
  std::vector<std::vector<std::pair<int, double>>> entries(model.num_columns());
  for (int r = 0; r < model.num_rows(); ++r) {
    for (const Term& t : model.constraints()[r].terms) {
      if (t.coef != 0.0) entries[t.column].emplace_back(r, t.coef);
    }
  }
  // Fixed binaries cannot carry BV (BV implies [0, 1]), so they keep their
  // integrality through a marker block and get FX bounds.
  auto fixed_binary = [&](int j) {
    const Column& c = model.column(j);
    return c.is_binary() && (c.lb > 0.0 || c.ub < 1.0);
  };
  out += "COLUMNS\n";
  bool in_block = false;
  for (int j = 0; j < model.num_columns(); ++j) {
    const std::string& col = names.columns[j];
    if (fixed_binary(j) != in_block) {
      in_block = !in_block;
      out += fixed_line("", "MARKER", "'MARKER'", in_block ? "'INTORG'" : "'INTEND'");
    }
    if (cost[j] != 0.0 || entries[j].empty())
      out += fixed_line("", col, kObjectiveRow, mps_number(cost[j]));
    for (const auto& [r, coef] : entries[j])
      out += fixed_line("", col, names.rows[r], mps_number(coef));
  }
  if (in_block) out += fixed_line("", "MARKER", "'MARKER'", "'INTEND'");

  out += "RHS\n";
  if (model.objective_constant() != 0.0)
    out += fixed_line("", "RHS", kObjectiveRow, mps_number(-model.objective_constant()));
  for (int r = 0; r < model.num_rows(); ++r) {
    const double rhs = model.constraints()[r].rhs;
    if (rhs != 0.0) out += fixed_line("", "RHS", names.rows[r], mps_number(rhs));
  }

  out += "BOUNDS\n";
  for (int j = 0; j < model.num_columns(); ++j) {
    const Column& c = model.column(j);
    const std::string& col = names.columns[j];
    if (c.is_binary() && !fixed_binary(j)) {
      out += fixed_line("BV", "BND", col);
      continue;
    }
    if (c.lb == c.ub) {
      out += fixed_line("FX", "BND", col, mps_number(c.lb));
      continue;
    }
    if (c.lb == -kInf && c.ub == kInf) {
      out += fixed_line("FR", "BND", col);
      continue;
    }
    if (c.lb == -kInf) out += fixed_line("MI", "BND", col);
    else if (c.lb != 0.0) out += fixed_line("LO", "BND", col, mps_number(c.lb));
    if (c.ub != kInf) out += fixed_line("UP", "BND", col, mps_number(c.ub));
  }
  out += "ENDATA\n";
  return out;
}

void write_mps(const MilpModel& model, const std::filesystem::path& path) {
  dump(path, write_mps(model));
}

MilpModel parse_mps(const std::string& text) {
  enum class Section { kNone, kName, kRows, kColumns, kRhs, kBounds, kEnd };
  Section section = Section::kNone;
  std::unordered_map<std::string, std::string> alias;
  std::string model_name = "GWPLAN";

  struct RowDraft {
    std::string code;
    Sense sense;
    double rhs = 0.0;
    std::vector<Term> terms;
  };
  std::vector<RowDraft> rows;
  std::unordered_map<std::string, int> row_index;
  std::string objective_row;
  double objective_constant = 0.0;

  struct ColDraft {
    std::string code;
    bool integer = false;
    bool binary_bound = false;
    double lb = 0.0, ub = kInf;
    bool ub_set = false;
  };
  std::vector<ColDraft> cols;
  std::unordered_map<std::string, int> col_index;
  std::vector<Term> objective;
  bool in_integer_block = false;

  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '*') {
      const auto tok = split(line.substr(1));
      if (tok.size() == 3 && tok[0] == "ALIAS") alias[tok[1]] = tok[2];
      continue;
    }
    const auto tok = split(line);
    if (tok.empty()) continue;
    if (!std::isspace(static_cast<unsigned char>(line[0]))) {
      const std::string& head = tok[0];
      if (head == "NAME") {
        section = Section::kName;
        if (tok.size() > 1) model_name = tok[1];
      } else if (head == "ROWS") {
        section = Section::kRows;
      } else if (head == "COLUMNS") {
        section = Section::kColumns;
      } else if (head == "RHS") {
        section = Section::kRhs;
      } else if (head == "BOUNDS") {
        section = Section::kBounds;
      } else if (head == "ENDATA") {
        section = Section::kEnd;
        break;
      } else {
        throw MpsError(fmt::format("line {}: unsupported section {}", line_no, head));
      }
      continue;
    }

    auto find_row = [&](const std::string& name) -> int {
      const auto it = row_index.find(name);
      if (it == row_index.end())
        throw MpsError(fmt::format("line {}: unknown row {}", line_no, name));
      return it->second;
    };
    auto find_col = [&](const std::string& name) -> int {
      const auto it = col_index.find(name);
      if (it == col_index.end())
        throw MpsError(fmt::format("line {}: unknown column {}", line_no, name));
      return it->second;
    };

    switch (section) {
      case Section::kRows: {
        if (tok.size() != 2) throw MpsError(fmt::format("line {}: bad ROWS entry", line_no));
        const std::string& type = tok[0];
        if (type == "N") {
          if (objective_row.empty()) objective_row = tok[1];
          continue;
        }
        Sense sense;
        if (type == "L") sense = Sense::kLe;
        else if (type == "G") sense = Sense::kGe;
        else if (type == "E") sense = Sense::kEq;
        else throw MpsError(fmt::format("line {}: bad row type {}", line_no, type));
        if (!row_index.emplace(tok[1], static_cast<int>(rows.size())).second)
          throw MpsError(fmt::format("line {}: duplicate row {}", line_no, tok[1]));
        rows.push_back({tok[1], sense, 0.0, {}});
        break;
      }
      case Section::kColumns: {
        if (tok.size() >= 3 && tok[1] == "'MARKER'") {
          if (tok[2] == "'INTORG'") in_integer_block = true;
          else if (tok[2] == "'INTEND'") in_integer_block = false;
          else throw MpsError(fmt::format("line {}: bad marker", line_no));
          continue;
        }
        if (tok.size() != 3 && tok.size() != 5)
          throw MpsError(fmt::format("line {}: bad COLUMNS entry", line_no));
        auto [it, inserted] = col_index.emplace(tok[0], static_cast<int>(cols.size()));
        if (inserted) {
          ColDraft c;
          c.code = tok[0];
          c.integer = in_integer_block;
          if (c.integer) {
            c.ub = 1.0;
            c.binary_bound = true;
          }
          cols.push_back(c);
        } else if (it->second != static_cast<int>(cols.size()) - 1) {
          throw MpsError(fmt::format("line {}: column {} is not contiguous", line_no, tok[0]));
        }
        const int j = it->second;
        for (std::size_t k = 1; k + 1 < tok.size(); k += 2) {
          const double v = parse_number(tok[k + 1], line_no);
          if (tok[k] == objective_row) objective.push_back({j, v});
          else rows[find_row(tok[k])].terms.push_back({j, v});
        }
        break;
      }
      case Section::kRhs: {
        const std::size_t first = tok.size() % 2 == 1 ? 1 : 0;
        for (std::size_t k = first; k + 1 < tok.size(); k += 2) {
          const double v = parse_number(tok[k + 1], line_no);
          if (tok[k] == objective_row) objective_constant = -v;
          else rows[find_row(tok[k])].rhs = v;
        }
        break;
      }
      case Section::kBounds: {
        const std::string& type = tok[0];
        const bool valued = type == "UP" || type == "LO" || type == "FX" || type == "LI" ||
                            type == "UI";
        const bool bare = type == "MI" || type == "PL" || type == "BV" || type == "FR";
        if (!valued && !bare) throw MpsError(fmt::format("line {}: bad bound type {}", line_no, type));
        std::size_t expected = valued ? 4 : 3;
        std::string col_name;
        double v = 0.0;
        if (tok.size() == expected) {
          col_name = tok[2];
          if (valued) v = parse_number(tok[3], line_no);
        } else if (tok.size() == expected - 1) {
          col_name = tok[1];
          if (valued) v = parse_number(tok[2], line_no);
        } else if (type == "BV" && tok.size() == 4) {
          col_name = tok[2];
        } else {
          throw MpsError(fmt::format("line {}: bad BOUNDS entry", line_no));
        }
        ColDraft& c = cols[find_col(col_name)];
        if (type == "UP" || type == "UI") {
          c.ub = v;
          c.ub_set = true;
        }
        if (type == "LO" || type == "LI") c.lb = v;
        if (type == "FX") c.lb = c.ub = v;
        if (type == "MI") c.lb = -kInf;
        if (type == "PL") c.ub = kInf;
        if (type == "FR") {
          c.lb = -kInf;
          c.ub = kInf;
        }
        if (type == "BV") {
          c.integer = true;
          c.binary_bound = true;
          c.lb = 0.0;
          c.ub = 1.0;
        }
        if (type == "LI" || type == "UI") c.integer = true;
        break;
      }
      default:
        throw MpsError(fmt::format("line {}: data outside a section", line_no));
    }
  }
  if (section != Section::kEnd) throw MpsError("missing ENDATA");

  MilpModel model;
  model.name = model_name;
  for (const ColDraft& c : cols) {
    Column col;
    const auto a = alias.find(c.code);
    col.name = a == alias.end() ? c.code : a->second;
    col.symbol = c.code.size() == 8 ? letter_symbol(c.code[0]) : Symbol::kGeneric;
    col.lb = c.lb;
    col.ub = c.ub;
    if (c.integer) {
      if (c.lb < 0.0 || c.ub > 1.0)
        throw MpsError(fmt::format("column {}: only binary integers are supported", c.code));
      col.domain = Domain::kBinary;
    }
    model.add_column(std::move(col));
  }
  for (RowDraft& r : rows) {
    LinConstraint row;
    const auto a = alias.find(r.code);
    row.name = a == alias.end() ? r.code : a->second;
    row.family = tag_family(r.code);
    row.sense = r.sense;
    row.rhs = r.rhs;
    row.terms = std::move(r.terms);
    try {
      model.add_constraint(std::move(row));
    } catch (const std::invalid_argument& e) {
      throw MpsError(e.what());
    }
  }
  model.set_objective(std::move(objective), objective_constant);
  return model;
}

MilpModel read_mps(const std::filesystem::path& path) { return parse_mps(slurp(path)); }

std::string format_assignment(const MilpModel& model, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != model.num_columns())
    throw std::invalid_argument("assignment length does not match the model");
  std::string out;
  for (int j = 0; j < model.num_columns(); ++j)
    out += fmt::format("{} {}\n", model.column(j).name, values[j]);
  return out;
}

void write_assignment(const MilpModel& model, const std::vector<double>& values,
                      const std::filesystem::path& path) {
  dump(path, format_assignment(model, values));
}

Assignment parse_assignment(const std::string& text) {
  Assignment out;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto tok = split(line);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (tok.size() != 2) throw MpsError(fmt::format("assignment line {}: expected 'name value'", line_no));
    double v;
    if (tok[1] == "inf" || tok[1] == "+inf") v = kInf;
    else if (tok[1] == "-inf") v = -kInf;
    else v = parse_number(tok[1], line_no);
    out.emplace_back(tok[0], v);
  }
  return out;
}

Assignment read_assignment(const std::filesystem::path& path) {
  return parse_assignment(slurp(path));
}

std::vector<double> assignment_values(const MilpModel& model, const Assignment& assignment) {
  const MpsNames names = mps_names(model);
  std::unordered_map<std::string, int> by_code;
  for (int j = 0; j < model.num_columns(); ++j) by_code.emplace(names.columns[j], j);
  std::vector<double> values(model.num_columns(), 0.0);
  std::vector<bool> seen(model.num_columns(), false);
  for (const auto& [name, value] : assignment) {
    int j = model.find_column(name);
    if (j < 0) {
      const auto it = by_code.find(name);
      if (it == by_code.end()) throw MpsError(fmt::format("assignment names unknown column {}", name));
      j = it->second;
    }
    if (seen[j]) throw MpsError(fmt::format("assignment repeats column {}", name));
    seen[j] = true;
    values[j] = value;
  }
  return values;
}

}  // namespace gwplan
