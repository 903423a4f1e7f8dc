#include "oligosim/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "oligosim/errors.hpp"

namespace oligosim {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res =
      std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  if (text == "nan") return std::nan("");
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InvalidParameter("not a number: '" + std::string(text) + "'");
  }
  return v;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return k;
  }
  throw InvalidParameter("no CSV column '" + std::string(name) + "'");
}

double CsvTable::number(std::size_t row, std::string_view name) const {
  return parse_double(rows.at(row).at(column(name)));
}

namespace {

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (k) out << ',';
    out << fields[k];
  }
  out << '\n';
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  write_row(out, table.header);
  for (const auto& row : table.rows) write_row(out, row);
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InvalidParameter("empty CSV");
  table.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto fields = split(line);
    if (fields.size() != table.header.size()) {
      throw InvalidParameter("CSV line " + std::to_string(lineno) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable table;
  const std::size_t I = traj.states.empty() ? 0 : traj.states.front().operators();
  table.header.push_back("t");
  for (std::size_t i = 1; i <= I; ++i) table.header.push_back("x_" + std::to_string(i));
  table.header.push_back("x_0");
  for (std::size_t i = 1; i <= I; ++i) table.header.push_back("U_" + std::to_string(i));
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    std::vector<std::string> row;
    row.reserve(2 * I + 2);
    row.push_back(format_double(traj.times[k]));
    for (double x : traj.states[k].x) row.push_back(format_double(x));
    row.push_back(format_double(traj.states[k].x0));
    for (double u : traj.utilities[k]) row.push_back(format_double(u));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable trace_table(const EquilibriumResult& result) {
  CsvTable table;
  table.header = {"round", "operator", "old_price", "new_price", "potential", "region"};
  for (const auto& e : result.trace) {
    table.rows.push_back({std::to_string(e.round), std::to_string(e.op + 1),
                          format_double(e.old_price), format_double(e.new_price),
                          format_double(e.potential), std::string(to_string(e.region))});
  }
  return table;
}

CsvTable sweep_table(const SweepSeries& series) {
  CsvTable table;
  table.header = {"param_value", "alpha", "region", "lambda_star",
                  "R_total",     "U_agg", "J0",     "x0"};
  for (const auto& r : series.reports) {
    table.rows.push_back({format_double(r.param_value), format_double(r.alpha),
                          std::string(to_string(r.region)), format_double(r.lambda_star),
                          format_double(r.R_total), format_double(r.U_agg),
                          format_double(r.J0), format_double(r.x0_share)});
  }
  return table;
}

}  // namespace oligosim
