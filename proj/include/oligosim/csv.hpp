#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "oligosim/dynamics.hpp"
#include "oligosim/pricing.hpp"
#include "oligosim/regulation.hpp"

namespace oligosim {

/// Shortest round-trip is not used on purpose: every float is printed with 17
/// significant digits so that output is stable across libraries.
std::string format_double(double v);
double parse_double(std::string_view text);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::string_view name) const;
};

/// ',' separated, LF line endings, no quoting (no field ever contains ',').
void write_csv(std::ostream& out, const CsvTable& table);
CsvTable read_csv(std::istream& in);

/// t,x_1..x_I,x_0,U_1..U_I
CsvTable trajectory_table(const Trajectory& traj);
/// round,operator,old_price,new_price,potential,region (operators 1-based)
CsvTable trace_table(const EquilibriumResult& result);
/// param_value,alpha,region,lambda_star,R_total,U_agg,J0,x0
CsvTable sweep_table(const SweepSeries& series);

}  // namespace oligosim
