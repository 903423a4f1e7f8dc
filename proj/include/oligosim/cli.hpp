#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oligosim/config.hpp"
#include "oligosim/csv.hpp"

namespace oligosim {

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

struct RunSpec {
  /// simulate, stationary, best-response, equilibrium, sweep, find-parameter,
  /// figure or ess-check.
  std::string command;
  /// fig1, fig2, fig3, fig4-upper or fig4-lower (figure command only).
  std::string figure;
  Settings settings;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
};

/// Parses `oligosim <command> [figure-id] --config <path> [--out <path>]
/// [--set key=value ...] [--seed <u64>]`.  Overrides are applied after the
/// config file.  Throws ConfigError on bad usage.
RunSpec parse_command_line(const std::vector<std::string>& args);

/// Executes one command.  Data goes to spec.out when set, otherwise to out;
/// summaries of CSV-producing commands go to err.  Errors are reported on err
/// and mapped to an ExitCode.
int run(const RunSpec& spec, std::ostream& out, std::ostream& err);

/// parse_command_line + run with the same error mapping.
int run_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

/// The data behind one of the figures, with its fixed parameters.
CsvTable figure_table(std::string_view id);

}  // namespace oligosim
