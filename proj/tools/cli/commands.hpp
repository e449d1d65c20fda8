#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bellrec::cli {

enum class Format { csv, json };

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitVerifyFailed = 2,
  kExitNumerical = 3,
};

// Everything a subcommand needs. Angles are in degrees; conversion to radians
// happens inside the commands.
struct RunConfig {
  std::string subcommand;
  double phi_state_deg = 45.0;
  double noise_v = 0.0;
  std::vector<int> cases{1, 2, 3};
  std::vector<int> pair{1, 2};
  std::optional<double> p;
  std::optional<double> p_step;
  std::optional<double> angle_step_deg;
  std::size_t points = 400;
  double mean = 1e5;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string out;
  Format format = Format::csv;
};

// Throws InvalidArgument for anything a subcommand would reject.
void validate(const RunConfig& cfg);

// Empty cell is written as "—" in CSV and null in JSON.
using Cell = std::variant<std::monostate, bool, std::int64_t, double, std::string>;

struct Table {
  std::vector<std::pair<std::string, Cell>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  bool ok = true;
};

Table cmd_tradeoff(const RunConfig& cfg);
Table cmd_sweep_p(const RunConfig& cfg);
Table cmd_frontier(const RunConfig& cfg);
Table cmd_region(const RunConfig& cfg);
Table cmd_mc(const RunConfig& cfg);
Table cmd_verify(const RunConfig& cfg);

Table dispatch(const RunConfig& cfg);

std::string format_number(double v);
void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t);

// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bellrec::cli
