#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gradedrm/rmatrix.hpp"

namespace gradedrm {

/// Exit codes of the command-line tool.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Default output directory when --out is not given.
inline constexpr const char* kOutputDirEnv = "GRADEDRM_OUTPUT_DIR";

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;                      // verify, ops, chain, spectrum, limits
  std::string family = "all";               // uq, zn, all
  std::vector<std::pair<int, int>> nm;      // empty: command default
  std::vector<int> lengths;                 // empty: command default
  std::optional<cplx> hbar;
  std::optional<cplx> eta;
  std::uint64_t seed = 7;
  std::optional<int> samples;
  std::optional<double> tolerance;
  std::string out;                          // directory; empty: environment or "."
  std::string format = "json";              // json, csv
  std::vector<std::string> checks;          // ops: f-identity, commute
  std::vector<int> orders;                  // ops: k values; spectrum: which H
  bool spectrum = false;
  std::optional<std::string> limit;         // hs, xxz
  bool dump_binary = false;
  bool timing = false;

  std::vector<Family> families() const;
};

nlohmann::ordered_json to_json(const RunConfig& cfg);
/// Inverse of to_json; validates like the command-line parser.
RunConfig run_config_from_json(const nlohmann::json& j);

/// Checks value ranges and (family, N, M) combinations; throws ConfigError.
void validate(const RunConfig& cfg);

/// FNV-1a of the compact serialized config without the output directory, as
/// 16 hex digits.
std::string config_hash(const RunConfig& cfg);

/// Parses argv (argv[0] is the program name). Throws ConfigError on bad usage.
/// Returns an empty optional when help was printed.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out);

/// Runs one command, writes its files and prints a summary to `log`.
int execute(const RunConfig& cfg, std::ostream& log);

/// parse_command_line + execute with exit-code mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gradedrm
