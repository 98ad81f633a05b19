#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "curvglue/bounds.hpp"

namespace curvglue {

// Process exit codes of the command-line driver.
enum ExitCode : int {
  kExitPass = 0,
  kExitUsage = 1,
  kExitFail = 2,
  kExitRefused = 3,
  kExitUnknownScenario = 4,
  kExitParse = 5,
};

struct RunRequest {
  std::string scenario;     // builtin name or name of a scenario in a config dir
  std::string config_path;  // single config file; takes precedence over scenario
  std::vector<std::string> config_dirs;
  FunctionalKind kind = FunctionalKind::operator_;
  std::optional<double> kappa;
  std::vector<double> deltas{0.4, 0.2, 0.1};
  std::vector<double> hs;  // empty: h = delta / 8
  std::optional<double> C; // empty: automatic choice
  std::string out;         // empty: standard output
  std::uint64_t seed = 42;
  int threads = 0;
  bool timing = false;
};

// Parses "0.4,0.2,0.1" into a list; throws DomainError on malformed input.
std::vector<double> parse_ladder(const std::string& text);

// Builtins first, then config-dir scenarios in file order.
std::vector<Scenario> list_scenarios(const std::vector<std::string>& config_dirs);
int cmd_list(const std::vector<std::string>& config_dirs, std::ostream& out, std::ostream& err);

std::string csv_header();
std::string csv_rows(const SweepResult& r);
int cmd_certify(const RunRequest& req, std::ostream& out, std::ostream& err);

int cmd_profile(double delta, const std::string& out_path, int samples, std::ostream& out, std::ostream& err);

}  // namespace curvglue
