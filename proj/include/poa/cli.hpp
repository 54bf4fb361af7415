#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

namespace poa::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kInput = 2, kNumeric = 3 };

struct RunConfig {
  std::string subcommand;  // solve opt poa sweep extremes repro rv
  std::string network_path;
  std::string instance;
  double demand = 0.0;
  double M_lo = 0.0;
  double M_hi = 0.0;
  int per_decade = 512;
  std::string method = "auto";
  std::string out_path;
  std::string format = "csv";  // sweep only: csv | json
  bool log_domain = false;
  std::uint64_t seed = 0;
  int jobs = 0;
  int resolution = 4001;
  std::optional<double> period_base;
  int periods_required = 3;
  std::string curve_path;
  std::string repro_target;  // thm5 thm6 thm7 rv
  double a = 2.0;
  std::string alpha = "factorial";
  int k = 8;
  std::string cost_json;  // rv: single cost instead of the suite
};

// Parses argv into a RunConfig and runs it. Help prints and returns 0.
int main_entry(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err);

// Dispatches one subcommand; maps errors to exit codes.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

// Reproduction reports, each with an "assertions" list and a "pass" flag.
nlohmann::json repro_thm5(double a);
nlohmann::json repro_thm6(double a);
nlohmann::json repro_thm7(const std::string& alpha, int k_max);
nlohmann::json repro_rv();

}  // namespace poa::cli
