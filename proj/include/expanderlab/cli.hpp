#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "expanderlab/io.hpp"

namespace expanderlab::cli {

enum class Command { solve, evolve, entropy, verify, sweep, pipeline, plot };

std::string_view to_string(Command c);
Command command_from_string(std::string_view name);

struct RunConfig {
  Command command = Command::solve;
  int n = 2;
  double tau = 1.0;
  double eps = 1e-4;
  double theta0 = 0.7853981633974483;
  /// Cut time of the link flow as a fraction of its extinction time.
  double tcut = 0.5;
  double tend = 1.0;
  double rmax = 40.0;
  int nodes = 2048;
  double stretch = 1.0;
  double tol = 1e-10;
  int jobs = 1;
  std::uint64_t seed = 1;
  std::string boundary = "dirichlet";
  std::string out = "expanderlab_out";
  std::string input;
  std::string kind = "profile";
  std::string experiment = "compactness";

  void validate() const;
};

/// Keys accepted in a JSON config (same names as the long flags).
const std::vector<std::string>& config_keys();

/// Applies a JSON object over `base`; unknown keys are a usage error.
RunConfig apply_config(const json& j, RunConfig base);

/// Executes the command; 0 on success, 1 on a failed check.
int run(const RunConfig& config, std::ostream& log);

/// Full command line handling; 2 on usage errors.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace expanderlab::cli
