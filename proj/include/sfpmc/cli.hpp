#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfpmc/errors.hpp"
#include "sfpmc/pde_solver.hpp"

namespace sfpmc::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kInvalid = 2,      ///< bad config, invalid body or domain
  kConditional = 3,  ///< only heuristic checks passed, or an audit failed on a converged solve
  kFail = 4,         ///< condition violated or solve did not converge
};

/// Config error carrying "file:line:column: field: message".
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

struct AnalysisOptions {
  int basket = 50;
  double barrier_k_max = 1048576.0;
  std::optional<double> tau;  ///< singular-set threshold; default 5 h (1 + Lip)
  double weak_tolerance = 1e-3;
  double gradient_slack = 10.0;  ///< allowed max-principle margin in units of h
};

struct OutputOptions {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
  bool checkpoint = false;
};

struct SweepOptions {
  std::vector<int> grids{33, 65};
  std::vector<double> eps_floors{1e-2, 1e-3};
  int workers = 1;
};

struct RunConfig {
  std::string source;
  ConvexBody body = ConvexBody::disk(1.0);
  std::function<Domain(const GridSpec&)> make_domain;
  GridSpec grid;
  ProblemSpec problem;  ///< domain built from `grid`
  SolverConfig solver;
  AnalysisOptions analysis;
  OutputOptions outputs;
  SweepOptions sweep;
};

struct RunOptions {
  std::optional<std::string> out;  ///< overrides outputs.directory
  std::optional<int> workers;
  std::uint64_t seed = 0;
  bool verbose = false;
  std::optional<std::string> resume;  ///< checkpoint file for solve
};

RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

int run_geometry(const RunConfig& config, const RunOptions& options);
int run_check(const RunConfig& config, const RunOptions& options);
int run_solve(const RunConfig& config, const RunOptions& options);
int run_sweep(const RunConfig& config, const RunOptions& options);

/// Loads the config and dispatches `command`; maps exceptions to exit codes and prints them to stderr.
int run_command(const std::string& command, const std::string& config_path, const RunOptions& options);

}  // namespace sfpmc::cli
