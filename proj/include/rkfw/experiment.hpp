#ifndef RKFW_EXPERIMENT_HPP_
#define RKFW_EXPERIMENT_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "rkfw/config.hpp"
#include "rkfw/problems.hpp"
#include "rkfw/solvers.hpp"

namespace rkfw {

/// Library version plus `git describe` of the build tree.
std::string version_string();

ProblemInstance build_problem(const ExperimentConfig& cfg);
SolverConfig build_solver(const ExperimentConfig& cfg, const std::string& tableau_name);

struct RunSummary {
  std::string tableau;
  std::string variant;
  std::string dir;
  int iterations = 0;
  double final_f = 0.0;
  double min_f = 0.0;
  double final_gap = 0.0;
  double max_violation = 0.0;
  std::vector<std::pair<int, double>> zigzag_means;
  std::vector<std::string> files;
};

struct ExperimentResult {
  std::vector<RunSummary> runs;
  /// Known f*, or the best value over all runs when f* is unknown.
  double f_reference = 0.0;
  bool f_reference_is_proxy = false;
};

/// Validates the config, then runs one method (or one per `tableaus` entry,
/// concurrently, each in out_dir/<tableau>/) and writes traj.csv, iterates.txt,
/// zigzag_W<w>.csv, tae.csv, envelope.csv as configured, plus run.cfg and
/// manifest.json. Sweeps also write out_dir/summary.csv.
ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

}  // namespace rkfw

#endif  // RKFW_EXPERIMENT_HPP_
