#ifndef RKFW_CONFIG_HPP_
#define RKFW_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rkfw {

/// Everything needed to reproduce one experiment. Text form is `key = value`
/// per line; see render() for the full key list.
struct ExperimentConfig {
  // problem
  std::string problem;
  std::vector<double> x_star{0.2, 0.3};
  double epsilon = 1e-6;
  int m = 500;
  int n = 100;
  double sparsity = 0.1;
  double noise_sd = 0.05;
  /// Region radius; unset means the problem's default (sensing 1000, logistic 250,
  /// matrix_completion 1000).
  std::optional<double> alpha;
  double rho = 10.0;
  std::string data;
  std::uint64_t seed = 0;

  // method
  std::string tableau = "euler";
  std::string tableau_file;
  /// Non-empty: one run per entry (sweep).
  std::vector<std::string> tableaus;
  std::string variant = "plain";
  std::string line_search_rule = "guarded";
  double c = 2.0;
  double delta = 1.0;
  int iters = 1000;
  /// When positive, overrides iters with ceil(horizon / delta).
  double horizon = 0.0;

  // diagnostics
  std::vector<int> windows{5, 20};
  std::string projector = "orthogonal";
  /// Reference step for TAE output; 0 disables it.
  double tae_delta_ref = 0.0;
  std::string tae_reference = "numeric";
  bool envelope = false;

  // output
  std::string out_dir = "out";
  bool record_iterates = true;
  bool wall_time = false;
  int threads = 0;

  /// Iteration budget after applying horizon.
  int effective_iters() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses `key = value` lines. Blank lines and `#` comments are ignored.
/// Throws std::invalid_argument on unknown keys ("unknown key: X"), malformed
/// values (with line number) or a missing `problem`.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(render(cfg)) == cfg.
std::string render(const ExperimentConfig& cfg);

/// Checks values and that referenced input files exist. Throws std::invalid_argument.
void validate(const ExperimentConfig& cfg);

}  // namespace rkfw

#endif  // RKFW_CONFIG_HPP_
