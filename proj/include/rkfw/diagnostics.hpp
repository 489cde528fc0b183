#ifndef RKFW_DIAGNOSTICS_HPP_
#define RKFW_DIAGNOSTICS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "rkfw/geometry.hpp"
#include "rkfw/solvers.hpp"
#include "rkfw/tableau.hpp"

namespace rkfw {

/// Normalization of the projector that removes the block direction dbar.
enum class ProjectorNorm {
  /// I - dbar dbar^T / ||dbar||^2.
  orthogonal,
  /// I - dbar dbar^T / ||dbar||.
  unsquared,
};

std::string to_string(ProjectorNorm p);
ProjectorNorm parse_projector_norm(std::string_view text);

struct ZigzagReport {
  int window = 0;
  double delta = 1.0;
  /// Time covered by the iterates, (N - 1) * delta.
  double total_time = 0.0;
  std::vector<int> block_start;
  std::vector<double> energies;
  double mean = 0.0;
  /// Blocks with ||dbar|| < 1e-14, evaluated with Q = I.
  int degenerate_blocks = 0;
};

/// Splits the iterates into disjoint blocks of W steps; block k scores
/// (1 / (W - 1)) sum_{i=k+1}^{k+W-1} ||Q (x_{i+1} - x_i)|| with
/// dbar = x_{k+W} - x_k. A trailing partial block is dropped.
ZigzagReport zigzag_energy(const std::vector<Point>& iterates, int window, double delta = 1.0,
                           ProjectorNorm norm = ProjectorNorm::orthogonal);

/// Header `block_start_k,energy`, then a `# window=... mean=...` summary line.
void write_zigzag_csv(std::ostream& out, const ZigzagReport& report);

/// env[k] = max_{k' >= k} |series[k']|.
std::vector<double> sup_envelope(const std::vector<double>& series);
double sup_envelope(const std::vector<double>& series, std::size_t k);

/// Least-squares slope of log h[k] against log k for k in [k_min, k_max].
double fit_rate_slope(const std::vector<double>& h, std::size_t k_min, std::size_t k_max);

struct DecreaseBoundParams {
  double L = 0.0;
  double L2 = 0.0;
  double D = 0.0;
  double p_max = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double D2 = 0.0;
  double D3 = 0.0;
  double D4 = 0.0;

  /// (L D2^2 + 2 L D2 D3 + 2 L2 D3) / 2.
  static double d4_formula(double L, double L2, double D2, double D3);
};

/// Constants for a tableau at schedule constant c: p_max is the largest column
/// 2-norm of P at k = 1, c1 = q p_max, c2 = q max |A_ij|.
DecreaseBoundParams make_decrease_bound_params(const Tableau& t, double c, double L, double L2,
                                               double D);

/// Every k >= 1 with h_{k+1} - h_k > -g h_k + D4 g^2 + 1e-9, g = c / (c + k + 1).
/// Requires the trajectory's f*.
std::vector<int> decrease_bound_check(const Trajectory& traj, const DecreaseBoundParams& params,
                                      double c);

}  // namespace rkfw

#endif  // RKFW_DIAGNOSTICS_HPP_
