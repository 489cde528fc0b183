#ifndef RKFW_SOLVERS_HPP_
#define RKFW_SOLVERS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rkfw/geometry.hpp"
#include "rkfw/objectives.hpp"
#include "rkfw/problems.hpp"
#include "rkfw/tableau.hpp"

namespace rkfw {

enum class Variant { plain, line_search, momentum };

std::string to_string(Variant v);
Variant parse_variant(std::string_view text);

/// How the line-search variant turns the searched step into the applied step.
enum class LineSearchRule {
  /// max{schedule, best step} when that does not increase f, else the best step.
  guarded,
  /// max{schedule, largest step with f(x + g d) <= f(x)}, taken literally.
  largest_acceptable,
};

std::string to_string(LineSearchRule r);
LineSearchRule parse_line_search_rule(std::string_view text);

struct SolverConfig {
  Tableau tableau = make_tableau("euler");
  double c = 2.0;
  double delta = 1.0;
  int max_iters = 100;
  Variant variant = Variant::plain;
  LineSearchRule line_search_rule = LineSearchRule::guarded;
  double line_search_tol = 1e-10;
  bool record_iterates = false;
  bool record_gap = true;
  bool record_wall_time = true;

  /// Throws std::invalid_argument on c < 1, delta <= 0, negative budgets, an
  /// invalid tableau, or momentum combined with a multi-stage tableau.
  void validate() const;
};

/// Mixing coefficient delta * c / (c + delta * k); c / (c + k) at delta = 1.
inline double schedule(double c, double delta, double k) { return delta * c / (c + delta * k); }

struct StageState {
  std::vector<Point> xi;
  std::vector<Point> xbar;
  std::vector<Atom> s;
  /// Gradient at each stage point.
  std::vector<Point> grad;
};

struct StepResult {
  Point x_next;
  StageState stage;
};

/// One q-stage step: xbar_i = x + sum_{j<i} A_ij xi_j, s_i = LMO(grad f(xbar_i)),
/// xi_i = gain_i (s_i - xbar_i), x_next = x + sum_i beta_i xi_i.
StepResult rk_fw_step(const Point& x, int k, const SolverConfig& cfg, const ProblemInstance& problem);

/// grad f(x)^T (x - s) with s = LMO(grad f(x)); an upper bound on f(x) - f*.
double fw_gap(const Point& x, const ProblemInstance& problem);

/// Largest gamma in [0, 1] with f(x + gamma d) <= f(x): a 32-cell grid scan
/// followed by bisection to `tol`.
double largest_nonincreasing_step(const Point& x, const Point& d, const Objective& f, double tol);

/// Minimizer of f(x + gamma d) over [0, 1]: grid scan, then golden section.
double best_step(const Point& x, const Point& d, const Objective& f, double tol);

/// Step length for the line-search variant at iteration k.
double line_search_gamma(const Point& x, const Point& d, int k, double c, const Objective& f,
                         double tol, LineSearchRule rule = LineSearchRule::guarded,
                         double delta = 1.0);

struct MomentumState {
  Point x;
  Point z;
  Point v;
};

/// z = grad f(x0), v = LMO(z).
MomentumState momentum_init(const Point& x0, const ProblemInstance& problem);

/// y = (1-g) x + g v; z+ = (1-g) z + g grad f(y); v+ = LMO(z+); x+ = (1-g) x + g v+.
MomentumState momentum_step(const MomentumState& state, int k, double c,
                            const ProblemInstance& problem, double delta = 1.0);

struct TrajectoryRecord {
  int k = 0;
  double t = 0.0;
  double f = 0.0;
  double gap = 0.0;
  double step_norm = 0.0;
  double violation = 0.0;
  std::int64_t wall_ns = 0;
};

struct Trajectory {
  std::string label;
  double delta = 1.0;
  std::vector<TrajectoryRecord> records;
  std::vector<Point> iterates;
  std::optional<double> f_star;

  /// f(x_k) - f* for every record; throws when f* is unknown.
  std::vector<double> suboptimality() const;
  std::vector<double> objective_values() const;
};

/// Runs k = 0..max_iters-1 and records max_iters + 1 rows.
Trajectory run(const ProblemInstance& problem, const SolverConfig& cfg, const Point& x0);
Trajectory run(const ProblemInstance& problem, const SolverConfig& cfg);

/// Header `k,t,f,gap,step_norm,violation,wall_ns`.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// One whitespace-separated row per iterate, entries in column-major order.
void write_iterates(std::ostream& out, const std::vector<Point>& iterates);
/// Reads rows written by write_iterates as column vectors.
std::vector<Point> read_iterates(std::istream& in);

}  // namespace rkfw

#endif  // RKFW_SOLVERS_HPP_
