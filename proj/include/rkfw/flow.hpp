#ifndef RKFW_FLOW_HPP_
#define RKFW_FLOW_HPP_

#include <iosfwd>
#include <string>
#include <vector>

#include "rkfw/geometry.hpp"
#include "rkfw/problems.hpp"
#include "rkfw/solvers.hpp"

namespace rkfw {

enum class FlowSource { closed_form_toy, fine_step_numeric, recorded };

std::string to_string(FlowSource s);

/// Sampled continuous-time trajectory x(t).
struct FlowReference {
  FlowSource source = FlowSource::fine_step_numeric;
  double c = 2.0;
  /// Step used to produce the samples; 0 for closed forms.
  double delta_ref = 0.0;
  std::vector<double> times;
  std::vector<Point> states;

  /// x(t) by linear interpolation; throws std::out_of_range outside the samples.
  Point at(double t) const;
};

/// (c / (c + t))^c.
double flow_bound(double c, double t);

/// max(0, (u0 + 1) (c / (c + t))^c - 1).
double toy_flow_exact(double u0, double c, double t);

/// First t at which toy_flow_exact reaches 0.
double toy_absorption_time(double u0, double c);

/// Closed-form toy flow sampled at the given (strictly increasing) times.
FlowReference toy_flow_reference(double u0, double c, const std::vector<double>& times);

/// rk44 at step delta_ref from problem.x0 up to t_end, one sample per step.
/// Requires at least 10 samples.
FlowReference reference_trajectory(const ProblemInstance& problem, double c, double delta_ref,
                                   double t_end);

/// Wraps a trajectory with recorded iterates as a reference.
FlowReference recorded_reference(const Trajectory& traj, double c);

struct TaePoint {
  double t = 0.0;
  double epsilon = 0.0;
};

/// ||x_k - x_ref(k delta)||_2 for every recorded iterate. Throws when the
/// reference does not cover the trajectory, or when a numeric reference is
/// coarser than delta / 10.
std::vector<TaePoint> total_accumulation_error(const Trajectory& traj, const FlowReference& ref);

/// Header `t,epsilon`.
void write_tae_csv(std::ostream& out, const std::vector<TaePoint>& tae);

}  // namespace rkfw

#endif  // RKFW_FLOW_HPP_
