#include "rkfw/flow.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace rkfw {

std::string to_string(FlowSource s) {
  switch (s) {
    case FlowSource::closed_form_toy: return "closed_form_toy";
    case FlowSource::fine_step_numeric: return "fine_step_numeric";
    case FlowSource::recorded: return "recorded";
  }
  return "unknown";
}

Point FlowReference::at(double t) const {
  if (times.empty()) throw std::out_of_range("flow reference has no samples");
  const double slack = 1e-9 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - slack || t > times.back() + slack) {
    throw std::out_of_range("t = " + std::to_string(t) + " outside reference span [" +
                            std::to_string(times.front()) + ", " + std::to_string(times.back()) + "]");
  }
  const auto hi = std::lower_bound(times.begin(), times.end(), t);
  if (hi == times.begin()) return states.front();
  if (hi == times.end()) return states.back();
  const auto j = static_cast<std::size_t>(hi - times.begin());
  const double t0 = times[j - 1];
  const double t1 = times[j];
  const double w = (t - t0) / (t1 - t0);
  return (1.0 - w) * states[j - 1] + w * states[j];
}

double flow_bound(double c, double t) {
  if (!(c >= 1.0)) throw std::invalid_argument("flow_bound: c must be >= 1");
  if (!(t >= 0.0)) throw std::invalid_argument("flow_bound: t must be >= 0");
  return std::pow(c / (c + t), c);
}

double toy_flow_exact(double u0, double c, double t) {
  return std::max(0.0, (u0 + 1.0) * flow_bound(c, t) - 1.0);
}

double toy_absorption_time(double u0, double c) { return c * (std::pow(u0 + 1.0, 1.0 / c) - 1.0); }

FlowReference toy_flow_reference(double u0, double c, const std::vector<double>& times) {
  FlowReference ref;
  ref.source = FlowSource::closed_form_toy;
  ref.c = c;
  ref.times = times;
  ref.states.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw std::invalid_argument("toy_flow_reference: times must be strictly increasing");
    }
    ref.states.push_back(Point::Constant(1, 1, toy_flow_exact(u0, c, times[i])));
  }
  return ref;
}

FlowReference reference_trajectory(const ProblemInstance& problem, double c, double delta_ref,
                                   double t_end) {
  if (!(delta_ref > 0.0)) throw std::invalid_argument("reference_trajectory: delta_ref must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("reference_trajectory: t_end must be > 0");
  const auto steps = static_cast<int>(std::ceil(t_end / delta_ref - 1e-9));
  if (steps + 1 < 10) {
    throw std::invalid_argument("reference_trajectory: needs at least 10 samples, got " +
                                std::to_string(steps + 1));
  }
  SolverConfig cfg;
  cfg.tableau = make_tableau("rk44");
  cfg.c = c;
  cfg.delta = delta_ref;
  cfg.max_iters = steps;
  cfg.record_iterates = true;
  cfg.record_gap = false;
  cfg.record_wall_time = false;
  Trajectory traj = run(problem, cfg);

  FlowReference ref;
  ref.source = FlowSource::fine_step_numeric;
  ref.c = c;
  ref.delta_ref = delta_ref;
  ref.times.reserve(traj.records.size());
  for (const auto& r : traj.records) ref.times.push_back(r.t);
  ref.states = std::move(traj.iterates);
  return ref;
}

FlowReference recorded_reference(const Trajectory& traj, double c) {
  if (traj.iterates.size() != traj.records.size()) {
    throw std::invalid_argument("recorded_reference: trajectory has no recorded iterates");
  }
  FlowReference ref;
  ref.source = FlowSource::recorded;
  ref.c = c;
  ref.delta_ref = traj.delta;
  for (const auto& r : traj.records) ref.times.push_back(r.t);
  ref.states = traj.iterates;
  return ref;
}

std::vector<TaePoint> total_accumulation_error(const Trajectory& traj, const FlowReference& ref) {
  if (traj.iterates.size() != traj.records.size() || traj.iterates.empty()) {
    throw std::invalid_argument("total_accumulation_error: trajectory has no recorded iterates");
  }
  if (ref.times.size() != ref.states.size() || ref.times.empty()) {
    throw std::invalid_argument("total_accumulation_error: malformed reference");
  }
  if (ref.source == FlowSource::fine_step_numeric && ref.delta_ref > traj.delta / 10.0 * (1.0 + 1e-9)) {
    throw std::invalid_argument("total_accumulation_error: reference step " +
                                std::to_string(ref.delta_ref) + " exceeds delta / 10 = " +
                                std::to_string(traj.delta / 10.0));
  }
  const double t_last = traj.records.back().t;
  const double slack = 1e-9 * std::max(1.0, std::abs(t_last));
  if (traj.records.front().t < ref.times.front() - slack || t_last > ref.times.back() + slack) {
    throw std::invalid_argument("total_accumulation_error: reference covers [" +
                                std::to_string(ref.times.front()) + ", " +
                                std::to_string(ref.times.back()) + "] but trajectory spans [" +
                                std::to_string(traj.records.front().t) + ", " +
                                std::to_string(t_last) + "]");
  }
  std::vector<TaePoint> out;
  out.reserve(traj.records.size());
  for (std::size_t i = 0; i < traj.records.size(); ++i) {
    const double t = traj.records[i].t;
    const Point& x = traj.iterates[i];
    const Point xr = ref.at(std::clamp(t, ref.times.front(), ref.times.back()));
    if (xr.rows() != x.rows() || xr.cols() != x.cols()) {
      throw std::invalid_argument("total_accumulation_error: shape mismatch with reference");
    }
    out.push_back({t, (x - xr).norm()});
  }
  return out;
}

void write_tae_csv(std::ostream& out, const std::vector<TaePoint>& tae) {
  out << "t,epsilon\n" << std::setprecision(17);
  for (const auto& p : tae) out << p.t << ',' << p.epsilon << '\n';
}

}  // namespace rkfw
