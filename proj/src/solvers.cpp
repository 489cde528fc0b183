#include "rkfw/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace rkfw {

namespace {

constexpr int kGridCells = 32;

void require_finite(const Point& p, const char* what, Eigen::Index stage) {
  if (!p.allFinite()) {
    throw std::runtime_error(std::string("non-finite ") + what + " at stage " +
                             std::to_string(stage + 1));
  }
}

double step_objective(const Objective& f, const Point& x, const Point& d, double gamma) {
  return f.value(x + gamma * d);
}

}  // namespace

std::string to_string(Variant v) {
  switch (v) {
    case Variant::plain: return "plain";
    case Variant::line_search: return "line_search";
    case Variant::momentum: return "momentum";
  }
  return "unknown";
}

Variant parse_variant(std::string_view text) {
  if (text == "plain") return Variant::plain;
  if (text == "line_search") return Variant::line_search;
  if (text == "momentum") return Variant::momentum;
  throw std::invalid_argument("unknown variant '" + std::string(text) +
                              "' (expected plain, line_search or momentum)");
}

std::string to_string(LineSearchRule r) {
  return r == LineSearchRule::guarded ? "guarded" : "largest_acceptable";
}

LineSearchRule parse_line_search_rule(std::string_view text) {
  if (text == "guarded") return LineSearchRule::guarded;
  if (text == "largest_acceptable") return LineSearchRule::largest_acceptable;
  throw std::invalid_argument("unknown line-search rule '" + std::string(text) + "'");
}

void SolverConfig::validate() const {
  if (!(c >= 1.0)) throw std::invalid_argument("c must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw std::invalid_argument("delta must be > 0");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (!(line_search_tol > 0.0)) throw std::invalid_argument("line_search_tol must be > 0");
  const auto problems = validate_tableau(tableau);
  if (!problems.empty()) {
    std::string msg = "invalid tableau '" + tableau.name + "':";
    for (const auto& p : problems) msg += " " + p + ";";
    throw std::invalid_argument(msg);
  }
  if (variant == Variant::momentum && tableau.stages() != 1) {
    throw std::invalid_argument("momentum requires the euler tableau, got '" + tableau.name + "'");
  }
}

StepResult rk_fw_step(const Point& x, int k, const SolverConfig& cfg, const ProblemInstance& problem) {
  const Tableau& t = cfg.tableau;
  const Eigen::Index q = t.stages();
  if (!x.allFinite()) throw std::runtime_error("non-finite iterate");
  const Eigen::VectorXd gains = stage_gains(t, cfg.c, cfg.delta, static_cast<double>(k));

  StepResult out;
  auto& st = out.stage;
  st.xi.reserve(static_cast<std::size_t>(q));
  st.xbar.reserve(static_cast<std::size_t>(q));
  st.s.reserve(static_cast<std::size_t>(q));
  st.grad.reserve(static_cast<std::size_t>(q));

  for (Eigen::Index i = 0; i < q; ++i) {
    Point xbar = x;
    for (Eigen::Index j = 0; j < i; ++j) {
      if (t.A(i, j) != 0.0) xbar += t.A(i, j) * st.xi[static_cast<std::size_t>(j)];
    }
    require_finite(xbar, "stage point", i);
    Point g = problem.objective->gradient(xbar);
    require_finite(g, "gradient", i);
    Atom s = problem.region->lmo(g);
    Point xi = -gains(i) * xbar;
    s.add_to(xi, gains(i));
    require_finite(xi, "increment", i);
    st.xbar.push_back(std::move(xbar));
    st.grad.push_back(std::move(g));
    st.s.push_back(std::move(s));
    st.xi.push_back(std::move(xi));
  }

  out.x_next = x;
  for (Eigen::Index i = 0; i < q; ++i) out.x_next += t.beta(i) * st.xi[static_cast<std::size_t>(i)];
  require_finite(out.x_next, "update", q - 1);
  return out;
}

double fw_gap(const Point& x, const ProblemInstance& problem) {
  const Point g = problem.objective->gradient(x);
  const Atom s = problem.region->lmo(g);
  return std::max(0.0, (g.array() * x.array()).sum() - s.inner(g));
}

double largest_nonincreasing_step(const Point& x, const Point& d, const Objective& f, double tol) {
  const double f0 = f.value(x);
  auto phi = [&](double gamma) { return step_objective(f, x, d, gamma) - f0; };
  if (phi(1.0) <= 0.0) return 1.0;
  // Rightmost grid point that is acceptable; gamma = 0 always is.
  int cell = 0;
  for (int i = kGridCells - 1; i >= 1; --i) {
    if (phi(static_cast<double>(i) / kGridCells) <= 0.0) {
      cell = i;
      break;
    }
  }
  double lo = static_cast<double>(cell) / kGridCells;
  double hi = static_cast<double>(cell + 1) / kGridCells;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) <= 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

double best_step(const Point& x, const Point& d, const Objective& f, double tol) {
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGridCells; ++i) {
    const double v = step_objective(f, x, d, static_cast<double>(i) / kGridCells);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double a = static_cast<double>(std::max(best - 1, 0)) / kGridCells;
  double b = static_cast<double>(std::min(best + 1, kGridCells)) / kGridCells;
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c1 = b - inv_phi * (b - a);
  double c2 = a + inv_phi * (b - a);
  double f1 = step_objective(f, x, d, c1);
  double f2 = step_objective(f, x, d, c2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = c2;
      c2 = c1;
      f2 = f1;
      c1 = b - inv_phi * (b - a);
      f1 = step_objective(f, x, d, c1);
    } else {
      a = c1;
      c1 = c2;
      f1 = f2;
      c2 = a + inv_phi * (b - a);
      f2 = step_objective(f, x, d, c2);
    }
  }
  const double golden = 0.5 * (a + b);
  const double grid = static_cast<double>(best) / kGridCells;
  return step_objective(f, x, d, golden) <= best_val ? golden : grid;
}

double line_search_gamma(const Point& x, const Point& d, int k, double c, const Objective& f,
                         double tol, LineSearchRule rule, double delta) {
  if (!d.allFinite()) throw std::invalid_argument("line_search_gamma: non-finite direction");
  const double sched = std::clamp(schedule(c, delta, static_cast<double>(k)), 0.0, 1.0);
  if (rule == LineSearchRule::largest_acceptable) {
    return std::clamp(std::max(sched, largest_nonincreasing_step(x, d, f, tol)), 0.0, 1.0);
  }
  const double f0 = f.value(x);
  double star = best_step(x, d, f, tol);
  if (step_objective(f, x, d, star) > f0) star = 0.0;
  const double cand = std::max(sched, star);
  if (step_objective(f, x, d, cand) <= f0) return cand;
  return star;
}

MomentumState momentum_init(const Point& x0, const ProblemInstance& problem) {
  Point z = problem.objective->gradient(x0);
  Point v = problem.region->lmo(z).dense();
  return {x0, std::move(z), std::move(v)};
}

MomentumState momentum_step(const MomentumState& state, int k, double c,
                            const ProblemInstance& problem, double delta) {
  const double g = std::min(1.0, schedule(c, delta, static_cast<double>(k)));
  const Point y = (1.0 - g) * state.x + g * state.v;
  MomentumState next;
  next.z = (1.0 - g) * state.z + g * problem.objective->gradient(y);
  if (!next.z.allFinite()) throw std::runtime_error("non-finite momentum average");
  next.v = problem.region->lmo(next.z).dense();
  next.x = (1.0 - g) * state.x + g * next.v;
  return next;
}

std::vector<double> Trajectory::objective_values() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.f);
  return out;
}

std::vector<double> Trajectory::suboptimality() const {
  if (!f_star) throw std::logic_error("trajectory has no reference optimum");
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.f - *f_star);
  return out;
}

Trajectory run(const ProblemInstance& problem, const SolverConfig& cfg, const Point& x0) {
  cfg.validate();
  const Objective& f = *problem.objective;
  const FeasibleRegion& region = *problem.region;
  if (region.membership_violation(x0) > 1e-9) throw std::invalid_argument("x0 is not feasible");

  Trajectory traj;
  traj.label = problem.label + "/" + cfg.tableau.name + "/" + to_string(cfg.variant);
  traj.delta = cfg.delta;
  traj.f_star = problem.f_star;
  traj.records.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
  if (cfg.record_iterates) traj.iterates.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&]() -> std::int64_t {
    if (!cfg.record_wall_time) return 0;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() -
                                                                start)
        .count();
  };

  Point x = x0;
  MomentumState mom;
  if (cfg.variant == Variant::momentum) mom = momentum_init(x0, problem);

  for (int k = 0; k <= cfg.max_iters; ++k) {
    TrajectoryRecord rec;
    rec.k = k;
    rec.t = k * cfg.delta;
    rec.f = f.value(x);
    rec.violation = region.membership_violation(x);
    if (cfg.record_iterates) traj.iterates.push_back(x);

    if (k == cfg.max_iters) {
      if (cfg.record_gap) rec.gap = fw_gap(x, problem);
      rec.wall_ns = elapsed();
      traj.records.push_back(rec);
      break;
    }

    Point next;
    try {
      if (cfg.variant == Variant::momentum) {
        if (cfg.record_gap) rec.gap = fw_gap(x, problem);
        mom = momentum_step(mom, k, cfg.c, problem, cfg.delta);
        next = mom.x;
      } else {
        StepResult step = rk_fw_step(x, k, cfg, problem);
        if (cfg.record_gap) {
          // Stage 1 is evaluated at x itself.
          const Point& g = step.stage.grad.front();
          rec.gap = std::max(0.0, (g.array() * x.array()).sum() - step.stage.s.front().inner(g));
        }
        if (cfg.variant == Variant::line_search) {
          const double gk = schedule(cfg.c, cfg.delta, static_cast<double>(k));
          Point d = step.x_next - x;
          if (gk != 1.0) d /= gk;
          const double gamma = line_search_gamma(x, d, k, cfg.c, f, cfg.line_search_tol,
                                                 cfg.line_search_rule, cfg.delta);
          next = x + gamma * d;
        } else {
          next = std::move(step.x_next);
        }
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(k) + ": " + e.what());
    }
    rec.step_norm = (next - x).norm();
    rec.wall_ns = elapsed();
    traj.records.push_back(rec);
    x = std::move(next);
  }
  return traj;
}

Trajectory run(const ProblemInstance& problem, const SolverConfig& cfg) {
  return run(problem, cfg, problem.x0);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "k,t,f,gap,step_norm,violation,wall_ns\n";
  out << std::setprecision(17);
  for (const auto& r : traj.records) {
    out << r.k << ',' << r.t << ',' << r.f << ',' << r.gap << ',' << r.step_norm << ','
        << r.violation << ',' << r.wall_ns << '\n';
  }
}

void write_iterates(std::ostream& out, const std::vector<Point>& iterates) {
  out << std::setprecision(17);
  for (const auto& x : iterates) {
    const auto flat = x.reshaped();
    for (Eigen::Index i = 0; i < flat.size(); ++i) {
      if (i > 0) out << ' ';
      out << flat(i);
    }
    out << '\n';
  }
}

std::vector<Point> read_iterates(std::istream& in) {
  std::vector<Point> out;
  std::string line;
  std::size_t line_no = 0;
  Eigen::Index width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::vector<double> values;
    double v = 0.0;
    while (row >> v) values.push_back(v);
    if (!row.eof()) throw std::runtime_error("iterates line " + std::to_string(line_no) + ": bad number");
    if (values.empty()) continue;
    const auto n = static_cast<Eigen::Index>(values.size());
    if (width >= 0 && n != width) {
      throw std::runtime_error("iterates line " + std::to_string(line_no) + ": expected " +
                               std::to_string(width) + " values, got " + std::to_string(n));
    }
    width = n;
    out.emplace_back(Eigen::Map<const Eigen::VectorXd>(values.data(), n));
  }
  return out;
}

}  // namespace rkfw
