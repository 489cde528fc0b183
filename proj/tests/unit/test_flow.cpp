#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rkfw/flow.hpp"

using rkfw::Point;

namespace {

rkfw::SolverConfig config(const char* tableau, double delta, int iters) {
  rkfw::SolverConfig cfg;
  cfg.tableau = rkfw::make_tableau(tableau);
  cfg.delta = delta;
  cfg.max_iters = iters;
  cfg.record_iterates = true;
  cfg.record_wall_time = false;
  return cfg;
}

}  // namespace

TEST_CASE("flow bound values") {
  CHECK(rkfw::flow_bound(2.0, 0.0) == 1.0);
  CHECK(rkfw::flow_bound(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(rkfw::flow_bound(2.0, 8.0) == doctest::Approx(0.04));
  CHECK_THROWS_AS(rkfw::flow_bound(0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rkfw::flow_bound(2.0, -1.0), std::invalid_argument);
}

TEST_CASE("flow bound decreases in t and, for large t, in c") {
  for (double c : {1.0, 2.0, 4.0}) {
    double prev = rkfw::flow_bound(c, 0.0);
    for (double t = 0.5; t < 200.0; t += 0.5) {
      const double b = rkfw::flow_bound(c, t);
      CHECK(b < prev);
      prev = b;
    }
    for (double t : {10.0, 20.0, 100.0, 1e4}) CHECK(rkfw::flow_bound(c + 1.0, t) < rkfw::flow_bound(c, t));
  }
}

TEST_CASE("closed-form toy flow") {
  CHECK(rkfw::toy_flow_exact(0.7, 2.0, 0.0) == doctest::Approx(0.7));
  CHECK(rkfw::toy_flow_exact(1.0, 1.0, 1.0) == doctest::Approx(0.0));
  CHECK(rkfw::toy_flow_exact(1.0, 1.0, 2.0) == 0.0);
  CHECK(rkfw::toy_absorption_time(1.0, 1.0) == doctest::Approx(1.0));
  CHECK(rkfw::toy_absorption_time(1.0, 2.0) == doctest::Approx(2.0 * (std::sqrt(2.0) - 1.0)));
}

TEST_CASE("closed-form toy flow satisfies its differential equation") {
  for (double c : {1.0, 2.0, 3.0}) {
    const double u0 = 1.0;
    const double t_abs = rkfw::toy_absorption_time(u0, c);
    const double h = 1e-5;
    for (int i = 1; i <= 100; ++i) {
      const double t = t_abs * i / 101.0;
      const double du = (rkfw::toy_flow_exact(u0, c, t + h) - rkfw::toy_flow_exact(u0, c, t - h)) / (2 * h);
      const double u = rkfw::toy_flow_exact(u0, c, t);
      CHECK(std::abs(du + c / (c + t) * (u + 1.0)) <= 1e-6);
    }
  }
}

TEST_CASE("numeric reference tracks the toy flow") {
  const auto toy = rkfw::make_scalar_toy(1e-6);
  const auto ref = rkfw::reference_trajectory(toy, 2.0, 0.001, 10.0);
  CHECK(ref.source == rkfw::FlowSource::fine_step_numeric);
  CHECK(ref.times.size() == ref.states.size());
  CHECK(ref.times.back() == doctest::Approx(10.0));
  const double t_abs = rkfw::toy_absorption_time(1.0, 2.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.times.size() && ref.times[i] < t_abs; ++i) {
    worst = std::max(worst, std::abs(ref.states[i](0, 0) - rkfw::toy_flow_exact(1.0, 2.0, ref.times[i])));
  }
  CHECK(worst <= 1e-3);
  CHECK_THROWS_AS(rkfw::reference_trajectory(toy, 2.0, 10.0, 10.0), std::invalid_argument);
}

TEST_CASE("numeric reference on the triangle decreases f until it reaches the minimizer") {
  const auto tri = rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3));
  const auto ref = rkfw::reference_trajectory(tri, 2.0, 0.01, 5.0);
  double prev = tri.objective->value(ref.states.front());
  bool arrived = false;
  for (const auto& x : ref.states) {
    const double f = tri.objective->value(x);
    if (!arrived) CHECK(f <= prev);
    // The oracle flips around x* once it is reached; the discrete flow then
    // chatters at a floor of order delta_ref^2.
    arrived = arrived || f < 1e-4;
    if (arrived) CHECK(f < 1e-4);
    prev = f;
  }
  CHECK(arrived);
}

TEST_CASE("reference interpolation") {
  const auto ref = rkfw::toy_flow_reference(1.0, 2.0, {0.0, 0.5, 1.0});
  CHECK(ref.source == rkfw::FlowSource::closed_form_toy);
  const double mid = 0.5 * (rkfw::toy_flow_exact(1.0, 2.0, 0.0) + rkfw::toy_flow_exact(1.0, 2.0, 0.5));
  CHECK(ref.at(0.25)(0, 0) == doctest::Approx(mid));
  CHECK(ref.at(1.0)(0, 0) == doctest::Approx(rkfw::toy_flow_exact(1.0, 2.0, 1.0)));
  CHECK_THROWS_AS(ref.at(1.5), std::out_of_range);
  CHECK_THROWS_AS(rkfw::toy_flow_reference(1.0, 2.0, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("accumulation error of a trajectory against itself is zero") {
  const auto tri = rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3));
  const auto traj = rkfw::run(tri, config("rk44", 0.1, 50));
  const auto tae = rkfw::total_accumulation_error(traj, rkfw::recorded_reference(traj, 2.0));
  REQUIRE(tae.size() == 51);
  for (const auto& p : tae) CHECK(p.epsilon == 0.0);
  CHECK(tae.back().t == doctest::Approx(5.0));

  std::ostringstream out;
  rkfw::write_tae_csv(out, tae);
  CHECK(out.str().rfind("t,epsilon\n", 0) == 0);
}

TEST_CASE("accumulation error checks the reference") {
  const auto tri = rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3));
  const auto traj = rkfw::run(tri, config("euler", 0.1, 20));
  CHECK_THROWS(rkfw::total_accumulation_error(traj, rkfw::reference_trajectory(tri, 2.0, 0.001, 1.0)));
  CHECK_THROWS(rkfw::total_accumulation_error(traj, rkfw::reference_trajectory(tri, 2.0, 0.05, 2.0)));
  const auto tae = rkfw::total_accumulation_error(traj, rkfw::reference_trajectory(tri, 2.0, 0.001, 2.0));
  CHECK(tae.front().epsilon == 0.0);
  CHECK(tae.back().epsilon > 0.0);

  auto bare = traj;
  bare.iterates.clear();
  CHECK_THROWS(rkfw::total_accumulation_error(bare, rkfw::recorded_reference(traj, 2.0)));
}

TEST_CASE("halving the step halves the euler error on a smooth segment") {
  const auto tri = rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3));
  const auto ref = rkfw::reference_trajectory(tri, 2.0, 0.001, 0.2);
  auto final_error = [&](const char* tableau, double delta) {
    const auto traj = rkfw::run(tri, config(tableau, delta, static_cast<int>(std::lround(0.2 / delta))));
    return rkfw::total_accumulation_error(traj, ref).back().epsilon;
  };
  const double coarse = final_error("euler", 0.1);
  const double fine = final_error("euler", 0.05);
  CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.2));
  CHECK(final_error("rk44", 0.1) <= coarse);
}
