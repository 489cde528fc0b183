#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "rkfw/diagnostics.hpp"
#include "rkfw/problems.hpp"

using rkfw::Point;

namespace {

std::vector<Point> path(std::initializer_list<Eigen::Vector2d> xs) { return {xs.begin(), xs.end()}; }

std::vector<Point> random_walk(std::mt19937& gen, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Point> out;
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    out.push_back(x);
    x += Eigen::Vector3d(g(gen), g(gen), g(gen));
  }
  return out;
}

rkfw::Trajectory from_values(const std::vector<double>& f, double f_star) {
  rkfw::Trajectory t;
  t.f_star = f_star;
  for (std::size_t k = 0; k < f.size(); ++k) {
    rkfw::TrajectoryRecord r;
    r.k = static_cast<int>(k);
    r.f = f[k];
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("zig-zag energy of reference paths") {
  std::vector<Point> line;
  for (int i = 0; i < 21; ++i) line.push_back(Eigen::Vector2d(i, -2 * i));
  const auto straight = rkfw::zigzag_energy(line, 5);
  CHECK(straight.energies.size() == 4);
  for (double e : straight.energies) CHECK(e == 0.0);
  std::vector<Point> inexact;
  for (int i = 0; i < 21; ++i) inexact.push_back(Eigen::Vector2d(i * 0.3, -i * 0.7));
  for (double e : rkfw::zigzag_energy(inexact, 5).energies) CHECK(e < 1e-14);

  const auto zz = rkfw::zigzag_energy(path({{0, 0}, {1, 1}, {2, 0}, {3, 1}}), 3);
  REQUIRE(zz.energies.size() == 1);
  const double expected = (std::hypot(0.4, 1.2) + std::hypot(0.2, 0.6)) / 2.0;
  CHECK(zz.energies[0] == doctest::Approx(expected));
  CHECK(zz.energies[0] == doctest::Approx(0.9487).epsilon(1e-4));
  CHECK(zz.mean == zz.energies[0]);
  CHECK(zz.degenerate_blocks == 0);

  const std::vector<Point> still(10, Point(Eigen::Vector2d(1.0, 2.0)));
  const auto idle = rkfw::zigzag_energy(still, 3);
  CHECK(idle.energies.size() == 3);
  CHECK(idle.degenerate_blocks == 3);
  CHECK(idle.mean == 0.0);
}

TEST_CASE("zig-zag blocks and time span") {
  std::mt19937 gen(3);
  const auto walk = random_walk(gen, 23);
  const auto r = rkfw::zigzag_energy(walk, 5, 0.1);
  CHECK(r.block_start == std::vector<int>{0, 5, 10, 15});
  CHECK(r.total_time == doctest::Approx(2.2));
  CHECK_THROWS_AS(rkfw::zigzag_energy(walk, 1), std::invalid_argument);
  CHECK_THROWS_AS(rkfw::zigzag_energy(std::vector<Point>(walk.begin(), walk.begin() + 3), 5),
                  std::invalid_argument);

  std::ostringstream out;
  rkfw::write_zigzag_csv(out, r);
  CHECK(out.str().rfind("block_start_k,energy\n0,", 0) == 0);
  CHECK(out.str().find("# window=5") != std::string::npos);
}

TEST_CASE("zig-zag energy with a window of two isolates the middle step") {
  std::mt19937 gen(4);
  const auto walk = random_walk(gen, 41);
  const auto r = rkfw::zigzag_energy(walk, 2);
  for (std::size_t b = 0; b < r.energies.size(); ++b) {
    const auto k = static_cast<std::size_t>(r.block_start[b]);
    const Eigen::VectorXd dbar = (walk[k + 2] - walk[k]).reshaped();
    const Eigen::VectorXd d = (walk[k + 2] - walk[k + 1]).reshaped();
    const Eigen::VectorXd off = d - dbar * dbar.dot(d) / dbar.squaredNorm();
    CHECK(r.energies[b] == doctest::Approx(off.norm()));
  }
}

TEST_CASE("zig-zag energy is translation invariant and scales linearly") {
  std::mt19937 gen(5);
  for (auto norm : {rkfw::ProjectorNorm::orthogonal, rkfw::ProjectorNorm::unsquared}) {
    const auto walk = random_walk(gen, 60);
    const double base = rkfw::zigzag_energy(walk, 5, 1.0, norm).mean;
    auto shifted = walk;
    for (auto& x : shifted) x.array() += 17.0;
    CHECK(rkfw::zigzag_energy(shifted, 5, 1.0, norm).mean == doctest::Approx(base).epsilon(1e-10));
    if (norm == rkfw::ProjectorNorm::orthogonal) {
      auto scaled = walk;
      for (auto& x : scaled) x *= 3.5;
      CHECK(rkfw::zigzag_energy(scaled, 5, 1.0, norm).mean == doctest::Approx(3.5 * base).epsilon(1e-10));
    }
  }
  CHECK(rkfw::parse_projector_norm("unsquared") == rkfw::ProjectorNorm::unsquared);
  CHECK_THROWS(rkfw::parse_projector_norm("oblique"));
}

TEST_CASE("sup envelope") {
  const std::vector<double> s{1, 0.5, 0.7, 0.2};
  CHECK(rkfw::sup_envelope(s, 1) == 0.7);
  CHECK(rkfw::sup_envelope(s) == std::vector<double>{1, 0.7, 0.7, 0.2});
  CHECK(rkfw::sup_envelope(std::vector<double>{-3, 2}, 0) == 3.0);
  CHECK_THROWS_AS(rkfw::sup_envelope(s, 4), std::out_of_range);

  const std::vector<double> down{5, 4, 2, 1, 0.5};
  CHECK(rkfw::sup_envelope(down) == down);

  std::mt19937 gen(6);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> noise(500);
  for (auto& v : noise) v = g(gen);
  const auto env = rkfw::sup_envelope(noise);
  for (std::size_t k = 1; k < env.size(); ++k) CHECK(env[k] <= env[k - 1]);
}

TEST_CASE("rate slope of exact power laws") {
  for (double r : {0.5, 1.0, 2.0}) {
    std::vector<double> h(1001);
    for (std::size_t k = 1; k < h.size(); ++k) h[k] = std::pow(static_cast<double>(k), -r);
    CHECK(std::abs(rkfw::fit_rate_slope(h, 10, 1000) + r) < 1e-10);
  }
  std::vector<double> h{1.0, 0.5, 0.0, 0.25};
  try {
    rkfw::fit_rate_slope(h, 1, 3);
    FAIL("expected an exception");
  } catch (const std::domain_error& e) {
    CHECK(std::string(e.what()).find("k = 2") != std::string::npos);
  }
  CHECK_THROWS(rkfw::fit_rate_slope(h, 0, 3));
  CHECK_THROWS(rkfw::fit_rate_slope(h, 2, 2));
  CHECK_THROWS(rkfw::fit_rate_slope(h, 1, 4));
}

TEST_CASE("decrease bound constants") {
  const auto euler = rkfw::make_decrease_bound_params(rkfw::make_tableau("euler"), 2.0, 1.0, 2.0, 2.0);
  CHECK(euler.p_max == doctest::Approx(2.0 / 3.0));
  CHECK(euler.c1 == doctest::Approx(2.0 / 3.0));
  CHECK(euler.c2 == 0.0);
  CHECK(euler.D3 == 0.0);
  CHECK(euler.D4 == doctest::Approx(0.5 * euler.D2 * euler.D2));

  const auto rk44 = rkfw::make_decrease_bound_params(rkfw::make_tableau("rk44"), 2.0, 1.0, 2.0, 2.0);
  CHECK(rk44.c2 == doctest::Approx(4.0));
  CHECK(rk44.D2 == doctest::Approx(rk44.c1 * 2.0));
  CHECK(rk44.D3 == doctest::Approx(rk44.c2 * rk44.c1 * 2.0));
  CHECK(rk44.D4 == doctest::Approx(rkfw::DecreaseBoundParams::d4_formula(1.0, 2.0, rk44.D2, rk44.D3)));
  CHECK(rkfw::DecreaseBoundParams::d4_formula(1.0, 0.0, 2.0, 0.0) == 2.0);
  CHECK_THROWS(rkfw::make_decrease_bound_params(rkfw::make_tableau("rk44"), 2.0, 0.0, 2.0, 2.0));
}

TEST_CASE("decrease bound check flags stalls") {
  rkfw::DecreaseBoundParams tight;
  tight.D4 = 0.0;
  const auto stalled = from_values(std::vector<double>(12, 1.0), 0.0);
  const auto flagged = rkfw::decrease_bound_check(stalled, tight, 2.0);
  CHECK(flagged == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});

  rkfw::DecreaseBoundParams loose;
  loose.D4 = 1e3;
  CHECK(rkfw::decrease_bound_check(stalled, loose, 2.0).empty());

  CHECK(rkfw::decrease_bound_check(from_values({1.0, 1.0}, 0.0), tight, 2.0).size() <= 1);

  auto unknown = stalled;
  unknown.f_star.reset();
  CHECK_THROWS(rkfw::decrease_bound_check(unknown, tight, 2.0));
}

TEST_CASE("rk44 on the triangle satisfies the one-step decrease bound") {
  const auto tri = rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3));
  rkfw::SolverConfig cfg;
  cfg.tableau = rkfw::make_tableau("rk44");
  cfg.max_iters = 300;
  cfg.record_wall_time = false;
  const auto traj = rkfw::run(tri, cfg);
  const auto params = rkfw::make_decrease_bound_params(cfg.tableau, 2.0, 1.0, 2.0, 2.0);
  CHECK(rkfw::decrease_bound_check(traj, params, 2.0).empty());
}
