#include <random>

#include "doctest.h"
#include "rkfw/geometry.hpp"

using rkfw::FeasibleRegion;
using rkfw::Point;

namespace {

Point vec(std::initializer_list<double> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

FeasibleRegion triangle() {
  return FeasibleRegion::vertex_hull(
      {Eigen::Vector2d(-1, 0), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)});
}

Point random_point(std::mt19937& gen, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0.0, 1.0);
  Point p(rows, cols);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.reshaped()(i) = n(gen);
  return p;
}

// Random feasible point as a convex combination of LMO atoms.
Point random_feasible(const FeasibleRegion& r, std::mt19937& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point x = Point::Zero(r.rows(), r.cols());
  std::vector<double> w(4);
  double total = 0.0;
  for (auto& wi : w) total += (wi = u(gen));
  for (double wi : w) r.lmo(random_point(gen, r.rows(), r.cols())).add_to(x, wi / total);
  return x;
}

}  // namespace

TEST_CASE("l1 ball atom is a signed scaled basis vector") {
  const auto r = FeasibleRegion::l1_ball(2.0, 3);
  const auto s = r.lmo(vec({1, -3, 2}));
  const auto* basis = std::get_if<rkfw::ScaledBasis>(&s.representation());
  REQUIRE(basis != nullptr);
  CHECK(basis->index == 1);
  CHECK(basis->value == 2.0);
  CHECK(s.dense().isApprox(vec({0, 2, 0})));
}

TEST_CASE("box and vertex hull oracles") {
  CHECK(FeasibleRegion::box(1.0, 1).lmo(vec({0.5})).dense()(0, 0) == -1.0);
  CHECK(triangle().lmo(vec({-0.2, 0.7})).dense().isApprox(vec({1, 0})));
  const auto b = FeasibleRegion::box(3.0, 3).lmo(vec({-1, 0, 2})).dense();
  CHECK(b.isApprox(vec({3, -3, -3})));
}

TEST_CASE("nuclear ball atom is the top singular pair") {
  const auto r = FeasibleRegion::nuclear_ball(5.0, 2, 2);
  Point g(2, 2);
  g << 3, 0, 0, 1;
  const auto s = r.lmo(g);
  CHECK(std::holds_alternative<rkfw::RankOne>(s.representation()));
  Point expected(2, 2);
  expected << -5, 0, 0, 0;
  CHECK((s.dense() - expected).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("tie breaking is deterministic") {
  const auto l1 = FeasibleRegion::l1_ball(1.0, 3);
  CHECK(l1.lmo(vec({2, -2, 2})).dense().isApprox(vec({-1, 0, 0})));
  CHECK(l1.lmo(vec({0, 0, 0})).dense().isApprox(vec({-1, 0, 0})));
  CHECK(FeasibleRegion::box(1.0, 2).lmo(vec({0, 0})).dense().isApprox(vec({-1, -1})));
  CHECK(triangle().lmo(vec({0, 0})).dense().isApprox(vec({-1, 0})));
}

TEST_CASE("membership violation") {
  const auto l1 = FeasibleRegion::l1_ball(2.0, 2);
  CHECK(l1.membership_violation(vec({1, 0.5})) == 0.0);
  CHECK(l1.membership_violation(vec({3, 0})) == doctest::Approx(1.0));
  CHECK(FeasibleRegion::box(1.0, 4).membership_violation(Point::Zero(4, 1)) == 0.0);
  CHECK(FeasibleRegion::box(1.0, 2).membership_violation(vec({1.5, 0})) == doctest::Approx(0.5));
  CHECK(triangle().membership_violation(vec({0, 0.5})) == 0.0);
  CHECK(triangle().membership_violation(vec({0, 1.5})) > 0.0);

  Point big(2, 2);
  big << 3, 0, 0, 4;
  CHECK(FeasibleRegion::nuclear_ball(5.0, 2, 2).membership_violation(big) == doctest::Approx(2.0));

  const auto square = FeasibleRegion::vertex_hull({Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0),
                                                   Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)});
  try {
    square.membership_violation(vec({0.5, 0.5}));
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("membership check unsupported") != std::string::npos);
  }
}

TEST_CASE("shape and parameter errors") {
  CHECK_THROWS_AS(FeasibleRegion::l1_ball(1.0, 3).lmo(vec({1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleRegion::l1_ball(-1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(FeasibleRegion::vertex_hull({}), std::invalid_argument);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(FeasibleRegion::l1_ball(1.0, 2).lmo(vec({nan, 1})), std::invalid_argument);
}

TEST_CASE("diameter bounds the distance between atoms") {
  std::mt19937 gen(5);
  const std::vector<FeasibleRegion> regions{FeasibleRegion::box(2.0, 3), FeasibleRegion::l1_ball(2.0, 3),
                                            triangle(), FeasibleRegion::nuclear_ball(2.0, 3, 4)};
  for (const auto& r : regions) {
    INFO(rkfw::to_string(r.kind()));
    for (int i = 0; i < 50; ++i) {
      const Point a = r.lmo(random_point(gen, r.rows(), r.cols())).dense();
      const Point b = r.lmo(random_point(gen, r.rows(), r.cols())).dense();
      CHECK((a - b).norm() <= r.diameter() + 1e-9);
    }
  }
  CHECK(triangle().diameter() == doctest::Approx(2.0));
}

TEST_CASE("oracle output minimizes the linear functional over feasible samples") {
  std::mt19937 gen(17);
  const std::vector<FeasibleRegion> regions{FeasibleRegion::box(1.5, 4), FeasibleRegion::l1_ball(3.0, 4),
                                            triangle(), FeasibleRegion::nuclear_ball(2.0, 3, 3)};
  for (const auto& r : regions) {
    INFO(rkfw::to_string(r.kind()));
    std::vector<Point> samples;
    for (int i = 0; i < 100; ++i) samples.push_back(random_feasible(r, gen));
    for (int trial = 0; trial < 1000; ++trial) {
      const Point g = random_point(gen, r.rows(), r.cols());
      const auto s = r.lmo(g);
      const double best = s.inner(g);
      CHECK(std::abs(best - (s.dense().array() * g.array()).sum()) < 1e-9);
      bool ok = true;
      for (const auto& v : samples) ok = ok && best <= (g.array() * v.array()).sum() + 1e-9;
      CHECK(ok);
      CHECK(r.membership_violation(s.dense()) <= 1e-9);
    }
  }
}

TEST_CASE("l1 atoms have exactly one nonzero of magnitude alpha") {
  std::mt19937 gen(23);
  const auto r = FeasibleRegion::l1_ball(7.0, 10);
  for (int i = 0; i < 200; ++i) {
    const Point s = r.lmo(random_point(gen, 10, 1)).dense();
    CHECK((s.array() != 0.0).count() == 1);
    CHECK(s.cwiseAbs().maxCoeff() == 7.0);
  }
}

TEST_CASE("positive scaling of the functional keeps the atom") {
  std::mt19937 gen(29);
  const std::vector<FeasibleRegion> regions{FeasibleRegion::box(1.0, 5), FeasibleRegion::l1_ball(1.0, 5),
                                            triangle()};
  for (const auto& r : regions) {
    for (int i = 0; i < 100; ++i) {
      const Point g = random_point(gen, r.rows(), 1);
      const Point s = r.lmo(g).dense();
      for (double t : {0.001, 3.0, 1e6}) CHECK(r.lmo(t * g).dense() == s);
    }
  }
}

TEST_CASE("power iteration matches a dense SVD") {
  std::mt19937 gen(31);
  const auto r = FeasibleRegion::nuclear_ball(1.0, 20, 30);
  for (int i = 0; i < 20; ++i) {
    const Point g = random_point(gen, 20, 30);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Point s_svd = -svd.matrixU().col(0) * svd.matrixV().col(0).transpose();
    const double oracle = (g.array() * s_svd.array()).sum();
    const double power = r.lmo(g).inner(g);
    CHECK(power <= oracle * (1.0 - 1e-6) + 1e-9);
  }
  const auto pair = rkfw::top_singular_pair(Point::Zero(3, 2));
  CHECK(pair.sigma == 0.0);
}

TEST_CASE("structured atoms accumulate like their dense form") {
  std::mt19937 gen(37);
  const auto r = FeasibleRegion::nuclear_ball(2.0, 4, 3);
  const auto s = r.lmo(random_point(gen, 4, 3));
  Point acc = Point::Ones(4, 3);
  s.add_to(acc, -0.25);
  CHECK((acc - (Point::Ones(4, 3) - 0.25 * s.dense())).cwiseAbs().maxCoeff() < 1e-14);
}
