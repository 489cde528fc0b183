#include <cmath>
#include <random>

#include "doctest.h"
#include "rkfw/datasets.hpp"
#include "rkfw/problems.hpp"

using rkfw::Point;

namespace {

std::string data(const char* name) { return std::string(RKFW_TEST_DATA) + "/" + name; }

}  // namespace

TEST_CASE("triangle instance") {
  const auto p = rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3));
  CHECK(p.objective->value(p.x0) == doctest::Approx(0.265));
  CHECK(p.f_star.value() == 0.0);
  CHECK(p.x0.isApprox(Eigen::Vector2d(0.0, 1.0)));
  CHECK(p.region->membership_violation(p.x0) == 0.0);
  CHECK_THROWS_AS(rkfw::make_triangle(Eigen::Vector2d(0.0, 1.0)), std::invalid_argument);
  CHECK_THROWS_AS(rkfw::make_triangle(Eigen::Vector2d(2.0, 0.5)), std::invalid_argument);
  const auto centroid = rkfw::make_triangle(Eigen::Vector2d(0.0, 1.0 / 3.0));
  CHECK(centroid.f_star.value() == 0.0);
}

TEST_CASE("scalar toy instance") {
  const auto p = rkfw::make_scalar_toy(1e-6);
  CHECK(p.objective->value(p.x0) == doctest::Approx(1e-6 - 5e-13).epsilon(1e-12));
  CHECK(p.x0(0, 0) == 1.0);
  CHECK(p.f_star.value() == 0.0);
  for (double x : {0.1, 0.5, 1.0}) {
    const Point g = p.objective->gradient(Point::Constant(1, 1, x));
    CHECK(p.region->lmo(g).dense()(0, 0) == -1.0);
  }
  CHECK_THROWS_AS(rkfw::make_scalar_toy(0.0), std::invalid_argument);
  CHECK_THROWS_AS(rkfw::make_scalar_toy(1.0), std::invalid_argument);
}

TEST_CASE("sensing instances are reproducible from the seed") {
  rkfw::SensingParams params;
  params.m = 40;
  params.n = 15;
  params.seed = 9;
  const auto a = rkfw::make_sensing(params);
  const auto b = rkfw::make_sensing(params);
  const auto& la = dynamic_cast<const rkfw::LeastSquares&>(*a.objective);
  const auto& lb = dynamic_cast<const rkfw::LeastSquares&>(*b.objective);
  CHECK(la.design() == lb.design());
  CHECK(la.observations() == lb.observations());
  CHECK(!a.f_star.has_value());
  CHECK(a.x0.isZero());
  CHECK(a.region->kind() == rkfw::RegionKind::l1_ball);
  CHECK(a.region->alpha() == 1000.0);

  params.seed = 10;
  const auto c = rkfw::make_sensing(params);
  CHECK(dynamic_cast<const rkfw::LeastSquares&>(*c.objective).design() != la.design());
}

TEST_CASE("noiseless dense sensing is solved exactly by the ground truth") {
  rkfw::SensingParams params;
  params.m = 30;
  params.n = 8;
  params.sparsity = 1.0;
  params.noise_sd = 0.0;
  params.alpha = 1e9;
  const auto p = rkfw::make_sensing(params);
  const auto& ls = dynamic_cast<const rkfw::LeastSquares&>(*p.objective);
  const Eigen::VectorXd x = ls.design().colPivHouseholderQr().solve(ls.observations());
  CHECK(ls.value(x) < 1e-20);
}

TEST_CASE("portable generator sequence") {
  rkfw::Rng a(42);
  rkfw::Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
  rkfw::Rng r(0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = r.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.05);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
  for (int i = 0; i < 1000; ++i) CHECK(r.below(7) < 7);
}

TEST_CASE("logistic instance from a fixture") {
  auto d = rkfw::load_svmlight(data("small.svm"));
  const auto p = rkfw::make_logistic(d.features, d.labels, 250.0);
  CHECK(p.objective->value(p.x0) == doctest::Approx(std::log(2.0)));
  CHECK(p.region->alpha() == 250.0);
  CHECK_THROWS_AS(rkfw::make_logistic(d.features, Eigen::VectorXd::Zero(d.labels.size()), 1.0),
                  std::invalid_argument);
}

TEST_CASE("matrix completion instance from a fixture") {
  const auto ratings = rkfw::load_movielens(data("u20.data"));
  const auto p = rkfw::make_matrix_completion(ratings, 1000.0, 10.0);
  CHECK(p.x0.rows() == 6);
  CHECK(p.x0.cols() == 9);
  double expected = 0.0;
  for (const auto& r : ratings) expected += rkfw::huber(r.rating - 3.0, 10.0);
  CHECK(p.objective->value(p.x0) == doctest::Approx(expected));

  const auto one = rkfw::make_matrix_completion({{0, 0, 3.0}}, 1.0, 1.0);
  CHECK(one.objective->value(one.x0) == 0.0);
  CHECK_THROWS_AS(rkfw::make_matrix_completion({{0, 0, 3.0}, {0, 0, 4.0}}, 1.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("every instance passes the gradient check and starts feasible") {
  std::mt19937 gen(8);
  rkfw::SensingParams sp;
  sp.m = 30;
  sp.n = 10;
  const auto svm = rkfw::load_svmlight(data("small.svm"));
  const std::vector<rkfw::ProblemInstance> all{
      rkfw::make_triangle(Eigen::Vector2d(0.2, 0.3)), rkfw::make_scalar_toy(0.1),
      rkfw::make_sensing(sp), rkfw::make_logistic(svm.features, svm.labels, 5.0),
      rkfw::make_matrix_completion(rkfw::load_movielens(data("u20.data")), 10.0, 1.0)};
  for (const auto& p : all) {
    INFO(p.label);
    CHECK(p.region->membership_violation(p.x0) <= 1e-9);
    std::vector<Point> pts;
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      Point g(p.x0.rows(), p.x0.cols());
      for (Eigen::Index j = 0; j < g.size(); ++j) g.reshaped()(j) = n(gen);
      pts.push_back(p.region->lmo(g).dense() * 0.7);
    }
    CHECK(rkfw::check_gradient(*p.objective, pts, 1e-6).max_relative_error <= 1e-5);
    if (p.f_star) CHECK(p.objective->value(p.x0) >= *p.f_star);
  }
}
