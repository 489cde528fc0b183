#include "rkfw/problems.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace rkfw {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: empty range");
  return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
}

ProblemInstance make_triangle(const Eigen::Vector2d& x_star, const Eigen::Vector2d& x0) {
  std::vector<Eigen::VectorXd> vertices{Eigen::Vector2d(-1.0, 0.0), Eigen::Vector2d(1.0, 0.0),
                                        Eigen::Vector2d(0.0, 1.0)};
  // Barycentric coordinates of x_star in the triangle above.
  const double l3 = x_star.y();
  const double l2 = 0.5 * (x_star.x() + 1.0 - l3);
  const double l1 = 1.0 - l2 - l3;
  if (!(l1 > 0.0 && l2 > 0.0 && l3 > 0.0)) {
    throw std::invalid_argument("make_triangle: x_star must lie strictly inside the triangle");
  }
  auto region = std::make_shared<const FeasibleRegion>(FeasibleRegion::vertex_hull(vertices));
  if (region->membership_violation(x0) > 1e-9) {
    throw std::invalid_argument("make_triangle: x0 is not feasible");
  }
  return {std::make_shared<const DistanceSquared>(x_star), region, x0, 0.0, "triangle"};
}

ProblemInstance make_scalar_toy(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("make_scalar_toy: epsilon must be in (0, 1)");
  }
  return {std::make_shared<const HuberScalar>(epsilon),
          std::make_shared<const FeasibleRegion>(FeasibleRegion::box(1.0, 1)),
          Point::Constant(1, 1, 1.0), 0.0, "scalar_toy"};
}

ProblemInstance make_sensing(const SensingParams& p) {
  if (p.m < 1 || p.n < 1) throw std::invalid_argument("make_sensing: dimensions must be >= 1");
  if (!(p.sparsity > 0.0 && p.sparsity <= 1.0)) {
    throw std::invalid_argument("make_sensing: sparsity must be in (0, 1]");
  }
  if (!(p.noise_sd >= 0.0)) throw std::invalid_argument("make_sensing: noise_sd must be >= 0");
  Rng rng(p.seed);

  Eigen::MatrixXd design(p.m, p.n);
  for (Eigen::Index i = 0; i < p.m; ++i) {
    for (Eigen::Index j = 0; j < p.n; ++j) design(i, j) = rng.normal();
  }

  // Support by partial Fisher-Yates, then standard normal values.
  const auto nnz = static_cast<Eigen::Index>(std::ceil(p.sparsity * static_cast<double>(p.n) - 1e-9));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p.n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Eigen::VectorXd truth = Eigen::VectorXd::Zero(p.n);
  for (Eigen::Index i = 0; i < nnz; ++i) {
    const auto pick = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p.n - i)));
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick)]);
  }
  for (Eigen::Index i = 0; i < nnz; ++i) truth(order[static_cast<std::size_t>(i)]) = rng.normal();

  Eigen::VectorXd observations = design * truth;
  for (Eigen::Index i = 0; i < p.m; ++i) observations(i) += p.noise_sd * rng.normal();

  return {std::make_shared<const LeastSquares>(std::move(design), std::move(observations)),
          std::make_shared<const FeasibleRegion>(FeasibleRegion::l1_ball(p.alpha, p.n)),
          Point::Zero(p.n, 1), std::nullopt, "sensing"};
}

ProblemInstance make_logistic(Eigen::MatrixXd features, Eigen::VectorXd labels, double alpha) {
  const auto n = features.cols();
  if (n < 1) throw std::invalid_argument("make_logistic: no features");
  return {std::make_shared<const Logistic>(std::move(features), std::move(labels)),
          std::make_shared<const FeasibleRegion>(FeasibleRegion::l1_ball(alpha, n)),
          Point::Zero(n, 1), std::nullopt, "logistic"};
}

ProblemInstance make_matrix_completion(const std::vector<Rating>& ratings, double alpha, double rho,
                                       Eigen::Index rows, Eigen::Index cols) {
  Eigen::Index max_user = -1;
  Eigen::Index max_item = -1;
  std::vector<Observation> observed;
  observed.reserve(ratings.size());
  for (const auto& r : ratings) {
    if (r.user < 0 || r.item < 0) throw std::invalid_argument("make_matrix_completion: negative index");
    max_user = std::max(max_user, r.user);
    max_item = std::max(max_item, r.item);
    observed.push_back({r.user, r.item, r.rating - 3.0});
  }
  if (rows == 0) rows = max_user + 1;
  if (cols == 0) cols = max_item + 1;
  if (rows < 1 || cols < 1) throw std::invalid_argument("make_matrix_completion: no ratings");
  auto objective = std::make_shared<const HuberMatrix>(rows, cols, std::move(observed), rho);
  return {objective,
          std::make_shared<const FeasibleRegion>(FeasibleRegion::nuclear_ball(alpha, rows, cols)),
          Point::Zero(rows, cols), std::nullopt, "matrix_completion"};
}

}  // namespace rkfw
