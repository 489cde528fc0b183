#ifndef RKFW_PROBLEMS_HPP_
#define RKFW_PROBLEMS_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkfw/geometry.hpp"
#include "rkfw/objectives.hpp"

namespace rkfw {

/// Objective + feasible region + starting point. Shares its immutable parts,
/// so copies are cheap and safe to hand to concurrent runs.
struct ProblemInstance {
  std::shared_ptr<const Objective> objective;
  std::shared_ptr<const FeasibleRegion> region;
  Point x0;
  std::optional<double> f_star;
  std::string label;
};

/// Seeded generator with a portable output sequence: std::mt19937_64 for raw
/// bits, 53-bit uniforms in [0, 1), and Box-Muller normals. Unlike the
/// standard distributions, these transforms are identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// 1/2 ||x - x_star||^2 over co{(-1,0), (1,0), (0,1)}; x_star must be strictly
/// inside the triangle so that f* = 0.
ProblemInstance make_triangle(const Eigen::Vector2d& x_star,
                              const Eigen::Vector2d& x0 = Eigen::Vector2d(0.0, 1.0));

/// Scaled scalar Huber on [-1, 1], started at x0 = 1; f* = 0. Requires 0 < eps < 1.
ProblemInstance make_scalar_toy(double epsilon);

struct SensingParams {
  Eigen::Index m = 500;
  Eigen::Index n = 100;
  double sparsity = 0.1;
  double noise_sd = 0.05;
  double alpha = 1000.0;
  std::uint64_t seed = 0;
};

/// Least squares with a Gaussian design and a sparse ground truth, over the
/// l1 ball. f* is unknown.
ProblemInstance make_sensing(const SensingParams& params);

/// Sparse logistic regression over the l1 ball. Labels must be in {-1, 1}.
ProblemInstance make_logistic(Eigen::MatrixXd features, Eigen::VectorXd labels, double alpha);

struct Rating {
  Eigen::Index user = 0;
  Eigen::Index item = 0;
  double rating = 0.0;
};

/// Huber matrix completion over the nuclear ball with targets R = R0 - 3.
/// rows/cols default to 1 + the largest user/item index.
ProblemInstance make_matrix_completion(const std::vector<Rating>& ratings, double alpha, double rho,
                                       Eigen::Index rows = 0, Eigen::Index cols = 0);

}  // namespace rkfw

#endif  // RKFW_PROBLEMS_HPP_
