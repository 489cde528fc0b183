#ifndef RKFW_OBJECTIVES_HPP_
#define RKFW_OBJECTIVES_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rkfw/geometry.hpp"

namespace rkfw {

/// Smooth convex objective with value and gradient oracles. Implementations are
/// immutable, so a single instance can be shared by concurrent runs.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::string kind() const = 0;
  virtual Eigen::Index rows() const = 0;
  virtual Eigen::Index cols() const { return 1; }

  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;

  /// Lipschitz constant of the gradient.
  virtual double smoothness() const = 0;
  /// Lipschitz constant of f itself, when one holds globally.
  virtual std::optional<double> lipschitz() const { return std::nullopt; }

  /// True when x lies within `radius` of a surface where f is not twice
  /// differentiable; finite-difference checks skip such points.
  virtual bool near_kink(const Point& /*x*/, double /*radius*/) const { return false; }

 protected:
  void check_shape(const Point& x) const;
};

/// 1/2 ||x - target||^2.
class DistanceSquared final : public Objective {
 public:
  explicit DistanceSquared(Eigen::VectorXd target) : target_(std::move(target)) {}
  std::string kind() const override { return "distance_sq"; }
  Eigen::Index rows() const override { return target_.size(); }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double smoothness() const override { return 1.0; }
  const Eigen::VectorXd& target() const { return target_; }

 private:
  Eigen::VectorXd target_;
};

/// 1/2 ||G x - h||^2.
class LeastSquares final : public Objective {
 public:
  LeastSquares(Eigen::MatrixXd design, Eigen::VectorXd observations);
  std::string kind() const override { return "least_squares"; }
  Eigen::Index rows() const override { return design_.cols(); }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double smoothness() const override { return smoothness_; }
  const Eigen::MatrixXd& design() const { return design_; }
  const Eigen::VectorXd& observations() const { return observations_; }

 private:
  Eigen::MatrixXd design_;
  Eigen::VectorXd observations_;
  double smoothness_;
};

/// (1/m) sum_i log(1 + exp(-y_i z_i^T x)) with z_i the rows of `features`.
class Logistic final : public Objective {
 public:
  Logistic(Eigen::MatrixXd features, Eigen::VectorXd labels);
  std::string kind() const override { return "logistic"; }
  Eigen::Index rows() const override { return features_.cols(); }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double smoothness() const override { return smoothness_; }

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;
  double smoothness_;
};

/// Scalar Huber: x^2/2 for |x| < eps, eps |x| - eps^2/2 otherwise.
class HuberScalar final : public Objective {
 public:
  explicit HuberScalar(double epsilon);
  std::string kind() const override { return "huber_scalar"; }
  Eigen::Index rows() const override { return 1; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double smoothness() const override { return 1.0; }
  std::optional<double> lipschitz() const override { return epsilon_; }
  bool near_kink(const Point& x, double radius) const override;
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

/// Huber penalty: 1/2 xi^2 for |xi| <= rho, rho (|xi| - rho) + 1/2 rho^2 beyond.
double huber(double xi, double rho);
double huber_derivative(double xi, double rho);

struct Observation {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  double value = 0.0;
};

/// sum over observed (i, j) of H(R_ij - X_ij).
class HuberMatrix final : public Objective {
 public:
  HuberMatrix(Eigen::Index rows, Eigen::Index cols, std::vector<Observation> observed, double rho);
  std::string kind() const override { return "huber_matrix"; }
  Eigen::Index rows() const override { return rows_; }
  Eigen::Index cols() const override { return cols_; }
  double value(const Point& x) const override;
  Point gradient(const Point& x) const override;
  double smoothness() const override { return 1.0; }
  std::optional<double> lipschitz() const override;
  bool near_kink(const Point& x, double radius) const override;
  const std::vector<Observation>& observed() const { return observed_; }
  double rho() const { return rho_; }

 private:
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::vector<Observation> observed_;
  double rho_;
};

/// Largest eigenvalue of m^T m, by power iteration.
double spectral_norm_squared(const Eigen::MatrixXd& m);

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t checked_points = 0;
  std::size_t excluded_points = 0;
};

/// max over points and coordinates of |analytic - central difference| /
/// max(1, ||analytic||_inf). Coordinates are perturbed by h = step * max(1, ||x||_inf);
/// points within 10 * h of a kink are excluded.
GradientCheck check_gradient(const Objective& f, const std::vector<Point>& points, double step);

}  // namespace rkfw

#endif  // RKFW_OBJECTIVES_HPP_
