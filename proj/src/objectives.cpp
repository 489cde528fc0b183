#include "rkfw/objectives.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace rkfw {

namespace {

// log(1 + exp(t)) without overflow.
double softplus(double t) { return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

// 1 / (1 + exp(-t)).
double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void Objective::check_shape(const Point& x) const {
  if (x.rows() != rows() || x.cols() != cols()) {
    std::ostringstream msg;
    msg << kind() << ": shape " << x.rows() << "x" << x.cols() << " does not match " << rows()
        << "x" << cols();
    throw std::invalid_argument(msg.str());
  }
}

double DistanceSquared::value(const Point& x) const {
  check_shape(x);
  return 0.5 * (x.col(0) - target_).squaredNorm();
}

Point DistanceSquared::gradient(const Point& x) const {
  check_shape(x);
  return x.col(0) - target_;
}

LeastSquares::LeastSquares(Eigen::MatrixXd design, Eigen::VectorXd observations)
    : design_(std::move(design)), observations_(std::move(observations)) {
  if (design_.rows() != observations_.size()) {
    throw std::invalid_argument("least_squares: G and h disagree in length");
  }
  smoothness_ = spectral_norm_squared(design_);
}

double LeastSquares::value(const Point& x) const {
  check_shape(x);
  return 0.5 * (design_ * x.col(0) - observations_).squaredNorm();
}

Point LeastSquares::gradient(const Point& x) const {
  check_shape(x);
  return design_.transpose() * (design_ * x.col(0) - observations_);
}

Logistic::Logistic(Eigen::MatrixXd features, Eigen::VectorXd labels)
    : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size()) {
    throw std::invalid_argument("logistic: features and labels disagree in length");
  }
  if (features_.rows() == 0) throw std::invalid_argument("logistic: no samples");
  for (Eigen::Index i = 0; i < labels_.size(); ++i) {
    if (labels_(i) != 1.0 && labels_(i) != -1.0) {
      throw std::invalid_argument("logistic: label " + std::to_string(labels_(i)) +
                                  " at row " + std::to_string(i) + " is not in {-1, 1}");
    }
  }
  smoothness_ = spectral_norm_squared(features_) / (4.0 * static_cast<double>(features_.rows()));
}

double Logistic::value(const Point& x) const {
  check_shape(x);
  const Eigen::VectorXd margins = labels_.cwiseProduct(features_ * x.col(0));
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += softplus(-margins(i));
  return total / static_cast<double>(margins.size());
}

Point Logistic::gradient(const Point& x) const {
  check_shape(x);
  const Eigen::VectorXd margins = labels_.cwiseProduct(features_ * x.col(0));
  Eigen::VectorXd weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    weights(i) = -labels_(i) * sigmoid(-margins(i));
  }
  return features_.transpose() * weights / static_cast<double>(margins.size());
}

HuberScalar::HuberScalar(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("huber_scalar: epsilon must be > 0");
}

double HuberScalar::value(const Point& x) const {
  check_shape(x);
  const double v = x(0, 0);
  if (std::abs(v) < epsilon_) return 0.5 * v * v;
  return epsilon_ * std::abs(v) - 0.5 * epsilon_ * epsilon_;
}

Point HuberScalar::gradient(const Point& x) const {
  check_shape(x);
  const double v = x(0, 0);
  Point g(1, 1);
  g(0, 0) = std::abs(v) < epsilon_ ? v : (v >= 0.0 ? epsilon_ : -epsilon_);
  return g;
}

bool HuberScalar::near_kink(const Point& x, double radius) const {
  return std::abs(std::abs(x(0, 0)) - epsilon_) <= radius;
}

double huber(double xi, double rho) {
  const double a = std::abs(xi);
  return a <= rho ? 0.5 * xi * xi : rho * (a - rho) + 0.5 * rho * rho;
}

double huber_derivative(double xi, double rho) {
  if (std::abs(xi) <= rho) return xi;
  return xi > 0.0 ? rho : -rho;
}

HuberMatrix::HuberMatrix(Eigen::Index rows, Eigen::Index cols, std::vector<Observation> observed,
                         double rho)
    : rows_(rows), cols_(cols), observed_(std::move(observed)), rho_(rho) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("huber_matrix: empty shape");
  if (!(rho > 0.0)) throw std::invalid_argument("huber_matrix: rho must be > 0");
  std::set<std::pair<Eigen::Index, Eigen::Index>> seen;
  for (const auto& o : observed_) {
    if (o.row < 0 || o.row >= rows || o.col < 0 || o.col >= cols) {
      throw std::invalid_argument("huber_matrix: observed index (" + std::to_string(o.row) + ", " +
                                  std::to_string(o.col) + ") outside shape");
    }
    if (!seen.emplace(o.row, o.col).second) {
      throw std::invalid_argument("huber_matrix: duplicate observed index (" +
                                  std::to_string(o.row) + ", " + std::to_string(o.col) + ")");
    }
  }
}

double HuberMatrix::value(const Point& x) const {
  check_shape(x);
  double total = 0.0;
  for (const auto& o : observed_) total += huber(o.value - x(o.row, o.col), rho_);
  return total;
}

Point HuberMatrix::gradient(const Point& x) const {
  check_shape(x);
  Point g = Point::Zero(rows_, cols_);
  for (const auto& o : observed_) g(o.row, o.col) = huber_derivative(x(o.row, o.col) - o.value, rho_);
  return g;
}

std::optional<double> HuberMatrix::lipschitz() const {
  return rho_ * std::sqrt(static_cast<double>(observed_.size()));
}

bool HuberMatrix::near_kink(const Point& x, double radius) const {
  for (const auto& o : observed_) {
    if (std::abs(std::abs(x(o.row, o.col) - o.value) - rho_) <= radius) return true;
  }
  return false;
}

double spectral_norm_squared(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  PowerIterationOptions opts;
  opts.max_iterations = 20000;
  opts.relative_tolerance = 1e-12;
  try {
    return std::pow(top_singular_pair(m, opts).sigma, 2);
  } catch (const std::runtime_error&) {
    // Near-degenerate leading singular values; a dense SVD is fine at desk scale.
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    return std::pow(svd.singularValues()(0), 2);
  }
}

GradientCheck check_gradient(const Objective& f, const std::vector<Point>& points, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("check_gradient: step must be > 0");
  GradientCheck out;
  for (const auto& x : points) {
    const double h = step * std::max(1.0, x.cwiseAbs().maxCoeff());
    if (f.near_kink(x, 10.0 * h)) {
      ++out.excluded_points;
      continue;
    }
    ++out.checked_points;
    const Point analytic = f.gradient(x);
    const double scale = std::max(1.0, analytic.cwiseAbs().maxCoeff());
    Point probe = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double saved = probe.reshaped()(i);
      probe.reshaped()(i) = saved + h;
      const double up = f.value(probe);
      probe.reshaped()(i) = saved - h;
      const double down = f.value(probe);
      probe.reshaped()(i) = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic.reshaped()(i);
      out.max_relative_error = std::max(out.max_relative_error, std::abs(a - numeric) / scale);
    }
  }
  return out;
}

}  // namespace rkfw
