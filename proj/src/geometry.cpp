#include "rkfw/geometry.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rkfw {

namespace {

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

template <typename... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <typename... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

}  // namespace

Point Atom::dense() const {
  Point out = Point::Zero(rows_, cols_);
  add_to(out, 1.0);
  return out;
}

double Atom::inner(const Point& g) const {
  return std::visit(overloaded{
                        [&](const Point& p) { return (g.array() * p.array()).sum(); },
                        [&](const ScaledBasis& b) { return b.value * g.reshaped()(b.index); },
                        [&](const RankOne& r) { return r.scale * r.u.dot(g * r.v); },
                    },
                    rep_);
}

void Atom::add_to(Point& out, double scale) const {
  std::visit(overloaded{
                 [&](const Point& p) { out.noalias() += scale * p; },
                 [&](const ScaledBasis& b) { out.reshaped()(b.index) += scale * b.value; },
                 [&](const RankOne& r) { out.noalias() += (scale * r.scale) * r.u * r.v.transpose(); },
             },
             rep_);
}

std::string to_string(RegionKind kind) {
  switch (kind) {
    case RegionKind::box:
      return "box";
    case RegionKind::l1_ball:
      return "l1_ball";
    case RegionKind::vertex_hull:
      return "vertex_hull";
    case RegionKind::nuclear_ball:
      return "nuclear_ball";
  }
  return "unknown";
}

SingularTriplet top_singular_pair(const Eigen::MatrixXd& g, const PowerIterationOptions& opts) {
  const Eigen::Index m = g.cols();
  SingularTriplet out;
  out.u = Eigen::VectorXd::Unit(g.rows(), 0);
  out.v = Eigen::VectorXd::Unit(m, 0);
  const double scale = g.cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) return out;

  // Start from the row-sum direction; fall back to a seeded random vector when
  // it is (numerically) orthogonal to everything useful.
  Eigen::VectorXd v = g.colwise().sum().transpose();
  if (v.norm() <= 1e-12 * scale * std::sqrt(static_cast<double>(g.size()))) {
    std::mt19937_64 rng(opts.fallback_seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (Eigen::Index i = 0; i < m; ++i) v(i) = unif(rng);
  }
  v.normalize();

  double rq = -1.0;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iterations; ++it) {
    Eigen::VectorXd gv = g * v;
    Eigen::VectorXd w = g.transpose() * gv;
    const double next = gv.squaredNorm();
    const double wn = w.norm();
    if (!(wn > 0.0)) {
      // v drifted into the null space; sigma is effectively zero along it.
      out.sigma = 0.0;
      out.iterations = it;
      return out;
    }
    v = w / wn;
    change = std::abs(next - rq);
    rq = next;
    if (change < opts.relative_tolerance * std::abs(rq)) {
      out.v = v;
      Eigen::VectorXd gv2 = g * v;
      out.sigma = gv2.norm();
      out.u = gv2 / out.sigma;
      out.iterations = it;
      return out;
    }
  }
  std::ostringstream msg;
  msg << "power iteration did not converge in " << opts.max_iterations
      << " iterations; last Rayleigh quotient change " << change;
  throw std::runtime_error(msg.str());
}

FeasibleRegion FeasibleRegion::box(double alpha, Eigen::Index rows, Eigen::Index cols) {
  if (!(alpha > 0.0) || rows < 1 || cols < 1) throw std::invalid_argument("box: bad parameters");
  return {RegionKind::box, alpha, rows, cols};
}

FeasibleRegion FeasibleRegion::l1_ball(double alpha, Eigen::Index rows, Eigen::Index cols) {
  if (!(alpha > 0.0) || rows < 1 || cols < 1) throw std::invalid_argument("l1_ball: bad parameters");
  return {RegionKind::l1_ball, alpha, rows, cols};
}

FeasibleRegion FeasibleRegion::nuclear_ball(double alpha, Eigen::Index rows, Eigen::Index cols) {
  if (!(alpha > 0.0) || rows < 1 || cols < 1) {
    throw std::invalid_argument("nuclear_ball: bad parameters");
  }
  return {RegionKind::nuclear_ball, alpha, rows, cols};
}

FeasibleRegion FeasibleRegion::vertex_hull(std::vector<Eigen::VectorXd> vertices) {
  if (vertices.empty()) throw std::invalid_argument("vertex_hull: needs at least one vertex");
  const Eigen::Index n = vertices.front().size();
  for (const auto& v : vertices) {
    if (v.size() != n || n < 1) throw std::invalid_argument("vertex_hull: inconsistent dimensions");
    if (!v.allFinite()) throw std::invalid_argument("vertex_hull: non-finite vertex");
  }
  FeasibleRegion r{RegionKind::vertex_hull, 0.0, n, 1};
  r.vertices_ = std::move(vertices);
  return r;
}

double FeasibleRegion::diameter() const {
  switch (kind_) {
    case RegionKind::box:
      return 2.0 * alpha_ * std::sqrt(static_cast<double>(rows_ * cols_));
    case RegionKind::l1_ball:
    case RegionKind::nuclear_ball:
      return 2.0 * alpha_;
    case RegionKind::vertex_hull: {
      double d = 0.0;
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices_.size(); ++j) {
          d = std::max(d, (vertices_[i] - vertices_[j]).norm());
        }
      }
      return d;
    }
  }
  return 0.0;
}

void FeasibleRegion::check_shape(const Point& x, const char* what) const {
  if (x.rows() != rows_ || x.cols() != cols_) {
    std::ostringstream msg;
    msg << what << ": shape " << x.rows() << "x" << x.cols() << " does not match region "
        << rows_ << "x" << cols_;
    throw std::invalid_argument(msg.str());
  }
}

Atom FeasibleRegion::lmo(const Point& g, const PowerIterationOptions& opts) const {
  check_shape(g, "lmo");
  if (!g.allFinite()) throw std::invalid_argument("lmo: non-finite linear objective");
  switch (kind_) {
    case RegionKind::box: {
      Point s = g.unaryExpr([&](double v) { return -alpha_ * sign_of(v); });
      return {std::move(s), rows_, cols_};
    }
    case RegionKind::l1_ball: {
      Eigen::Index j = 0;
      g.reshaped().cwiseAbs().maxCoeff(&j);  // first maximal index
      return {ScaledBasis{j, -alpha_ * sign_of(g.reshaped()(j))}, rows_, cols_};
    }
    case RegionKind::vertex_hull: {
      std::size_t best = 0;
      double best_value = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const double value = g.col(0).dot(vertices_[i]);
        if (value < best_value) {
          best_value = value;
          best = i;
        }
      }
      return {Point(vertices_[best]), rows_, cols_};
    }
    case RegionKind::nuclear_ball: {
      auto top = top_singular_pair(g, opts);
      return {RankOne{-alpha_, std::move(top.u), std::move(top.v)}, rows_, cols_};
    }
  }
  throw std::logic_error("lmo: unknown region kind");
}

double FeasibleRegion::membership_violation(const Point& x) const {
  check_shape(x, "membership_violation");
  switch (kind_) {
    case RegionKind::box:
      return std::max(0.0, x.cwiseAbs().maxCoeff() - alpha_);
    case RegionKind::l1_ball:
      return std::max(0.0, x.cwiseAbs().sum() - alpha_);
    case RegionKind::nuclear_ball: {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(x);
      return std::max(0.0, svd.singularValues().sum() - alpha_);
    }
    case RegionKind::vertex_hull: {
      const auto n = rows_;
      if (static_cast<Eigen::Index>(vertices_.size()) != n + 1) {
        throw std::invalid_argument("membership check unsupported: vertex hull is not a simplex");
      }
      Eigen::MatrixXd system(n + 1, n + 1);
      for (Eigen::Index j = 0; j <= n; ++j) {
        system.col(j).head(n) = vertices_[static_cast<std::size_t>(j)];
        system(n, j) = 1.0;
      }
      Eigen::VectorXd rhs(n + 1);
      rhs.head(n) = x.col(0);
      rhs(n) = 1.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
      if (!lu.isInvertible()) {
        throw std::invalid_argument("membership check unsupported: degenerate simplex");
      }
      const Eigen::VectorXd lambda = lu.solve(rhs);
      return (-lambda.array()).max(0.0).sum();
    }
  }
  return 0.0;
}

}  // namespace rkfw
