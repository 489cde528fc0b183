#ifndef RKFW_GEOMETRY_HPP_
#define RKFW_GEOMETRY_HPP_

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace rkfw {

/// Points of every region are stored as dense matrices; vectors are n x 1.
using Point = Eigen::MatrixXd;

/// s = value * e_index, with index the column-major linear index.
struct ScaledBasis {
  Eigen::Index index = 0;
  double value = 0.0;
};

/// s = scale * u v^T.
struct RankOne {
  double scale = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
};

/// Extreme point returned by an LMO. Structured atoms stay structured until a
/// solver asks for the dense form.
class Atom {
 public:
  using Representation = std::variant<Point, ScaledBasis, RankOne>;

  Atom(Representation rep, Eigen::Index rows, Eigen::Index cols)
      : rep_(std::move(rep)), rows_(rows), cols_(cols) {}

  const Representation& representation() const { return rep_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }

  Point dense() const;
  /// <g, s> without materializing s.
  double inner(const Point& g) const;
  /// out += scale * s.
  void add_to(Point& out, double scale) const;

 private:
  Representation rep_;
  Eigen::Index rows_;
  Eigen::Index cols_;
};

enum class RegionKind { box, l1_ball, vertex_hull, nuclear_ball };

std::string to_string(RegionKind kind);

struct PowerIterationOptions {
  int max_iterations = 5000;
  double relative_tolerance = 1e-10;
  unsigned fallback_seed = 12345;
};

/// Leading singular triplet of g, by power iteration on g^T g. Throws
/// std::runtime_error carrying the last Rayleigh-quotient change when the
/// iteration cap is reached.
struct SingularTriplet {
  double sigma = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd v;
  int iterations = 0;
};
SingularTriplet top_singular_pair(const Eigen::MatrixXd& g, const PowerIterationOptions& opts = {});

/// A convex compact set with a linear minimization oracle. Immutable.
class FeasibleRegion {
 public:
  static FeasibleRegion box(double alpha, Eigen::Index rows, Eigen::Index cols = 1);
  static FeasibleRegion l1_ball(double alpha, Eigen::Index rows, Eigen::Index cols = 1);
  static FeasibleRegion nuclear_ball(double alpha, Eigen::Index rows, Eigen::Index cols);
  /// Convex hull of the given points (each rows x 1).
  static FeasibleRegion vertex_hull(std::vector<Eigen::VectorXd> vertices);

  RegionKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  const std::vector<Eigen::VectorXd>& vertices() const { return vertices_; }

  /// Upper bound on sup ||x - y||_2 over the region.
  double diameter() const;

  /// argmin_{s in region} <g, s>. Ties: sign(0) = +1, lowest index wins.
  Atom lmo(const Point& g, const PowerIterationOptions& opts = {}) const;

  /// 0 inside the region, a positive excess otherwise. vertex_hull supports
  /// simplices only (rows + 1 affinely independent vertices).
  double membership_violation(const Point& x) const;

 private:
  FeasibleRegion(RegionKind kind, double alpha, Eigen::Index rows, Eigen::Index cols)
      : kind_(kind), alpha_(alpha), rows_(rows), cols_(cols) {}

  void check_shape(const Point& x, const char* what) const;

  RegionKind kind_;
  double alpha_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  std::vector<Eigen::VectorXd> vertices_;
};

}  // namespace rkfw

#endif  // RKFW_GEOMETRY_HPP_
