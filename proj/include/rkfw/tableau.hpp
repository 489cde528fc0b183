#ifndef RKFW_TABLEAU_HPP_
#define RKFW_TABLEAU_HPP_

#include <cmath>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace rkfw {

/// Coefficients (A, beta, omega) of an explicit q-stage Runge-Kutta scheme
/// applied to the Frank-Wolfe flow. omega holds stage time offsets in units of
/// the iteration index.
template <typename Scalar>
struct ButcherTableau {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  std::string name;
  Matrix A;
  Vector beta;
  Vector omega;

  Eigen::Index stages() const { return beta.size(); }

  template <typename Other>
  ButcherTableau<Other> cast() const {
    return {name, A.template cast<Other>(), beta.template cast<Other>(),
            omega.template cast<Other>()};
  }
};

using Tableau = ButcherTableau<double>;

/// Names accepted by make_tableau, in a stable order.
const std::vector<std::string>& tableau_names();

/// Built-in schemes: euler (vanilla FW), midpoint, rk44, rk38, rk5.
/// Throws std::invalid_argument naming the available tableaus otherwise.
Tableau make_tableau(std::string_view name);

/// Plain-text tableau: line 1 holds q, then q rows of A, a beta row and an
/// omega row, all whitespace separated. Blank lines and '#' comments are
/// skipped. Throws std::runtime_error with the offending line number.
Tableau read_tableau(std::istream& in, std::string name);
Tableau load_tableau(const std::string& path);

/// Every violated structural invariant; empty when the tableau is usable.
template <typename Scalar>
std::vector<std::string> validate_tableau(const ButcherTableau<Scalar>& t) {
  using std::abs;
  std::vector<std::string> out;
  const Eigen::Index q = t.stages();
  if (q < 1) {
    out.emplace_back("stage count must be positive");
    return out;
  }
  if (t.A.rows() != q || t.A.cols() != q || t.omega.size() != q) {
    out.emplace_back("shape mismatch: A must be q x q and omega length q");
    return out;
  }
  bool finite = t.A.allFinite() && t.beta.allFinite() && t.omega.allFinite();
  if (!finite) out.emplace_back("non-finite coefficient");
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index j = i; j < q; ++j) {
      if (t.A(i, j) != Scalar(0)) {
        out.emplace_back("not strictly lower triangular");
        i = q;
        break;
      }
    }
  }
  if (abs(t.beta.sum() - Scalar(1)) > Scalar(1e-12)) out.emplace_back("sum(beta) != 1");
  if (t.omega(0) != Scalar(0)) out.emplace_back("omega[0] != 0");
  for (Eigen::Index i = 0; i < q; ++i) {
    if (t.omega(i) < Scalar(0) || t.omega(i) > Scalar(1)) {
      out.emplace_back("omega outside [0, 1]");
      break;
    }
  }
  return out;
}

/// Stage mixing coefficients delta * c / (c + delta * (k + omega_i)).
/// At delta = 1 this is the usual c / (c + k + omega_i).
template <typename Scalar>
typename ButcherTableau<Scalar>::Vector stage_gains(const ButcherTableau<Scalar>& t, Scalar c,
                                                    Scalar delta, Scalar k) {
  return t.omega.unaryExpr(
      [&](Scalar w) { return delta * c / (c + delta * (k + w)); });
}

/// P = Gamma (I + A^T Gamma)^{-1}. Since A is strictly lower triangular,
/// I + A^T Gamma is unit upper triangular and is inverted by substitution.
template <typename Scalar>
typename ButcherTableau<Scalar>::Matrix mixing_matrix(const ButcherTableau<Scalar>& t, Scalar c,
                                                      Scalar delta, Scalar k) {
  using Matrix = typename ButcherTableau<Scalar>::Matrix;
  const Eigen::Index q = t.stages();
  const auto gains = stage_gains(t, c, delta, k);
  const Matrix m = Matrix::Identity(q, q) + t.A.transpose() * gains.asDiagonal();
  if ((m.diagonal().array() == Scalar(0)).any()) {
    throw std::domain_error("mixing_matrix: I + A^T Gamma is singular");
  }
  const Matrix inv = m.template triangularView<Eigen::UnitUpper>().solve(Matrix::Identity(q, q));
  return gains.asDiagonal() * inv;
}

/// Feasibility certificate z = q P beta at iteration k.
template <typename Scalar>
typename ButcherTableau<Scalar>::Vector certificate_vector(const ButcherTableau<Scalar>& t,
                                                          Scalar c, Scalar delta, Scalar k) {
  return Scalar(t.stages()) * mixing_matrix(t, c, delta, k) * t.beta;
}

struct CertificateReport {
  std::string tableau_name;
  double c = 2.0;
  double delta = 1.0;
  std::vector<std::pair<int, Eigen::VectorXd>> z_by_k;
  bool all_in_unit_interval = true;
  bool sup_norm_monotone = true;
};

/// Evaluates z for k = 1..k_max. Requires a valid tableau, c >= 1, delta > 0.
CertificateReport feasibility_certificate(const Tableau& t, double c, double delta, int k_max);

/// min over sign patterns of |sum_i +-beta_i|, by exhaustive enumeration.
/// Zero means beta can be split into two groups with equal sums.
double cancellability_margin(const Eigen::VectorXd& beta);

}  // namespace rkfw

#endif  // RKFW_TABLEAU_HPP_
