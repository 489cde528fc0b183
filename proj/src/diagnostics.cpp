#include "rkfw/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>

namespace rkfw {

std::string to_string(ProjectorNorm p) {
  return p == ProjectorNorm::orthogonal ? "orthogonal" : "unsquared";
}

ProjectorNorm parse_projector_norm(std::string_view text) {
  if (text == "orthogonal") return ProjectorNorm::orthogonal;
  if (text == "unsquared") return ProjectorNorm::unsquared;
  throw std::invalid_argument("unknown projector normalization '" + std::string(text) + "'");
}

ZigzagReport zigzag_energy(const std::vector<Point>& iterates, int window, double delta,
                           ProjectorNorm norm) {
  if (window < 2) throw std::invalid_argument("zigzag_energy: window must be >= 2");
  const auto n = iterates.size();
  const auto w = static_cast<std::size_t>(window);
  if (n < w + 1) {
    throw std::invalid_argument("zigzag_energy: need at least " + std::to_string(w + 1) +
                                " iterates, got " + std::to_string(n));
  }
  ZigzagReport report;
  report.window = window;
  report.delta = delta;
  report.total_time = static_cast<double>(n - 1) * delta;

  const std::size_t blocks = (n - 1) / w;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t k = b * w;
    const Point dbar = iterates[k + w] - iterates[k];
    const double nd = dbar.norm();
    const bool degenerate = nd < 1e-14;
    if (degenerate) ++report.degenerate_blocks;
    const double scale = degenerate ? 0.0 : (norm == ProjectorNorm::orthogonal ? dbar.squaredNorm() : nd);
    double sum = 0.0;
    for (std::size_t i = k + 1; i + 1 <= k + w; ++i) {
      Point d = iterates[i + 1] - iterates[i];
      if (!degenerate) d -= ((dbar.array() * d.array()).sum() / scale) * dbar;
      sum += d.norm();
    }
    report.block_start.push_back(static_cast<int>(k));
    report.energies.push_back(sum / static_cast<double>(w - 1));
  }
  double total = 0.0;
  for (double e : report.energies) total += e;
  report.mean = total / static_cast<double>(report.energies.size());
  return report;
}

void write_zigzag_csv(std::ostream& out, const ZigzagReport& r) {
  out << "block_start_k,energy\n" << std::setprecision(17);
  for (std::size_t i = 0; i < r.energies.size(); ++i) {
    out << r.block_start[i] << ',' << r.energies[i] << '\n';
  }
  out << "# window=" << r.window << " delta=" << r.delta << " total_time=" << r.total_time
      << " blocks=" << r.energies.size() << " degenerate=" << r.degenerate_blocks
      << " mean=" << r.mean << '\n';
}

std::vector<double> sup_envelope(const std::vector<double>& series) {
  std::vector<double> env(series.size());
  double running = 0.0;
  for (std::size_t i = series.size(); i-- > 0;) {
    running = std::max(running, std::abs(series[i]));
    env[i] = running;
  }
  return env;
}

double sup_envelope(const std::vector<double>& series, std::size_t k) {
  if (k >= series.size()) {
    throw std::out_of_range("sup_envelope: k = " + std::to_string(k) + " beyond length " +
                            std::to_string(series.size()));
  }
  double m = 0.0;
  for (std::size_t i = k; i < series.size(); ++i) m = std::max(m, std::abs(series[i]));
  return m;
}

double fit_rate_slope(const std::vector<double>& h, std::size_t k_min, std::size_t k_max) {
  if (k_min < 1) throw std::invalid_argument("fit_rate_slope: k_min must be >= 1");
  if (k_max <= k_min) throw std::invalid_argument("fit_rate_slope: need k_min < k_max");
  if (k_max >= h.size()) {
    throw std::out_of_range("fit_rate_slope: k_max = " + std::to_string(k_max) +
                            " beyond series length " + std::to_string(h.size()));
  }
  const auto n = static_cast<Eigen::Index>(k_max - k_min + 1);
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd rhs(n);
  for (std::size_t k = k_min; k <= k_max; ++k) {
    if (!(h[k] > 0.0)) {
      throw std::domain_error("fit_rate_slope: nonpositive h at k = " + std::to_string(k));
    }
    const auto row = static_cast<Eigen::Index>(k - k_min);
    design(row, 0) = 1.0;
    design(row, 1) = std::log(static_cast<double>(k));
    rhs(row) = std::log(h[k]);
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);
  return coef(1);
}

double DecreaseBoundParams::d4_formula(double L, double L2, double D2, double D3) {
  return (L * D2 * D2 + 2.0 * L * D2 * D3 + 2.0 * L2 * D3) / 2.0;
}

DecreaseBoundParams make_decrease_bound_params(const Tableau& t, double c, double L, double L2,
                                               double D) {
  if (!(L > 0.0) || !(L2 >= 0.0) || !(D > 0.0)) {
    throw std::invalid_argument("make_decrease_bound_params: need L > 0, L2 >= 0, D > 0");
  }
  const auto q = static_cast<double>(t.stages());
  const Eigen::MatrixXd P = mixing_matrix(t, c, 1.0, 1.0);
  DecreaseBoundParams p;
  p.L = L;
  p.L2 = L2;
  p.D = D;
  p.p_max = P.colwise().norm().maxCoeff();
  p.c1 = q * p.p_max;
  p.c2 = q * t.A.cwiseAbs().maxCoeff();
  p.D2 = p.c1 * D;
  p.D3 = p.c2 * p.c1 * D;
  p.D4 = DecreaseBoundParams::d4_formula(L, L2, p.D2, p.D3);
  return p;
}

std::vector<int> decrease_bound_check(const Trajectory& traj, const DecreaseBoundParams& params,
                                      double c) {
  const std::vector<double> h = traj.suboptimality();
  std::vector<int> violations;
  for (std::size_t k = 1; k + 1 < h.size(); ++k) {
    const double g = c / (c + static_cast<double>(k) + 1.0);
    if (h[k + 1] - h[k] > -g * h[k] + params.D4 * g * g + 1e-9) {
      violations.push_back(static_cast<int>(k));
    }
  }
  return violations;
}

}  // namespace rkfw
