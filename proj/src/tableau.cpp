#include "rkfw/tableau.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace rkfw {

namespace {

Tableau build(std::string name, std::initializer_list<std::initializer_list<double>> a,
              std::initializer_list<double> beta, std::initializer_list<double> omega) {
  const auto q = static_cast<Eigen::Index>(beta.size());
  Tableau t{std::move(name), Eigen::MatrixXd::Zero(q, q), Eigen::VectorXd(q), Eigen::VectorXd(q)};
  Eigen::Index i = 0;
  for (const auto& row : a) {
    Eigen::Index j = 0;
    for (double v : row) t.A(i, j++) = v;
    ++i;
  }
  i = 0;
  for (double v : beta) t.beta(i++) = v;
  i = 0;
  for (double v : omega) t.omega(i++) = v;
  return t;
}

}  // namespace

const std::vector<std::string>& tableau_names() {
  static const std::vector<std::string> names{"euler", "midpoint", "rk44", "rk38", "rk5"};
  return names;
}

Tableau make_tableau(std::string_view name) {
  if (name == "euler") {
    return build("euler", {{0.0}}, {1.0}, {0.0});
  }
  if (name == "midpoint") {
    return build("midpoint", {{0.0, 0.0}, {0.5, 0.0}}, {0.0, 1.0}, {0.0, 0.5});
  }
  if (name == "rk44") {
    return build("rk44",
                 {{0.0, 0.0, 0.0, 0.0},
                  {0.5, 0.0, 0.0, 0.0},
                  {0.0, 0.5, 0.0, 0.0},
                  {0.0, 0.0, 1.0, 0.0}},
                 {1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0}, {0.0, 0.5, 0.5, 1.0});
  }
  if (name == "rk38") {
    return build("rk38",
                 {{0.0, 0.0, 0.0, 0.0},
                  {1.0 / 3.0, 0.0, 0.0, 0.0},
                  {-1.0 / 3.0, 1.0, 0.0, 0.0},
                  {1.0, -1.0, 1.0, 0.0}},
                 {1.0 / 8.0, 3.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0}, {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0});
  }
  if (name == "rk5") {
    return build("rk5",
                 {{0.0, 0.0, 0.0, 0.0, 0.0, 0.0},
                  {1.0 / 4.0, 0.0, 0.0, 0.0, 0.0, 0.0},
                  {1.0 / 8.0, 1.0 / 8.0, 0.0, 0.0, 0.0, 0.0},
                  {0.0, -1.0 / 2.0, 1.0, 0.0, 0.0, 0.0},
                  {3.0 / 16.0, 0.0, 0.0, 9.0 / 16.0, 0.0, 0.0},
                  {-3.0 / 7.0, 2.0 / 7.0, 12.0 / 7.0, -12.0 / 7.0, 8.0 / 7.0, 0.0}},
                 {7.0 / 90.0, 0.0, 32.0 / 90.0, 12.0 / 90.0, 32.0 / 90.0, 7.0 / 90.0},
                 {0.0, 1.0 / 4.0, 1.0 / 4.0, 1.0 / 2.0, 3.0 / 4.0, 1.0});
  }
  std::string msg = "unknown tableau '" + std::string(name) + "'; available:";
  for (const auto& n : tableau_names()) msg += " " + n;
  throw std::invalid_argument(msg);
}

Tableau read_tableau(std::istream& in, std::string name) {
  std::vector<std::pair<int, std::vector<double>>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<double> values;
    std::string tok;
    while (ss >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) {
        throw std::runtime_error("tableau line " + std::to_string(lineno) +
                                 ": not a number: '" + tok + "'");
      }
      values.push_back(v);
    }
    if (!values.empty()) rows.emplace_back(lineno, std::move(values));
  }
  if (rows.empty()) throw std::runtime_error("tableau: empty input");
  const auto& head = rows.front();
  if (head.second.size() != 1 || head.second[0] < 1 ||
      head.second[0] != std::floor(head.second[0])) {
    throw std::runtime_error("tableau line " + std::to_string(head.first) +
                             ": first line must be the stage count q");
  }
  const auto q = static_cast<Eigen::Index>(head.second[0]);
  if (static_cast<Eigen::Index>(rows.size()) != q + 3) {
    throw std::runtime_error("tableau: expected " + std::to_string(q + 3) +
                             " non-empty lines, found " + std::to_string(rows.size()));
  }
  Tableau t{std::move(name), Eigen::MatrixXd(q, q), Eigen::VectorXd(q), Eigen::VectorXd(q)};
  for (Eigen::Index r = 0; r < q + 2; ++r) {
    const auto& [ln, values] = rows[static_cast<std::size_t>(r + 1)];
    if (static_cast<Eigen::Index>(values.size()) != q) {
      throw std::runtime_error("tableau line " + std::to_string(ln) + ": expected " +
                               std::to_string(q) + " values");
    }
    for (Eigen::Index j = 0; j < q; ++j) {
      const double v = values[static_cast<std::size_t>(j)];
      if (r < q) {
        t.A(r, j) = v;
      } else if (r == q) {
        t.beta(j) = v;
      } else {
        t.omega(j) = v;
      }
    }
  }
  return t;
}

Tableau load_tableau(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open tableau file: " + path);
  auto name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name.erase(0, slash + 1);
  return read_tableau(in, name);
}

CertificateReport feasibility_certificate(const Tableau& t, double c, double delta, int k_max) {
  if (auto v = validate_tableau(t); !v.empty()) {
    throw std::invalid_argument("feasibility_certificate: invalid tableau: " + v.front());
  }
  if (!(c >= 1.0)) throw std::invalid_argument("feasibility_certificate: c must be >= 1");
  if (!(delta > 0.0)) throw std::invalid_argument("feasibility_certificate: delta must be > 0");
  if (k_max < 1) throw std::invalid_argument("feasibility_certificate: k_max must be >= 1");

  CertificateReport report;
  report.tableau_name = t.name;
  report.c = c;
  report.delta = delta;
  report.z_by_k.reserve(static_cast<std::size_t>(k_max));
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= k_max; ++k) {
    Eigen::VectorXd z = certificate_vector(t, c, delta, static_cast<double>(k));
    if ((z.array() < 0.0).any() || (z.array() > 1.0).any()) report.all_in_unit_interval = false;
    const double sup = z.cwiseAbs().maxCoeff();
    if (sup > previous) report.sup_norm_monotone = false;
    previous = sup;
    report.z_by_k.emplace_back(k, std::move(z));
  }
  return report;
}

double cancellability_margin(const Eigen::VectorXd& beta) {
  const auto q = beta.size();
  if (q < 1) throw std::invalid_argument("cancellability_margin: empty beta");
  if (q > 20) throw std::invalid_argument("cancellability_margin: enumeration too large (q > 20)");
  // Fixing the sign of beta_0 halves the work; |s| is symmetric under a global flip.
  double best = std::numeric_limits<double>::infinity();
  const std::uint32_t patterns = std::uint32_t{1} << (q - 1);
  for (std::uint32_t mask = 0; mask < patterns; ++mask) {
    double s = beta(0);
    for (Eigen::Index i = 1; i < q; ++i) {
      s += (mask >> (i - 1) & 1U) ? -beta(i) : beta(i);
    }
    best = std::min(best, std::abs(s));
  }
  return best;
}

}  // namespace rkfw
