#include "rkfw/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace rkfw {

namespace {

std::runtime_error line_error(std::size_t line, const std::string& what) {
  return std::runtime_error("line " + std::to_string(line) + ": " + what);
}

template <typename T>
bool parse_token(std::string_view tok, T& out) {
  const char* end = tok.data() + tok.size();
  const auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> tokens(std::string_view line, const char* seps) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    const auto b = line.find_first_not_of(seps, pos);
    if (b == std::string_view::npos) break;
    const auto e = line.find_first_of(seps, b);
    out.push_back(line.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    pos = e == std::string_view::npos ? line.size() : e;
  }
  return out;
}

std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

SvmlightData read_svmlight(std::istream& in, Eigen::Index max_feature) {
  struct Row {
    double label;
    std::vector<std::pair<Eigen::Index, double>> entries;
  };
  std::vector<Row> rows;
  Eigen::Index width = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto toks = tokens(body, " \t\r");
    if (toks.empty()) continue;

    std::string_view label_tok = toks[0];
    if (!label_tok.empty() && label_tok.front() == '+') label_tok.remove_prefix(1);
    double label = 0.0;
    if (!parse_token(label_tok, label)) {
      throw line_error(line_no, "non-numeric label '" + std::string(toks[0]) + "'");
    }
    if (label != 1.0 && label != 0.0 && label != -1.0) {
      throw line_error(line_no, "label " + std::string(toks[0]) + " outside {-1, 0, 1}");
    }
    Row row{label == 1.0 ? 1.0 : -1.0, {}};
    for (std::size_t i = 1; i < toks.size(); ++i) {
      const auto colon = toks[i].find(':');
      if (colon == std::string_view::npos) {
        throw line_error(line_no, "expected idx:val, got '" + std::string(toks[i]) + "'");
      }
      long long idx = 0;
      double val = 0.0;
      if (!parse_token(toks[i].substr(0, colon), idx)) {
        throw line_error(line_no, "non-numeric index in '" + std::string(toks[i]) + "'");
      }
      if (!parse_token(toks[i].substr(colon + 1), val) || !std::isfinite(val)) {
        throw line_error(line_no, "non-numeric value in '" + std::string(toks[i]) + "'");
      }
      if (idx < 1) throw line_error(line_no, "index must be >= 1");
      if (idx > max_feature) {
        throw line_error(line_no, "index " + std::to_string(idx) + " exceeds limit " +
                                      std::to_string(max_feature));
      }
      row.entries.emplace_back(static_cast<Eigen::Index>(idx - 1), val);
      width = std::max(width, static_cast<Eigen::Index>(idx));
    }
    rows.push_back(std::move(row));
  }

  SvmlightData out;
  if (rows.empty()) {
    out.features.resize(0, 0);
    out.labels.resize(0);
    out.warnings.emplace_back("empty svmlight input");
    return out;
  }
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.features = Eigen::MatrixXd::Zero(m, width);
  out.labels.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Row& r = rows[static_cast<std::size_t>(i)];
    out.labels(i) = r.label;
    for (const auto& [j, v] : r.entries) out.features(i, j) = v;
  }
  return out;
}

SvmlightData load_svmlight(const std::string& path) {
  auto in = open(path);
  return read_svmlight(in);
}

std::vector<Rating> read_movielens(std::istream& in) {
  std::vector<Rating> out;
  std::set<std::pair<long long, long long>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokens(line, "\t\r");
    if (toks.empty()) continue;
    if (toks.size() < 3 || toks.size() > 4) {
      throw line_error(line_no, "expected user, item, rating[, timestamp], got " +
                                    std::to_string(toks.size()) + " fields");
    }
    long long user = 0;
    long long item = 0;
    double rating = 0.0;
    if (!parse_token(toks[0], user) || user < 1) throw line_error(line_no, "bad user id '" + std::string(toks[0]) + "'");
    if (!parse_token(toks[1], item) || item < 1) throw line_error(line_no, "bad item id '" + std::string(toks[1]) + "'");
    if (!parse_token(toks[2], rating)) throw line_error(line_no, "non-numeric rating '" + std::string(toks[2]) + "'");
    if (!(rating >= 1.0 && rating <= 5.0)) {
      throw line_error(line_no, "rating " + std::string(toks[2]) + " outside [1, 5]");
    }
    if (toks.size() == 4) {
      long long stamp = 0;
      if (!parse_token(toks[3], stamp)) throw line_error(line_no, "non-numeric timestamp");
    }
    if (!seen.emplace(user, item).second) {
      throw line_error(line_no, "duplicate rating for (user " + std::to_string(user) + ", item " +
                                    std::to_string(item) + ")");
    }
    out.push_back({static_cast<Eigen::Index>(user - 1), static_cast<Eigen::Index>(item - 1), rating});
  }
  return out;
}

std::vector<Rating> load_movielens(const std::string& path) {
  auto in = open(path);
  return read_movielens(in);
}

}  // namespace rkfw
