#include "rkfw/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rkfw/diagnostics.hpp"
#include "rkfw/solvers.hpp"
#include "rkfw/tableau.hpp"

namespace rkfw {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T parse_number(const std::string& v) {
  T out{};
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw std::invalid_argument("malformed number '" + v + "'");
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(out)) throw std::invalid_argument("non-finite number '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("malformed boolean '" + v + "'");
}

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0) out += ",";
    if constexpr (std::is_same_v<T, double>) {
      out += fmt(xs[i]);
    } else if constexpr (std::is_same_v<T, std::string>) {
      out += xs[i];
    } else {
      out += std::to_string(xs[i]);
    }
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"problem", [](auto& c, const auto& v) { c.problem = v; }},
      {"x_star",
       [](auto& c, const auto& v) {
         c.x_star.clear();
         for (const auto& s : split_list(v)) c.x_star.push_back(parse_number<double>(s));
       }},
      {"epsilon", [](auto& c, const auto& v) { c.epsilon = parse_number<double>(v); }},
      {"m", [](auto& c, const auto& v) { c.m = parse_number<int>(v); }},
      {"n", [](auto& c, const auto& v) { c.n = parse_number<int>(v); }},
      {"sparsity", [](auto& c, const auto& v) { c.sparsity = parse_number<double>(v); }},
      {"noise_sd", [](auto& c, const auto& v) { c.noise_sd = parse_number<double>(v); }},
      {"alpha",
       [](auto& c, const auto& v) {
         if (v == "default") {
           c.alpha.reset();
         } else {
           c.alpha = parse_number<double>(v);
         }
       }},
      {"rho", [](auto& c, const auto& v) { c.rho = parse_number<double>(v); }},
      {"data", [](auto& c, const auto& v) { c.data = v; }},
      {"seed", [](auto& c, const auto& v) { c.seed = parse_number<std::uint64_t>(v); }},
      {"tableau", [](auto& c, const auto& v) { c.tableau = v; }},
      {"tableau_file", [](auto& c, const auto& v) { c.tableau_file = v; }},
      {"tableaus", [](auto& c, const auto& v) { c.tableaus = split_list(v); }},
      {"variant", [](auto& c, const auto& v) { c.variant = v; }},
      {"line_search_rule", [](auto& c, const auto& v) { c.line_search_rule = v; }},
      {"c", [](auto& c, const auto& v) { c.c = parse_number<double>(v); }},
      {"delta", [](auto& c, const auto& v) { c.delta = parse_number<double>(v); }},
      {"iters", [](auto& c, const auto& v) { c.iters = parse_number<int>(v); }},
      {"horizon", [](auto& c, const auto& v) { c.horizon = parse_number<double>(v); }},
      {"windows",
       [](auto& c, const auto& v) {
         c.windows.clear();
         for (const auto& s : split_list(v)) c.windows.push_back(parse_number<int>(s));
       }},
      {"projector", [](auto& c, const auto& v) { c.projector = v; }},
      {"tae_delta_ref", [](auto& c, const auto& v) { c.tae_delta_ref = parse_number<double>(v); }},
      {"tae_reference", [](auto& c, const auto& v) { c.tae_reference = v; }},
      {"envelope", [](auto& c, const auto& v) { c.envelope = parse_bool(v); }},
      {"out_dir", [](auto& c, const auto& v) { c.out_dir = v; }},
      {"record_iterates", [](auto& c, const auto& v) { c.record_iterates = parse_bool(v); }},
      {"wall_time", [](auto& c, const auto& v) { c.wall_time = parse_bool(v); }},
      {"threads", [](auto& c, const auto& v) { c.threads = parse_number<int>(v); }},
  };
  return table;
}

}  // namespace

int ExperimentConfig::effective_iters() const {
  if (horizon > 0.0) return static_cast<int>(std::ceil(horizon / delta - 1e-9));
  return iters;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  bool has_problem = false;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw std::invalid_argument("unknown key: " + key);
    try {
      it->second(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + key + ": " + e.what());
    }
    if (key == "problem") has_problem = true;
  }
  if (!has_problem || cfg.problem.empty()) throw std::invalid_argument("missing required key: problem");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "problem = " << c.problem << '\n'
      << "x_star = " << join(c.x_star) << '\n'
      << "epsilon = " << fmt(c.epsilon) << '\n'
      << "m = " << c.m << '\n'
      << "n = " << c.n << '\n'
      << "sparsity = " << fmt(c.sparsity) << '\n'
      << "noise_sd = " << fmt(c.noise_sd) << '\n'
      << "alpha = " << (c.alpha ? fmt(*c.alpha) : std::string("default")) << '\n'
      << "rho = " << fmt(c.rho) << '\n'
      << "data = " << c.data << '\n'
      << "seed = " << c.seed << '\n'
      << "tableau = " << c.tableau << '\n'
      << "tableau_file = " << c.tableau_file << '\n'
      << "tableaus = " << join(c.tableaus) << '\n'
      << "variant = " << c.variant << '\n'
      << "line_search_rule = " << c.line_search_rule << '\n'
      << "c = " << fmt(c.c) << '\n'
      << "delta = " << fmt(c.delta) << '\n'
      << "iters = " << c.iters << '\n'
      << "horizon = " << fmt(c.horizon) << '\n'
      << "windows = " << join(c.windows) << '\n'
      << "projector = " << c.projector << '\n'
      << "tae_delta_ref = " << fmt(c.tae_delta_ref) << '\n'
      << "tae_reference = " << c.tae_reference << '\n'
      << "envelope = " << (c.envelope ? "true" : "false") << '\n'
      << "out_dir = " << c.out_dir << '\n'
      << "record_iterates = " << (c.record_iterates ? "true" : "false") << '\n'
      << "wall_time = " << (c.wall_time ? "true" : "false") << '\n'
      << "threads = " << c.threads << '\n';
  return out.str();
}

void validate(const ExperimentConfig& c) {
  static const std::vector<std::string> problems{"triangle", "scalar_toy", "sensing", "logistic",
                                                 "matrix_completion"};
  if (std::find(problems.begin(), problems.end(), c.problem) == problems.end()) {
    throw std::invalid_argument("unknown problem '" + c.problem +
                                "' (expected triangle, scalar_toy, sensing, logistic or "
                                "matrix_completion)");
  }
  if (c.problem == "triangle" && c.x_star.size() != 2) {
    throw std::invalid_argument("x_star must have two entries");
  }
  if ((c.problem == "logistic" || c.problem == "matrix_completion")) {
    if (c.data.empty()) throw std::invalid_argument("problem " + c.problem + " requires data");
  }
  if (!c.data.empty() && !std::filesystem::exists(c.data)) {
    throw std::invalid_argument("data file not found: " + c.data);
  }
  if (!c.tableau_file.empty() && !std::filesystem::exists(c.tableau_file)) {
    throw std::invalid_argument("tableau file not found: " + c.tableau_file);
  }
  if (c.effective_iters() < 0) throw std::invalid_argument("iters must be >= 0");
  if (c.threads < 0) throw std::invalid_argument("threads must be >= 0");
  for (int w : c.windows) {
    if (w < 2) throw std::invalid_argument("windows must be >= 2");
  }
  if (c.tae_delta_ref < 0.0) throw std::invalid_argument("tae_delta_ref must be >= 0");
  if (c.tae_reference != "numeric" && c.tae_reference != "closed_form") {
    throw std::invalid_argument("tae_reference must be numeric or closed_form");
  }
  if (c.tae_reference == "closed_form" && c.tae_delta_ref > 0.0 && c.problem != "scalar_toy") {
    throw std::invalid_argument("closed_form TAE reference exists only for scalar_toy");
  }
  parse_projector_norm(c.projector);
  parse_line_search_rule(c.line_search_rule);

  // Method constraints, checked before any compute.
  std::vector<std::string> names = c.tableaus;
  if (names.empty()) names.push_back(c.tableau);
  for (const auto& name : names) {
    SolverConfig s;
    s.tableau = c.tableau_file.empty() ? make_tableau(name) : load_tableau(c.tableau_file);
    s.c = c.c;
    s.delta = c.delta;
    s.max_iters = c.effective_iters();
    s.variant = parse_variant(c.variant);
    s.validate();
  }
}

}  // namespace rkfw
