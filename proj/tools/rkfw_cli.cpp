#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rkfw/config.hpp"
#include "rkfw/diagnostics.hpp"
#include "rkfw/experiment.hpp"
#include "rkfw/flow.hpp"
#include "rkfw/solvers.hpp"
#include "rkfw/tableau.hpp"

namespace {

struct RunFlags {
  std::string config;
  std::string problem;
  std::string tableau;
  std::vector<std::string> tableaus;
  std::string tableau_file;
  std::string variant;
  std::string line_search_rule;
  std::string data;
  std::string out_dir;
  std::string projector;
  double c = 2.0;
  double delta = 1.0;
  double alpha = 0.0;
  double epsilon = 0.0;
  double horizon = 0.0;
  double tae_delta_ref = 0.0;
  int iters = 0;
  int threads = 0;
  std::uint64_t seed = 0;
  std::vector<int> windows;
  bool wall_time = false;
  bool no_iterates = false;
  bool envelope = false;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool sweep) {
  app->add_option("--config", f.config, "key = value config file; flags override it");
  app->add_option("--problem", f.problem, "triangle, scalar_toy, sensing, logistic, matrix_completion");
  if (sweep) {
    app->add_option("--tableaus", f.tableaus, "tableaus to compare")->delimiter(',');
  } else {
    app->add_option("--tableau", f.tableau, "euler, midpoint, rk44, rk38, rk5");
  }
  app->add_option("--tableau-file", f.tableau_file, "plain-text tableau file");
  app->add_option("--variant", f.variant, "plain, line_search, momentum");
  app->add_option("--line-search-rule", f.line_search_rule, "guarded, largest_acceptable");
  app->add_option("--c", f.c, "schedule constant (>= 1)");
  app->add_option("--delta", f.delta, "step size");
  app->add_option("--iters", f.iters, "iterations");
  app->add_option("--horizon", f.horizon, "time horizon; overrides --iters with horizon / delta");
  app->add_option("--seed", f.seed, "instance seed");
  app->add_option("--data", f.data, "svmlight or u.data file");
  app->add_option("--alpha", f.alpha, "region radius");
  app->add_option("--epsilon", f.epsilon, "scalar toy Huber width");
  app->add_option("--windows", f.windows, "zig-zag windows")->delimiter(',');
  app->add_option("--projector", f.projector, "orthogonal, unsquared");
  app->add_option("--tae-delta-ref", f.tae_delta_ref, "reference step for TAE output");
  app->add_option("--out-dir", f.out_dir, "output directory");
  app->add_option("--threads", f.threads, "worker threads for sweeps");
  app->add_flag("--wall-time", f.wall_time, "record wall-clock time per iteration");
  app->add_flag("--no-iterates", f.no_iterates, "skip iterate dumps and iterate-based diagnostics");
  app->add_flag("--envelope", f.envelope, "write envelope.csv");
}

rkfw::ExperimentConfig to_config(const CLI::App* app, const RunFlags& f) {
  rkfw::ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = rkfw::load_config(f.config);
  }
  auto given = [app](const char* name) { return app->count(name) > 0; };
  if (given("--problem")) cfg.problem = f.problem;
  if (f.config.empty() && cfg.problem.empty()) throw std::invalid_argument("--problem is required");
  if (app->get_option_no_throw("--tableau") && given("--tableau")) cfg.tableau = f.tableau;
  if (app->get_option_no_throw("--tableaus") && given("--tableaus")) cfg.tableaus = f.tableaus;
  if (given("--tableau-file")) cfg.tableau_file = f.tableau_file;
  if (given("--variant")) cfg.variant = f.variant;
  if (given("--line-search-rule")) cfg.line_search_rule = f.line_search_rule;
  if (given("--c")) cfg.c = f.c;
  if (given("--delta")) cfg.delta = f.delta;
  if (given("--iters")) cfg.iters = f.iters;
  if (given("--horizon")) cfg.horizon = f.horizon;
  if (given("--seed")) cfg.seed = f.seed;
  if (given("--data")) cfg.data = f.data;
  if (given("--alpha")) cfg.alpha = f.alpha;
  if (given("--epsilon")) cfg.epsilon = f.epsilon;
  if (given("--windows")) cfg.windows = f.windows;
  if (given("--projector")) cfg.projector = f.projector;
  if (given("--tae-delta-ref")) cfg.tae_delta_ref = f.tae_delta_ref;
  if (given("--out-dir")) cfg.out_dir = f.out_dir;
  if (given("--threads")) cfg.threads = f.threads;
  if (f.wall_time) cfg.wall_time = true;
  if (f.no_iterates) cfg.record_iterates = false;
  if (f.envelope) cfg.envelope = true;
  return cfg;
}

std::vector<rkfw::Point> read_iterate_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return rkfw::read_iterates(in);
}

// Column `name` of a CSV file with a header row.
std::vector<double> read_csv_column(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string cell;
    while (std::getline(h, cell, ',')) header.push_back(cell);
  }
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw std::runtime_error(path + ": no column '" + name + "'");
  const auto col = static_cast<std::size_t>(it - header.begin());
  std::vector<double> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string cell;
    for (std::size_t i = 0; i <= col; ++i) {
      if (!std::getline(row, cell, ',')) {
        throw std::runtime_error(path + ": line " + std::to_string(line_no) + " is too short");
      }
    }
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw std::runtime_error(path + ": line " + std::to_string(line_no) + ": bad number '" + cell + "'");
    }
  }
  return out;
}

int cmd_certify(const std::string& name, const std::string& file, double c, double delta, int k_max) {
  const rkfw::Tableau t = file.empty() ? rkfw::make_tableau(name) : rkfw::load_tableau(file);
  const auto rep = rkfw::feasibility_certificate(t, c, delta, k_max);
  std::cout << "k";
  for (Eigen::Index i = 0; i < t.stages(); ++i) std::cout << ",z" << i + 1;
  std::cout << '\n' << std::fixed << std::setprecision(10);
  for (const auto& [k, z] : rep.z_by_k) {
    std::cout << k;
    for (Eigen::Index i = 0; i < z.size(); ++i) std::cout << ',' << z(i);
    std::cout << '\n';
  }
  std::cout << "# tableau=" << t.name << " in_unit_interval=" << (rep.all_in_unit_interval ? "true" : "false")
            << " sup_norm_monotone=" << (rep.sup_norm_monotone ? "true" : "false")
            << " cancellability_margin=" << rkfw::cancellability_margin(t.beta) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runge-Kutta Frank-Wolfe solvers and diagnostics"};
  app.set_version_flag("--version", rkfw::version_string());
  app.require_subcommand(1);

  auto* certify = app.add_subcommand("certify", "print feasibility certificates z(k)");
  std::string cert_tableau = "euler";
  std::string cert_file;
  double cert_c = 2.0;
  double cert_delta = 1.0;
  int cert_kmax = 10;
  certify->add_option("--tableau", cert_tableau, "built-in tableau name");
  certify->add_option("--tableau-file", cert_file, "plain-text tableau file");
  certify->add_option("--c", cert_c, "schedule constant");
  certify->add_option("--delta", cert_delta, "step size");
  certify->add_option("--k-max", cert_kmax, "last iteration index")->check(CLI::PositiveNumber);

  RunFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "run one method and write CSV artifacts");
  add_run_flags(solve, solve_flags, false);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "run several tableaus concurrently");
  add_run_flags(sweep, sweep_flags, true);

  auto* zigzag = app.add_subcommand("zigzag", "zig-zag energy of an iterate dump");
  std::string zz_iterates;
  std::vector<int> zz_windows{5, 20};
  double zz_delta = 1.0;
  std::string zz_projector = "orthogonal";
  std::string zz_out;
  zigzag->add_option("--iterates", zz_iterates, "iterate dump")->required();
  zigzag->add_option("--windows", zz_windows, "window sizes")->delimiter(',');
  zigzag->add_option("--delta", zz_delta, "step size of the run");
  zigzag->add_option("--projector", zz_projector, "orthogonal, unsquared");
  zigzag->add_option("--out", zz_out, "CSV prefix; per-window files <prefix>_W<w>.csv");

  auto* tae = app.add_subcommand("tae", "total accumulation error against a reference");
  std::string tae_iterates;
  double tae_delta = 1.0;
  std::string tae_ref;
  double tae_ref_delta = 0.0;
  double tae_u0 = -1.0;
  double tae_c = 2.0;
  tae->add_option("--iterates", tae_iterates, "iterate dump of the run")->required();
  tae->add_option("--delta", tae_delta, "step size of the run");
  auto* ref_opt = tae->add_option("--reference", tae_ref, "iterate dump of a fine-step reference");
  tae->add_option("--reference-delta", tae_ref_delta, "step size of the reference")->needs(ref_opt);
  auto* u0_opt = tae->add_option("--toy-u0", tae_u0, "use the closed-form scalar toy flow from u0");
  tae->add_option("--c", tae_c, "schedule constant of the closed form");
  ref_opt->excludes(u0_opt);

  auto* slope = app.add_subcommand("slope", "log-log rate slope of f - f* from traj.csv");
  std::string sl_traj;
  double sl_fstar = 0.0;
  std::size_t sl_kmin = 100;
  std::size_t sl_kmax = 10000;
  slope->add_option("--traj", sl_traj, "trajectory CSV")->required();
  slope->add_option("--f-star", sl_fstar, "reference optimum");
  slope->add_option("--k-min", sl_kmin, "first k");
  slope->add_option("--k-max", sl_kmax, "last k");

  auto* envelope = app.add_subcommand("envelope", "sup-envelope of a scalar iterate dump");
  std::string env_iterates;
  std::size_t env_k = 0;
  bool env_scaled = false;
  envelope->add_option("--iterates", env_iterates, "one value per row")->required();
  envelope->add_option("--k", env_k, "index")->required();
  envelope->add_flag("--scaled", env_scaled, "print k * envelope");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*certify) return cmd_certify(cert_tableau, cert_file, cert_c, cert_delta, cert_kmax);
    if (solve->parsed() || sweep->parsed()) {
      const bool is_sweep = sweep->parsed();
      rkfw::ExperimentConfig cfg = to_config(is_sweep ? sweep : solve, is_sweep ? sweep_flags : solve_flags);
      if (is_sweep && cfg.tableaus.empty()) cfg.tableaus = rkfw::tableau_names();
      if (!is_sweep) cfg.tableaus.clear();
      const auto result = rkfw::run_experiment(cfg, &std::cerr);
      std::cout << "wrote " << result.runs.size() << " run(s) to " << cfg.out_dir << '\n';
      return 0;
    }
    if (*zigzag) {
      const auto iterates = read_iterate_file(zz_iterates);
      const auto norm = rkfw::parse_projector_norm(zz_projector);
      for (int w : zz_windows) {
        const auto rep = rkfw::zigzag_energy(iterates, w, zz_delta, norm);
        if (zz_out.empty()) {
          rkfw::write_zigzag_csv(std::cout, rep);
        } else {
          std::ofstream out(zz_out + "_W" + std::to_string(w) + ".csv");
          if (!out) throw std::runtime_error("cannot write " + zz_out);
          rkfw::write_zigzag_csv(out, rep);
        }
      }
      return 0;
    }
    if (*tae) {
      rkfw::Trajectory traj;
      traj.delta = tae_delta;
      traj.iterates = read_iterate_file(tae_iterates);
      for (std::size_t k = 0; k < traj.iterates.size(); ++k) {
        rkfw::TrajectoryRecord r;
        r.k = static_cast<int>(k);
        r.t = static_cast<double>(k) * tae_delta;
        traj.records.push_back(r);
      }
      rkfw::FlowReference ref;
      if (!tae_ref.empty()) {
        if (!(tae_ref_delta > 0.0)) throw std::invalid_argument("--reference-delta must be > 0");
        ref.source = rkfw::FlowSource::fine_step_numeric;
        ref.c = tae_c;
        ref.delta_ref = tae_ref_delta;
        ref.states = read_iterate_file(tae_ref);
        for (std::size_t k = 0; k < ref.states.size(); ++k) ref.times.push_back(static_cast<double>(k) * tae_ref_delta);
      } else if (tae_u0 >= 0.0) {
        std::vector<double> times;
        for (const auto& r : traj.records) times.push_back(r.t);
        ref = rkfw::toy_flow_reference(tae_u0, tae_c, times);
      } else {
        ref = rkfw::recorded_reference(traj, tae_c);
      }
      rkfw::write_tae_csv(std::cout, rkfw::total_accumulation_error(traj, ref));
      return 0;
    }
    if (*slope) {
      auto f = read_csv_column(sl_traj, "f");
      for (auto& v : f) v -= sl_fstar;
      std::cout << std::setprecision(10) << rkfw::fit_rate_slope(f, sl_kmin, sl_kmax) << '\n';
      return 0;
    }
    if (*envelope) {
      std::vector<double> series;
      for (const auto& x : read_iterate_file(env_iterates)) {
        if (x.size() != 1) throw std::invalid_argument("envelope expects one value per row");
        series.push_back(x(0, 0));
      }
      const double e = rkfw::sup_envelope(series, env_k);
      std::cout << std::setprecision(10) << (env_scaled ? static_cast<double>(env_k) * e : e) << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
