#include "rkfw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "rkfw/datasets.hpp"
#include "rkfw/diagnostics.hpp"
#include "rkfw/flow.hpp"

#ifndef RKFW_VERSION
#define RKFW_VERSION "0.1.0"
#endif

namespace rkfw {

namespace fs = std::filesystem;

namespace {

// Dense iterate storage cap, in doubles.
constexpr double kIterateBudget = 2e8;

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

struct RunOutput {
  RunSummary summary;
  std::vector<double> f_values;
};

RunOutput execute(const ExperimentConfig& cfg, const ProblemInstance& problem,
                  const std::string& tableau_name, const fs::path& dir, std::ostream* log,
                  std::mutex& log_mutex) {
  SolverConfig scfg = build_solver(cfg, tableau_name);
  const double doubles = static_cast<double>(problem.x0.size()) * (scfg.max_iters + 1.0);
  if (scfg.record_iterates && doubles > kIterateBudget) {
    throw std::invalid_argument("recording " + std::to_string(scfg.max_iters + 1) +
                                " iterates of size " + std::to_string(problem.x0.size()) +
                                " exceeds the memory budget; set record_iterates = false");
  }

  fs::create_directories(dir);
  Trajectory traj = run(problem, scfg);

  RunOutput out;
  RunSummary& s = out.summary;
  s.tableau = scfg.tableau.name;
  s.variant = to_string(scfg.variant);
  s.dir = dir.string();
  s.iterations = scfg.max_iters;
  s.final_f = traj.records.back().f;
  s.final_gap = traj.records.back().gap;
  s.min_f = s.final_f;
  for (const auto& r : traj.records) {
    s.min_f = std::min(s.min_f, r.f);
    s.max_violation = std::max(s.max_violation, r.violation);
  }
  out.f_values = traj.objective_values();

  {
    auto f = open_out(dir / "traj.csv");
    write_trajectory_csv(f, traj);
    s.files.push_back("traj.csv");
  }
  if (scfg.record_iterates) {
    auto f = open_out(dir / "iterates.txt");
    write_iterates(f, traj.iterates);
    s.files.push_back("iterates.txt");

    const ProjectorNorm norm = parse_projector_norm(cfg.projector);
    for (int w : cfg.windows) {
      if (traj.iterates.size() < static_cast<std::size_t>(w) + 1) {
        if (log) {
          std::lock_guard lock(log_mutex);
          *log << "skipping zig-zag W=" << w << ": only " << traj.iterates.size() << " iterates\n";
        }
        continue;
      }
      const ZigzagReport z = zigzag_energy(traj.iterates, w, scfg.delta, norm);
      const std::string name = "zigzag_W" + std::to_string(w) + ".csv";
      auto zf = open_out(dir / name);
      write_zigzag_csv(zf, z);
      s.files.push_back(name);
      s.zigzag_means.emplace_back(w, z.mean);
    }

    if (cfg.tae_delta_ref > 0.0 && traj.records.back().t > 0.0) {
      FlowReference ref;
      if (cfg.tae_reference == "closed_form") {
        std::vector<double> times;
        for (const auto& r : traj.records) times.push_back(r.t);
        ref = toy_flow_reference(problem.x0(0, 0), scfg.c, times);
      } else {
        ref = reference_trajectory(problem, scfg.c, cfg.tae_delta_ref, traj.records.back().t);
      }
      auto tf = open_out(dir / "tae.csv");
      write_tae_csv(tf, total_accumulation_error(traj, ref));
      s.files.push_back("tae.csv");
    }

    if (cfg.envelope) {
      std::vector<double> series;
      if (problem.x0.size() == 1) {
        for (const auto& x : traj.iterates) series.push_back(x(0, 0));
      } else {
        const double ref = problem.f_star.value_or(s.min_f);
        for (const auto& r : traj.records) series.push_back(r.f - ref);
      }
      const auto env = sup_envelope(series);
      auto ef = open_out(dir / "envelope.csv");
      ef << "k,envelope,k_times_envelope\n" << std::setprecision(17);
      for (std::size_t k = 0; k < env.size(); ++k) {
        ef << k << ',' << env[k] << ',' << static_cast<double>(k) * env[k] << '\n';
      }
      s.files.push_back("envelope.csv");
    }
  }
  if (log) {
    std::lock_guard lock(log_mutex);
    *log << traj.label << ": f=" << std::setprecision(10) << s.final_f << " gap=" << s.final_gap
         << " max_violation=" << s.max_violation << '\n';
  }
  return out;
}

nlohmann::json summary_json(const RunSummary& s) {
  nlohmann::json j;
  j["tableau"] = s.tableau;
  j["variant"] = s.variant;
  j["iterations"] = s.iterations;
  j["final_f"] = s.final_f;
  j["min_f"] = s.min_f;
  j["final_gap"] = s.final_gap;
  j["max_violation"] = s.max_violation;
  j["files"] = s.files;
  nlohmann::json z = nlohmann::json::object();
  for (const auto& [w, mean] : s.zigzag_means) z["W" + std::to_string(w)] = mean;
  j["zigzag_mean"] = z;
  return j;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& cfg,
                    const std::vector<RunSummary>& runs, const ExperimentResult& result) {
  {
    auto f = open_out(dir / "run.cfg");
    f << render(cfg);
  }
  nlohmann::json m;
  m["version"] = version_string();
  m["config"] = render(cfg);
  m["f_reference"] = result.f_reference;
  m["f_reference_is_proxy"] = result.f_reference_is_proxy;
  m["runs"] = nlohmann::json::array();
  for (const auto& r : runs) m["runs"].push_back(summary_json(r));
  auto f = open_out(dir / "manifest.json");
  f << m.dump(2) << '\n';
}

}  // namespace

std::string version_string() { return RKFW_VERSION; }

ProblemInstance build_problem(const ExperimentConfig& cfg) {
  if (cfg.problem == "triangle") {
    return make_triangle(Eigen::Vector2d(cfg.x_star.at(0), cfg.x_star.at(1)));
  }
  if (cfg.problem == "scalar_toy") return make_scalar_toy(cfg.epsilon);
  if (cfg.problem == "sensing") {
    SensingParams p;
    p.m = cfg.m;
    p.n = cfg.n;
    p.sparsity = cfg.sparsity;
    p.noise_sd = cfg.noise_sd;
    p.alpha = cfg.alpha.value_or(1000.0);
    p.seed = cfg.seed;
    return make_sensing(p);
  }
  if (cfg.problem == "logistic") {
    SvmlightData d = load_svmlight(cfg.data);
    if (d.features.rows() == 0) throw std::runtime_error("no samples in " + cfg.data);
    return make_logistic(std::move(d.features), std::move(d.labels), cfg.alpha.value_or(250.0));
  }
  if (cfg.problem == "matrix_completion") {
    return make_matrix_completion(load_movielens(cfg.data), cfg.alpha.value_or(1000.0), cfg.rho);
  }
  throw std::invalid_argument("unknown problem '" + cfg.problem + "'");
}

SolverConfig build_solver(const ExperimentConfig& cfg, const std::string& tableau_name) {
  SolverConfig s;
  s.tableau = cfg.tableau_file.empty() ? make_tableau(tableau_name) : load_tableau(cfg.tableau_file);
  s.c = cfg.c;
  s.delta = cfg.delta;
  s.max_iters = cfg.effective_iters();
  s.variant = parse_variant(cfg.variant);
  s.line_search_rule = parse_line_search_rule(cfg.line_search_rule);
  s.record_iterates = cfg.record_iterates;
  s.record_wall_time = cfg.wall_time;
  s.validate();
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  validate(cfg);
  const ProblemInstance problem = build_problem(cfg);
  const bool sweep = !cfg.tableaus.empty();
  std::vector<std::string> names = sweep ? cfg.tableaus : std::vector<std::string>{cfg.tableau};
  const fs::path root(cfg.out_dir);
  fs::create_directories(root);

  std::vector<RunOutput> outputs(names.size());
  std::vector<std::exception_ptr> errors(names.size());
  std::mutex log_mutex;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < names.size(); i = next++) {
      try {
        const fs::path dir = sweep ? root / names[i] : root;
        outputs[i] = execute(cfg, problem, names[i], dir, log, log_mutex);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned threads = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(names.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const std::exception& e) {
      throw std::runtime_error("run '" + names[i] + "': " + e.what());
    }
  }

  ExperimentResult result;
  for (auto& o : outputs) result.runs.push_back(o.summary);
  if (problem.f_star) {
    result.f_reference = *problem.f_star;
  } else {
    result.f_reference_is_proxy = true;
    result.f_reference = result.runs.front().min_f;
    for (const auto& r : result.runs) result.f_reference = std::min(result.f_reference, r.min_f);
  }

  if (sweep) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      write_manifest(root / names[i], cfg, {result.runs[i]}, result);
    }
    auto f = open_out(root / "summary.csv");
    f << "tableau,variant,iterations,final_f,final_h,min_f,final_gap,max_violation";
    for (int w : cfg.windows) f << ",zigzag_W" << w;
    f << '\n' << std::setprecision(17);
    for (const auto& r : result.runs) {
      f << r.tableau << ',' << r.variant << ',' << r.iterations << ',' << r.final_f << ','
        << r.final_f - result.f_reference << ',' << r.min_f << ',' << r.final_gap << ','
        << r.max_violation;
      for (int w : cfg.windows) {
        const auto it = std::find_if(r.zigzag_means.begin(), r.zigzag_means.end(),
                                     [w](const auto& p) { return p.first == w; });
        f << ',';
        if (it != r.zigzag_means.end()) f << it->second;
      }
      f << '\n';
    }
    if (result.f_reference_is_proxy) f << "# final_h uses the best recorded f as a proxy for f*\n";
  }
  write_manifest(root, cfg, result.runs, result);
  return result;
}

}  // namespace rkfw
