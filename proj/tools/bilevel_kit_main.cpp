// Benchmark CLI: configure solver x problem x seed runs, execute, persist
// convergence traces and stationarity reports.
//
// Exit codes: 0 pass, 2 configuration error, 3 numeric abort, 4 budget
// exhausted. `run` exits 0 only when the solver's declared stationarity check
// passes at the requested accuracy.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "bilevel/acceptance.hpp"
#include "bilevel/diagnostics.hpp"
#include "bilevel/igfm.hpp"
#include "bilevel/problems.hpp"
#include "bilevel/raf2ba.hpp"
#include "bilevel/sgm.hpp"

namespace {

using namespace bilevel;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitBudget = 4;

struct RunConfig {
  std::string solver;
  std::string problem;
  ProblemParams problem_params;
  double eps = 1e-2;
  double delta = 0.1;
  double zeta = 0.1;
  double zeta_f = 0.0;  // 0 = use zeta
  double zeta_g = 0.0;
  double tau = -1.0;       // <0 = derived default
  double delta_gap = 0.0;  // <=0 = derive from ground truth when possible, else 1
  ScheduleScale scale;
  std::uint64_t seed = 0;
  std::uint64_t budget = 1'000'000;
  std::string out_dir = "run_out";
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("BILEVEL_KIT_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 0;
}

// Flat key = value config file, one nesting level for schedule multipliers
// (scale.lambda = 2) and problem parameters (problem.dx = 5). '#' comments.
void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  const auto as_d = [&value] { return std::strtod(value.c_str(), nullptr); };
  const auto as_u = [&value] { return std::strtoull(value.c_str(), nullptr, 10); };
  if (key == "solver") cfg.solver = value;
  else if (key == "problem") cfg.problem = value;
  else if (key == "eps") cfg.eps = as_d();
  else if (key == "delta") cfg.delta = as_d();
  else if (key == "zeta") cfg.zeta = as_d();
  else if (key == "zeta_f") cfg.zeta_f = as_d();
  else if (key == "zeta_g") cfg.zeta_g = as_d();
  else if (key == "tau") cfg.tau = as_d();
  else if (key == "delta_gap") cfg.delta_gap = as_d();
  else if (key == "seed") cfg.seed = as_u();
  else if (key == "budget") cfg.budget = as_u();
  else if (key == "out") cfg.out_dir = value;
  else if (key == "scale.lambda") cfg.scale.lambda = as_d();
  else if (key == "scale.chi") cfg.scale.chi = as_d();
  else if (key == "scale.theta") cfg.scale.theta = as_d();
  else if (key == "scale.big_c") cfg.scale.big_c = as_d();
  else if (key == "scale.rho_floor") cfg.scale.rho_floor = as_d();
  else if (key == "scale.sub_zeta") cfg.scale.sub_zeta = as_d();
  else if (key == "scale.big_t") cfg.scale.big_t = as_d();
  else if (key == "scale.eta") cfg.scale.eta = as_d();
  else if (key.rfind("problem.", 0) == 0)
    cfg.problem_params[key.substr(8)] = as_d();
  else
    throw ContractViolation("config: unknown key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ContractViolation("config: cannot open " + path);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) apply_config_line(cfg, key, value);
  }
}

struct RunArtifacts {
  Trace trace;
  StationarityReport report;
  OracleCounter counter;
  RunStatus status = RunStatus::ok;
  DenseVector x_out;
  double wall_seconds = 0.0;
  std::uint64_t iterations = 0;
};

const std::vector<std::pair<std::string, std::string>>& solver_registry() {
  static const std::vector<std::pair<std::string, std::string>> reg = {
      {"raf2ba", "restarted accelerated fully first-order bilevel solver (FOSP schedule)"},
      {"praf2ba", "perturbed variant with the second-order schedule"},
      {"pragda", "perturbed restarted accelerated descent-ascent (minimax)"},
      {"sgm", "switching subgradient method for LL optimality (no LLSC)"},
      {"igfm", "gradient-free outer loop over a switching-gradient estimator"},
  };
  return reg;
}

double resolve_delta_gap(const RunConfig& cfg, const GroundTruth& truth,
                         const DenseVector& x0) {
  if (cfg.delta_gap > 0.0) return cfg.delta_gap;
  if (truth.phi && truth.phi_star.has_value())
    return std::max(1e-6, truth.phi(x0) - *truth.phi_star);
  return 1.0;
}

RunArtifacts execute_run(const RunConfig& cfg) {
  const BuiltProblem built = build_problem(cfg.problem, cfg.problem_params, cfg.seed);
  RunArtifacts art;
  Rng rng(cfg.seed);
  const auto t0 = std::chrono::steady_clock::now();

  if (built.demo_only)
    throw ContractViolation("problem '" + cfg.problem +
                            "' is a report-only demo; see docs/regularization_failure.md");

  if (cfg.solver == "raf2ba" || cfg.solver == "praf2ba") {
    BilevelProblem p = built.blo ? *built.blo : as_bilevel(*built.minimax);
    const DenseVector x0(static_cast<std::size_t>(p.d_x), 1.0);
    const double delta_gap = resolve_delta_gap(cfg, p.truth, x0);
    const Raf2baParams params =
        cfg.solver == "raf2ba"
            ? fosp_schedule(p.constants, cfg.eps, delta_gap, cfg.scale)
            : sosp_schedule(p.constants, cfg.eps, delta_gap, 0.1, p.d_x, cfg.scale);
    const Raf2baResult res = raf2ba_run(p, x0, params, rng, cfg.budget);
    art.trace = res.trace;
    art.counter = res.counter;
    art.status = res.status;
    art.x_out = res.x_hat;
    art.iterations = res.trace.rows.empty() ? 0 : res.trace.rows.back().iter;
    if (cfg.solver == "raf2ba") {
      // The first-order analysis guarantees the factor-83 bound on the
      // penalty gradient plus the penalty-to-hyper-objective gap.
      const double threshold = kFospGradFactor * cfg.eps + params.lc.d1 / params.lambda;
      auto [ok, rep] = fosp_check(p.truth, res.x_hat, threshold);
      art.report = rep;
    } else {
      const double tau =
          cfg.tau >= 0.0 ? cfg.tau : 1.011 * std::sqrt(params.rho_eff * cfg.eps);
      auto [ok, rep] = sosp_check(p.truth, res.x_hat,
                                  cfg.eps + params.lc.d1 / params.lambda, tau);
      art.report = rep;
    }
  } else if (cfg.solver == "pragda") {
    if (!built.minimax)
      throw ContractViolation("solver pragda needs a minimax problem (try wshape)");
    const MinimaxProblem& p = *built.minimax;
    const DenseVector x0(static_cast<std::size_t>(p.d_x), 1.0);
    const double delta_gap = resolve_delta_gap(cfg, p.truth, x0);
    const PragdaParams params =
        pragda_schedule(p.constants, cfg.eps, delta_gap, 0.1, p.d_x, cfg.scale);
    const PragdaResult res = pragda_run(p, x0, params, rng, cfg.budget);
    art.trace = res.trace;
    art.counter = res.counter;
    art.status = res.status;
    art.x_out = res.x_hat;
    art.iterations = res.trace.rows.empty() ? 0 : res.trace.rows.back().iter;
    const double tau = cfg.tau >= 0.0 ? cfg.tau : 1.011 * std::sqrt(params.rho_used * cfg.eps);
    auto [ok, rep] = sosp_check(p.truth, res.x_hat, cfg.eps, tau);
    art.report = rep;
  } else if (cfg.solver == "sgm") {
    if (!built.blo) throw ContractViolation("solver sgm needs a bilevel problem");
    const BilevelProblem& p = *built.blo;
    OracleCounter counter;
    const SgmParams params = sgm_schedule(p.constants, cfg.zeta);
    DenseVector x(static_cast<std::size_t>(p.d_x), 1.0);
    DenseVector y0(static_cast<std::size_t>(p.d_y), 0.0);
    if (p.project_y) y0 = p.project_y(y0);
    const SgmResult res = sgm_run(p, x, y0, params, counter);
    art.trace = res.trace;
    art.counter = counter;
    art.x_out = res.y_out;
    art.iterations = static_cast<std::uint64_t>(params.k0 + params.big_k);
    const double zf = cfg.zeta_f > 0.0 ? cfg.zeta_f : cfg.zeta;
    const double zg = cfg.zeta_g > 0.0 ? cfg.zeta_g : cfg.zeta;
    auto [ok, rep] = ll_optimality_check(p, x, res.y_out, zf, zg);
    art.report = rep;
  } else if (cfg.solver == "igfm") {
    if (!built.blo) throw ContractViolation("solver igfm needs a bilevel problem");
    const BilevelProblem& p = *built.blo;
    OracleCounter counter;
    const double delta_gap =
        resolve_delta_gap(cfg, p.truth, DenseVector(static_cast<std::size_t>(p.d_x), 1.1));
    const IgfmParams params =
        igfm_schedule(p.constants, cfg.eps, cfg.delta, delta_gap, p.d_x, cfg.scale);
    DenseVector x0(static_cast<std::size_t>(p.d_x), 1.1);
    DenseVector y0(static_cast<std::size_t>(p.d_y), 0.0);
    if (p.project_y) y0 = p.project_y(y0);
    const IgfmResult res = igfm_run(p, x0, y0, params, rng, counter);
    art.trace = res.trace;
    art.counter = counter;
    art.x_out = res.x_out;
    art.iterations = static_cast<std::uint64_t>(params.big_t);
    StationarityReport rep;
    Rng gap_rng(cfg.seed + 1);
    rep.goldstein_gap = goldstein_gap(p.truth, res.x_out, cfg.delta, 64, gap_rng);
    rep.grad_norm = *rep.goldstein_gap;
    rep.pass = *rep.goldstein_gap <= cfg.eps;
    art.report = rep;
  } else {
    throw ContractViolation("unknown solver id: " + cfg.solver);
  }
  art.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return art;
}

void write_artifacts(const RunConfig& cfg, RunArtifacts& art) {
  std::filesystem::create_directories(cfg.out_dir);
  art.trace.set_meta("version", std::string(BILEVEL_KIT_VERSION));
  art.trace.set_meta("seed", cfg.seed);
  art.trace.set_meta("eps", cfg.eps);
  art.trace.set_meta("total_gc_f", art.counter.gc_f);
  art.trace.set_meta("total_gc_g", art.counter.gc_g);
  art.trace.set_meta("total_jv_g", art.counter.jv_g);
  art.trace.set_meta("total_hv_g", art.counter.hv_g);
  {
    std::ofstream os(cfg.out_dir + "/trace.csv");
    art.trace.write_csv(os);
  }
  {
    std::ofstream os(cfg.out_dir + "/report.json");
    os << art.report.to_json() << "\n";
  }
  // Side artifact: per-iteration curvature when the solver recorded it.
  bool has_aux = false;
  for (const TraceRow& r : art.trace.rows)
    if (!std::isnan(r.aux)) has_aux = true;
  if (has_aux) {
    std::ofstream os(cfg.out_dir + "/hess_min_eig.csv");
    os << "iter,hess_min_eig\n";
    for (const TraceRow& r : art.trace.rows)
      if (!std::isnan(r.aux)) os << r.iter << ',' << format_double(r.aux) << "\n";
  }
}

int cmd_run(const RunConfig& cfg) {
  RunArtifacts art = execute_run(cfg);
  write_artifacts(cfg, art);
  std::cout << "solver=" << cfg.solver << " problem=" << cfg.problem
            << " seed=" << cfg.seed << " status=" << run_status_name(art.status)
            << " check=" << (art.report.pass ? "PASS" : "FAIL") << "\n"
            << art.report.to_json() << "\n"
            << "artifacts: " << cfg.out_dir << "/trace.csv, " << cfg.out_dir
            << "/report.json\n";
  if (art.status == RunStatus::budget_exhausted) return kExitBudget;
  return art.report.pass ? kExitOk : 1;
}

int cmd_compare(const std::vector<std::string>& config_paths, const std::string& out_csv) {
  if (config_paths.size() < 2)
    throw ContractViolation("compare: need at least two --config files");
  std::vector<RunConfig> cfgs;
  for (const auto& path : config_paths) {
    RunConfig cfg;
    cfg.seed = default_seed();
    load_config_file(cfg, path);
    cfgs.push_back(cfg);
  }
  for (const auto& cfg : cfgs)
    if (cfg.problem != cfgs.front().problem ||
        !(cfg.problem_params == cfgs.front().problem_params))
      throw ContractViolation("compare: all configs must target the same problem");

  std::ostringstream table;
  table << "solver,problem,seed,iterations,gc_f,gc_g,jv_g,hv_g,final_grad_norm,wall_s\n";
  for (auto& cfg : cfgs) {
    RunArtifacts art = execute_run(cfg);
    table << cfg.solver << ',' << cfg.problem << ',' << cfg.seed << ','
          << art.iterations << ',' << art.counter.gc_f << ',' << art.counter.gc_g << ','
          << art.counter.jv_g << ',' << art.counter.hv_g << ','
          << format_double(art.report.grad_norm) << ',' << art.wall_seconds << "\n";
  }
  std::cout << table.str();
  if (!out_csv.empty()) {
    std::ofstream os(out_csv);
    os << table.str();
  }
  return kExitOk;
}

int cmd_validate(const std::string& only) {
  const auto results = run_acceptance(only);
  if (results.empty()) {
    std::cerr << "validate: no criterion matches '" << only << "'\n";
    return kExitConfig;
  }
  bool all = true;
  std::printf("%-16s %-6s %8s  %s\n", "criterion", "result", "secs", "detail");
  for (const auto& r : results) {
    all = all && r.pass;
    std::printf("%-16s %-6s %8.2f  %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                r.seconds, r.detail.c_str());
  }
  std::printf("%s\n", all ? "ALL PASS" : "FAILURES PRESENT");
  return all ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bilevel-kit: first-order bilevel/minimax solvers with oracle accounting"};
  app.require_subcommand(1);

  auto* list_problems = app.add_subcommand("list-problems", "list problem ids");
  auto* list_solvers = app.add_subcommand("list-solvers", "list solver ids");

  RunConfig cfg;
  cfg.seed = default_seed();
  std::string config_path;
  auto* run = app.add_subcommand("run", "execute one solver/problem run");
  run->add_option("--config", config_path, "key = value config file (flags override)");
  run->add_option("--solver", cfg.solver, "solver id");
  run->add_option("--problem", cfg.problem, "problem id");
  run->add_option("--eps", cfg.eps, "target stationarity accuracy");
  run->add_option("--delta", cfg.delta, "smoothing radius (gradient-free solver)");
  run->add_option("--zeta", cfg.zeta, "LL optimality target (switching solver)");
  run->add_option("--zeta-f", cfg.zeta_f, "value-gap threshold override");
  run->add_option("--zeta-g", cfg.zeta_g, "feasibility-gap threshold override");
  run->add_option("--tau", cfg.tau, "second-order threshold override");
  run->add_option("--delta-gap", cfg.delta_gap, "initial suboptimality estimate");
  run->add_option("--seed", cfg.seed, "seed (default: BILEVEL_KIT_SEED or 0)");
  run->add_option("--budget", cfg.budget, "max UL iterations");
  run->add_option("--out", cfg.out_dir, "artifact directory");
  run->add_option("--scale-lambda", cfg.scale.lambda, "penalty multiplier");
  run->add_option("--scale-chi", cfg.scale.chi, "log-factor multiplier");
  run->add_option("--scale-theta", cfg.scale.theta, "momentum-damping multiplier");
  run->add_option("--scale-sub-zeta", cfg.scale.sub_zeta, "estimator accuracy multiplier");
  std::map<std::string, double> prob_params;
  run->add_option("--param", prob_params, "problem parameter (name value)");

  std::vector<std::string> compare_configs;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "run several configs on one problem");
  compare->add_option("--config", compare_configs, "config files (repeatable)");
  compare->add_option("--out", compare_out, "summary CSV path");

  std::string only;
  auto* validate = app.add_subcommand("validate", "run the acceptance-criteria suite");
  validate->add_option("--only", only, "criterion id filter (substring)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_problems->parsed()) {
      for (const auto& e : problem_registry())
        std::cout << e.id << "  -  " << e.summary << "\n";
      return kExitOk;
    }
    if (list_solvers->parsed()) {
      for (const auto& [id, summary] : solver_registry())
        std::cout << id << "  -  " << summary << "\n";
      return kExitOk;
    }
    if (run->parsed()) {
      RunConfig final_cfg;
      final_cfg.seed = default_seed();
      if (!config_path.empty()) load_config_file(final_cfg, config_path);
      // Flags override file values.
      if (!cfg.solver.empty()) final_cfg.solver = cfg.solver;
      if (!cfg.problem.empty()) final_cfg.problem = cfg.problem;
      if (run->count("--eps")) final_cfg.eps = cfg.eps;
      if (run->count("--delta")) final_cfg.delta = cfg.delta;
      if (run->count("--zeta")) final_cfg.zeta = cfg.zeta;
      if (run->count("--zeta-f")) final_cfg.zeta_f = cfg.zeta_f;
      if (run->count("--zeta-g")) final_cfg.zeta_g = cfg.zeta_g;
      if (run->count("--tau")) final_cfg.tau = cfg.tau;
      if (run->count("--delta-gap")) final_cfg.delta_gap = cfg.delta_gap;
      if (run->count("--seed")) final_cfg.seed = cfg.seed;
      if (run->count("--budget")) final_cfg.budget = cfg.budget;
      if (run->count("--out")) final_cfg.out_dir = cfg.out_dir;
      if (run->count("--scale-lambda")) final_cfg.scale.lambda = cfg.scale.lambda;
      if (run->count("--scale-chi")) final_cfg.scale.chi = cfg.scale.chi;
      if (run->count("--scale-theta")) final_cfg.scale.theta = cfg.scale.theta;
      if (run->count("--scale-sub-zeta")) final_cfg.scale.sub_zeta = cfg.scale.sub_zeta;
      for (const auto& [k, v] : prob_params) final_cfg.problem_params[k] = v;
      if (final_cfg.solver.empty() || final_cfg.problem.empty())
        throw ContractViolation("run: --solver and --problem are required");
      if (!is_known_problem(final_cfg.problem))
        throw ContractViolation("unknown problem id: " + final_cfg.problem);
      return cmd_run(final_cfg);
    }
    if (compare->parsed()) return cmd_compare(compare_configs, compare_out);
    if (validate->parsed()) return cmd_validate(only);
  } catch (const ContractViolation& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
