// ksns: batch front end for the chemotaxis-fluid simulator.
//
//   ksns run --config run.cfg [--out DIR] [--seed N] [--threads N]
//   ksns verify [--suite lyapunov] [--dim 2 --cells 32 --extents 1,1]
//   ksns poincare --dim 2 --cells 64 --extents 1,1
//   ksns rates series.csv
//   ksns mms [--case all] [--resolutions 16,32,64]
//
// Exit codes: 0 success, 1 failed run or assertion, 2 invalid input.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ksns/config.hpp"
#include "ksns/csv.hpp"
#include "ksns/diagnostics.hpp"
#include "ksns/error.hpp"
#include "ksns/mms.hpp"
#include "ksns/parallel.hpp"
#include "ksns/snapshot.hpp"
#include "ksns/stepper.hpp"
#include "ksns/verify.hpp"

namespace fs = std::filesystem;
using namespace ksns;

namespace {

template <class T>
std::vector<T> parse_list(const std::string& s) {
  std::vector<T> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw ValidationError("cannot parse list item '" + item + "'");
    out.push_back(v);
  }
  return out;
}

Grid grid_from_flags(int dim, const std::string& cells, const std::string& extents) {
  auto n = parse_list<int>(cells);
  auto L = parse_list<double>(extents);
  if (n.size() == 1) n.assign(dim, n.front());
  if (L.size() == 1) L.assign(dim, L.front());
  if (static_cast<int>(n.size()) != dim || static_cast<int>(L.size()) != dim)
    throw ValidationError("--cells and --extents need one entry or one per axis");
  return make_grid(dim, L, n);
}

int cmd_run(const std::string& config_path, const std::string& out_flag, const std::optional<std::uint64_t>& seed) {
  RunConfig cfg = load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (!out_flag.empty()) cfg.out_dir = out_flag;
  const SimParams params = cfg.sim_params();
  const State initial = make_initial(params.grid, cfg.initial());

  const fs::path out(cfg.out_dir);
  fs::create_directories(out);
  const fs::path snap_dir = out / "snapshots";
  if (cfg.snapshot_every > 0) fs::create_directories(snap_dir);

  RunOptions opts;
  opts.keep_snapshots = false;
  opts.on_snapshot = [&](const State& s, long step) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "step_%08ld", step);
    write_snapshot(snap_dir, stem, s.n, s.c, s.u, s.pressure);
  };
  const Trajectory traj = run(params, initial, opts);

  {
    std::ofstream csv(out / "series.csv");
    write_series_csv(csv, traj.series);
  }
  EchoBlock echo = echo_params(params, traj.poincare, traj.lyapunov);
  echo.emplace_back("scenario", to_string(cfg.scenario));
  echo.emplace_back("amplitude", format_double(cfg.initial().amplitude));
  echo.emplace_back("seed", std::to_string(cfg.seed));
  echo.emplace_back("csv_every", std::to_string(cfg.csv_every));
  echo.emplace_back("snapshot_every", std::to_string(cfg.snapshot_every));
  echo.emplace_back("steps", std::to_string(traj.steps));
  echo.emplace_back("t_final", format_double(traj.final_state.t));
  echo.emplace_back("status", traj.ok() ? "ok" : "failed: " + *traj.failure);
  {
    std::ofstream rep(out / "report.txt");
    write_echo(rep, echo);
    rep << "\n# effective config\n" << serialize_config(cfg);
  }
  write_echo(std::cout, echo);
  if (!traj.lyapunov.feasible()) std::cout << "# note: Lyapunov suite not applicable (C_S >= 2 sqrt(C_N))\n";
  return traj.ok() ? 0 : 1;
}

int cmd_verify(const std::string& suite, const Grid& grid, std::uint64_t seed, const std::string& out_dir) {
  bool ok = true;
  std::ostringstream all;
  if (suite == "ladder") {
    Scenario base = make_scenario("bump_n", grid, seed);
    base.params.t_end = 0.05;
    const LadderReport rep = epsilon_ladder(base.params, base.initial, {0.4, 0.2, 0.1, 0.05});
    all << "== epsilon ladder (bump_n, t=" << format_double(rep.t_final) << ") ==\n";
    for (std::size_t k = 0; k < rep.distances.size(); ++k)
      all << "ladder.dist_" << k << " (eps " << rep.eps[k] << " -> " << rep.eps[k + 1]
          << ")=" << format_double(rep.distances[k]) << '\n';
    for (const auto& f : rep.failures) all << "ladder.failure=" << f << '\n';
    all << "ladder.inversions=" << rep.inversions << "\nladder.cauchy=" << (rep.cauchy ? "true" : "false") << '\n';
    ok = rep.cauchy;
  } else {
    std::vector<Scenario> scenarios;
    for (const auto& name : suite_scenarios(suite)) scenarios.push_back(make_scenario(name, grid, seed));
    for (const VerdictReport& r : run_scenarios(scenarios)) {
      all << format_report(r) << '\n';
      ok = ok && r.passed();
    }
  }
  all << "suite." << suite << ".passed=" << (ok ? "true" : "false") << '\n';
  std::cout << all.str();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream(fs::path(out_dir) / ("verify_" + suite + ".txt")) << all.str();
  }
  return ok ? 0 : 1;
}

int cmd_rates(const std::string& csv_path, std::optional<double> t_begin) {
  std::ifstream in(csv_path);
  if (!in) throw ValidationError("cannot read '" + csv_path + "'");
  const DiagnosticsSeries series = read_series_csv(in);
  if (series.rows.size() < 10) throw ValidationError("rates: need at least 10 rows");
  const auto t = series.column("t");
  const double start = t_begin ? *t_begin : transient_end(series, "l2_n_dev");
  std::vector<std::pair<std::string, std::vector<double>>> targets;
  std::vector<double> sum(t.size());
  const auto n = series.column("l2_n_dev"), c = series.column("l2_c_dev");
  for (std::size_t i = 0; i < t.size(); ++i) sum[i] = n[i] + c[i];
  targets.emplace_back("l2_n_dev+l2_c_dev", sum);
  for (const char* col : {"lyapunov", "grad_c_l2", "grad_c_l4", "l2_u"}) targets.emplace_back(col, series.column(col));

  std::cout << "window.t_begin=" << format_double(start) << "\nwindow.t_end=" << format_double(t.back()) << '\n';
  for (const auto& [name, v] : targets) {
    try {
      const DecayFit f = fit_decay_rate(t, v, {start, t.back()});
      std::cout << name << ".rate=" << format_double(f.rate) << '\n'
                << name << ".r_squared=" << format_double(f.r_squared) << '\n'
                << name << ".samples=" << f.samples << '\n';
    } catch (const ValidationError& e) {
      std::cout << name << ".error=" << e.what() << '\n';
    }
  }
  return 0;
}

int cmd_mms(const std::string& which, int dim, const std::string& resolutions) {
  const auto res = parse_list<int>(resolutions);
  std::vector<MmsKind> kinds;
  if (which == "all")
    kinds = {MmsKind::exact_steady, MmsKind::diffusion_only, MmsKind::full_coupling};
  else
    kinds = {mms_kind_from_string(which)};
  bool ok = true;
  for (MmsKind k : kinds) {
    const ConvergenceReport rep = mms_convergence(make_mms_case(k, dim), res);
    std::cout << "== mms " << rep.name << " ==\n";
    for (std::size_t i = 0; i < rep.resolutions.size(); ++i)
      std::cout << rep.name << ".N" << rep.resolutions[i] << ".error=" << format_double(rep.errors[i].total())
                << " (n " << rep.errors[i].n << ", c " << rep.errors[i].c << ", u " << rep.errors[i].u << ")\n";
    for (std::size_t i = 0; i < rep.orders.size(); ++i)
      std::cout << rep.name << ".order_" << rep.resolutions[i] << "_" << rep.resolutions[i + 1] << "="
                << (rep.order_defined ? format_double(rep.orders[i]) : "undefined") << '\n';
    for (const auto& f : rep.failures) std::cout << rep.name << ".failure=" << f << '\n';
    bool pass = rep.failures.empty();
    if (k == MmsKind::exact_steady) {
      for (const auto& e : rep.errors) pass = pass && e.total() <= 1e-12;
    } else {
      const double need = k == MmsKind::diffusion_only ? 1.8 : 0.9;
      pass = pass && rep.monotone && rep.order_defined && rep.order() >= need;
    }
    std::cout << rep.name << ".passed=" << (pass ? "true" : "false") << '\n';
    ok = ok && pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Chemotaxis-fluid simulator and verification harness"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP worker count (0 keeps the default)");

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  auto* run_cmd = app.add_subcommand("run", "Run one trajectory from a config file");
  run_cmd->add_option("--config", config_path, "Config file")->required();
  run_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");
  run_cmd->add_option("--seed", seed, "RNG seed for random initial data");
  run_cmd->add_option("--threads", threads, "OpenMP worker count");

  std::string suite = "lyapunov";
  int dim = 2;
  std::string cells = "32", extents = "1";
  std::uint64_t verify_seed = 1;
  auto* verify_cmd = app.add_subcommand("verify", "Run a scenario suite (conservation, lyapunov, stabilization, ladder, all)");
  verify_cmd->add_option("--suite", suite, "Suite name");
  verify_cmd->add_option("--dim", dim, "Spatial dimension");
  verify_cmd->add_option("--cells", cells, "Cells per axis (one value or a comma list)");
  verify_cmd->add_option("--extents", extents, "Box lengths (one value or a comma list)");
  verify_cmd->add_option("--seed", verify_seed, "RNG seed for random initial data");
  verify_cmd->add_option("--out", out_dir, "Directory for the report file");
  verify_cmd->add_option("--threads", threads, "OpenMP worker count");

  int p_dim = 2;
  std::string p_cells = "64", p_extents = "1";
  auto* poincare_cmd = app.add_subcommand("poincare", "Print the discrete Poincare constant C_N of a grid");
  poincare_cmd->add_option("--dim", p_dim, "Spatial dimension");
  poincare_cmd->add_option("--cells", p_cells, "Cells per axis");
  poincare_cmd->add_option("--extents", p_extents, "Box lengths");
  poincare_cmd->add_option("--threads", threads, "OpenMP worker count");

  std::string csv_path;
  std::optional<double> t_begin;
  auto* rates_cmd = app.add_subcommand("rates", "Re-fit decay rates from a series CSV");
  rates_cmd->add_option("csv", csv_path, "CSV written by 'run'")->required();
  rates_cmd->add_option("--t-begin", t_begin, "Start of the fit window (default: end of the transient)");

  std::string mms_case = "all", resolutions = "16,32,64";
  int mms_dim = 2;
  auto* mms_cmd = app.add_subcommand("mms", "Manufactured-solution convergence study");
  mms_cmd->add_option("--case", mms_case, "exact_steady, diffusion_only, full_coupling or all");
  mms_cmd->add_option("--resolutions", resolutions, "Comma list of cells per axis");
  mms_cmd->add_option("--dim", mms_dim, "Spatial dimension");
  mms_cmd->add_option("--threads", threads, "OpenMP worker count");

  CLI11_PARSE(app, argc, argv);
  try {
    parallel::set_threads(threads);
    if (*run_cmd) return cmd_run(config_path, out_dir, seed);
    if (*verify_cmd) return cmd_verify(suite, grid_from_flags(dim, cells, extents), verify_seed, out_dir);
    if (*poincare_cmd) {
      const Grid g = grid_from_flags(p_dim, p_cells, p_extents);
      const double cn = poincare_constant(g);
      std::cout << "C_N=" << format_double(cn) << "\nlambda_1=" << format_double(1.0 / cn) << '\n';
      return 0;
    }
    if (*rates_cmd) return cmd_rates(csv_path, t_begin);
    if (*mms_cmd) return cmd_mms(mms_case, mms_dim, resolutions);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
