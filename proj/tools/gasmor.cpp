// Command-line front end: simulate / offline / online / scenario-gen.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "gasmor/bench.hpp"

namespace fs = std::filesystem;
using namespace gasmor;

namespace {

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cli: cannot open network '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_net(buf.str());
}

struct CommonArgs {
  std::string net_path, scenario_path, config_path;
  std::string model = "ode_end", solver = "imex1";
  std::string out_dir = "out";
  double dt = 0;  // 0: from config
  int workers = 0;
  std::uint64_t seed = 0;

  GlobalConfig config() const {
    GlobalConfig cfg = config_path.empty() ? GlobalConfig{} : GlobalConfig::from_file(config_path);
    if (dt > 0) cfg.dt = dt;
    if (workers > 0) cfg.workers = workers;
    if (seed > 0) cfg.seed = seed;
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonArgs& a, bool with_scenario = true) {
  cmd->add_option("--net", a.net_path, "network .net file")->required();
  if (with_scenario)
    cmd->add_option("--scenario", a.scenario_path, "scenario .ini file")->required();
  cmd->add_option("--model", a.model, "discretization: ode_mid | ode_end");
  cmd->add_option("--solver", a.solver, "time stepper: imex1 | imex2 | rk4");
  cmd->add_option("--config", a.config_path, "global config .ini");
  cmd->add_option("--out", a.out_dir, "output directory");
  cmd->add_option("--dt", a.dt, "time step [s]");
  cmd->add_option("--workers", a.workers, "concurrent jobs (default: cores)");
  cmd->add_option("--seed", a.seed, "rng seed");
}

int cmd_simulate(const CommonArgs& a) {
  GlobalConfig cfg = a.config();
  Network net = load_network(a.net_path);
  Scenario scn = load_scenario(a.scenario_path);
  auto disc = discretization_from(a.model);
  auto solver = solver_from(a.solver);

  ModelBundle bundle = build_bundle(net, scn, disc, cfg, cfg.dt);
  auto [sb, db] = input_at(scn, 0.0);
  Prepared pr = prepare_steady(bundle.model, sb, db, scn.params(), cfg);
  if (!pr.steady.converged)
    std::cerr << "warning: steady state residual " << pr.steady.residual << "\n";
  Vec x0(bundle.model.state_dim());
  x0 << pr.steady.pbar, pr.steady.qbar;

  SolveOptions opts;
  opts.gamma = cfg.gamma;
  opts.lambda = cfg.lambda;
  Solution sol = solve_scenario(solver, bundle.model, scn, cfg.dt, pr.gas, x0, opts);
  if (sol.blew_up) {
    std::cerr << "error: simulation blew up at step " << sol.blow_step << " (t = "
              << sol.blow_step * cfg.dt << " s): " << sol.blow_reason << "\n";
    return 1;
  }

  fs::create_directories(a.out_dir);
  write_solution_csv(a.out_dir + "/outputs.csv", sol, bundle.model.ns, bundle.model.nd);

  write_svg_timeseries(a.out_dir + "/outputs.svg", sol, bundle.model.ns, bundle.model.nd);

  std::map<std::string, std::string> extra = {
      {"command", "simulate"},
      {"network", a.net_path},
      {"scenario", a.scenario_path},
      {"model", a.model},
      {"solver", a.solver},
      {"model_hash", hex64(bundle.model.hash)},
      {"states", std::to_string(bundle.model.state_dim())},
      {"ports", std::to_string(bundle.model.port_dim())},
      {"steady_residual", std::to_string(pr.steady.residual)},
      {"runtime_seconds", std::to_string(sol.runtime)},
  };
  write_manifest(a.out_dir + "/meta.json", cfg, extra);
  std::cout << "wrote " << a.out_dir << "/outputs.csv (" << sol.t.size() << " rows, "
            << bundle.model.state_dim() << " states)\n";
  return 0;
}

int cmd_offline(const CommonArgs& a, const std::string& methods_arg) {
  GlobalConfig cfg = a.config();
  Network net = load_network(a.net_path);
  Scenario scn = load_scenario(a.scenario_path);
  auto disc = discretization_from(a.model);
  auto solver = solver_from(a.solver);

  std::vector<std::string> methods;
  if (methods_arg == "all") methods = all_method_ids();
  else methods = split_any(methods_arg, ", ");
  OfflineResult res = run_offline(net, scn, disc, solver, methods, cfg, a.out_dir);

  std::map<std::string, std::string> extra = {
      {"command", "offline"},
      {"network", a.net_path},
      {"scenario", a.scenario_path},
      {"model", a.model},
      {"solver", a.solver},
      {"trajectories", std::to_string(res.input_runs + res.state_runs + res.dual_runs)},
      {"trajectory_cache_hits", std::to_string(res.cache_hits)},
  };
  write_manifest(a.out_dir + "/meta.json", cfg, extra);

  std::cout << "method            offline [s]\n";
  for (const auto& [id, sec] : res.seconds)
    std::cout << id << std::string(18 - std::min<std::size_t>(18, id.size()), ' ') << sec << "\n";
  std::cout << res.rom_files.size() << " rom files in " << a.out_dir << " ("
            << res.input_runs + res.state_runs + res.dual_runs << " trajectories, "
            << res.cache_hits << " cache hits)\n";
  return 0;
}

int cmd_online(const CommonArgs& a, std::vector<std::string> rom_paths, int order_max) {
  GlobalConfig cfg = a.config();
  if (order_max > 0) cfg.order_max = order_max;
  Network net = load_network(a.net_path);
  Scenario scn = load_scenario(a.scenario_path);
  auto disc = discretization_from(a.model);
  auto solver = solver_from(a.solver);

  BenchReport rep = run_online(net, scn, disc, solver, rom_paths, cfg, a.out_dir);
  std::map<std::string, std::string> extra = {
      {"command", "online"}, {"network", a.net_path}, {"scenario", a.scenario_path}};
  write_manifest(a.out_dir + "/meta.json", cfg, extra);

  std::cout << "method            MORscore\n";
  for (const auto& c : rep.curves)
    std::cout << c.method << std::string(18 - std::min<std::size_t>(18, c.method.size()), ' ')
              << c.score << (c.unstable ? " (" + std::to_string(c.unstable) + " unstable)" : "")
              << "\n";
  std::cout << "report in " << a.out_dir << "\n";
  return 0;
}

int cmd_scenario_gen(const CommonArgs& a, double amplitude, int breakpoints, double horizon,
                     const std::string& out_file) {
  GlobalConfig cfg = a.config();
  Scenario base = load_scenario(a.scenario_path);
  Scenario s = randomized_scenario(base, horizon, breakpoints, amplitude, cfg.seed);
  std::ofstream out(out_file);
  if (!out) fail("cli: cannot write '" + out_file + "'");
  out << std::setprecision(17);
  out << "T0 = " << s.T0 << "\nRS = " << s.RS << "\ntH = " << s.tH << "\nut =";
  for (double t : s.ut) out << " " << t;
  out << "\nup = ";
  for (Eigen::Index r = 0; r < s.up.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.up.cols(); ++c) out << s.up(r, c) << " ";
    if (r + 1 < s.up.rows()) out << "; ";
  }
  out << "\nuq = ";
  for (Eigen::Index r = 0; r < s.uq.rows(); ++r) {
    for (Eigen::Index c = 0; c < s.uq.cols(); ++c) out << s.uq(r, c) << " ";
    if (r + 1 < s.uq.rows()) out << "; ";
  }
  out << "\n";
  if (!s.cp.empty()) {
    out << "cp =";
    for (double v : s.cp) out << " " << v;
    out << "\n";
  }
  std::cout << "wrote " << out_file << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transient gas network simulation and model order reduction"};
  app.require_subcommand(1);

  CommonArgs sim_args, off_args, on_args, gen_args;
  std::string methods = "all";
  std::vector<std::string> rom_paths;
  int order_max = 0;
  double amplitude = 0.1, gen_horizon = 86400;
  int breakpoints = 24;
  std::string gen_out = "random.ini";

  auto* sim = app.add_subcommand("simulate", "run a full-order simulation");
  add_common(sim, sim_args);

  auto* off = app.add_subcommand("offline", "train reduced order models");
  add_common(off, off_args);
  off->add_option("--methods", methods, "comma list of reductors or 'all'");

  auto* on = app.add_subcommand("online", "benchmark reduced order models");
  add_common(on, on_args);
  on->add_option("--roms", rom_paths, "trained .rom files")->required();
  on->add_option("--order-max", order_max, "largest reduced order in the sweep");

  auto* gen = app.add_subcommand("scenario-gen", "random load profile from a base scenario");
  add_common(gen, gen_args);
  gen->add_option("--amplitude", amplitude, "relative demand perturbation");
  gen->add_option("--breakpoints", breakpoints, "number of load steps");
  gen->add_option("--horizon", gen_horizon, "time horizon [s]");
  gen->add_option("--out-file", gen_out, "output scenario path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(sim_args);
    if (off->parsed()) return cmd_offline(off_args, methods);
    if (on->parsed()) return cmd_online(on_args, rom_paths, order_max);
    if (gen->parsed()) return cmd_scenario_gen(gen_args, amplitude, breakpoints, gen_horizon, gen_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
