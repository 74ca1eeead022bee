#pragma once

#include <string>
#include <vector>

#include "gasmor/config.hpp"
#include "gasmor/rom.hpp"

namespace gasmor {

/// Approximate parametric (L_k x L_l) norm of an output tensor over
/// (parameter sample, time, port). k in {1,2,-1} reduces over parameter
/// samples, l in {0,1,2,-1} over time (-1: max norm, l = 0: final-time
/// value). The (2,2)
/// pair is sqrt(sum_theta dt*||vec(Y)||_2^2). Relative form divides by the
/// same norm of the reference.
double output_norm(const std::vector<Mat>& y, double dt, int k, int l);
double error_norm(const std::vector<Mat>& y, const std::vector<Mat>& ytilde, double dt, int k,
                  int l, bool relative = true);

/// Normalized staircase area above the relative error curve:
/// mu = sum_i (x_i - x_{i-1}) * log(clamp(eps_i)) / log(eps_mach), x = n/n_max.
/// Unstable orders enter as error 1.
double morscore(const std::vector<int>& orders, const std::vector<double>& errors, int n_max,
                double eps_mach = 1e-16);

// ---- model pipeline ----

struct ModelBundle {
  RefinementResult refinement;
  TopologyMatrices topo;
  DiscreteModel model;
  double dx = 0;
};

/// Refine at twice the CFL-nominal length (two state values per segment
/// halve the effective spatial step), assemble once with fallback friction,
/// then reassemble with per-pipe Reynolds numbers from the linear mass-flux
/// steady state.
ModelBundle build_bundle(const Network& net, const Scenario& scn, Discretization disc,
                         const GlobalConfig& cfg, double dt);

ModelConfig model_config(const GlobalConfig& cfg, Discretization disc, const Scenario& scn);

/// Steady anchor plus frozen gas state (one compressibility bootstrap pass).
struct Prepared {
  GasState gas;
  SteadyState steady;
};
Prepared prepare_steady(const DiscreteModel& m, const Vec& sbar, const Vec& dbar,
                        const Params& th, const GlobalConfig& cfg);

/// Sparse parameter grid (4 corners + center) and seeded uniform draws.
std::vector<Params> theta_grid(const GlobalConfig& cfg);
std::vector<Params> theta_random(const GlobalConfig& cfg, int n, std::uint64_t seed);

// ---- offline / online phases ----

struct OfflineResult {
  std::vector<std::string> rom_files;
  std::vector<std::pair<std::string, double>> seconds;  // per method
  long input_runs = 0, state_runs = 0, dual_runs = 0;
  long cache_hits = 0;
  double total_seconds = 0;
};

OfflineResult run_offline(const Network& net, const Scenario& training, Discretization disc,
                          SolverKind solver, const std::vector<std::string>& methods,
                          const GlobalConfig& cfg, const std::string& out_dir);

struct MethodCurve {
  std::string method;
  std::vector<int> orders;
  std::vector<double> errors;  // relative L2 (x) L2; inf for unstable
  double score = 0;
  double online_seconds = 0;
  int unstable = 0;
};

struct BenchReport {
  std::vector<MethodCurve> curves;
  std::vector<Params> test_thetas;
  int fom_solves = 0;
  double fom_seconds = 0;
  double total_seconds = 0;
  int order_max = 0, order_step = 0;
  std::uint64_t model_hash = 0;
  std::string model, solver;
};

BenchReport run_online(const Network& net, const Scenario& test, Discretization disc,
                       SolverKind solver, const std::vector<std::string>& rom_files,
                       const GlobalConfig& cfg, const std::string& out_dir);

/// report.csv + curves/<method>.csv + plots/<method>.svg + meta.json.
void write_report(const BenchReport& rep, const GlobalConfig& cfg, const std::string& out_dir);

/// Random 24h load profile: uniform per-breakpoint perturbations around the
/// base scenario's steady boundary values.
Scenario randomized_scenario(const Scenario& base, double horizon, int breakpoints,
                             double rel_amplitude, std::uint64_t seed);

/// Simple log-scale SVG line chart of error-vs-order curves.
void write_svg_curves(const std::string& path, const std::vector<MethodCurve>& curves,
                      int order_max);

/// CSV of a solution: t, outputs (s_q..., d_p...).
void write_solution_csv(const std::string& path, const Solution& sol, int ns, int nd);

/// SVG time-series plot of the solution outputs (one curve per port).
void write_svg_timeseries(const std::string& path, const Solution& sol, int ns, int nd);

void write_manifest(const std::string& path, const GlobalConfig& cfg,
                    const std::map<std::string, std::string>& extra);

}  // namespace gasmor
