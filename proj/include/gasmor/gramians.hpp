#pragma once

#include <vector>

#include "gasmor/scenario.hpp"
#include "gasmor/solvers.hpp"
#include "gasmor/steady.hpp"

namespace gasmor {

enum class GramianKind { WR, WO, WX, WZ };
const char* to_string(GramianKind k);

/// Structured empirical Gramian: one block per physical variable.
struct GramianPair {
  Mat Wp, Wq;
  GramianKind kind = GramianKind::WR;
  bool dual_based = false;
};

enum class InputShape { Impulse, Step, RandomBinary, Gauss };
InputShape input_shape_from(const std::string& name);

struct TrainingSetup {
  double horizon = 3600.0;  // [s]
  double h = 60.0;          // [s]
  InputShape shape = InputShape::Step;
  double input_rel = 0.01, input_abs = 0.0;  // port scale = rel*|ubar| + abs
  double state_rel = 0.01, state_abs = 0.0;  // state scale = rel*|xbar| + abs
  SolverKind solver = SolverKind::Imex1;
  double gamma = 1.0, lambda = 0.5;
  std::uint64_t seed = 1;
  int workers = 0;  // 0: hardware concurrency
  std::string cache_dir;  // optional on-disk Gramian cache

  std::uint64_t content_hash() const;
};

/// Per-parameter-sample simulation context. The steady state is the
/// perturbation anchor; trajectories are centered on it.
struct TrainingSystem {
  Params theta;
  LumpedSystem sys;
  Vec xbar, ubar, ybar;
  LumpedSystem dual;  // adjoint system, when available
  Vec dual_ubar;
  bool has_dual = false;
  int np = 0, nq = 0;
};

/// Builds the steady anchor (with the one-pass compressibility bootstrap)
/// and the lumped systems for one parameter sample.
TrainingSystem make_training_system(const DiscreteModel& m, const Vec& sbar_p, const Vec& dbar_q,
                                    const Params& theta, CompressibilityModel zvariant,
                                    const CriticalPoint& crit, bool with_dual,
                                    const SteadyOptions& sopts = {},
                                    const std::string& cache_dir = "");

/// Accumulates the four structured empirical Gramians from perturbation
/// trajectories. The three underlying trajectory sets (input-perturbed
/// states, state-perturbation outputs, dual states) are simulated once and
/// shared; perturbation runs execute concurrently and are reduced in a fixed
/// order. Dual state trajectories are recorded as E*(z - zbar) so that the
/// dual reachability data reproduces primal observability.
class GramianTrainer {
 public:
  /// `key_hash` (typically the model hash mixed with the parameter grid)
  /// keys the optional on-disk Gramian cache; a cache hit skips the
  /// perturbation runs entirely.
  GramianTrainer(std::vector<TrainingSystem> systems, TrainingSetup setup,
                 std::uint64_t key_hash = 0);

  GramianPair wr();
  GramianPair wo(bool dual_based = false);
  GramianPair wx(bool dual_based = false);
  GramianPair wz(bool dual_based = false);

  /// Centered input-perturbation snapshot matrices, one per (theta, port)
  /// run, for the DMD-Galerkin reductor.
  const std::vector<Mat>& snapshots_p();
  const std::vector<Mat>& snapshots_q();

  struct Stats {
    long input_runs = 0, state_runs = 0, dual_runs = 0;
    long requests = 0, trajectory_cache_hits = 0;
    long gramian_cache_hits = 0;
  };
  const Stats& stats() const { return stats_; }
  int port_dim() const;

 private:
  void ensure_x();
  void ensure_y();
  void ensure_z();
  Solution run(const LumpedSystem& sys, const InputFn& u, const Vec& x0, bool states) const;

  std::vector<TrainingSystem> systems_;
  TrainingSetup setup_;
  std::uint64_t key_hash_ = 0;
  Stats stats_;
  bool have_x_ = false, have_y_ = false, have_z_ = false;
  // X[k][m]: centered states, (np|nq) x (K+1); Y[k][m]: (K+1) x (np|nq)
  // normalized output deviations of the m-th output port; Z like X.
  std::vector<std::vector<Mat>> xp_, xq_, yp_, yq_, zp_, zq_;
  std::vector<Mat> snaps_p_, snaps_q_;
};

// On-disk Gramian cache (optional).
bool gramian_cache_load(const std::string& dir, const std::string& key, GramianPair& out);
void gramian_cache_store(const std::string& dir, const std::string& key, const GramianPair& g);
std::string gramian_cache_key(std::uint64_t model_hash, const TrainingSetup& setup,
                              GramianKind kind, bool dual_based);

}  // namespace gasmor
