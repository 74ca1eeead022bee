#pragma once

#include <string>
#include <vector>

#include "gasmor/gramians.hpp"

namespace gasmor {

/// Structured projector series: one basis pair per physical variable, with
/// per-column importance weights. Truncation-consistent: the order-r basis
/// is the leading r columns. Petrov-Galerkin pairs satisfy V^T U = I at
/// every truncation order; Galerkin series are orthonormal with U = V.
struct ProjectorSeries {
  Mat Up, Vp, Uq, Vq;
  Vec wp, wq;
  bool galerkin = true;
  std::string method;

  int rank_p() const { return static_cast<int>(Up.cols()); }
  int rank_q() const { return static_cast<int>(Uq.cols()); }
};

/// Reachability-Gramian POD: per-variable truncated decomposition, weights
/// are the square roots of the singular values.
ProjectorSeries pod(const GramianPair& wr, int rmax);

/// Reorder POD columns by the goal-oriented index d_k = |c_k|^2 * w_k built
/// from the projected output matrix.
ProjectorSeries goal_oriented_sort(ProjectorSeries s, const DiscreteModel& m);

/// Least-squares one-step operator A with x_{k+1} ~ A x_k over all shifted
/// snapshot pairs (truncated-SVD pseudoinverse).
Mat dmd_operator(const std::vector<Mat>& snaps);

/// DMD-Galerkin: least-squares Koopman operator from shifted snapshot pairs,
/// basis from its dominant singular vectors.
ProjectorSeries dmd_galerkin(const std::vector<Mat>& snaps_p, const std::vector<Mat>& snaps_q,
                             int rmax);

/// Dominant subspaces from reachability + observability Gramians, scales
/// equilibrated by inverse Frobenius norms.
ProjectorSeries dominant_subspaces_ro(const GramianPair& wr, const GramianPair& wo, int rmax);

/// Dominant subspaces from a (non-symmetric) cross Gramian.
ProjectorSeries dominant_subspaces_cross(const GramianPair& wx, int rmax);

/// Balancing from the Gramian product (approximate Hankel weights).
ProjectorSeries balance_ro(const GramianPair& wr, const GramianPair& wo, int rmax);

/// Balancing from the eigen-spaces of a cross Gramian.
ProjectorSeries balance_cross(const GramianPair& wx, int rmax);

/// Balanced POD: square-root factors of both Gramians.
ProjectorSeries balance_bpod(const GramianPair& wr, const GramianPair& wo, int rmax);

/// Reorder a balanced series by per-direction output gains |c_k|^2 * d_k.
ProjectorSeries sort_balanced_gains(ProjectorSeries s, const DiscreteModel& m);

/// The thirteen reduction methods (plus "_l" dual-data variants of those
/// using observability information, endpoint model only).
const std::vector<std::string>& all_method_ids();
bool method_is_dual(const std::string& id);
bool method_is_galerkin(const std::string& id);

/// Dispatch a method id onto the trainer's Gramians/snapshots.
ProjectorSeries reduce(const std::string& method, GramianTrainer& trainer,
                       const DiscreteModel& model, int rmax);

// ---- .rom container ----

struct RomFile {
  std::string method;
  std::string solver;
  std::string disc;
  std::uint64_t model_hash = 0;
  std::uint64_t training_hash = 0;
  ProjectorSeries series;
  Vec pbar, qbar;              // training steady anchor
  std::vector<Params> thetas;  // training parameter samples
};

void save_rom(const std::string& path, const RomFile& rom);
RomFile load_rom(const std::string& path);

}  // namespace gasmor
