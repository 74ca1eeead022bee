#include "gasmor/gramians.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

namespace gasmor {

const char* to_string(GramianKind k) {
  switch (k) {
    case GramianKind::WR: return "wr";
    case GramianKind::WO: return "wo";
    case GramianKind::WX: return "wx";
    case GramianKind::WZ: return "wz";
  }
  return "?";
}

InputShape input_shape_from(const std::string& name) {
  if (name == "impulse") return InputShape::Impulse;
  if (name == "step") return InputShape::Step;
  if (name == "random-binary") return InputShape::RandomBinary;
  if (name == "gauss") return InputShape::Gauss;
  fail("gramians: unknown input shape '" + name + "'");
}

std::uint64_t TrainingSetup::content_hash() const {
  Fnv64 f;
  f.add(horizon);
  f.add(h);
  f.add(static_cast<int>(shape));
  f.add(input_rel);
  f.add(input_abs);
  f.add(state_rel);
  f.add(state_abs);
  f.add(to_string(solver));
  f.add(gamma);
  f.add(lambda);
  f.add(seed);
  return f.value();
}

TrainingSystem make_training_system(const DiscreteModel& m, const Vec& sbar_p, const Vec& dbar_q,
                                    const Params& theta, CompressibilityModel zvariant,
                                    const CriticalPoint& crit, bool with_dual,
                                    const SteadyOptions& sopts, const std::string& cache_dir) {
  TrainingSystem ts;
  ts.theta = theta;
  ts.np = m.np;
  ts.nq = m.nq;

  GasState gas;  // z0 = 1 for the first pass
  gas.d0 = 1.0 / (theta.T0 * theta.RS);

  std::string key = steady_cache_key(m, sbar_p, dbar_q, theta);
  SteadyState st;
  if (!steady_cache_load(cache_dir, key, st)) {
    st = steady_state(m, sbar_p, dbar_q, theta, gas, sopts);
    gas = gas_state(st.pbar, theta, zvariant, crit);
    st = steady_state(m, sbar_p, dbar_q, theta, gas, sopts);
    steady_cache_store(cache_dir, key, st);
  }
  gas = gas_state(st.pbar, theta, zvariant, crit);

  ts.sys = lumped(m, theta, gas);
  ts.xbar.resize(m.state_dim());
  ts.xbar << st.pbar, st.qbar;
  ts.ubar.resize(m.port_dim());
  ts.ubar << sbar_p, dbar_q;
  ts.ybar = ts.sys.C * ts.xbar;

  if (with_dual) {
    DiscreteModel d = dual_model(m, st.pbar, st.qbar, theta, gas);
    ts.dual = lumped(d, theta, gas);
    ts.dual_ubar = ts.ybar;
    ts.has_dual = true;
  }
  return ts;
}

GramianTrainer::GramianTrainer(std::vector<TrainingSystem> systems, TrainingSetup setup,
                               std::uint64_t key_hash)
    : systems_(std::move(systems)), setup_(setup), key_hash_(key_hash) {
  if (systems_.empty()) fail("gramians: need at least one parameter sample");
}

int GramianTrainer::port_dim() const { return static_cast<int>(systems_[0].ubar.size()); }

Solution GramianTrainer::run(const LumpedSystem& sys, const InputFn& u, const Vec& x0,
                             bool states) const {
  SolveOptions o;
  o.gamma = setup_.gamma;
  o.lambda = setup_.lambda;
  o.capture_states = states;
  Solution s = solve(setup_.solver, sys, u, x0, setup_.h, setup_.horizon, o);
  if (s.blew_up) fail("gramians: training trajectory blew up at step " + std::to_string(s.blow_step));
  return s;
}

namespace {

/// Per-step deterministic signal for the non-impulse training shapes. The
/// Dirac impulse is realized exactly as its state-space equivalent
/// x0 += scale * E^-1 B e_m instead of a divided difference in u.
struct Signal {
  InputShape shape;
  double scale;
  double h;
  std::vector<double> noise;  // per step, for random shapes

  double at(double t) const {
    switch (shape) {
      case InputShape::Impulse: return 0.0;
      case InputShape::Step: return scale;
      default: {
        auto k = static_cast<std::size_t>(t / h);
        return k < noise.size() ? noise[k] : 0.0;
      }
    }
  }
};

Signal make_signal(InputShape shape, double scale, double h, double horizon, std::uint64_t seed) {
  Signal s{shape, scale, h, {}};
  if (shape == InputShape::RandomBinary || shape == InputShape::Gauss) {
    Rng rng(seed);
    auto steps = static_cast<std::size_t>(horizon / h) + 1;
    s.noise.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      if (shape == InputShape::RandomBinary) {
        s.noise[k] = rng.uniform() < 0.5 ? -scale : scale;
      } else {
        double u1 = std::max(rng.uniform(), 1e-300), u2 = rng.uniform();
        s.noise[k] = scale * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      }
    }
  }
  return s;
}

}  // namespace

void GramianTrainer::ensure_x() {
  ++stats_.requests;
  if (have_x_) {
    ++stats_.trajectory_cache_hits;
    return;
  }
  const std::size_t kk = systems_.size();
  const int ports = port_dim();
  xp_.assign(kk, {});
  xq_.assign(kk, {});
  for (auto& v : xp_) v.resize(static_cast<std::size_t>(ports));
  for (auto& v : xq_) v.resize(static_cast<std::size_t>(ports));
  snaps_p_.clear();
  snaps_q_.clear();

  struct Job {
    std::size_t k;
    int m;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < kk; ++k)
    for (int m = 0; m < ports; ++m) jobs.push_back({k, m});

  std::vector<Eigen::SparseLU<SpMat>> elu(kk);
  if (setup_.shape == InputShape::Impulse)
    for (std::size_t k = 0; k < kk; ++k) {
      SpMat e = systems_[k].sys.E;
      e.makeCompressed();
      elu[k].compute(e);
      if (elu[k].info() != Eigen::Success) fail("gramians: singular mass matrix");
    }

  int workers = setup_.workers > 0 ? setup_.workers : default_workers();
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto [k, m] = jobs[j];
    const TrainingSystem& ts = systems_[k];
    double scale = setup_.input_rel * std::abs(ts.ubar(m)) + setup_.input_abs;
    Signal sig = make_signal(setup_.shape, scale, setup_.h, setup_.horizon,
                             setup_.seed * 1000003u + k * 131u + static_cast<unsigned>(m));
    Vec ubar = ts.ubar;
    InputFn u = [&ubar, &sig, m](double t) {
      Vec v = ubar;
      v(m) += sig.at(t);
      return v;
    };
    Vec x0 = ts.xbar;
    if (setup_.shape == InputShape::Impulse)
      x0 += scale * elu[k].solve(Vec(ts.sys.B.col(m)));
    Solution sol = run(ts.sys, u, x0, true);
    const auto steps = sol.x.rows();
    Mat cp(ts.np, steps), cq(ts.nq, steps);
    for (Eigen::Index r = 0; r < steps; ++r) {
      Vec dx = sol.x.row(r).transpose() - ts.xbar;
      cp.col(r) = dx.head(ts.np);
      cq.col(r) = dx.tail(ts.nq);
    }
    xp_[k][static_cast<std::size_t>(m)] = std::move(cp);
    xq_[k][static_cast<std::size_t>(m)] = std::move(cq);
  });

  for (std::size_t k = 0; k < kk; ++k)
    for (int m = 0; m < ports; ++m) {
      snaps_p_.push_back(xp_[k][static_cast<std::size_t>(m)]);
      snaps_q_.push_back(xq_[k][static_cast<std::size_t>(m)]);
    }
  stats_.input_runs += static_cast<long>(jobs.size());
  have_x_ = true;
}

void GramianTrainer::ensure_y() {
  ++stats_.requests;
  if (have_y_) {
    ++stats_.trajectory_cache_hits;
    return;
  }
  const std::size_t kk = systems_.size();
  const int ports = port_dim();
  const int np = systems_[0].np, nq = systems_[0].nq;
  const auto ksteps = static_cast<Eigen::Index>(setup_.horizon / setup_.h) + 1;
  yp_.assign(kk, {});
  yq_.assign(kk, {});
  for (auto& v : yp_) v.assign(static_cast<std::size_t>(ports), Mat::Zero(ksteps, np));
  for (auto& v : yq_) v.assign(static_cast<std::size_t>(ports), Mat::Zero(ksteps, nq));

  struct Job {
    std::size_t k;
    int i;  // state index in [0, np+nq)
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < kk; ++k)
    for (int i = 0; i < np + nq; ++i) jobs.push_back({k, i});

  int workers = setup_.workers > 0 ? setup_.workers : default_workers();
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto [k, i] = jobs[j];
    const TrainingSystem& ts = systems_[k];
    double eps = setup_.state_rel * std::abs(ts.xbar(i)) + setup_.state_abs;
    if (eps == 0) return;  // unperturbed: zero column stays
    Vec x0 = ts.xbar;
    x0(i) += eps;
    Vec ubar = ts.ubar;
    InputFn u = [&ubar](double) { return ubar; };
    Solution sol = run(ts.sys, u, x0, false);
    for (int m = 0; m < ports; ++m) {
      for (Eigen::Index r = 0; r < sol.y.rows(); ++r) {
        double val = (sol.y(r, m) - ts.ybar(m)) / eps;
        if (i < np)
          yp_[k][static_cast<std::size_t>(m)](r, i) = val;
        else
          yq_[k][static_cast<std::size_t>(m)](r, i - np) = val;
      }
    }
  });
  stats_.state_runs += static_cast<long>(jobs.size());
  have_y_ = true;
}

void GramianTrainer::ensure_z() {
  ++stats_.requests;
  if (have_z_) {
    ++stats_.trajectory_cache_hits;
    return;
  }
  const std::size_t kk = systems_.size();
  const int ports = port_dim();
  for (const auto& ts : systems_)
    if (!ts.has_dual) fail("gramians: dual-based variant requested without a dual system");
  zp_.assign(kk, {});
  zq_.assign(kk, {});
  for (auto& v : zp_) v.resize(static_cast<std::size_t>(ports));
  for (auto& v : zq_) v.resize(static_cast<std::size_t>(ports));

  struct Job {
    std::size_t k;
    int m;
  };
  std::vector<Job> jobs;
  for (std::size_t k = 0; k < kk; ++k)
    for (int m = 0; m < ports; ++m) jobs.push_back({k, m});

  std::vector<Eigen::SparseLU<SpMat>> elu(kk);
  if (setup_.shape == InputShape::Impulse)
    for (std::size_t k = 0; k < kk; ++k) {
      SpMat e = systems_[k].dual.E;
      e.makeCompressed();
      elu[k].compute(e);
      if (elu[k].info() != Eigen::Success) fail("gramians: singular dual mass matrix");
    }

  int workers = setup_.workers > 0 ? setup_.workers : default_workers();
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const auto [k, m] = jobs[j];
    const TrainingSystem& ts = systems_[k];
    double scale = setup_.input_rel * std::abs(ts.dual_ubar(m)) + setup_.input_abs;
    Signal sig = make_signal(setup_.shape, scale, setup_.h, setup_.horizon,
                             setup_.seed * 2000029u + k * 131u + static_cast<unsigned>(m));
    Vec ubar = ts.dual_ubar;
    InputFn u = [&ubar, &sig, m](double t) {
      Vec v = ubar;
      v(m) += sig.at(t);
      return v;
    };
    Vec x0 = ts.xbar;
    if (setup_.shape == InputShape::Impulse)
      x0 += scale * elu[k].solve(Vec(ts.dual.B.col(m)));
    Solution sol = run(ts.dual, u, x0, true);
    const auto steps = sol.x.rows();
    // dual states enter Gramians weighted by the mass matrix
    Mat cp(ts.np, steps), cq(ts.nq, steps);
    for (Eigen::Index r = 0; r < steps; ++r) {
      Vec dz = ts.dual.E * Vec(sol.x.row(r).transpose() - ts.xbar);
      cp.col(r) = dz.head(ts.np);
      cq.col(r) = dz.tail(ts.nq);
    }
    zp_[k][static_cast<std::size_t>(m)] = std::move(cp);
    zq_[k][static_cast<std::size_t>(m)] = std::move(cq);
  });
  stats_.dual_runs += static_cast<long>(jobs.size());
  have_z_ = true;
}

GramianPair GramianTrainer::wr() {
  GramianPair cached;
  cached.kind = GramianKind::WR;
  std::string key = gramian_cache_key(key_hash_, setup_, GramianKind::WR, false);
  if (gramian_cache_load(setup_.cache_dir, key, cached)) {
    ++stats_.gramian_cache_hits;
    return cached;
  }
  ensure_x();
  const int np = systems_[0].np, nq = systems_[0].nq;
  GramianPair g;
  g.kind = GramianKind::WR;
  g.Wp = Mat::Zero(np, np);
  g.Wq = Mat::Zero(nq, nq);
  for (std::size_t k = 0; k < systems_.size(); ++k)
    for (std::size_t m = 0; m < xp_[k].size(); ++m) {
      const auto cols = xp_[k][m].cols() - 1;  // left rectangle rule
      g.Wp.selfadjointView<Eigen::Lower>().rankUpdate(xp_[k][m].leftCols(cols), setup_.h);
      g.Wq.selfadjointView<Eigen::Lower>().rankUpdate(xq_[k][m].leftCols(cols), setup_.h);
    }
  g.Wp = Mat(g.Wp.selfadjointView<Eigen::Lower>());
  g.Wq = Mat(g.Wq.selfadjointView<Eigen::Lower>());
  gramian_cache_store(setup_.cache_dir, key, g);
  return g;
}

GramianPair GramianTrainer::wo(bool dual_based) {
  GramianPair g;
  g.kind = GramianKind::WO;
  g.dual_based = dual_based;
  std::string key = gramian_cache_key(key_hash_, setup_, GramianKind::WO, dual_based);
  if (gramian_cache_load(setup_.cache_dir, key, g)) {
    ++stats_.gramian_cache_hits;
    return g;
  }
  const int np = systems_[0].np, nq = systems_[0].nq;
  g.Wp = Mat::Zero(np, np);
  g.Wq = Mat::Zero(nq, nq);
  if (dual_based) {
    ensure_z();
    for (std::size_t k = 0; k < systems_.size(); ++k)
      for (std::size_t m = 0; m < zp_[k].size(); ++m) {
        const auto cols = zp_[k][m].cols() - 1;
        g.Wp.selfadjointView<Eigen::Lower>().rankUpdate(zp_[k][m].leftCols(cols), setup_.h);
        g.Wq.selfadjointView<Eigen::Lower>().rankUpdate(zq_[k][m].leftCols(cols), setup_.h);
      }
  } else {
    ensure_y();
    for (std::size_t k = 0; k < systems_.size(); ++k)
      for (std::size_t m = 0; m < yp_[k].size(); ++m) {
        const auto rows = yp_[k][m].rows() - 1;
        g.Wp.selfadjointView<Eigen::Lower>().rankUpdate(yp_[k][m].topRows(rows).transpose(),
                                                        setup_.h);
        g.Wq.selfadjointView<Eigen::Lower>().rankUpdate(yq_[k][m].topRows(rows).transpose(),
                                                        setup_.h);
      }
  }
  g.Wp = Mat(g.Wp.selfadjointView<Eigen::Lower>());
  g.Wq = Mat(g.Wq.selfadjointView<Eigen::Lower>());
  gramian_cache_store(setup_.cache_dir, key, g);
  return g;
}

GramianPair GramianTrainer::wx(bool dual_based) {
  GramianPair g;
  g.kind = GramianKind::WX;
  g.dual_based = dual_based;
  std::string key = gramian_cache_key(key_hash_, setup_, GramianKind::WX, dual_based);
  if (gramian_cache_load(setup_.cache_dir, key, g)) {
    ++stats_.gramian_cache_hits;
    return g;
  }
  const int np = systems_[0].np, nq = systems_[0].nq;
  g.Wp = Mat::Zero(np, np);
  g.Wq = Mat::Zero(nq, nq);
  ensure_x();
  if (dual_based) ensure_z();
  else ensure_y();
  for (std::size_t k = 0; k < systems_.size(); ++k)
    for (std::size_t m = 0; m < xp_[k].size(); ++m) {
      const auto cols = xp_[k][m].cols() - 1;
      if (dual_based) {
        g.Wp.noalias() += setup_.h * xp_[k][m].leftCols(cols) *
                          zp_[k][m].leftCols(cols).transpose();
        g.Wq.noalias() += setup_.h * xq_[k][m].leftCols(cols) *
                          zq_[k][m].leftCols(cols).transpose();
      } else {
        g.Wp.noalias() += setup_.h * xp_[k][m].leftCols(cols) * yp_[k][m].topRows(cols);
        g.Wq.noalias() += setup_.h * xq_[k][m].leftCols(cols) * yq_[k][m].topRows(cols);
      }
    }
  gramian_cache_store(setup_.cache_dir, key, g);
  return g;
}

GramianPair GramianTrainer::wz(bool dual_based) {
  GramianPair g;
  g.kind = GramianKind::WZ;
  g.dual_based = dual_based;
  std::string key = gramian_cache_key(key_hash_, setup_, GramianKind::WZ, dual_based);
  if (gramian_cache_load(setup_.cache_dir, key, g)) {
    ++stats_.gramian_cache_hits;
    return g;
  }
  const int np = systems_[0].np, nq = systems_[0].nq;
  g.Wp = Mat::Zero(np, np);
  g.Wq = Mat::Zero(nq, nq);
  ensure_x();
  if (dual_based) ensure_z();
  else ensure_y();
  for (std::size_t k = 0; k < systems_.size(); ++k) {
    Mat sum_p, sum_q;
    if (dual_based) {
      sum_p = Mat::Zero(zp_[k][0].cols(), np);
      sum_q = Mat::Zero(zq_[k][0].cols(), nq);
      for (std::size_t r = 0; r < zp_[k].size(); ++r) {
        sum_p += zp_[k][r].transpose();
        sum_q += zq_[k][r].transpose();
      }
    } else {
      sum_p = Mat::Zero(yp_[k][0].rows(), np);
      sum_q = Mat::Zero(yq_[k][0].rows(), nq);
      for (std::size_t r = 0; r < yp_[k].size(); ++r) {
        sum_p += yp_[k][r];
        sum_q += yq_[k][r];
      }
    }
    for (std::size_t m = 0; m < xp_[k].size(); ++m) {
      const auto cols = xp_[k][m].cols() - 1;
      g.Wp.noalias() += setup_.h * xp_[k][m].leftCols(cols) * sum_p.topRows(cols);
      g.Wq.noalias() += setup_.h * xq_[k][m].leftCols(cols) * sum_q.topRows(cols);
    }
  }
  gramian_cache_store(setup_.cache_dir, key, g);
  return g;
}

const std::vector<Mat>& GramianTrainer::snapshots_p() {
  ensure_x();
  return snaps_p_;
}

const std::vector<Mat>& GramianTrainer::snapshots_q() {
  ensure_x();
  return snaps_q_;
}

std::string gramian_cache_key(std::uint64_t model_hash, const TrainingSetup& setup,
                              GramianKind kind, bool dual_based) {
  Fnv64 f;
  f.add(model_hash);
  f.add(setup.content_hash());
  f.add(to_string(kind));
  f.add(dual_based ? "dual" : "primal");
  return hex64(f.value());
}

namespace {
void write_mat(std::ofstream& out, const Mat& m) {
  std::int64_t r = m.rows(), c = m.cols();
  out.write(reinterpret_cast<const char*>(&r), sizeof r);
  out.write(reinterpret_cast<const char*>(&c), sizeof c);
  out.write(reinterpret_cast<const char*>(m.data()), r * c * static_cast<long>(sizeof(double)));
}
bool read_mat(std::ifstream& in, Mat& m) {
  std::int64_t r = 0, c = 0;
  in.read(reinterpret_cast<char*>(&r), sizeof r);
  in.read(reinterpret_cast<char*>(&c), sizeof c);
  if (!in || r < 0 || c < 0) return false;
  m.resize(r, c);
  in.read(reinterpret_cast<char*>(m.data()), r * c * static_cast<long>(sizeof(double)));
  return static_cast<bool>(in);
}
}  // namespace

bool gramian_cache_load(const std::string& dir, const std::string& key, GramianPair& out) {
  if (dir.empty()) return false;
  std::ifstream in(dir + "/gram_" + key + ".bin", std::ios::binary);
  if (!in) return false;
  return read_mat(in, out.Wp) && read_mat(in, out.Wq);
}

void gramian_cache_store(const std::string& dir, const std::string& key, const GramianPair& g) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/gram_" + key + ".bin", std::ios::binary);
  write_mat(out, g.Wp);
  write_mat(out, g.Wq);
}

}  // namespace gasmor
