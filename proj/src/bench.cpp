#include "gasmor/bench.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace gasmor {

namespace fs = std::filesystem;

double output_norm(const std::vector<Mat>& y, double dt, int k, int l) {
  if (y.empty()) fail("bench: empty output set");
  auto time_norm = [&](const Mat& m) {
    switch (l) {
      case 0: return m.bottomRows(1).norm();
      case 1: {
        double s = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r) s += m.row(r).norm();
        return dt * s;
      }
      case 2: return std::sqrt(dt * m.squaredNorm());
      default: {
        double mx = 0;
        for (Eigen::Index r = 0; r < m.rows(); ++r) mx = std::max(mx, m.row(r).norm());
        return mx;
      }
    }
  };
  double acc = 0;
  for (const auto& m : y) {
    double n = time_norm(m);
    if (k == 1) acc += n;
    else if (k == 2) acc += n * n;
    else acc = std::max(acc, n);
  }
  return k == 2 ? std::sqrt(acc) : acc;
}

double error_norm(const std::vector<Mat>& y, const std::vector<Mat>& ytilde, double dt, int k,
                  int l, bool relative) {
  if (y.size() != ytilde.size()) fail("bench: output set size mismatch");
  if (!(k == 1 || k == 2 || k == -1)) fail("bench: k must be 1, 2 or -1 (inf)");
  if (!(l == 0 || l == 1 || l == 2 || l == -1)) fail("bench: l must be 0, 1, 2 or -1 (inf)");
  std::vector<Mat> diff;
  diff.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i].rows() != ytilde[i].rows() || y[i].cols() != ytilde[i].cols())
      fail("bench: output shape mismatch");
    diff.push_back(y[i] - ytilde[i]);
  }
  double e = output_norm(diff, dt, k, l);
  if (!relative) return e;
  double ref = output_norm(y, dt, k, l);
  if (ref == 0) fail("bench: zero reference norm in relative error");
  return e / ref;
}

double morscore(const std::vector<int>& orders, const std::vector<double>& errors, int n_max,
                double eps_mach) {
  if (orders.empty() || orders.size() != errors.size()) fail("bench: empty or ragged error curve");
  if (n_max <= 0) fail("bench: morscore needs n_max > 0");
  std::vector<std::size_t> idx(orders.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return orders[a] < orders[b];
  });
  const double le = std::log(eps_mach);
  double mu = 0, x_prev = 0;
  for (std::size_t i : idx) {
    double e = errors[i];
    if (!std::isfinite(e)) e = 1.0;  // unstable orders count as error 1
    e = std::clamp(e, eps_mach, 1.0);
    double x = std::min(1.0, static_cast<double>(orders[i]) / n_max);
    mu += (x - x_prev) * (std::log(e) / le);
    x_prev = x;
  }
  return mu;
}

ModelConfig model_config(const GlobalConfig& cfg, Discretization disc, const Scenario& scn) {
  ModelConfig mc;
  mc.disc = disc;
  mc.friction = friction_model_from(cfg.friction);
  mc.compressibility = compressibility_model_from(cfg.compressibility);
  mc.crit = CriticalPoint{cfg.pc, cfg.tc};
  mc.eta = cfg.eta;
  mc.compressor_pressures = scn.cp;
  return mc;
}

ModelBundle build_bundle(const Network& net, const Scenario& scn, Discretization disc,
                         const GlobalConfig& cfg, double dt) {
  ModelBundle b;
  b.dx = 2.0 * nominal_length(dt, cfg.v_max, cfg.eps);
  b.refinement = refine(net, b.dx);
  b.topo = incidence(b.refinement.refined);

  ModelConfig mc = model_config(cfg, disc, scn);
  DiscreteModel first = assemble(b.topo, b.refinement, mc);
  auto [s0, d0] = input_at(scn, 0.0);
  if (s0.size() != first.ns || d0.size() != first.nd)
    fail("bench: scenario has " + std::to_string(s0.size()) + "x" + std::to_string(d0.size()) +
         " ports, network needs " + std::to_string(first.ns) + "x" + std::to_string(first.nd));
  Vec qbar = steady_flux(first, d0);
  b.model = assemble(b.topo, b.refinement, mc, qbar);
  return b;
}

Prepared prepare_steady(const DiscreteModel& m, const Vec& sbar, const Vec& dbar,
                        const Params& th, const GlobalConfig& cfg) {
  Prepared pr;
  pr.gas.z0 = 1.0;
  pr.gas.d0 = 1.0 / (th.T0 * th.RS);
  auto zvar = compressibility_model_from(cfg.compressibility);
  CriticalPoint crit{cfg.pc, cfg.tc};
  std::string key = steady_cache_key(m, sbar, dbar, th);
  if (!steady_cache_load(cfg.cache_dir, key, pr.steady)) {
    pr.steady = steady_state(m, sbar, dbar, th, pr.gas);
    pr.gas = gas_state(pr.steady.pbar, th, zvar, crit);
    pr.steady = steady_state(m, sbar, dbar, th, pr.gas);
    steady_cache_store(cfg.cache_dir, key, pr.steady);
  }
  pr.gas = gas_state(pr.steady.pbar, th, zvar, crit);
  return pr;
}

std::vector<Params> theta_grid(const GlobalConfig& cfg) {
  return {
      {cfg.t0_min, cfg.rs_min},
      {cfg.t0_min, cfg.rs_max},
      {cfg.t0_max, cfg.rs_min},
      {cfg.t0_max, cfg.rs_max},
      {0.5 * (cfg.t0_min + cfg.t0_max), 0.5 * (cfg.rs_min + cfg.rs_max)},
  };
}

std::vector<Params> theta_random(const GlobalConfig& cfg, int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Params> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.push_back({rng.uniform(cfg.t0_min, cfg.t0_max), rng.uniform(cfg.rs_min, cfg.rs_max)});
  return out;
}

namespace {

TrainingSetup training_setup(const GlobalConfig& cfg) {
  TrainingSetup ts;
  ts.horizon = cfg.train_horizon;
  ts.h = cfg.dt;
  ts.shape = input_shape_from(cfg.train_shape);
  ts.input_rel = cfg.input_rel;
  ts.input_abs = cfg.input_abs;
  ts.state_rel = cfg.state_rel;
  ts.state_abs = cfg.state_abs;
  ts.solver = solver_from(cfg.solver);
  ts.gamma = cfg.gamma;
  ts.lambda = cfg.lambda;
  ts.seed = cfg.seed;
  ts.workers = cfg.workers;
  return ts;
}

std::uint64_t training_hash(const TrainingSetup& ts, const std::vector<Params>& thetas) {
  Fnv64 f;
  f.add(ts.content_hash());
  for (const auto& th : thetas) {
    f.add(th.T0);
    f.add(th.RS);
  }
  return f.value();
}

}  // namespace

OfflineResult run_offline(const Network& net, const Scenario& training, Discretization disc,
                          SolverKind solver, const std::vector<std::string>& methods,
                          const GlobalConfig& cfg, const std::string& out_dir) {
  double t_start = now_seconds();
  if (methods.empty()) fail("bench: no reduction methods requested");
  for (const auto& id : methods)
    if (method_is_dual(id) && disc != Discretization::OdeEnd)
      fail("bench: dual variant '" + id + "' is unsupported on " +
           std::string(to_string(disc)));

  ModelBundle bundle = build_bundle(net, training, disc, cfg, cfg.dt);
  const DiscreteModel& model = bundle.model;

  TrainingSetup setup = training_setup(cfg);
  setup.solver = solver;
  auto thetas = theta_grid(cfg);
  bool need_dual = std::any_of(methods.begin(), methods.end(),
                               [](const std::string& m) { return method_is_dual(m); });

  auto [s0, d0] = input_at(training, 0.0);
  std::vector<TrainingSystem> systems;
  systems.reserve(thetas.size());
  auto zvar = compressibility_model_from(cfg.compressibility);
  CriticalPoint crit{cfg.pc, cfg.tc};
  for (const auto& th : thetas)
    systems.push_back(make_training_system(model, s0, d0, th, zvar, crit, need_dual, {},
                                           cfg.cache_dir));
  // anchor metadata from the center sample
  Vec pbar = systems.back().xbar.head(model.np);
  Vec qbar = systems.back().xbar.tail(model.nq);

  setup.cache_dir = cfg.cache_dir;
  std::uint64_t th_key = training_hash(setup, thetas);
  GramianTrainer trainer(std::move(systems), setup, model.hash ^ th_key);
  const int rmax = (cfg.order_max + 1) / 2;

  fs::create_directories(out_dir);
  OfflineResult res;
  std::uint64_t th_hash = th_key;
  for (const auto& id : methods) {
    double t0 = now_seconds();
    ProjectorSeries series = reduce(id, trainer, model, rmax);
    RomFile rom;
    rom.method = id;
    rom.solver = to_string(solver);
    rom.disc = to_string(disc);
    rom.model_hash = model.hash;
    rom.training_hash = th_hash;
    rom.series = std::move(series);
    rom.pbar = pbar;
    rom.qbar = qbar;
    rom.thetas = thetas;
    std::string path = out_dir + "/" + id + ".rom";
    save_rom(path, rom);
    res.rom_files.push_back(path);
    res.seconds.emplace_back(id, now_seconds() - t0);
  }
  res.input_runs = trainer.stats().input_runs;
  res.state_runs = trainer.stats().state_runs;
  res.dual_runs = trainer.stats().dual_runs;
  res.cache_hits = trainer.stats().trajectory_cache_hits + trainer.stats().gramian_cache_hits;
  res.total_seconds = now_seconds() - t_start;

  std::ofstream csv(out_dir + "/offline.csv");
  csv << "method,seconds\n";
  for (const auto& [id, sec] : res.seconds) csv << id << "," << sec << "\n";
  csv << "# input_runs=" << res.input_runs << " state_runs=" << res.state_runs
      << " dual_runs=" << res.dual_runs << " trajectory_cache_hits=" << res.cache_hits << "\n";
  return res;
}

BenchReport run_online(const Network& net, const Scenario& test, Discretization disc,
                       SolverKind solver, const std::vector<std::string>& rom_files,
                       const GlobalConfig& cfg, const std::string& out_dir) {
  double t_start = now_seconds();
  ModelBundle bundle = build_bundle(net, test, disc, cfg, cfg.dt);
  const DiscreteModel& model = bundle.model;

  std::vector<RomFile> roms;
  for (const auto& path : rom_files) {
    RomFile r = load_rom(path);
    if (r.model_hash != model.hash)
      fail("bench: rom '" + path + "' was trained on a different model (hash mismatch)");
    if (r.solver != to_string(solver))
      fail("bench: rom '" + path + "' was trained with solver " + r.solver + ", requested " +
           to_string(solver));
    if (r.disc != to_string(disc))
      fail("bench: rom '" + path + "' was trained on " + r.disc + ", requested " +
           to_string(disc));
    roms.push_back(std::move(r));
  }
  if (roms.empty()) fail("bench: no rom files given");

  BenchReport rep;
  rep.model = to_string(disc);
  rep.solver = to_string(solver);
  rep.model_hash = model.hash;
  rep.order_max = cfg.order_max;
  rep.order_step = std::max(1, cfg.order_step);
  rep.test_thetas = theta_random(cfg, cfg.test_samples, cfg.seed);

  // reference solves: once per test parameter, reused by every method/order
  const double h = cfg.dt;
  SolveOptions fom_opts;
  fom_opts.gamma = cfg.gamma;
  fom_opts.lambda = cfg.lambda;
  std::vector<Prepared> prepared;
  std::vector<Mat> y_ref;
  double t_fom = now_seconds();
  for (const auto& th : rep.test_thetas) {
    Scenario scn = test;
    scn.T0 = th.T0;
    scn.RS = th.RS;
    auto [sb, db] = input_at(scn, 0.0);
    Prepared pr = prepare_steady(model, sb, db, th, cfg);
    Vec x0(model.state_dim());
    x0 << pr.steady.pbar, pr.steady.qbar;
    Solution sol = solve_scenario(solver, model, scn, h, pr.gas, x0, fom_opts);
    if (sol.blew_up) fail("bench: full-order reference solve blew up");
    y_ref.push_back(sol.y);
    prepared.push_back(std::move(pr));
    ++rep.fom_solves;
  }
  rep.fom_seconds = now_seconds() - t_fom;

  std::vector<int> orders;
  for (int n = rep.order_step; n <= cfg.order_max; n += rep.order_step) orders.push_back(n);

  struct Job {
    std::size_t rom;
    std::size_t ord;
  };
  std::vector<Job> jobs;
  for (std::size_t r = 0; r < roms.size(); ++r)
    for (std::size_t o = 0; o < orders.size(); ++o) jobs.push_back({r, o});

  std::vector<std::vector<double>> errors(roms.size(),
                                          std::vector<double>(orders.size(), 1.0));
  std::vector<double> method_secs(roms.size(), 0.0);
  std::mutex secs_mutex;
  int workers = cfg.workers > 0 ? cfg.workers : default_workers();
  parallel_for(jobs.size(), workers, [&](std::size_t j) {
    const double job_t0 = now_seconds();
    const auto [ri, oi] = jobs[j];
    const RomFile& rom = roms[ri];
    int n = orders[oi];
    int np_r = std::min((n + 1) / 2, rom.series.rank_p());
    int nq_r = std::min(n / 2, rom.series.rank_q());
    if (nq_r < 1) nq_r = std::min(1, rom.series.rank_q());
    std::vector<Mat> y_rom;
    bool unstable = false;
    for (std::size_t ti = 0; ti < rep.test_thetas.size(); ++ti) {
      Scenario scn = test;
      scn.T0 = rep.test_thetas[ti].T0;
      scn.RS = rep.test_thetas[ti].RS;
      const Prepared& pr = prepared[ti];
      ReducedModel rm = project(model, rom.series, np_r, nq_r, pr.steady.pbar, pr.steady.qbar);
      SolveOptions o;
      o.gamma = cfg.gamma;
      o.lambda = cfg.lambda;
      Solution sol;
      try {
        sol = simulate_rom(rm, scn, solver, h, pr.gas, o);
      } catch (const Error&) {
        unstable = true;  // e.g. singular reduced iteration matrix
        break;
      }
      if (sol.blew_up || !sol.y.allFinite()) {
        unstable = true;
        break;
      }
      y_rom.push_back(sol.y);
    }
    errors[ri][oi] = unstable ? std::numeric_limits<double>::infinity()
                              : error_norm(y_ref, y_rom, h, 2, 2, true);
    std::lock_guard<std::mutex> lock(secs_mutex);
    method_secs[ri] += now_seconds() - job_t0;
  });

  for (std::size_t r = 0; r < roms.size(); ++r) {
    MethodCurve c;
    c.method = roms[r].method;
    c.orders = orders;
    c.errors = errors[r];
    for (double e : c.errors)
      if (!std::isfinite(e)) ++c.unstable;
    c.score = morscore(orders, c.errors, cfg.order_max);
    c.online_seconds = method_secs[r];
    rep.curves.push_back(std::move(c));
  }
  rep.total_seconds = now_seconds() - t_start;
  if (!out_dir.empty()) write_report(rep, cfg, out_dir);
  return rep;
}

void write_report(const BenchReport& rep, const GlobalConfig& cfg, const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::create_directories(out_dir + "/curves");
  fs::create_directories(out_dir + "/plots");

  std::ofstream csv(out_dir + "/report.csv");
  csv << "method,morscore,unstable_orders,online_seconds\n";
  for (const auto& c : rep.curves)
    csv << c.method << "," << std::setprecision(4) << c.score << "," << c.unstable << ","
        << c.online_seconds << "\n";

  for (const auto& c : rep.curves) {
    std::ofstream cc(out_dir + "/curves/" + c.method + ".csv");
    cc << "order,relative_error\n";
    cc << std::setprecision(17);
    for (std::size_t i = 0; i < c.orders.size(); ++i) {
      cc << c.orders[i] << ",";
      if (std::isfinite(c.errors[i])) cc << c.errors[i];
      else cc << "inf";
      cc << "\n";
    }
  }
  write_svg_curves(out_dir + "/plots/errors.svg", rep.curves, rep.order_max);

  std::map<std::string, std::string> extra;
  extra["model"] = rep.model;
  extra["solver"] = rep.solver;
  extra["model_hash"] = hex64(rep.model_hash);
  extra["fom_solves"] = std::to_string(rep.fom_solves);
  extra["order_max"] = std::to_string(rep.order_max);
  extra["order_step"] = std::to_string(rep.order_step);
  std::ostringstream th;
  th << std::setprecision(17);
  for (const auto& t : rep.test_thetas) th << t.T0 << ":" << t.RS << ";";
  extra["test_thetas"] = th.str();
  write_manifest(out_dir + "/meta.json", cfg, extra);
}

Scenario randomized_scenario(const Scenario& base, double horizon, int breakpoints,
                             double rel_amplitude, std::uint64_t seed) {
  if (breakpoints < 1) fail("bench: randomized scenario needs at least one breakpoint");
  Rng rng(seed);
  Scenario s = base;
  s.tH = horizon;
  s.ut.clear();
  auto nb = static_cast<Eigen::Index>(breakpoints);
  s.up.resize(nb, base.up.cols());
  s.uq.resize(nb, base.uq.cols());
  for (Eigen::Index b = 0; b < nb; ++b) {
    s.ut.push_back(horizon * static_cast<double>(b) / breakpoints);
    for (Eigen::Index c = 0; c < base.up.cols(); ++c) s.up(b, c) = base.up(0, c);
    for (Eigen::Index c = 0; c < base.uq.cols(); ++c)
      s.uq(b, c) = base.uq(0, c) * (1.0 + rng.uniform(-rel_amplitude, rel_amplitude));
  }
  return s;
}

void write_svg_curves(const std::string& path, const std::vector<MethodCurve>& curves,
                      int order_max) {
  const int w = 720, hgt = 480, ml = 60, mr = 180, mt = 20, mb = 40;
  const double lo = 1e-16, hi = 1.0;
  auto xpix = [&](double n) { return ml + (w - ml - mr) * (n / order_max); };
  auto ypix = [&](double e) {
    double z = (std::log10(std::clamp(e, lo, hi)) - std::log10(hi)) /
               (std::log10(lo) - std::log10(hi));
    return mt + (hgt - mt - mb) * z;
  };
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e",
                                  "#e6ab02", "#a6761d", "#666666", "#1f78b4", "#b2df8a",
                                  "#fb9a99", "#cab2d6", "#ffff99"};
  std::ofstream out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << hgt << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  for (int d = 0; d >= -16; d -= 4) {
    double y = ypix(std::pow(10.0, d));
    out << "<line x1='" << ml << "' y1='" << y << "' x2='" << w - mr << "' y2='" << y
        << "' stroke='#ddd'/>\n";
    out << "<text x='5' y='" << y + 4 << "' font-size='11'>1e" << d << "</text>\n";
  }
  out << "<line x1='" << ml << "' y1='" << hgt - mb << "' x2='" << w - mr << "' y2='" << hgt - mb
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << hgt - mb
      << "' stroke='black'/>\n";
  out << "<text x='" << (w - mr + ml) / 2 << "' y='" << hgt - 10
      << "' font-size='12'>reduced order</text>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& cv = curves[c];
    const char* color = palette[c % 13];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (std::size_t i = 0; i < cv.orders.size(); ++i) {
      double e = std::isfinite(cv.errors[i]) ? cv.errors[i] : 1.0;
      out << xpix(cv.orders[i]) << "," << ypix(e) << " ";
    }
    out << "'/>\n";
    double ly = mt + 16.0 * static_cast<double>(c + 1);
    out << "<line x1='" << w - mr + 10 << "' y1='" << ly << "' x2='" << w - mr + 30 << "' y2='"
        << ly << "' stroke='" << color << "' stroke-width='2'/>\n";
    out << "<text x='" << w - mr + 35 << "' y='" << ly + 4 << "' font-size='11'>" << cv.method
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_solution_csv(const std::string& path, const Solution& sol, int ns, int nd) {
  std::ofstream out(path);
  out << "t";
  for (int i = 0; i < ns; ++i) out << ",s_q" << i;
  for (int i = 0; i < nd; ++i) out << ",d_p" << i;
  out << "\n" << std::setprecision(17);
  for (Eigen::Index r = 0; r < sol.t.size(); ++r) {
    out << sol.t(r);
    for (Eigen::Index c = 0; c < sol.y.cols(); ++c) out << "," << sol.y(r, c);
    out << "\n";
  }
}

void write_svg_timeseries(const std::string& path, const Solution& sol, int ns, int nd) {
  const int w = 720, hgt = 420, ml = 60, mr = 120, mt = 20, mb = 40;
  double lo = sol.y.minCoeff(), hi = sol.y.maxCoeff();
  if (hi - lo < 1e-12) {
    hi += 1.0;
    lo -= 1.0;
  }
  double t_end = sol.t(sol.t.size() - 1);
  auto xpix = [&](double t) { return ml + (w - ml - mr) * (t / t_end); };
  auto ypix = [&](double v) { return mt + (hgt - mt - mb) * (1.0 - (v - lo) / (hi - lo)); };
  static const char* palette[] = {"#1b9e77", "#d95f02", "#7570b3", "#e7298a",
                                  "#66a61e", "#e6ab02", "#a6761d", "#666666"};
  std::ofstream out(path);
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='" << hgt << "'>\n";
  out << "<rect width='100%' height='100%' fill='white'/>\n";
  out << "<line x1='" << ml << "' y1='" << hgt - mb << "' x2='" << w - mr << "' y2='" << hgt - mb
      << "' stroke='black'/>\n";
  out << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << hgt - mb
      << "' stroke='black'/>\n";
  out << "<text x='5' y='" << ypix(hi) + 4 << "' font-size='11'>" << hi << "</text>\n";
  out << "<text x='5' y='" << ypix(lo) + 4 << "' font-size='11'>" << lo << "</text>\n";
  out << "<text x='" << (w - mr + ml) / 2 << "' y='" << hgt - 10
      << "' font-size='12'>t [s]</text>\n";
  const auto stride = std::max<Eigen::Index>(1, sol.t.size() / 720);
  for (Eigen::Index c = 0; c < sol.y.cols(); ++c) {
    const char* color = palette[c % 8];
    out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
    for (Eigen::Index r = 0; r < sol.t.size(); r += stride)
      out << xpix(sol.t(r)) << "," << ypix(sol.y(r, c)) << " ";
    out << "'/>\n";
    std::string name = c < ns ? "s_q" + std::to_string(c) : "d_p" + std::to_string(c - ns);
    double ly = mt + 16.0 * static_cast<double>(c + 1);
    out << "<line x1='" << w - mr + 10 << "' y1='" << ly << "' x2='" << w - mr + 30 << "' y2='"
        << ly << "' stroke='" << color << "' stroke-width='2'/>\n";
    out << "<text x='" << w - mr + 35 << "' y='" << ly + 4 << "' font-size='11'>" << name
        << "</text>\n";
  }
  out << "</svg>\n";
}

void write_manifest(const std::string& path, const GlobalConfig& cfg,
                    const std::map<std::string, std::string>& extra) {
  nlohmann::json j;
  for (const auto& [k, v] : cfg.as_map()) j["config"][k] = v;
  for (const auto& [k, v] : extra) j["run"][k] = v;
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

}  // namespace gasmor
