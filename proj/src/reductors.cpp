#include "gasmor/reductors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

namespace gasmor {

namespace {

constexpr double kTsvdRel = 1e-12;    // relative truncation inside tSVD/tEVD
constexpr double kBalanceRel = 1e-14; // balancing breakdown threshold
constexpr double kImagRel = 1e-8;     // acceptable eigenvalue imaginary part


struct Block {
  Mat U, V;
  Vec w;
};

int capped(Eigen::Index have, int rmax) {
  return static_cast<int>(rmax > 0 ? std::min<Eigen::Index>(have, rmax) : have);
}

/// Symmetric tSVD: eigen-decomposition sorted by |eigenvalue|.
void tsvd_sym(const Mat& w, int rmax, Mat& u, Vec& sv) {
  Mat ws = 0.5 * (w + w.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(ws);
  if (es.info() != Eigen::Success) fail("reductors: symmetric eigendecomposition failed");
  const auto n = ws.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(es.eigenvalues()(a)) > std::abs(es.eigenvalues()(b));
  });
  double top = n > 0 ? std::abs(es.eigenvalues()(order[0])) : 0.0;
  Eigen::Index rank = 0;
  while (rank < n && std::abs(es.eigenvalues()(order[static_cast<std::size_t>(rank)])) >
                         kTsvdRel * top)
    ++rank;
  int r = capped(rank, rmax);
  u.resize(n, r);
  sv.resize(r);
  for (int i = 0; i < r; ++i) {
    u.col(i) = es.eigenvectors().col(order[static_cast<std::size_t>(i)]);
    sv(i) = std::abs(es.eigenvalues()(order[static_cast<std::size_t>(i)]));
  }
}

/// General thin tSVD.
void tsvd(const Mat& m, int rmax, Mat& u, Vec& sv, Mat* v = nullptr) {
  Eigen::BDCSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  double top = s.size() ? s(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > kTsvdRel * top) ++rank;
  int r = capped(rank, rmax);
  u = svd.matrixU().leftCols(r);
  sv = s.head(r);
  if (v) *v = svd.matrixV().leftCols(r);
}

/// Sorted eigen-pairs of a real (generally non-symmetric) matrix with
/// columns scaled by |lambda|^expo. Eigenvalues sort by magnitude, real-part
/// dominance breaks ties. Near-real eigenvalues keep their real vector; a
/// genuinely complex conjugate pair contributes its real invariant subspace
/// [Re v, Im v] so the balanced series stays real and usable.
Mat scaled_eigvecs(const Mat& m, double expo, Vec* absw = nullptr) {
  Eigen::EigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) fail("reductors: eigendecomposition failed");
  const auto n = m.rows();
  Eigen::VectorXcd lam = es.eigenvalues();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    double ma = std::abs(lam(a)), mb = std::abs(lam(b));
    if (ma != mb) return ma > mb;
    if (lam(a).real() != lam(b).real()) return lam(a).real() > lam(b).real();
    return a < b;
  });
  double top = n > 0 ? std::abs(lam(order[0])) : 0.0;
  std::vector<Vec> cols;
  std::vector<double> mags;
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (Eigen::Index c = 0; c < n; ++c) {
    auto i = order[static_cast<std::size_t>(c)];
    if (used[static_cast<std::size_t>(i)]) continue;
    used[static_cast<std::size_t>(i)] = 1;
    double mag = std::abs(lam(i));
    if (mag <= kTsvdRel * top) break;
    double scale = std::pow(mag, expo);
    if (std::abs(lam(i).imag()) <= kImagRel * top) {
      Vec vr = es.eigenvectors().col(i).real();
      double nrm = vr.norm();
      if (nrm == 0) fail("reductors: degenerate eigenvector");
      cols.push_back(vr * (scale / nrm));
      mags.push_back(mag);
    } else {
      // mark the conjugate partner as consumed
      for (Eigen::Index j = 0; j < n; ++j)
        if (!used[static_cast<std::size_t>(j)] &&
            std::abs(lam(j) - std::conj(lam(i))) <= 1e-10 * (1.0 + mag)) {
          used[static_cast<std::size_t>(j)] = 1;
          break;
        }
      Vec vr = es.eigenvectors().col(i).real();
      Vec vi = es.eigenvectors().col(i).imag();
      if (vr.norm() > 0) {
        cols.push_back(vr * (scale / vr.norm()));
        mags.push_back(mag);
      }
      if (vi.norm() > 0) {
        cols.push_back(vi * (scale / vi.norm()));
        mags.push_back(mag);
      }
    }
  }
  Mat t(n, static_cast<Eigen::Index>(cols.size()));
  if (absw) absw->resize(static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    t.col(static_cast<Eigen::Index>(c)) = cols[c];
    if (absw) (*absw)(static_cast<Eigen::Index>(c)) = mags[c];
  }
  return t;
}

/// Final balancing step shared by all Petrov-Galerkin variants:
/// svd(T_o^T T_r) -> U = T_r V_b D^-1/2, V = T_o U_b D^-1/2.
Block balance_from_factors(const Mat& tr, const Mat& to, int rmax) {
  if (tr.cols() == 0 || to.cols() == 0) fail("reductors: empty balancing factors (zero Gramian)");
  Mat s = to.transpose() * tr;
  Eigen::BDCSVD<Mat> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& d = svd.singularValues();
  double top = d.size() ? d(0) : 0.0;
  Eigen::Index rank = 0;
  while (rank < d.size() && d(rank) > kBalanceRel * top) ++rank;
  int r = capped(rank, rmax);
  Block b;
  Vec dinv = d.head(r).array().sqrt().inverse().matrix();
  b.U = tr * svd.matrixV().leftCols(r) * dinv.asDiagonal();
  b.V = to * svd.matrixU().leftCols(r) * dinv.asDiagonal();
  b.w = d.head(r);
  return b;
}

Block pod_block(const Mat& w, int rmax) {
  Block b;
  tsvd_sym(w, rmax, b.U, b.w);
  b.w = b.w.array().sqrt().matrix();
  b.V = b.U;
  return b;
}

Block ds_ro_block(const Mat& wr, const Mat& wo, int rmax) {
  Mat ur, uo;
  Vec dr, dw;
  double nr = wr.norm(), no = wo.norm();
  if (nr == 0 && no == 0) fail("reductors: zero Gramians (no subspace)");
  Mat cat;
  if (nr > 0 && no > 0) {
    tsvd_sym(wr, 0, ur, dr);
    tsvd_sym(wo, 0, uo, dw);
    cat.resize(wr.rows(), ur.cols() + uo.cols());
    cat << (1.0 / nr) * ur * dr.asDiagonal(), (1.0 / no) * uo * dw.asDiagonal();
  } else if (nr > 0) {
    tsvd_sym(wr, 0, ur, dr);
    cat = (1.0 / nr) * ur * dr.asDiagonal();
  } else {
    tsvd_sym(wo, 0, uo, dw);
    cat = (1.0 / no) * uo * dw.asDiagonal();
  }
  Block b;
  tsvd(cat, rmax, b.U, b.w);
  b.V = b.U;
  return b;
}

Block ds_cross_block(const Mat& wx, int rmax) {
  if (wx.norm() == 0) fail("reductors: zero Gramian (no subspace)");
  Mat ux, vx;
  Vec dx;
  tsvd(wx, 0, ux, dx, &vx);
  Mat cat(wx.rows(), 2 * ux.cols());
  cat << ux * dx.asDiagonal(), vx * dx.asDiagonal();
  Block b;
  tsvd(cat, rmax, b.U, b.w);
  b.V = b.U;
  return b;
}

Block ebt_ro_block(const Mat& wr, const Mat& wo, int rmax) {
  Mat prod = wr * wo;
  Mat tr = scaled_eigvecs(prod, 0.25);
  Mat to = scaled_eigvecs(prod.transpose(), 0.25);
  auto c = std::min(tr.cols(), to.cols());
  return balance_from_factors(tr.leftCols(c), to.leftCols(c), rmax);
}

Block ebt_cross_block(const Mat& wx, int rmax) {
  Mat tr = scaled_eigvecs(wx, 0.5);
  Mat to = scaled_eigvecs(wx.transpose(), 0.5);
  auto c = std::min(tr.cols(), to.cols());
  return balance_from_factors(tr.leftCols(c), to.leftCols(c), rmax);
}

Block bpod_block(const Mat& wr, const Mat& wo, int rmax) {
  Mat ur, uo;
  Vec dr, dw;
  tsvd_sym(wr, 0, ur, dr);
  tsvd_sym(wo, 0, uo, dw);
  Mat lr = ur * dr.array().sqrt().matrix().asDiagonal();
  Mat lo = uo * dw.array().sqrt().matrix().asDiagonal();
  return balance_from_factors(lr, lo, rmax);
}

/// Basis from the dominant spectral content of the identified operator: a
/// plain tSVD of A ranks directions by one-step amplification ratios, which
/// noise-level excitations dominate, so the singular vectors are taken from
/// the operator applied to the data, A X- = X+ V V^T (computed as X+ V).
Block dmd_block(const std::vector<Mat>& snaps, int rmax) {
  if (snaps.empty()) fail("reductors: dmd needs snapshot trajectories");
  Eigen::Index n = snaps[0].rows(), total = 0;
  for (const auto& s : snaps) {
    if (s.cols() < 2) fail("reductors: dmd needs at least 2 snapshots per trajectory");
    total += s.cols() - 1;
  }
  Mat xm(n, total), xp(n, total);
  Eigen::Index at = 0;
  for (const auto& s : snaps) {
    auto k = s.cols() - 1;
    xm.middleCols(at, k) = s.leftCols(k);
    xp.middleCols(at, k) = s.rightCols(k);
    at += k;
  }
  if (xm.cwiseAbs().maxCoeff() == 0) fail("reductors: dmd snapshots are all zero after centering");
  Eigen::BDCSVD<Mat> svd(xm, Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > kTsvdRel * sv(0)) ++rank;
  Block b;
  tsvd(Mat(xp * svd.matrixV().leftCols(rank)), rmax, b.U, b.w);
  b.V = b.U;
  return b;
}

void sort_by_gains(Mat& u, Mat& v, Vec& w, const Mat& c) {
  const auto r = u.cols();
  Vec gain(r);
  for (Eigen::Index k = 0; k < r; ++k) gain(k) = c.col(k).squaredNorm() * w(k);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return gain(a) > gain(b); });
  Mat un(u.rows(), r), vn(v.rows(), r);
  Vec wn(r);
  for (Eigen::Index k = 0; k < r; ++k) {
    un.col(k) = u.col(order[static_cast<std::size_t>(k)]);
    vn.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    wn(k) = gain(order[static_cast<std::size_t>(k)]);
  }
  u = un;
  v = vn;
  w = wn;
}

ProjectorSeries from_blocks(Block p, Block q, bool galerkin, std::string method) {
  ProjectorSeries s;
  s.Up = std::move(p.U);
  s.Vp = std::move(p.V);
  s.wp = std::move(p.w);
  s.Uq = std::move(q.U);
  s.Vq = std::move(q.V);
  s.wq = std::move(q.w);
  s.galerkin = galerkin;
  s.method = std::move(method);
  return s;
}

}  // namespace

Mat dmd_operator(const std::vector<Mat>& snaps) {
  if (snaps.empty()) fail("reductors: dmd needs snapshot trajectories");
  Eigen::Index n = snaps[0].rows(), total = 0;
  for (const auto& s : snaps) {
    if (s.cols() < 2) fail("reductors: dmd needs at least 2 snapshots per trajectory");
    total += s.cols() - 1;
  }
  Mat xm(n, total), xp(n, total);
  Eigen::Index at = 0;
  for (const auto& s : snaps) {
    auto k = s.cols() - 1;
    xm.middleCols(at, k) = s.leftCols(k);
    xp.middleCols(at, k) = s.rightCols(k);
    at += k;
  }
  if (xm.cwiseAbs().maxCoeff() == 0) fail("reductors: dmd snapshots are all zero after centering");

  // A = X+ pinv(X-) via a truncated SVD pseudoinverse
  Eigen::BDCSVD<Mat> svd(xm, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& sv = svd.singularValues();
  double top = sv(0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv(rank) > kTsvdRel * top) ++rank;
  return xp * svd.matrixV().leftCols(rank) * sv.head(rank).cwiseInverse().asDiagonal() *
         svd.matrixU().leftCols(rank).transpose();
}

ProjectorSeries pod(const GramianPair& wr, int rmax) {
  return from_blocks(pod_block(wr.Wp, rmax), pod_block(wr.Wq, rmax), true, "pod_r");
}

ProjectorSeries goal_oriented_sort(ProjectorSeries s, const DiscreteModel& m) {
  sort_by_gains(s.Up, s.Vp, s.wp, Mat(Mat(m.Cdp) * s.Up));
  sort_by_gains(s.Uq, s.Vq, s.wq, Mat(Mat(m.Csq) * s.Uq));
  s.method = "gopod_r";
  return s;
}

ProjectorSeries dmd_galerkin(const std::vector<Mat>& snaps_p, const std::vector<Mat>& snaps_q,
                             int rmax) {
  return from_blocks(dmd_block(snaps_p, rmax), dmd_block(snaps_q, rmax), true, "dmd_r");
}

ProjectorSeries dominant_subspaces_ro(const GramianPair& wr, const GramianPair& wo, int rmax) {
  return from_blocks(ds_ro_block(wr.Wp, wo.Wp, rmax), ds_ro_block(wr.Wq, wo.Wq, rmax), true,
                     "eds_ro");
}

ProjectorSeries dominant_subspaces_cross(const GramianPair& wx, int rmax) {
  return from_blocks(ds_cross_block(wx.Wp, rmax), ds_cross_block(wx.Wq, rmax), true,
                     wx.kind == GramianKind::WZ ? "eds_wz" : "eds_wx");
}

ProjectorSeries balance_ro(const GramianPair& wr, const GramianPair& wo, int rmax) {
  return from_blocks(ebt_ro_block(wr.Wp, wo.Wp, rmax), ebt_ro_block(wr.Wq, wo.Wq, rmax), false,
                     "ebt_ro");
}

ProjectorSeries balance_cross(const GramianPair& wx, int rmax) {
  return from_blocks(ebt_cross_block(wx.Wp, rmax), ebt_cross_block(wx.Wq, rmax), false,
                     wx.kind == GramianKind::WZ ? "ebt_wz" : "ebt_wx");
}

ProjectorSeries balance_bpod(const GramianPair& wr, const GramianPair& wo, int rmax) {
  return from_blocks(bpod_block(wr.Wp, wo.Wp, rmax), bpod_block(wr.Wq, wo.Wq, rmax), false,
                     "bpod_ro");
}

ProjectorSeries sort_balanced_gains(ProjectorSeries s, const DiscreteModel& m) {
  sort_by_gains(s.Up, s.Vp, s.wp, Mat(Mat(m.Cdp) * s.Up));
  sort_by_gains(s.Uq, s.Vq, s.wq, Mat(Mat(m.Csq) * s.Uq));
  if (s.method.rfind("ebt", 0) == 0) s.method = "ebg" + s.method.substr(3);
  return s;
}

const std::vector<std::string>& all_method_ids() {
  static const std::vector<std::string> ids = {
      "pod_r",  "eds_ro", "eds_wx", "eds_wz", "bpod_ro", "ebt_ro", "ebt_wx",
      "ebt_wz", "gopod_r", "ebg_ro", "ebg_wx", "ebg_wz", "dmd_r"};
  return ids;
}

bool method_is_dual(const std::string& id) {
  return id.size() > 2 && id.compare(id.size() - 2, 2, "_l") == 0;
}

bool method_is_galerkin(const std::string& id) {
  return id.rfind("pod", 0) == 0 || id.rfind("gopod", 0) == 0 || id.rfind("dmd", 0) == 0 ||
         id.rfind("eds", 0) == 0;
}

ProjectorSeries reduce(const std::string& method, GramianTrainer& trainer,
                       const DiscreteModel& model, int rmax) {
  std::string base = method;
  bool dual = method_is_dual(method);
  if (dual) base = method.substr(0, method.size() - 2);
  if (dual && model.disc != Discretization::OdeEnd)
    fail("reductors: dual-based variant '" + method + "' needs the endpoint model");

  ProjectorSeries s;
  if (base == "pod_r") {
    s = pod(trainer.wr(), rmax);
  } else if (base == "gopod_r") {
    s = goal_oriented_sort(pod(trainer.wr(), rmax), model);
  } else if (base == "dmd_r") {
    s = dmd_galerkin(trainer.snapshots_p(), trainer.snapshots_q(), rmax);
  } else if (base == "eds_ro") {
    s = dominant_subspaces_ro(trainer.wr(), trainer.wo(dual), rmax);
  } else if (base == "eds_wx") {
    s = dominant_subspaces_cross(trainer.wx(dual), rmax);
  } else if (base == "eds_wz") {
    s = dominant_subspaces_cross(trainer.wz(dual), rmax);
  } else if (base == "bpod_ro") {
    s = balance_bpod(trainer.wr(), trainer.wo(dual), rmax);
  } else if (base == "ebt_ro") {
    s = balance_ro(trainer.wr(), trainer.wo(dual), rmax);
  } else if (base == "ebt_wx") {
    s = balance_cross(trainer.wx(dual), rmax);
  } else if (base == "ebt_wz") {
    s = balance_cross(trainer.wz(dual), rmax);
  } else if (base == "ebg_ro") {
    s = sort_balanced_gains(balance_ro(trainer.wr(), trainer.wo(dual), rmax), model);
  } else if (base == "ebg_wx") {
    s = sort_balanced_gains(balance_cross(trainer.wx(dual), rmax), model);
  } else if (base == "ebg_wz") {
    s = sort_balanced_gains(balance_cross(trainer.wz(dual), rmax), model);
  } else {
    fail("reductors: unknown method '" + method + "'");
  }
  s.method = method;
  return s;
}

// ---- .rom container ----

namespace {

constexpr char kMagic[8] = {'G', 'A', 'S', 'R', 'O', 'M', '0', '1'};

void write_str(std::ofstream& out, const std::string& s) {
  std::uint32_t n = static_cast<std::uint32_t>(s.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof n);
  out.write(s.data(), n);
}

std::string read_str(std::ifstream& in) {
  std::uint32_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof n);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

void write_mat(std::ofstream& out, const Mat& m) {
  std::int64_t r = m.rows(), c = m.cols();
  out.write(reinterpret_cast<const char*>(&r), sizeof r);
  out.write(reinterpret_cast<const char*>(&c), sizeof c);
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * r * c);
}

Mat read_matrix(std::ifstream& in) {
  std::int64_t r = 0, c = 0;
  in.read(reinterpret_cast<char*>(&r), sizeof r);
  in.read(reinterpret_cast<char*>(&c), sizeof c);
  if (!in || r < 0 || c < 0) fail("reductors: corrupt .rom matrix header");
  Mat m(r, c);
  in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(sizeof(double)) * r * c);
  return m;
}

}  // namespace

void save_rom(const std::string& path, const RomFile& rom) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("reductors: cannot write '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  write_str(out, rom.method);
  write_str(out, rom.solver);
  write_str(out, rom.disc);
  out.write(reinterpret_cast<const char*>(&rom.model_hash), sizeof rom.model_hash);
  out.write(reinterpret_cast<const char*>(&rom.training_hash), sizeof rom.training_hash);
  std::uint8_t gal = rom.series.galerkin ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&gal), sizeof gal);
  write_mat(out, rom.series.Up);
  write_mat(out, rom.series.Vp);
  write_mat(out, rom.series.Uq);
  write_mat(out, rom.series.Vq);
  write_mat(out, rom.series.wp);
  write_mat(out, rom.series.wq);
  write_mat(out, rom.pbar);
  write_mat(out, rom.qbar);
  std::uint32_t nth = static_cast<std::uint32_t>(rom.thetas.size());
  out.write(reinterpret_cast<const char*>(&nth), sizeof nth);
  for (const auto& th : rom.thetas) {
    out.write(reinterpret_cast<const char*>(&th.T0), sizeof th.T0);
    out.write(reinterpret_cast<const char*>(&th.RS), sizeof th.RS);
  }
  if (!out) fail("reductors: write failed for '" + path + "'");
}

RomFile load_rom(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("reductors: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
    fail("reductors: '" + path + "' is not a .rom container");
  RomFile rom;
  rom.method = read_str(in);
  rom.solver = read_str(in);
  rom.disc = read_str(in);
  in.read(reinterpret_cast<char*>(&rom.model_hash), sizeof rom.model_hash);
  in.read(reinterpret_cast<char*>(&rom.training_hash), sizeof rom.training_hash);
  std::uint8_t gal = 0;
  in.read(reinterpret_cast<char*>(&gal), sizeof gal);
  rom.series.galerkin = gal != 0;
  rom.series.method = rom.method;
  rom.series.Up = read_matrix(in);
  rom.series.Vp = read_matrix(in);
  rom.series.Uq = read_matrix(in);
  rom.series.Vq = read_matrix(in);
  rom.series.wp = Vec(read_matrix(in));
  rom.series.wq = Vec(read_matrix(in));
  rom.pbar = Vec(read_matrix(in));
  rom.qbar = Vec(read_matrix(in));
  std::uint32_t nth = 0;
  in.read(reinterpret_cast<char*>(&nth), sizeof nth);
  for (std::uint32_t i = 0; i < nth; ++i) {
    Params th;
    in.read(reinterpret_cast<char*>(&th.T0), sizeof th.T0);
    in.read(reinterpret_cast<char*>(&th.RS), sizeof th.RS);
    rom.thetas.push_back(th);
  }
  if (!in) fail("reductors: truncated .rom file '" + path + "'");
  return rom;
}

}  // namespace gasmor
