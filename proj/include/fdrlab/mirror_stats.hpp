#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdrlab/lasso_path.hpp"
#include "fdrlab/rng.hpp"
#include "fdrlab/signal.hpp"
#include "fdrlab/tamper.hpp"

namespace fdrlab {

enum class StatKind { signed_max, difference };
enum class RankerKind { lasso_path, least_squares };

inline const char* to_string(StatKind k) { return k == StatKind::signed_max ? "sgm" : "dif"; }
inline const char* to_string(RankerKind k) {
  return k == RankerKind::lasso_path ? "lasso-path" : "least-squares";
}

// f(Z, Ztilde) with f(v,u) = -f(u,v); ties map to the negative branch.
inline double signed_max(double z, double ztilde) {
  if (z < 0.0 || ztilde < 0.0) throw std::invalid_argument("signed_max: inputs must be nonnegative");
  const double m = std::max(z, ztilde);
  return (z > ztilde) ? m : -m;
}

inline double difference(double z, double ztilde) { return z - ztilde; }

inline double symmetric_stat(double z, double ztilde, StatKind kind) {
  return kind == StatKind::signed_max ? signed_max(z, ztilde) : difference(z, ztilde);
}

// mirror statistics on a (beta_plus, beta_minus) pair
inline double mirror_stat(double b_plus, double b_minus, StatKind kind) {
  if (kind == StatKind::difference) return std::abs(b_plus + b_minus) - std::abs(b_plus - b_minus);
  const double sp = (b_plus > 0) - (b_plus < 0);
  const double sm = (b_minus > 0) - (b_minus < 0);
  return (std::abs(b_plus) + std::abs(b_minus)) * sp * sm;
}

struct ScoreVector {
  Eigen::VectorXd scores;
  Eigen::VectorXd z;       // raw pair the scores came from
  Eigen::VectorXd ztilde;
  StatKind stat_kind = StatKind::signed_max;
  std::string method_tag;
};

// ---------------------------------------------------------------------------
// knockoff scores

// Design blocks (the Gram is block diagonal over these index ranges); used to
// decompose the 2p lasso into small per-block paths.
struct BlockStructure {
  std::vector<std::pair<int, int>> blocks;  // (start, size)
  static BlockStructure single(int p) { return {{{0, p}}}; }
  static BlockStructure uniform(int p, int d) {
    BlockStructure b;
    for (int s = 0; s + d <= p; s += d) b.blocks.push_back({s, d});
    if (p % d) b.blocks.push_back({p - p % d, p % d});
    return b;
  }
};

inline BlockStructure block_structure_for(const DesignSpec& spec) {
  switch (spec.kind) {
    case DesignKind::orthogonal: return BlockStructure::uniform(spec.p, 1);
    case DesignKind::block2: return BlockStructure::uniform(spec.p, 2);
    case DesignKind::block_d: return BlockStructure::uniform(spec.p, spec.d);
    default: return BlockStructure::single(spec.p);
  }
}

namespace detail {

// entry times on the augmented design, decomposed per design block
inline void knockoff_entry_times(const Eigen::MatrixXd& G, const SVector& s, const Eigen::VectorXd& h,
                                 const Eigen::VectorXd& htilde, const BlockStructure& blocks,
                                 Eigen::VectorXd& z, Eigen::VectorXd& zt) {
  const int p = static_cast<int>(G.rows());
  z.resize(p);
  zt.resize(p);
  for (auto [start, d] : blocks.blocks) {
    if (d == 1) {
      const double a = 1.0 - s.s[start];  // x_j' xt_j
      auto [e1, e2] = bivariate_entry_times(h[start], htilde[start], a);
      z[start] = e1;
      zt[start] = e2;
      continue;
    }
    if (d == 2) {
      const double rho = G(start, start + 1);
      const bool degenerate_ec = std::abs(rho) >= 0.5 &&
                                 std::abs(s.s[start] - (2.0 - 2.0 * std::abs(rho))) < 1e-9 &&
                                 std::abs(s.s[start + 1] - s.s[start]) < 1e-9;
      if (degenerate_ec) {
        QuadEntry q = quad_degenerate_path_from_h(
            {h[start], h[start + 1], htilde[start], htilde[start + 1]}, rho);
        z[start] = q.z1;
        z[start + 1] = q.z2;
        zt[start] = q.zt1;
        zt[start + 1] = q.zt2;
        continue;
      }
    }
    // generic small 2d-variable homotopy on [block, block-knockoffs]
    Eigen::MatrixXd T(2 * d, 2 * d);
    Eigen::VectorXd hh(2 * d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        const double g = G(start + i, start + j);
        T(i, j) = g;
        T(d + i, d + j) = g;
        double gs = g;
        if (i == j) gs -= s.s[start + i];
        T(i, d + j) = gs;
        T(d + i, j) = gs;
      }
      hh[i] = h[start + i];
      hh[d + i] = htilde[start + i];
    }
    EntryTimes et = lasso_entry_times(T, hh);
    for (int i = 0; i < d; ++i) {
      z[start + i] = et.lambda_entry[i];
      zt[start + i] = et.lambda_entry[d + i];
    }
  }
}

}  // namespace detail

inline ScoreVector knockoff_scores(const KnockoffBundle& bundle, const Eigen::VectorXd& y,
                                   RankerKind ranker, StatKind kind,
                                   const BlockStructure* blocks = nullptr) {
  const int p = static_cast<int>(bundle.gram.G.rows());
  Eigen::VectorXd h = bundle.X.transpose() * y;
  Eigen::VectorXd ht = bundle.Xtilde.transpose() * y;

  ScoreVector out;
  out.stat_kind = kind;
  out.method_tag = std::string("knockoff-") + to_string(bundle.s.flavor) + "-" + to_string(ranker);
  if (ranker == RankerKind::lasso_path) {
    BlockStructure single = BlockStructure::single(p);
    detail::knockoff_entry_times(bundle.gram.G, bundle.s, h, ht, blocks ? *blocks : single, out.z, out.ztilde);
  } else {
    Eigen::VectorXd hh(2 * p);
    hh.head(p) = h;
    hh.tail(p) = ht;
    LSCoefficients ls = least_squares(bundle.tampered_gram(), hh);
    out.z = ls.beta_hat.head(p).cwiseAbs();
    out.ztilde = ls.beta_hat.tail(p).cwiseAbs();
  }
  out.scores.resize(p);
  for (int j = 0; j < p; ++j) out.scores[j] = symmetric_stat(out.z[j], out.ztilde[j], kind);
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian mirror scores

namespace detail {
// FWL elimination: coefficients of [v_plus, v_minus] given the residualized
// inner products of the two augmentation columns and of y
inline std::pair<double, double> solve_pair(double m11, double m12, double m22, double r1, double r2) {
  const double det = m11 * m22 - m12 * m12;
  if (std::abs(det) < 1e-14 * std::max(1.0, m11 * m22))
    throw std::runtime_error("gm: singular augmented normal equations");
  return {(m22 * r1 - m12 * r2) / det, (m11 * r2 - m12 * r1) / det};
}
}  // namespace detail

// Direct route: one (p+1)-column regression per j with an explicit z_j draw.
inline ScoreVector gm_scores(const DesignMatrix& design, const Eigen::VectorXd& y, StatKind kind,
                             uint64_t seed) {
  const int p = design.p();
  ScoreVector out;
  out.stat_kind = kind;
  out.method_tag = "gm";
  out.scores.resize(p);
  out.z.setZero(p);
  out.ztilde.setZero(p);
  for (int j = 0; j < p; ++j) {
    GMAugmentation aug = gm_augment(design, j, seed);
    Eigen::MatrixXd Q = detail::q_minus_j(design.X, j);
    auto resid = [&](const Eigen::VectorXd& v) { return (v - Q * (Q.transpose() * v)).eval(); };
    Eigen::VectorXd vp = resid(aug.x_plus), vm = resid(aug.x_minus), yr = resid(y);
    auto [bp, bm] = detail::solve_pair(vp.squaredNorm(), vp.dot(vm), vm.squaredNorm(), vp.dot(yr), vm.dot(yr));
    out.z[j] = bp;
    out.ztilde[j] = bm;
    out.scores[j] = mirror_stat(bp, bm, kind);
  }
  return out;
}

// Scalable route. The per-j regression reduces by block elimination to a 2x2
// system in the scalars a_j'y, a_j'z_j, z_j*'y, ||z_j*||^2, where
// a_j = (I-P_{-j})x_j. Conditional on (X, y) those z_j-dependent scalars are
// jointly Gaussian/chi-square with known parameters, so they are sampled
// directly instead of materializing z_j in R^n. Distribution is identical to
// the direct route; cross-checked against it in the tests.
struct GMFastContext {
  Eigen::MatrixXd Ginv;
  Eigen::VectorXd omega;  // diag(G^{-1})
  int n = 0;

  static GMFastContext make(const GramMatrix& gram, int n) {
    GMFastContext c;
    c.Ginv = gram.G.ldlt().solve(Eigen::MatrixXd::Identity(gram.p(), gram.p()));
    c.omega = c.Ginv.diagonal();
    c.n = n;
    return c;
  }
};

inline ScoreVector gm_scores_fast(const GMFastContext& ctx, const Eigen::VectorXd& xty, double yty,
                                  StatKind kind, uint64_t seed) {
  const int p = static_cast<int>(ctx.omega.size());
  if (ctx.n < p + 1) throw std::invalid_argument("gm_scores_fast: requires n >= p+1");
  Eigen::VectorXd beta_ols = ctx.Ginv * xty;
  double rss = yty - xty.dot(beta_ols);
  rss = std::max(rss, 0.0);
  const double dof = static_cast<double>(ctx.n - p - 1);

  ScoreVector out;
  out.stat_kind = kind;
  out.method_tag = "gm";
  out.scores.resize(p);
  out.z.setZero(p);
  out.ztilde.setZero(p);
  for (int j = 0; j < p; ++j) {
    Rng rng(derive_seed(seed, 0x63A2, static_cast<uint64_t>(j)));
    const double w = ctx.omega[j];
    const double N = 1.0 / w;                   // ||a_j||^2
    const double A = beta_ols[j] / w;           // a_j' y
    const double g1 = rng.normal();
    const double g2 = rng.normal();
    const double q = dof > 0 ? rng.chi_squared(dof) : 0.0;
    const double s1 = g1 / std::sqrt(w);                             // a_j' z_j
    const double s2 = (beta_ols[j] / std::sqrt(w)) * g1 + std::sqrt(rss) * g2;  // z_j*' y
    const double s3 = g1 * g1 + g2 * g2 + q;                         // ||z_j*||^2
    const double c = std::sqrt(N / s3);
    auto [bp, bm] = detail::solve_pair(2.0 * N + 2.0 * c * s1, 0.0, 2.0 * N - 2.0 * c * s1,
                                       A + c * s2, A - c * s2);
    out.z[j] = bp;
    out.ztilde[j] = bm;
    out.scores[j] = mirror_stat(bp, bm, kind);
  }
  return out;
}

// Direct de-randomized mirror: deterministic given (X, Xtilde, y).
inline ScoreVector degm_scores(const DesignMatrix& design, const Eigen::MatrixXd& Xtilde,
                               const Eigen::VectorXd& y, StatKind kind) {
  const int p = design.p();
  ScoreVector out;
  out.stat_kind = kind;
  out.method_tag = "degm";
  out.scores.resize(p);
  out.z.setZero(p);
  out.ztilde.setZero(p);
  for (int j = 0; j < p; ++j) {
    GMAugmentation aug = degm_augment(design, Xtilde, j);
    Eigen::MatrixXd Q = detail::q_minus_j(design.X, j);
    auto resid = [&](const Eigen::VectorXd& v) { return (v - Q * (Q.transpose() * v)).eval(); };
    Eigen::VectorXd vp = resid(aug.x_plus), vm = resid(aug.x_minus), yr = resid(y);
    auto [bp, bm] = detail::solve_pair(vp.squaredNorm(), vp.dot(vm), vm.squaredNorm(), vp.dot(yr), vm.dot(yr));
    out.z[j] = bp;
    out.ztilde[j] = bm;
    out.scores[j] = mirror_stat(bp, bm, kind);
  }
  return out;
}

// Same values as degm_scores, O(np) per response. a_j'xt_j = 1/omega_j - s_j
// and ||(I-P_{-j})xt_j||^2 = ||a_j||^2 hold for any knockoff Xtilde.
struct DeGMFastContext {
  Eigen::MatrixXd Ginv;
  Eigen::VectorXd omega;
  Eigen::VectorXd k;        // a_j' xt_j
  Eigen::MatrixXd E;        // (I - P_X) Xtilde
  const Eigen::MatrixXd* X = nullptr;

  static DeGMFastContext make(const KnockoffBundle& bundle) {
    DeGMFastContext c;
    const int p = static_cast<int>(bundle.gram.G.rows());
    c.Ginv = bundle.gram.G.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    c.omega = c.Ginv.diagonal();
    c.k = c.omega.cwiseInverse() - bundle.s.s;
    Eigen::HouseholderQR<Eigen::MatrixXd> qrx(bundle.X);
    Eigen::MatrixXd Qx = qrx.householderQ() * Eigen::MatrixXd::Identity(bundle.X.rows(), p);
    c.E = bundle.Xtilde - Qx * (Qx.transpose() * bundle.Xtilde);
    c.X = &bundle.X;
    return c;
  }
};

inline ScoreVector degm_scores_fast(const DeGMFastContext& ctx, const Eigen::VectorXd& y, StatKind kind) {
  const int p = static_cast<int>(ctx.omega.size());
  Eigen::VectorXd xty = ctx.X->transpose() * y;
  Eigen::VectorXd beta_ols = ctx.Ginv * xty;
  Eigen::VectorXd Ety = ctx.E.transpose() * y;

  ScoreVector out;
  out.stat_kind = kind;
  out.method_tag = "degm";
  out.scores.resize(p);
  out.z.setZero(p);
  out.ztilde.setZero(p);
  for (int j = 0; j < p; ++j) {
    const double w = ctx.omega[j];
    const double N = 1.0 / w;
    const double A = beta_ols[j] / w;                  // a_j' y
    const double At = Ety[j] + ctx.k[j] * beta_ols[j]; // at_j' y
    const double t = ctx.k[j];                         // a_j' at_j
    auto [bp, bm] = detail::solve_pair(2.0 * N + 2.0 * t, 0.0, 2.0 * N - 2.0 * t, A + At, A - At);
    out.z[j] = bp;
    out.ztilde[j] = bm;
    out.scores[j] = mirror_stat(bp, bm, kind);
  }
  return out;
}

// ---------------------------------------------------------------------------
// thresholds and error summaries

struct SelectionResult {
  std::vector<int> selected;
  double threshold = std::numeric_limits<double>::infinity();
  enum class Mode { fdr_q, fixed_u } mode = Mode::fdr_q;
  double mode_param = 0.0;  // q or u
};

// T(q) = min{t > 0 : #{W < -t} / max(#{W > t}, 1) <= q} over the observed
// candidate thresholds; empty selection with T = +inf when no t qualifies.
inline SelectionResult select_at_fdr(const ScoreVector& scores, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("select_at_fdr: q must be in (0,1)");
  const int p = static_cast<int>(scores.scores.size());
  std::vector<double> pos, neg, cand;
  cand.reserve(p);
  for (int j = 0; j < p; ++j) {
    const double w = scores.scores[j];
    if (w > 0) pos.push_back(w);
    if (w < 0) neg.push_back(-w);
    if (w != 0) cand.push_back(std::abs(w));
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  SelectionResult out;
  out.mode = SelectionResult::Mode::fdr_q;
  out.mode_param = q;
  for (double t : cand) {
    const auto nneg = neg.end() - std::upper_bound(neg.begin(), neg.end(), t);
    const auto npos = pos.end() - std::upper_bound(pos.begin(), pos.end(), t);
    if (static_cast<double>(nneg) <= q * std::max<double>(static_cast<double>(npos), 1.0)) {
      out.threshold = t;
      for (int j = 0; j < p; ++j)
        if (scores.scores[j] > t) out.selected.push_back(j);
      return out;
    }
  }
  return out;  // nothing qualified: T = +inf, empty selection
}

inline SelectionResult select_at_u(const ScoreVector& scores, double u, int p_for_threshold) {
  if (u < 0) throw std::invalid_argument("select_at_u: u must be >= 0");
  SelectionResult out;
  out.mode = SelectionResult::Mode::fixed_u;
  out.mode_param = u;
  out.threshold = std::sqrt(2.0 * u * std::log(static_cast<double>(p_for_threshold)));
  for (int j = 0; j < static_cast<int>(scores.scores.size()); ++j)
    if (scores.scores[j] > out.threshold) out.selected.push_back(j);
  return out;
}

struct ErrorCounts {
  long fp = 0, fn = 0, tp = 0;
  long hamming() const { return fp + fn; }
  double fdp() const { return static_cast<double>(fp) / std::max<long>(fp + tp, 1); }
  double tpr(long support_size) const { return static_cast<double>(tp) / std::max<long>(support_size, 1); }
};

inline ErrorCounts evaluate(const SelectionResult& selection, const BetaVector& beta) {
  ErrorCounts out;
  std::vector<char> is_signal(beta.beta.size(), 0);
  for (int j : beta.support) is_signal[j] = 1;
  std::vector<char> picked(beta.beta.size(), 0);
  for (int j : selection.selected) {
    picked[j] = 1;
    if (is_signal[j])
      ++out.tp;
    else
      ++out.fp;
  }
  for (int j : beta.support)
    if (!picked[j]) ++out.fn;
  return out;
}

}  // namespace fdrlab
