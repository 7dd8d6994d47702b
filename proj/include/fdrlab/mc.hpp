#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fdrlab/design.hpp"
#include "fdrlab/lasso_path.hpp"
#include "fdrlab/mirror_stats.hpp"
#include "fdrlab/signal.hpp"
#include "fdrlab/tamper.hpp"
#include "fdrlab/theory/exponents.hpp"

namespace fdrlab::mc {

enum class Preset { exp1, exp2, exp3, exp4, exp5, custom };

inline const char* to_string(Preset p) {
  switch (p) {
    case Preset::exp1: return "exp1";
    case Preset::exp2: return "exp2";
    case Preset::exp3: return "exp3";
    case Preset::exp4: return "exp4";
    case Preset::exp5: return "exp5";
    case Preset::custom: return "custom";
  }
  return "?";
}

struct MethodVariant {
  enum class Family { lasso_proto, ols_proto, knockoff, gm, degm } family = Family::lasso_proto;
  SFlavor flavor = SFlavor::equicorrelated;    // knockoff / degm source knockoffs
  RankerKind ranker = RankerKind::lasso_path;  // knockoff only
  StatKind stat = StatKind::signed_max;

  std::string name() const {
    switch (family) {
      case Family::lasso_proto: return "lasso";
      case Family::ols_proto: return "ols";
      case Family::knockoff:
        return std::string("kf-") + fdrlab::to_string(flavor) +
               (ranker == RankerKind::least_squares ? "-ols" : "") + "-" + fdrlab::to_string(stat);
      case Family::gm: return std::string("gm-") + fdrlab::to_string(stat);
      case Family::degm: return std::string("degm-") + fdrlab::to_string(flavor);
    }
    return "?";
  }
};

struct ThresholdMode {
  enum class Kind { fixed_u_optimal, fdr_q } kind = Kind::fixed_u_optimal;
  double q = 0.1;
};

struct ExperimentConfig {
  Preset preset = Preset::custom;
  DesignSpec design;  // rho field is overridden along rho_grid sweeps
  double theta = 0.5;
  bool signed_beta = false;
  std::vector<double> r_grid = {1.0};
  std::vector<double> rho_grid;  // empty: single design at design.rho
  std::vector<MethodVariant> methods;
  int reps = 200;
  ThresholdMode threshold;
  uint64_t master_seed = 1;
  int threads = 0;  // 0: FDRLAB_THREADS env or hardware_concurrency
};

struct ResultRow {
  std::string method;
  double theta = 0.0, r = 0.0, rho = 0.0;
  double u_star = std::numeric_limits<double>::quiet_NaN();
  double mean_hamming = 0.0;
  double log_p_hamming_over_p = 0.0;
  double mean_fdp = 0.0, mean_tpr = 0.0;
  double fdp_q[5] = {0, 0, 0, 0, 0};  // 5/25/50/75/95 percentiles
  double tpr_q[5] = {0, 0, 0, 0, 0};
  int reps = 0;
  int failures = 0;
  double wall_ms = 0.0;
  double theory_log_p = std::numeric_limits<double>::quiet_NaN();
};

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FDRLAB_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

namespace detail {

// map an mc method onto the closed-form theory family used for u*
inline theory::MethodSpec theory_spec_for(const MethodVariant& mv, const DesignSpec& design) {
  using theory::Method;
  using theory::TheoryDesign;
  // effective theory design: block-style designs map to block2(rho); designs
  // without a block theory fall back to the orthogonal curves
  TheoryDesign td = TheoryDesign::orthogonal;
  double par = 0.0;
  switch (design.kind) {
    case DesignKind::block2:
    case DesignKind::block_d:
    case DesignKind::expdecay:
      td = TheoryDesign::block2;
      par = design.rho;
      break;
    default:
      break;
  }
  if (td == TheoryDesign::block2 && par == 0.0) td = TheoryDesign::orthogonal;

  Method m;
  switch (mv.family) {
    case MethodVariant::Family::lasso_proto:
      m = td == TheoryDesign::orthogonal ? Method::bh_marginal : Method::lassopath_prototype;
      break;
    case MethodVariant::Family::ols_proto:
      m = td == TheoryDesign::orthogonal ? Method::bh_marginal : Method::ols_prototype;
      break;
    case MethodVariant::Family::gm:
      m = mv.stat == StatKind::signed_max ? Method::gm_sgm : Method::gm_dif;
      if (td == TheoryDesign::block2 && mv.stat == StatKind::difference)
        throw std::invalid_argument("no closed-form u* for gm-dif on block designs");
      break;
    case MethodVariant::Family::degm:
      if (td != TheoryDesign::block2) throw std::invalid_argument("degm u* needs a block design");
      m = Method::degm;
      break;
    case MethodVariant::Family::knockoff: {
      if (mv.ranker == RankerKind::least_squares) {
        if (td != TheoryDesign::block2) throw std::invalid_argument("knockoff-ols u* needs a block design");
        m = Method::knockoff_ols;
      } else if (td == TheoryDesign::orthogonal) {
        m = mv.stat == StatKind::signed_max ? Method::knockoff_sgm : Method::knockoff_dif;
      } else {
        if (mv.stat == StatKind::difference)
          throw std::invalid_argument("no closed-form u* for knockoff-dif on block designs");
        m = mv.flavor == SFlavor::conditional_independence ? Method::knockoff_ci : Method::knockoff_ec;
      }
      break;
    }
    default:
      throw std::invalid_argument("unknown method family");
  }
  return theory::MethodSpec{m, td, td == TheoryDesign::orthogonal ? 0.0 : par};
}

// prototype lasso entry times with per-block dispatch
inline Eigen::VectorXd proto_entry_times(const Eigen::MatrixXd& G, const BlockStructure& blocks,
                                         const Eigen::VectorXd& h) {
  const int p = static_cast<int>(G.rows());
  Eigen::VectorXd z(p);
  for (auto [start, d] : blocks.blocks) {
    if (d == 1) {
      z[start] = std::abs(h[start]);
    } else if (d == 2) {
      auto [e1, e2] = bivariate_entry_times(h[start], h[start + 1], G(start, start + 1));
      z[start] = e1;
      z[start + 1] = e2;
    } else {
      EntryTimes et = lasso_entry_times(G.block(start, start, d, d), h.segment(start, d));
      z.segment(start, d) = et.lambda_entry;
    }
  }
  return z;
}

// everything reusable across replications of one design
struct DesignContext {
  DesignSpec spec;
  GramMatrix gram;
  DesignMatrix X;
  BlockStructure blocks;
  Eigen::LDLT<Eigen::MatrixXd> gram_ldlt;
  std::optional<KnockoffBundle> kb_ec, kb_ci;
  std::optional<Eigen::LDLT<Eigen::MatrixXd>> tampered_ldlt_ec, tampered_ldlt_ci;
  std::optional<GMFastContext> gm_ctx;
  std::optional<DeGMFastContext> degm_ctx_ec, degm_ctx_ci;

  const KnockoffBundle& bundle(SFlavor f) const {
    const auto& kb = f == SFlavor::conditional_independence ? kb_ci : kb_ec;
    if (!kb) throw std::logic_error("knockoff bundle not prepared");
    return *kb;
  }
};

inline std::unique_ptr<DesignContext> make_design_context(const DesignSpec& spec,
                                                          const std::vector<MethodVariant>& methods,
                                                          uint64_t master_seed) {
  auto ctx = std::make_unique<DesignContext>();
  ctx->spec = spec;
  ctx->gram = make_gram(spec);
  ctx->X = realize_design(ctx->gram, spec.n, derive_seed(master_seed, 0xD51, spec.kind == DesignKind::wishart ? 1 : 0));
  ctx->blocks = block_structure_for(spec);
  ctx->gram_ldlt.compute(ctx->gram.G);

  bool need_ec = false, need_ci = false, need_gm = false, need_degm_ec = false, need_degm_ci = false;
  bool need_tampered_ls_ec = false, need_tampered_ls_ci = false;
  for (const auto& mv : methods) {
    if (mv.family == MethodVariant::Family::gm) need_gm = true;
    if (mv.family == MethodVariant::Family::knockoff) {
      (mv.flavor == SFlavor::conditional_independence ? need_ci : need_ec) = true;
      if (mv.ranker == RankerKind::least_squares)
        (mv.flavor == SFlavor::conditional_independence ? need_tampered_ls_ci : need_tampered_ls_ec) = true;
    }
    if (mv.family == MethodVariant::Family::degm) {
      if (mv.flavor == SFlavor::conditional_independence) {
        need_ci = true;
        need_degm_ci = true;
      } else {
        need_ec = true;
        need_degm_ec = true;
      }
    }
  }
  if (need_ec) {
    SVector s = knockoff_s(ctx->gram, SFlavor::equicorrelated);
    ctx->kb_ec = build_knockoffs(ctx->X, s, derive_seed(master_seed, 0xE1));
  }
  if (need_ci) {
    SVector s = knockoff_s(ctx->gram, SFlavor::conditional_independence);
    ctx->kb_ci = build_knockoffs(ctx->X, s, derive_seed(master_seed, 0xC1));
  }
  if (need_tampered_ls_ec) ctx->tampered_ldlt_ec.emplace(ctx->kb_ec->tampered_gram());
  if (need_tampered_ls_ci) ctx->tampered_ldlt_ci.emplace(ctx->kb_ci->tampered_gram());
  if (need_gm) ctx->gm_ctx = GMFastContext::make(ctx->gram, spec.n);
  if (need_degm_ec) ctx->degm_ctx_ec = DeGMFastContext::make(*ctx->kb_ec);
  if (need_degm_ci) ctx->degm_ctx_ci = DeGMFastContext::make(*ctx->kb_ci);
  return ctx;
}

struct RepOutcome {
  double hamming = std::numeric_limits<double>::quiet_NaN();
  double fdp = std::numeric_limits<double>::quiet_NaN();
  double tpr = std::numeric_limits<double>::quiet_NaN();
  bool ok = false;
};

}  // namespace detail

// one (design, r)-cell worth of replication results for every method
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& config) {
  if (config.reps < 1) throw std::invalid_argument("run_experiment: reps must be >= 1");
  if (config.methods.empty()) throw std::invalid_argument("run_experiment: no methods");
  if (config.r_grid.empty()) throw std::invalid_argument("run_experiment: empty r grid");
  const int nthreads = resolve_threads(config.threads);
  const int nm = static_cast<int>(config.methods.size());

  std::vector<double> rhos = config.rho_grid;
  if (rhos.empty()) rhos = {config.design.rho};

  std::vector<ResultRow> rows;
  uint64_t grid_index = 0;
  for (double rho : rhos) {
    DesignSpec spec = config.design;
    spec.rho = rho;
    auto ctx = detail::make_design_context(spec, config.methods, config.master_seed);

    for (double r : config.r_grid) {
      const auto t0 = std::chrono::steady_clock::now();
      SignalConfig sig;
      sig.theta = config.theta;
      sig.r = r;
      sig.signed_beta = config.signed_beta;
      sig.p = spec.p;

      // per-method thresholds
      std::vector<double> u_star(nm, std::numeric_limits<double>::quiet_NaN());
      if (config.threshold.kind == ThresholdMode::Kind::fixed_u_optimal) {
        for (int m = 0; m < nm; ++m) {
          theory::MethodSpec ts = detail::theory_spec_for(config.methods[m], spec);
          u_star[m] = theory::optimal_u(ts, config.theta, std::max(r, 1e-9), config.signed_beta);
        }
      }

      std::vector<std::vector<detail::RepOutcome>> results(nm);
      for (auto& v : results) v.resize(config.reps);

      std::atomic<int> next{0};
      auto worker = [&]() {
        for (;;) {
          const int rep = next.fetch_add(1);
          if (rep >= config.reps) return;
          const uint64_t sb = derive_seed(config.master_seed, 0xBE, grid_index, rep);
          const uint64_t sy = derive_seed(config.master_seed, 0x9E, grid_index, rep);
          const uint64_t sg = derive_seed(config.master_seed, 0x61, grid_index, rep);
          BetaVector beta = draw_beta(sig, sb);
          Response y = draw_response(ctx->X, beta, sy);
          const double yty = y.y.squaredNorm();
          Eigen::VectorXd xty = ctx->X.X.transpose() * y.y;
          Eigen::VectorXd xty_ec, xty_ci;
          if (ctx->kb_ec) xty_ec = ctx->kb_ec->Xtilde.transpose() * y.y;
          if (ctx->kb_ci) xty_ci = ctx->kb_ci->Xtilde.transpose() * y.y;

          for (int m = 0; m < nm; ++m) {
            const MethodVariant& mv = config.methods[m];
            try {
              ScoreVector sv;
              switch (mv.family) {
                case MethodVariant::Family::lasso_proto: {
                  sv.scores = detail::proto_entry_times(ctx->gram.G, ctx->blocks, xty);
                  sv.stat_kind = StatKind::signed_max;
                  break;
                }
                case MethodVariant::Family::ols_proto: {
                  sv.scores = ctx->gram_ldlt.solve(xty).cwiseAbs();
                  break;
                }
                case MethodVariant::Family::knockoff: {
                  const bool ci = mv.flavor == SFlavor::conditional_independence;
                  const KnockoffBundle& kb = ctx->bundle(mv.flavor);
                  const Eigen::VectorXd& ht = ci ? xty_ci : xty_ec;
                  if (mv.ranker == RankerKind::lasso_path) {
                    Eigen::VectorXd z, zt;
                    fdrlab::detail::knockoff_entry_times(kb.gram.G, kb.s, xty, ht, ctx->blocks, z, zt);
                    sv.scores.resize(spec.p);
                    for (int j = 0; j < spec.p; ++j) sv.scores[j] = symmetric_stat(z[j], zt[j], mv.stat);
                  } else {
                    const auto& ldlt = ci ? ctx->tampered_ldlt_ci : ctx->tampered_ldlt_ec;
                    Eigen::VectorXd hh(2 * spec.p);
                    hh.head(spec.p) = xty;
                    hh.tail(spec.p) = ht;
                    Eigen::VectorXd bh = ldlt->solve(hh);
                    sv.scores.resize(spec.p);
                    for (int j = 0; j < spec.p; ++j)
                      sv.scores[j] =
                          symmetric_stat(std::abs(bh[j]), std::abs(bh[j + spec.p]), mv.stat);
                  }
                  break;
                }
                case MethodVariant::Family::gm:
                  sv = gm_scores_fast(*ctx->gm_ctx, xty, yty, mv.stat, sg);
                  break;
                case MethodVariant::Family::degm: {
                  const auto& dctx = mv.flavor == SFlavor::conditional_independence ? ctx->degm_ctx_ci
                                                                                    : ctx->degm_ctx_ec;
                  sv = degm_scores_fast(*dctx, y.y, mv.stat);
                  break;
                }
              }
              SelectionResult sel = config.threshold.kind == ThresholdMode::Kind::fixed_u_optimal
                                        ? select_at_u(sv, u_star[m], spec.p)
                                        : select_at_fdr(sv, config.threshold.q);
              ErrorCounts ec = evaluate(sel, beta);
              detail::RepOutcome& out = results[m][rep];
              out.hamming = static_cast<double>(ec.hamming());
              out.fdp = ec.fdp();
              out.tpr = ec.tpr(static_cast<long>(beta.support.size()));
              out.ok = true;
            } catch (const std::exception&) {
              results[m][rep].ok = false;  // recorded and excluded below
            }
          }
        }
      };
      std::vector<std::thread> pool;
      for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();

      const double wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

      for (int m = 0; m < nm; ++m) {
        ResultRow row;
        row.method = config.methods[m].name();
        row.theta = config.theta;
        row.r = r;
        row.rho = rho;
        row.u_star = u_star[m];
        row.reps = config.reps;
        row.wall_ms = wall_ms;
        std::vector<double> hs, fdps, tprs;
        for (const auto& o : results[m]) {
          if (!o.ok) {
            ++row.failures;
            continue;
          }
          hs.push_back(o.hamming);
          fdps.push_back(o.fdp);
          tprs.push_back(o.tpr);
        }
        if (!hs.empty()) {
          auto mean = [](const std::vector<double>& v) {
            double s = 0;
            for (double x : v) s += x;
            return s / static_cast<double>(v.size());
          };
          row.mean_hamming = mean(hs);
          row.mean_fdp = mean(fdps);
          row.mean_tpr = mean(tprs);
          row.log_p_hamming_over_p =
              row.mean_hamming > 0
                  ? std::log(row.mean_hamming / spec.p) / std::log(static_cast<double>(spec.p))
                  : -std::numeric_limits<double>::infinity();
          auto quantiles = [](std::vector<double> v, double* out5) {
            std::sort(v.begin(), v.end());
            const double qs[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
            for (int i = 0; i < 5; ++i) {
              const double pos = qs[i] * (v.size() - 1);
              const size_t lo = static_cast<size_t>(pos);
              const size_t hi = std::min(lo + 1, v.size() - 1);
              out5[i] = v[lo] + (pos - lo) * (v[hi] - v[lo]);
            }
          };
          quantiles(fdps, row.fdp_q);
          quantiles(tprs, row.tpr_q);
        }
        rows.push_back(std::move(row));
      }
      ++grid_index;
    }
  }
  return rows;
}

// pair each row with the theory exponent: log_p(H*_p / p) = -f(u*)
inline void theory_overlay(const ExperimentConfig& config, std::vector<ResultRow>& rows) {
  for (auto& row : rows) {
    const MethodVariant* mv = nullptr;
    for (const auto& m : config.methods)
      if (m.name() == row.method) mv = &m;
    if (!mv || std::isnan(row.u_star)) continue;
    DesignSpec spec = config.design;
    spec.rho = row.rho;
    try {
      theory::MethodSpec ts = detail::theory_spec_for(*mv, spec);
      const double h = config.signed_beta
                           ? theory::hamming_exponent_signed(ts, row.theta, std::max(row.r, 1e-9), row.u_star)
                           : theory::hamming_exponent(ts, row.theta, std::max(row.r, 1e-9), row.u_star);
      row.theory_log_p = (h - 1.0);  // Hamm ~ p^h, so log_p(H/p) = h - 1 = -f(u*)
    } catch (const std::exception&) {
      // designs without a closed-form exponent keep NaN
    }
  }
}

// Paper experiment presets at desk scale. Every field can be overridden by
// the caller afterwards.
inline ExperimentConfig preset_config(Preset preset) {
  ExperimentConfig cfg;
  cfg.preset = preset;
  auto rgrid = [](double lo, double hi, double step) {
    std::vector<double> g;
    for (double r = lo; r <= hi + 1e-9; r += step) g.push_back(r);
    return g;
  };
  using F = MethodVariant::Family;
  auto kf = [](SFlavor fl, StatKind st) {
    MethodVariant m;
    m.family = F::knockoff;
    m.flavor = fl;
    m.stat = st;
    return m;
  };
  auto gm = [](StatKind st) {
    MethodVariant m;
    m.family = F::gm;
    m.stat = st;
    return m;
  };
  MethodVariant lasso, ols;
  lasso.family = F::lasso_proto;
  ols.family = F::ols_proto;

  switch (preset) {
    case Preset::exp1:
      cfg.design.kind = DesignKind::orthogonal;
      cfg.design.p = 1000;
      cfg.design.n = 2000;
      cfg.theta = 0.5;
      cfg.r_grid = rgrid(0.0, 6.0, 0.2);
      cfg.methods = {lasso, ols, kf(SFlavor::equicorrelated, StatKind::signed_max),
                     kf(SFlavor::equicorrelated, StatKind::difference), gm(StatKind::signed_max),
                     gm(StatKind::difference)};
      cfg.reps = 200;
      break;
    case Preset::exp2:
      cfg.design.kind = DesignKind::block2;
      cfg.design.p = 1000;
      cfg.design.n = 2000;
      cfg.design.rho = 0.5;
      cfg.theta = 0.2;
      cfg.r_grid = rgrid(0.0, 8.0, 0.2);
      cfg.methods = {lasso, ols, kf(SFlavor::equicorrelated, StatKind::signed_max),
                     gm(StatKind::signed_max)};
      cfg.reps = 200;
      break;
    case Preset::exp3:
      cfg.design.kind = DesignKind::block_d;
      cfg.design.p = 1000;
      cfg.design.n = 2000;
      cfg.design.d = 4;
      cfg.design.rho = 0.4;
      cfg.theta = 0.3;
      cfg.r_grid = rgrid(0.0, 6.0, 0.2);
      cfg.methods = {lasso, ols, kf(SFlavor::equicorrelated, StatKind::signed_max),
                     gm(StatKind::signed_max)};
      cfg.reps = 200;
      break;
    case Preset::exp4:
      cfg.design.kind = DesignKind::block2;
      cfg.design.p = 300;
      cfg.design.n = 1000;
      cfg.design.rho = 0.5;
      cfg.theta = 0.2;
      cfg.signed_beta = true;
      cfg.r_grid = rgrid(0.0, 6.0, 0.2);
      cfg.methods = {lasso, kf(SFlavor::equicorrelated, StatKind::signed_max),
                     kf(SFlavor::conditional_independence, StatKind::signed_max)};
      cfg.reps = 200;
      break;
    case Preset::exp5:
      cfg.design.kind = DesignKind::block2;
      cfg.design.p = 300;
      cfg.design.n = 1000;
      cfg.theta = 0.2;
      cfg.signed_beta = true;
      cfg.r_grid = {5.0};
      cfg.rho_grid = rgrid(0.1, 0.9, 0.1);
      cfg.methods = {kf(SFlavor::equicorrelated, StatKind::signed_max),
                     kf(SFlavor::conditional_independence, StatKind::signed_max),
                     gm(StatKind::signed_max)};
      cfg.reps = 200;
      cfg.threshold.kind = ThresholdMode::Kind::fdr_q;
      cfg.threshold.q = 0.1;
      break;
    case Preset::custom:
      break;
  }
  return cfg;
}

}  // namespace fdrlab::mc
