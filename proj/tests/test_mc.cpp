#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fdrlab/mc.hpp"

using namespace fdrlab;
using namespace fdrlab::mc;

namespace {
ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.design.kind = DesignKind::block2;
  cfg.design.p = 40;
  cfg.design.n = 120;
  cfg.design.rho = 0.5;
  cfg.theta = 0.3;
  cfg.r_grid = {2.0, 4.0};
  cfg.reps = 8;
  cfg.master_seed = 99;
  MethodVariant lasso, ols, kf_ec, kf_ci, gmv, dgm;
  lasso.family = MethodVariant::Family::lasso_proto;
  ols.family = MethodVariant::Family::ols_proto;
  kf_ec.family = MethodVariant::Family::knockoff;
  kf_ec.flavor = SFlavor::equicorrelated;
  kf_ci.family = MethodVariant::Family::knockoff;
  kf_ci.flavor = SFlavor::conditional_independence;
  gmv.family = MethodVariant::Family::gm;
  dgm.family = MethodVariant::Family::degm;
  dgm.flavor = SFlavor::conditional_independence;
  cfg.methods = {lasso, ols, kf_ec, kf_ci, gmv, dgm};
  return cfg;
}

bool rows_equal(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].method != b[i].method) return false;
    if (a[i].mean_hamming != b[i].mean_hamming) return false;
    if (a[i].mean_fdp != b[i].mean_fdp) return false;
    if (a[i].mean_tpr != b[i].mean_tpr) return false;
    if (a[i].u_star != b[i].u_star && !(std::isnan(a[i].u_star) && std::isnan(b[i].u_star)))
      return false;
  }
  return true;
}
}  // namespace

TEST_CASE("run_experiment is deterministic and scheduling invariant") {
  ExperimentConfig cfg = small_config();
  cfg.threads = 1;
  auto rows1 = run_experiment(cfg);
  auto rows1b = run_experiment(cfg);
  REQUIRE(rows_equal(rows1, rows1b));
  cfg.threads = 4;
  auto rows4 = run_experiment(cfg);
  REQUIRE(rows_equal(rows1, rows4));
  REQUIRE(rows1.size() == cfg.methods.size() * cfg.r_grid.size());
  for (const auto& row : rows1) REQUIRE(row.failures == 0);
}

TEST_CASE("r = 0: all signals missed, log_p(H/p) near -theta") {
  ExperimentConfig cfg = small_config();
  cfg.design.p = 200;
  cfg.design.n = 600;
  cfg.theta = 0.4;
  cfg.r_grid = {0.0};
  cfg.reps = 60;
  cfg.methods.resize(2);  // lasso and ols prototypes
  auto rows = run_experiment(cfg);
  const double eps = std::pow(200.0, -0.4);
  for (const auto& row : rows) {
    // every drawn signal has strength 0, so FN = |S| and FP = 0
    REQUIRE(row.mean_hamming == Catch::Approx(200.0 * eps).epsilon(0.35));
    REQUIRE(row.log_p_hamming_over_p == Catch::Approx(-0.4).margin(0.08));
  }
}

TEST_CASE("theory overlay fills exponents") {
  ExperimentConfig cfg = small_config();
  auto rows = run_experiment(cfg);
  theory_overlay(cfg, rows);
  for (const auto& row : rows) {
    REQUIRE(std::isfinite(row.theory_log_p));
    REQUIRE(row.theory_log_p <= 0.0 + 1e-12);
  }
}

TEST_CASE("fdr threshold mode records fdp below q on average (quick check)") {
  ExperimentConfig cfg = small_config();
  cfg.design.p = 60;
  cfg.design.n = 200;
  cfg.theta = 0.2;
  cfg.r_grid = {5.0};
  cfg.reps = 80;
  cfg.threshold.kind = ThresholdMode::Kind::fdr_q;
  cfg.threshold.q = 0.2;
  cfg.methods.resize(0);
  MethodVariant kf_ci, gmv;
  kf_ci.family = MethodVariant::Family::knockoff;
  kf_ci.flavor = SFlavor::conditional_independence;
  gmv.family = MethodVariant::Family::gm;
  cfg.methods = {kf_ci, gmv};
  auto rows = run_experiment(cfg);
  for (const auto& row : rows) {
    INFO(row.method);
    REQUIRE(row.mean_fdp < 0.35);  // loose sanity bound at small p
    REQUIRE(row.mean_tpr > 0.5);
  }
}

TEST_CASE("presets have the documented scales") {
  ExperimentConfig e1 = preset_config(Preset::exp1);
  REQUIRE(e1.design.p == 1000);
  REQUIRE(e1.design.n == 2000);
  REQUIRE(e1.methods.size() == 6);
  REQUIRE(e1.r_grid.size() == 31);
  ExperimentConfig e5 = preset_config(Preset::exp5);
  REQUIRE(e5.threshold.kind == ThresholdMode::Kind::fdr_q);
  REQUIRE(e5.rho_grid.size() == 9);
  REQUIRE(e5.signed_beta);
}
