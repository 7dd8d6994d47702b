// fdrlab command line: design generation, FDR-controlled selection, theory
// curves, and Monte Carlo experiments. All outputs are CSV plus a JSON run
// manifest; config files are JSON with the same keys as the long flags.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "fdrlab/design.hpp"
#include "fdrlab/matrix_io.hpp"
#include "fdrlab/mc.hpp"
#include "fdrlab/mirror_stats.hpp"
#include "fdrlab/signal.hpp"
#include "fdrlab/tamper.hpp"
#include "fdrlab/theory/exponents.hpp"
#include "fdrlab/theory/phase.hpp"

using json = nlohmann::json;
using namespace fdrlab;

namespace {

constexpr const char* kVersion = "fdrlab 1.0.0";

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DesignKind parse_kind(const std::string& s) {
  if (s == "orthogonal") return DesignKind::orthogonal;
  if (s == "block2") return DesignKind::block2;
  if (s == "block-d" || s == "block_d") return DesignKind::block_d;
  if (s == "factor") return DesignKind::factor;
  if (s == "expdecay") return DesignKind::expdecay;
  if (s == "wishart") return DesignKind::wishart;
  throw ConfigError("unknown design kind: " + s);
}

SFlavor parse_flavor(const std::string& s) {
  if (s == "ec" || s == "equicorrelated") return SFlavor::equicorrelated;
  if (s == "ci" || s == "conditional-independence") return SFlavor::conditional_independence;
  throw ConfigError("unknown knockoff flavor: " + s);
}

StatKind parse_stat(const std::string& s) {
  if (s == "sgm" || s == "signed-max") return StatKind::signed_max;
  if (s == "dif" || s == "difference") return StatKind::difference;
  throw ConfigError("unknown symmetric statistic: " + s);
}

RankerKind parse_ranker(const std::string& s) {
  if (s == "lasso-path") return RankerKind::lasso_path;
  if (s == "least-squares" || s == "ols") return RankerKind::least_squares;
  throw ConfigError("unknown ranker: " + s);
}

theory::Method parse_theory_method(const std::string& s) {
  using theory::Method;
  static const std::map<std::string, Method> table = {
      {"bh-marginal", Method::bh_marginal},   {"knockoff-sgm", Method::knockoff_sgm},
      {"knockoff-dif", Method::knockoff_dif}, {"gm-sgm", Method::gm_sgm},
      {"gm-dif", Method::gm_dif},             {"ols", Method::ols_prototype},
      {"lasso-path", Method::lassopath_prototype}, {"knockoff-ols", Method::knockoff_ols},
      {"degm", Method::degm},                 {"knockoff-ec", Method::knockoff_ec},
      {"knockoff-ci", Method::knockoff_ci}};
  auto it = table.find(s);
  if (it == table.end()) throw ConfigError("unknown theory method: " + s);
  return it->second;
}

// JSON config file -> argv tokens prepended before the command line, so
// explicit flags override config keys
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  std::vector<std::string> tokens;
  for (auto& [key, value] : j.items()) {
    std::string v;
    if (value.is_string())
      v = value.get<std::string>();
    else if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back("--" + key);
      continue;
    } else
      v = value.dump();
    tokens.push_back("--" + key + "=" + v);
  }
  return tokens;
}

void write_manifest(const std::string& out_path, const json& config, double wall_ms) {
  json m;
  m["tool"] = kVersion;
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  m["config"] = config;
  m["wall_ms"] = wall_ms;
  std::ofstream out(out_path + ".manifest.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest for " + out_path);
  out << m.dump(2) << "\n";
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  }
};

// ---------------------------------------------------------------------- design

int cmd_design(const std::string& kind, int p, int n, double rho, int d, int k, uint64_t seed,
               const std::string& out_gram, const std::string& out_x) {
  Timer timer;
  DesignSpec spec;
  spec.kind = parse_kind(kind);
  spec.p = p;
  spec.n = n;
  spec.rho = rho;
  spec.d = d;
  spec.k = k;
  spec.seed = seed;
  GramMatrix g = make_gram(spec);
  if (!out_gram.empty()) write_matrix_csv(out_gram, g.G);
  std::string manifest_at = out_gram;
  if (!out_x.empty()) {
    DesignMatrix X = realize_design(g, n, seed);
    write_matrix_csv(out_x, X.X);
    if (manifest_at.empty()) manifest_at = out_x;
  }
  if (manifest_at.empty()) throw ConfigError("design: provide --out-gram and/or --out-x");
  json cfg{{"subcommand", "design"}, {"kind", kind},     {"p", p},       {"n", n},
           {"rho", rho},             {"d", d},           {"k", k},       {"seed", seed},
           {"out-gram", out_gram},   {"out-x", out_x}};
  write_manifest(manifest_at, cfg, timer.ms());
  return 0;
}

// ---------------------------------------------------------------------- select

int cmd_select(const std::string& x_path, const std::string& y_path, const std::string& method,
               const std::string& flavor, const std::string& ranker, const std::string& stat,
               double q, double u, uint64_t seed, const std::string& out) {
  Timer timer;
  Eigen::MatrixXd X = read_matrix_csv(x_path);
  Eigen::VectorXd y = read_vector_csv(y_path);
  if (y.size() != X.rows()) throw ConfigError("select: y length does not match rows of x");
  const int p = static_cast<int>(X.cols());

  DesignMatrix design;
  design.X = X;
  design.gram.G = X.transpose() * X;

  StatKind st = parse_stat(stat);
  ScoreVector sv;
  if (method == "knockoff") {
    SVector s = knockoff_s(design.gram, parse_flavor(flavor));
    KnockoffBundle kb = build_knockoffs(design, s, seed);
    sv = knockoff_scores(kb, y, parse_ranker(ranker), st);
  } else if (method == "gm") {
    GMFastContext ctx = GMFastContext::make(design.gram, static_cast<int>(X.rows()));
    sv = gm_scores_fast(ctx, X.transpose() * y, y.squaredNorm(), st, seed);
  } else if (method == "degm") {
    SVector s = knockoff_s(design.gram, parse_flavor(flavor));
    KnockoffBundle kb = build_knockoffs(design, s, seed);
    DeGMFastContext ctx = DeGMFastContext::make(kb);
    sv = degm_scores_fast(ctx, y, st);
  } else if (method == "lasso-path") {
    EntryTimes et = lasso_entry_times(design.gram.G, X.transpose() * y);
    sv.scores = et.lambda_entry;
  } else if (method == "ols") {
    sv.scores = least_squares(design.gram.G, (X.transpose() * y).eval()).beta_hat.cwiseAbs();
  } else {
    throw ConfigError("select: unknown method: " + method);
  }

  SelectionResult sel;
  if (u >= 0.0)
    sel = select_at_u(sv, u, p);
  else
    sel = select_at_fdr(sv, q);

  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output: " + out);
  os << "index,score,selected\n";
  std::vector<char> picked(p, 0);
  for (int j : sel.selected) picked[j] = 1;
  for (int j = 0; j < p; ++j)
    os << j << ',' << format_double(sv.scores[j]) << ',' << int(picked[j]) << '\n';

  json cfg{{"subcommand", "select"}, {"x", x_path},   {"y", y_path}, {"method", method},
           {"flavor", flavor},       {"ranker", ranker}, {"stat", stat}, {"q", q},
           {"u", u},                 {"seed", seed},  {"out", out},
           {"threshold", sel.threshold},
           {"n_selected", sel.selected.size()}};
  write_manifest(out, cfg, timer.ms());
  return 0;
}

// ---------------------------------------------------------------- theory-phase

int cmd_theory_phase(const std::string& method, double rho, double a, int grid,
                     const std::string& out) {
  Timer timer;
  theory::MethodSpec spec;
  spec.method = parse_theory_method(method);
  const bool ortho = method == "bh-marginal" || method == "knockoff-sgm" ||
                     method == "knockoff-dif" ||
                     ((method == "gm-sgm" || method == "gm-dif" || method == "ols") && rho == 0.0);
  spec.design = ortho ? theory::TheoryDesign::orthogonal : theory::TheoryDesign::block2;
  spec.param = ortho ? a : rho;

  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output: " + out);
  os << "theta,curve,value,method,design,rho,branch\n";
  const std::string design_name = ortho ? "orthogonal" : "block2";
  for (int i = 0; i < grid; ++i) {
    const double t = (i + 0.5) / grid;
    const double har = theory::h_ar_curve(spec, t);
    const double her = theory::h_er_curve(spec, t);
    std::string branch = "main";
    if (spec.method == theory::Method::knockoff_ec && !ortho) {
      if (rho >= theory::rho0())
        branch = "lasso-path";
      else if (rho > -0.5) {
        theory::MethodSpec lp{theory::Method::lassopath_prototype, theory::TheoryDesign::block2, rho};
        branch = her > theory::h_er_curve(lp, t) + 1e-12 ? "h5" : "lasso-path";
      } else
        branch = std::isinf(her) ? "no-exact-recovery" : "lasso-path";
    }
    os << format_double(t) << ",h_ar," << format_double(har) << ',' << method << ',' << design_name
       << ',' << format_double(spec.param) << ',' << branch << '\n';
    os << format_double(t) << ",h_er," << (std::isinf(her) ? "inf" : format_double(her)) << ','
       << method << ',' << design_name << ',' << format_double(spec.param) << ',' << branch << '\n';
  }
  json cfg{{"subcommand", "theory-phase"}, {"method", method}, {"rho", rho},
           {"a", a},                       {"grid", grid},     {"out", out},
           {"rho0", theory::rho0()}};
  write_manifest(out, cfg, timer.ms());
  return 0;
}

// ------------------------------------------------------------- theory-tradeoff

int cmd_theory_tradeoff(const std::string& method, const std::string& design, double rho, double a,
                        double theta, double r, double u_min, double u_max, double u_step,
                        const std::string& out) {
  Timer timer;
  theory::MethodSpec spec;
  spec.method = parse_theory_method(method);
  spec.design = design == "orthogonal" ? theory::TheoryDesign::orthogonal : theory::TheoryDesign::block2;
  spec.param = spec.design == theory::TheoryDesign::orthogonal ? a : rho;
  std::vector<double> grid;
  for (double u = u_min; u <= u_max + 1e-12; u += u_step) grid.push_back(u);
  auto curve = theory::tradeoff_curve(spec, theta, r, grid);
  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output: " + out);
  os << "u,g_tpr,g_fdr,method,design,rho,branch\n";
  for (const auto& pt : curve)
    os << format_double(pt.u) << ',' << format_double(pt.g_tpr) << ',' << format_double(pt.g_fdr)
       << ',' << method << ',' << design << ',' << format_double(spec.param) << ",main\n";
  json cfg{{"subcommand", "theory-tradeoff"}, {"method", method}, {"design", design},
           {"rho", rho},   {"a", a},           {"theta", theta},   {"r", r},
           {"u-min", u_min}, {"u-max", u_max}, {"u-step", u_step}, {"out", out}};
  write_manifest(out, cfg, timer.ms());
  return 0;
}

// ------------------------------------------------------------- theory-exponent

int cmd_theory_exponent(const std::string& method, const std::string& design, double rho, double a,
                        double theta, double r, double u, const std::string& out) {
  Timer timer;
  theory::MethodSpec spec;
  spec.method = parse_theory_method(method);
  spec.design = design == "orthogonal" ? theory::TheoryDesign::orthogonal : theory::TheoryDesign::block2;
  spec.param = spec.design == theory::TheoryDesign::orthogonal ? a : rho;
  theory::ExponentPair e = theory::fp_fn_exponents(spec, theta, r, u);
  const double u_star = theory::optimal_u(spec, theta, r);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output: " + out);
    os = &file;
  }
  *os << "method,design,rho,theta,r,u,exp_fp,exp_fn,exp_hamm,fp_fn_available,is_bound,u_star\n";
  *os << method << ',' << design << ',' << format_double(spec.param) << ',' << format_double(theta)
      << ',' << format_double(r) << ',' << format_double(u) << ','
      << (e.fp_fn_available ? format_double(e.exp_fp) : "nan") << ','
      << (e.fp_fn_available ? format_double(e.exp_fn) : "nan") << ',' << format_double(e.exp_hamm)
      << ',' << (e.fp_fn_available ? 1 : 0) << ',' << (e.is_bound ? 1 : 0) << ','
      << format_double(u_star) << '\n';
  if (!out.empty()) {
    json cfg{{"subcommand", "theory-exponent"}, {"method", method}, {"design", design},
             {"rho", rho}, {"a", a}, {"theta", theta}, {"r", r}, {"u", u}, {"out", out}};
    write_manifest(out, cfg, timer.ms());
  }
  return 0;
}

// ------------------------------------------------------------------- simulate

int cmd_simulate(const std::string& preset_name, int reps, uint64_t seed, const std::string& out,
                 double theta, double rho, int p, int n, double r_min, double r_max, double r_step,
                 const std::string& design, int d, int k, bool signed_beta,
                 const std::string& threshold, double q, int threads,
                 const std::vector<std::string>& method_names, bool overlay) {
  Timer timer;
  mc::Preset preset = mc::Preset::custom;
  for (mc::Preset pr : {mc::Preset::exp1, mc::Preset::exp2, mc::Preset::exp3, mc::Preset::exp4,
                        mc::Preset::exp5, mc::Preset::custom})
    if (preset_name == mc::to_string(pr)) preset = pr;
  if (preset == mc::Preset::custom && preset_name != "custom")
    throw ConfigError("unknown preset: " + preset_name);

  mc::ExperimentConfig cfg = mc::preset_config(preset);
  if (reps > 0) cfg.reps = reps;
  cfg.master_seed = seed;
  cfg.threads = threads;
  if (theta > 0) cfg.theta = theta;
  if (p > 0) cfg.design.p = p;
  if (n > 0) cfg.design.n = n;
  if (rho > -1.0) cfg.design.rho = rho;
  if (d > 0) cfg.design.d = d;
  if (k > 0) cfg.design.k = k;
  if (!design.empty()) cfg.design.kind = parse_kind(design);
  if (signed_beta) cfg.signed_beta = true;
  if (r_step > 0) {
    cfg.r_grid.clear();
    for (double r = r_min; r <= r_max + 1e-9; r += r_step) cfg.r_grid.push_back(r);
  }
  if (threshold == "fdr") {
    cfg.threshold.kind = mc::ThresholdMode::Kind::fdr_q;
    cfg.threshold.q = q;
  } else if (threshold == "fixed-u") {
    cfg.threshold.kind = mc::ThresholdMode::Kind::fixed_u_optimal;
  } else if (!threshold.empty()) {
    throw ConfigError("unknown threshold mode: " + threshold);
  }
  if (!method_names.empty()) {
    cfg.methods.clear();
    for (const std::string& name : method_names) {
      mc::MethodVariant mv;
      if (name == "lasso")
        mv.family = mc::MethodVariant::Family::lasso_proto;
      else if (name == "ols")
        mv.family = mc::MethodVariant::Family::ols_proto;
      else if (name.rfind("kf-", 0) == 0) {
        mv.family = mc::MethodVariant::Family::knockoff;
        std::string rest = name.substr(3);  // ec-sgm, ci-dif, ec-ols-sgm
        mv.flavor = parse_flavor(rest.substr(0, 2));
        rest = rest.substr(3);
        if (rest.rfind("ols-", 0) == 0) {
          mv.ranker = RankerKind::least_squares;
          rest = rest.substr(4);
        }
        mv.stat = parse_stat(rest);
      } else if (name.rfind("gm-", 0) == 0) {
        mv.family = mc::MethodVariant::Family::gm;
        mv.stat = parse_stat(name.substr(3));
      } else if (name.rfind("degm-", 0) == 0) {
        mv.family = mc::MethodVariant::Family::degm;
        mv.flavor = parse_flavor(name.substr(5));
      } else
        throw ConfigError("unknown method name: " + name);
      cfg.methods.push_back(mv);
    }
  }
  if (cfg.methods.empty()) throw ConfigError("simulate: no methods configured");

  auto rows = mc::run_experiment(cfg);
  if (overlay) mc::theory_overlay(cfg, rows);

  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open output: " + out);
  os << "method,theta,r,rho,u_star,mean_hamming,log_p_hamming_over_p,mean_fdp,mean_tpr,"
        "fdp_q05,fdp_q25,fdp_q50,fdp_q75,fdp_q95,tpr_q05,tpr_q25,tpr_q50,tpr_q75,tpr_q95,"
        "reps,failures,wall_ms,theory_log_p\n";
  for (const auto& row : rows) {
    os << row.method << ',' << format_double(row.theta) << ',' << format_double(row.r) << ','
       << format_double(row.rho) << ',' << format_double(row.u_star) << ','
       << format_double(row.mean_hamming) << ',' << format_double(row.log_p_hamming_over_p) << ','
       << format_double(row.mean_fdp) << ',' << format_double(row.mean_tpr);
    for (double v : row.fdp_q) os << ',' << format_double(v);
    for (double v : row.tpr_q) os << ',' << format_double(v);
    os << ',' << row.reps << ',' << row.failures << ',' << format_double(row.wall_ms) << ','
       << format_double(row.theory_log_p) << '\n';
  }

  json cfgj{{"subcommand", "simulate"},
            {"preset", preset_name},
            {"reps", cfg.reps},
            {"seed", cfg.master_seed},
            {"theta", cfg.theta},
            {"design", to_string(cfg.design.kind)},
            {"p", cfg.design.p},
            {"n", cfg.design.n},
            {"rho", cfg.design.rho},
            {"signed", cfg.signed_beta},
            {"threshold", cfg.threshold.kind == mc::ThresholdMode::Kind::fdr_q ? "fdr" : "fixed-u"},
            {"q", cfg.threshold.q},
            {"threads", mc::resolve_threads(cfg.threads)},
            {"out", out}};
  {
    std::vector<std::string> names;
    for (const auto& m : cfg.methods) names.push_back(m.name());
    cfgj["methods"] = names;
    cfgj["r_grid"] = cfg.r_grid;
    cfgj["rho_grid"] = cfg.rho_grid;
  }
  write_manifest(out, cfgj, timer.ms());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(kVersion) + " - FDR-controlling variable selection laboratory"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; explicit flags override its keys");

  // design
  auto* sd = app.add_subcommand("design", "generate a Gram matrix and a design realization");
  std::string d_kind = "orthogonal", d_out_gram, d_out_x;
  int d_p = 100, d_n = 300, d_d = 2, d_k = 2;
  double d_rho = 0.0;
  uint64_t d_seed = 1;
  sd->add_option("--kind", d_kind, "orthogonal|block2|block-d|factor|expdecay|wishart");
  sd->add_option("--p", d_p, "number of variables");
  sd->add_option("--n", d_n, "number of rows");
  sd->add_option("--rho", d_rho, "correlation parameter");
  sd->add_option("--d", d_d, "block size (block-d)");
  sd->add_option("--k", d_k, "factor rank (factor)");
  sd->add_option("--seed", d_seed, "random seed");
  sd->add_option("--out-gram", d_out_gram, "CSV path for the Gram matrix");
  sd->add_option("--out-x", d_out_x, "CSV path for the design matrix");

  // select
  auto* ss = app.add_subcommand("select", "run an FDR-controlled selection on (X, y)");
  std::string s_x, s_y, s_method = "knockoff", s_flavor = "ci", s_ranker = "lasso-path",
              s_stat = "sgm", s_out = "selection.csv";
  double s_q = 0.1, s_u = -1.0;
  uint64_t s_seed = 1;
  ss->add_option("--x", s_x, "design matrix CSV")->required();
  ss->add_option("--y", s_y, "response CSV")->required();
  ss->add_option("--method", s_method, "knockoff|gm|degm|lasso-path|ols");
  ss->add_option("--flavor", s_flavor, "ec|ci (knockoff construction)");
  ss->add_option("--ranker", s_ranker, "lasso-path|least-squares");
  ss->add_option("--stat", s_stat, "sgm|dif");
  ss->add_option("--q", s_q, "target FDR level");
  ss->add_option("--u", s_u, "fixed threshold exponent (overrides --q when >= 0)");
  ss->add_option("--seed", s_seed, "random seed");
  ss->add_option("--out", s_out, "selection CSV output");

  // theory-phase
  auto* tp = app.add_subcommand("theory-phase", "sample h_AR / h_ER phase curves");
  std::string tp_method = "lasso-path", tp_out = "phase.csv";
  double tp_rho = 0.0, tp_a = 0.0;
  int tp_grid = 201;
  tp->add_option("--method", tp_method, "theory method name");
  tp->add_option("--rho", tp_rho, "block correlation");
  tp->add_option("--a", tp_a, "orthogonal knockoff correlation");
  tp->add_option("--grid", tp_grid, "number of theta samples");
  tp->add_option("--out", tp_out, "output CSV");

  // theory-tradeoff
  auto* tt = app.add_subcommand("theory-tradeoff", "sample the FDR-TPR trade-off curve");
  std::string tt_method = "knockoff-sgm", tt_design = "orthogonal", tt_out = "tradeoff.csv";
  double tt_rho = 0.0, tt_a = 0.0, tt_theta = 0.3, tt_r = 2.0, tt_umin = 0.0, tt_umax = 4.0,
         tt_ustep = 0.01;
  tt->add_option("--method", tt_method, "theory method name");
  tt->add_option("--design", tt_design, "orthogonal|block2");
  tt->add_option("--rho", tt_rho, "block correlation");
  tt->add_option("--a", tt_a, "orthogonal knockoff correlation");
  tt->add_option("--theta", tt_theta, "sparsity exponent");
  tt->add_option("--r", tt_r, "signal strength exponent");
  tt->add_option("--u-min", tt_umin, "grid start");
  tt->add_option("--u-max", tt_umax, "grid end");
  tt->add_option("--u-step", tt_ustep, "grid step");
  tt->add_option("--out", tt_out, "output CSV");

  // theory-exponent
  auto* te = app.add_subcommand("theory-exponent", "evaluate FP/FN/Hamming exponents at one point");
  std::string te_method = "knockoff-sgm", te_design = "orthogonal", te_out;
  double te_rho = 0.0, te_a = 0.0, te_theta = 0.3, te_r = 2.0, te_u = 0.5;
  te->add_option("--method", te_method, "theory method name");
  te->add_option("--design", te_design, "orthogonal|block2");
  te->add_option("--rho", te_rho, "block correlation");
  te->add_option("--a", te_a, "orthogonal knockoff correlation");
  te->add_option("--theta", te_theta, "sparsity exponent");
  te->add_option("--r", te_r, "signal strength exponent");
  te->add_option("--u", te_u, "threshold exponent");
  te->add_option("--out", te_out, "output CSV (default: stdout)");

  // simulate
  auto* sm = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  std::string sm_preset = "custom", sm_out = "sim.csv", sm_design, sm_threshold;
  std::vector<std::string> sm_methods;
  int sm_reps = 0, sm_p = 0, sm_n = 0, sm_d = 0, sm_k = 0, sm_threads = 0;
  double sm_theta = 0.0, sm_rho = -2.0, sm_rmin = 0.0, sm_rmax = 0.0, sm_rstep = 0.0, sm_q = 0.1;
  bool sm_signed = false, sm_overlay = false;
  uint64_t sm_seed = 1;
  sm->add_option("--preset", sm_preset, "exp1|exp2|exp3|exp4|exp5|custom");
  sm->add_option("--reps", sm_reps, "replications per grid point");
  sm->add_option("--seed", sm_seed, "master seed");
  sm->add_option("--out", sm_out, "output CSV");
  sm->add_option("--theta", sm_theta, "sparsity exponent");
  sm->add_option("--rho", sm_rho, "design correlation");
  sm->add_option("--p", sm_p, "number of variables");
  sm->add_option("--n", sm_n, "number of rows");
  sm->add_option("--r-min", sm_rmin, "signal grid start");
  sm->add_option("--r-max", sm_rmax, "signal grid end");
  sm->add_option("--r-step", sm_rstep, "signal grid step");
  sm->add_option("--design", sm_design, "design kind override");
  sm->add_option("--d", sm_d, "block size (block-d)");
  sm->add_option("--k", sm_k, "factor rank");
  sm->add_flag("--signed", sm_signed, "signed rare/weak coefficients");
  sm->add_option("--threshold", sm_threshold, "fixed-u|fdr");
  sm->add_option("--q", sm_q, "target FDR level for --threshold fdr");
  sm->add_option("--threads", sm_threads, "worker threads (0: FDRLAB_THREADS or hardware)");
  sm->add_option("--method", sm_methods, "method names (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sm->add_flag("--overlay", sm_overlay, "join theory exponents to the output rows");

  // two-pass parse so --config keys become defaults under the explicit flags
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    for (size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    if (!config_path.empty() && !args.empty()) {
      std::vector<std::string> merged;
      merged.push_back(args[0]);  // subcommand name first
      auto cfg_tokens = config_tokens(config_path);
      merged.insert(merged.end(), cfg_tokens.begin(), cfg_tokens.end());
      merged.insert(merged.end(), args.begin() + 1, args.end());
      args = merged;
    }
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : args) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sd->parsed())
      return cmd_design(d_kind, d_p, d_n, d_rho, d_d, d_k, d_seed, d_out_gram, d_out_x);
    if (ss->parsed())
      return cmd_select(s_x, s_y, s_method, s_flavor, s_ranker, s_stat, s_q, s_u, s_seed, s_out);
    if (tp->parsed()) return cmd_theory_phase(tp_method, tp_rho, tp_a, tp_grid, tp_out);
    if (tt->parsed())
      return cmd_theory_tradeoff(tt_method, tt_design, tt_rho, tt_a, tt_theta, tt_r, tt_umin,
                                 tt_umax, tt_ustep, tt_out);
    if (te->parsed())
      return cmd_theory_exponent(te_method, te_design, te_rho, te_a, te_theta, te_r, te_u, te_out);
    if (sm->parsed())
      return cmd_simulate(sm_preset, sm_reps, sm_seed, sm_out, sm_theta, sm_rho, sm_p, sm_n,
                          sm_rmin, sm_rmax, sm_rstep, sm_design, sm_d, sm_k, sm_signed,
                          sm_threshold, sm_q, sm_threads, sm_methods, sm_overlay);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
