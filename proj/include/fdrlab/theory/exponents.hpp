#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdrlab::theory {

enum class Method {
  bh_marginal,
  knockoff_sgm,
  knockoff_dif,
  gm_sgm,
  gm_dif,
  ols_prototype,
  lassopath_prototype,
  knockoff_ols,
  degm,
  knockoff_ec,
  knockoff_ci,
};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::bh_marginal: return "bh-marginal";
    case Method::knockoff_sgm: return "knockoff-sgm";
    case Method::knockoff_dif: return "knockoff-dif";
    case Method::gm_sgm: return "gm-sgm";
    case Method::gm_dif: return "gm-dif";
    case Method::ols_prototype: return "ols";
    case Method::lassopath_prototype: return "lasso-path";
    case Method::knockoff_ols: return "knockoff-ols";
    case Method::degm: return "degm";
    case Method::knockoff_ec: return "knockoff-ec";
    case Method::knockoff_ci: return "knockoff-ci";
  }
  return "?";
}

enum class TheoryDesign { orthogonal, block2 };

// (method, design, a or rho)
struct MethodSpec {
  Method method = Method::bh_marginal;
  TheoryDesign design = TheoryDesign::orthogonal;
  double param = 0.0;  // a for orthogonal knockoff, rho for block2

  void validate() const {
    if (!(param > -1.0 && param < 1.0)) throw std::invalid_argument("MethodSpec: parameter must be in (-1,1)");
  }
};

struct ExponentPair {
  double exp_fp = 0.0;    // FP_p(u) = L_p p^{exp_fp}
  double exp_fn = 0.0;    // FN_p(u) = L_p p^{exp_fn}
  double exp_hamm = 0.0;  // FP+FN exponent
  bool fp_fn_available = true;  // false when only the sum has a closed form
  bool is_bound = false;        // Theorems stated as upper bounds
};

namespace detail {
inline double pos(double x) { return x > 0.0 ? x : 0.0; }
inline double sq(double x) { return x * x; }
inline double xi(double rho) { return std::sqrt(1.0 - rho * rho); }
inline double eta(double rho) { return std::sqrt((1.0 - std::abs(rho)) / (1.0 + std::abs(rho))); }
inline double lam(double rho) { return std::sqrt(1.0 - rho * rho) - std::sqrt(1.0 - std::abs(rho)); }

// exponent of the lasso-path false-positive probability pieces (block2)
inline double lasso_fp_min(double theta, double r, double u, double rho) {
  const double ar = std::abs(rho);
  const double su = std::sqrt(u), sr = std::sqrt(r);
  const double coupled = theta + sq(su - ar * sr) + sq(pos(xi(rho) * sr - eta(rho) * su)) - sq(pos(sr - su));
  return std::min(u, coupled);
}

inline double lasso_fn_iso(double r, double u, double rho) {
  const double su = std::sqrt(u), sr = std::sqrt(r);
  return sq(pos(sr - su) - pos((1.0 - xi(rho)) * sr - (1.0 - eta(rho)) * su));
}
}  // namespace detail

// omega_{1j} and omega_{2j} of the CI-knockoff tampered Gram on 2x2 blocks:
// the (1,1) and (1,3) entries of the inverse of the 4x4 block.
inline std::pair<double, double> ci_block_omega12(double rho) {
  Eigen::Matrix4d T;
  const double r2 = rho * rho;
  T << 1, rho, r2, rho,
       rho, 1, rho, r2,
       r2, rho, 1, rho,
       rho, r2, rho, 1;
  Eigen::Matrix4d inv = T.inverse();
  return {inv(0, 0), inv(0, 2)};
}

// f+_Hamm of the |rho| < 1/2 equi-correlated knockoff, evaluated literally.
inline double f_plus_hamm(double u, double r, double theta, double rho) {
  using namespace detail;
  const double ar = std::abs(rho);
  const double su = std::sqrt(u), sr = std::sqrt(r);
  const double b1 = u;
  const double b2 = theta + sq(su - ar * sr) + sq(pos(xi(rho) * sr - eta(rho) * su)) - sq(pos(sr - su));
  const double b3 = theta + sq(pos(sr - su) - pos((1.0 - xi(rho)) * sr - (1.0 - eta(rho)) * su));
  return std::min({b1, b2, b3});
}

// closed-form maximizer of f+_Hamm over u
inline double f_plus_hamm_optimal_u(double r, double theta, double rho) {
  const double ar = std::abs(rho);
  const double denom = detail::sq(std::sqrt(1.0 + ar) + std::sqrt(1.0 - ar));
  if (r < theta) return theta;
  if (theta <= 2.0 * ar * r / denom) return (1.0 + ar) * r / denom;
  return detail::sq(r + theta) / (4.0 * r);
}

inline ExponentPair fp_fn_exponents(const MethodSpec& spec, double theta, double r, double u) {
  spec.validate();
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("fp_fn_exponents: theta must be in (0,1)");
  if (!(r > 0.0)) throw std::invalid_argument("fp_fn_exponents: r must be > 0");
  if (!(u >= 0.0)) throw std::invalid_argument("fp_fn_exponents: u must be >= 0");
  using namespace detail;
  const double su = std::sqrt(u), sr = std::sqrt(r);
  const double rho = spec.param;
  const double ar = std::abs(rho);
  ExponentPair out;

  auto unsupported = [&]() -> ExponentPair {
    throw std::invalid_argument(std::string("fp_fn_exponents: unsupported method/design pair: ") +
                                to_string(spec.method) + " on " +
                                (spec.design == TheoryDesign::orthogonal ? "orthogonal" : "block2"));
  };

  switch (spec.method) {
    case Method::bh_marginal: {
      if (spec.design != TheoryDesign::orthogonal) return unsupported();
      out.exp_fp = 1.0 - u;
      out.exp_fn = 1.0 - theta - sq(pos(sr - su));
      break;
    }
    case Method::knockoff_sgm:
    case Method::knockoff_dif: {
      if (spec.design != TheoryDesign::orthogonal) return unsupported();
      const double a = std::abs(spec.param);
      out.exp_fp = 1.0 - u;
      if (spec.method == Method::knockoff_sgm)
        out.exp_fn = 1.0 - theta - std::min(0.5 * (1.0 - a) * r, sq(pos(sr - su)));
      else
        out.exp_fn = 1.0 - theta - 0.5 * (1.0 - a) * sq(pos(sr - su));
      break;
    }
    case Method::gm_sgm:
    case Method::gm_dif: {
      if (spec.design == TheoryDesign::orthogonal) {
        out.exp_fp = 1.0 - u;
        if (spec.method == Method::gm_sgm)
          out.exp_fn = 1.0 - theta - std::min(0.5 * r, sq(pos(sr - su)));
        else
          out.exp_fn = 1.0 - theta - 0.5 * sq(pos(sr - su));
      } else {
        if (spec.method != Method::gm_sgm) return unsupported();  // block theorem covers signed max only
        const double om = 1.0 - rho * rho;
        out.exp_fp = 1.0 - om * u;
        out.exp_fn = 1.0 - theta - om * std::min(sq(pos(sr - su)), 0.5 * r);
      }
      break;
    }
    case Method::ols_prototype: {
      const double om = spec.design == TheoryDesign::orthogonal ? 1.0 : 1.0 - rho * rho;
      out.exp_fp = 1.0 - om * u;
      out.exp_fn = 1.0 - theta - om * sq(pos(sr - su));
      break;
    }
    case Method::lassopath_prototype: {
      const double rr = spec.design == TheoryDesign::orthogonal ? 0.0 : rho;
      out.exp_fp = 1.0 - lasso_fp_min(theta, r, u, rr);
      if (rr >= 0.0) {
        out.exp_fn = 1.0 - theta - lasso_fn_iso(r, u, rr);
      } else {
        const double nested = 2.0 * theta + sq(pos(xi(rr) * sr - su / eta(rr)));
        out.exp_fn = 1.0 - std::min(theta + lasso_fn_iso(r, u, rr), nested);
      }
      break;
    }
    case Method::knockoff_ols: {
      if (spec.design != TheoryDesign::block2) return unsupported();
      auto [om1, om2] = ci_block_omega12(rho);
      out.exp_fp = 1.0 - u / om1;
      out.exp_fn = 1.0 - theta -
                   std::min(sq(pos(sr - su)), om1 / (om1 + std::abs(om2)) * 0.5 * r) / om1;
      out.is_bound = true;
      break;
    }
    case Method::degm: {
      if (spec.design != TheoryDesign::block2) return unsupported();
      // CI knockoff Xtilde: sigma_1j = omega_j, sigma_2j = 0
      const double s1 = 1.0 / (1.0 - rho * rho);
      out.exp_fp = 1.0 - u / s1;
      out.exp_fn = 1.0 - theta - std::min(sq(pos(sr - su)), 0.5 * r) / s1;
      out.is_bound = true;
      break;
    }
    case Method::knockoff_ec: {
      if (spec.design == TheoryDesign::orthogonal) {
        MethodSpec eq{Method::knockoff_sgm, TheoryDesign::orthogonal, 0.0};
        return fp_fn_exponents(eq, theta, r, u);
      }
      if (ar >= 0.5) {
        out.exp_fp = 1.0 - lasso_fp_min(theta, r, u, rho);
        const double core =
            sq(pos(sr - su) - pos((1.0 - xi(rho)) * sr - (1.0 - eta(rho)) * su) - pos(lam(rho) * sr - eta(rho) * su));
        if (rho >= 0.5)
          out.exp_fn = 1.0 - theta - core;
        else
          out.exp_fn = 1.0 - std::min(theta + core, 2.0 * theta);
      } else {
        out.fp_fn_available = false;
        if (rho >= 0.0) {
          out.exp_hamm = 1.0 - f_plus_hamm(u, r, theta, rho);
        } else {
          const double b2 = 2.0 * theta + sq(pos(xi(rho) * sr - su / eta(rho)));
          const double b3 = 2.0 * theta + sq(1.0 - 2.0 * ar) * (1.0 + ar) / (2.0 * (1.0 - ar)) * r;
          out.exp_hamm = 1.0 - std::min({f_plus_hamm(u, r, theta, rho), b2, b3});
        }
        return out;
      }
      break;
    }
    case Method::knockoff_ci: {
      if (spec.design == TheoryDesign::orthogonal) {
        MethodSpec eq{Method::knockoff_sgm, TheoryDesign::orthogonal, 0.0};
        return fp_fn_exponents(eq, theta, r, u);
      }
      out.fp_fn_available = false;
      if (rho >= 0.0) {
        out.exp_hamm = 1.0 - f_plus_hamm(u, r, theta, rho);
      } else {
        const double b2 = 2.0 * theta + sq(pos(xi(rho) * sr - su / eta(rho)));
        out.exp_hamm = 1.0 - std::min(f_plus_hamm(u, r, theta, rho), b2);
      }
      return out;
    }
  }
  out.exp_hamm = std::max(out.exp_fp, out.exp_fn);
  return out;
}

inline double hamming_exponent(const MethodSpec& spec, double theta, double r, double u) {
  return fp_fn_exponents(spec, theta, r, u).exp_hamm;
}

// Hamming exponent under the signed beta model: the worse of +-|rho|.
inline double hamming_exponent_signed(const MethodSpec& spec, double theta, double r, double u) {
  if (spec.design == TheoryDesign::orthogonal) return hamming_exponent(spec, theta, r, u);
  MethodSpec plus = spec, minus = spec;
  plus.param = std::abs(spec.param);
  minus.param = -std::abs(spec.param);
  return std::max(hamming_exponent(plus, theta, r, u), hamming_exponent(minus, theta, r, u));
}

struct TradeoffPoint {
  double u, g_tpr, g_fdr;
};

// (g_TPR(u), g_FDR(u)) samples: g_FDR = ((1-theta) - exp_fp)_+ and
// g_TPR = (1-theta) - exp_fn.
inline std::vector<TradeoffPoint> tradeoff_curve(const MethodSpec& spec, double theta, double r,
                                                 const std::vector<double>& u_grid) {
  std::vector<TradeoffPoint> out;
  out.reserve(u_grid.size());
  for (double u : u_grid) {
    ExponentPair e = fp_fn_exponents(spec, theta, r, u);
    if (!e.fp_fn_available)
      throw std::invalid_argument("tradeoff_curve: method has no separate FP/FN closed form");
    out.push_back({u, (1.0 - theta) - e.exp_fn, detail::pos((1.0 - theta) - e.exp_fp)});
  }
  return out;
}

// u minimizing the Hamming error exponent 1 - f(u): coarse grid of 1e4
// points refined by golden-section; flat stretches resolve to the smallest
// minimizer.
inline double optimal_u(const MethodSpec& spec, double theta, double r, bool signed_beta = false) {
  // minimizing the error exponent 1 - f means maximizing f
  auto f = [&](double u) {
    const double h = signed_beta ? hamming_exponent_signed(spec, theta, r, u)
                                 : hamming_exponent(spec, theta, r, u);
    return 1.0 - h;
  };
  const double u_max = std::max({4.0, 2.0 * detail::sq(std::sqrt(r) + 1.0), theta + 1.0});
  const int grid_n = 10000;
  double best_u = 0.0, best_f = f(0.0);
  for (int i = 1; i <= grid_n; ++i) {
    const double u = u_max * static_cast<double>(i) / grid_n;
    const double fu = f(u);
    if (fu > best_f + 1e-12) {
      best_f = fu;
      best_u = u;
    }
  }
  // golden-section refinement around the grid minimizer
  double lo = std::max(0.0, best_u - u_max / grid_n);
  double hi = std::min(u_max, best_u + u_max / grid_n);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  const double refined = 0.5 * (lo + hi);
  return f(refined) > best_f + 1e-15 ? refined : best_u;
}

}  // namespace fdrlab::theory
