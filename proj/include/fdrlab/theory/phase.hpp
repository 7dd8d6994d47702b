#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdrlab/theory/exponents.hpp"

namespace fdrlab::theory {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// rho_0 = sqrt(2) - 1 - sqrt(2 - sqrt(2)) ~= -0.3512: the correlation below
// which the equi-correlated knockoff loses the Lasso-path phase diagram.
inline double rho0() { return std::sqrt(2.0) - 1.0 - std::sqrt(2.0 - std::sqrt(2.0)); }

struct PhaseCurves {
  std::vector<double> theta;
  std::vector<double> h_ar;
  std::vector<double> h_er;  // may contain +inf
};

namespace detail {
inline double sq2(double x) { return x * x; }

inline double lasso_h_er(double theta, double rho) {
  const double h1 = sq2(1.0 + std::sqrt(1.0 - theta));
  const double h2 = sq2(1.0 + std::sqrt((1.0 - rho) / (1.0 + rho))) * (1.0 - theta);
  if (rho >= 0.0) return std::max(h1, h2);
  double h3 = 0.0;
  if (theta < 0.5) {
    const double t1 = std::sqrt((1.0 + rho) / (1.0 - rho)) * std::sqrt(1.0 - 2.0 * theta);
    const double t2 = std::sqrt((1.0 - rho) / (1.0 + rho)) * std::sqrt(1.0 - theta);
    h3 = sq2(t1 + t2) / sq2(1.0 + rho);
  }
  return std::max({h1, h2, h3});
}
}  // namespace detail

// Phase curve evaluators h_AR(theta), h_ER(theta) per method.
inline double h_ar_curve(const MethodSpec& spec, double theta) {
  spec.validate();
  const double rho = spec.param;
  switch (spec.method) {
    case Method::bh_marginal:
    case Method::knockoff_sgm:
    case Method::knockoff_dif:
      return theta;
    case Method::gm_sgm:
    case Method::gm_dif:
      return spec.design == TheoryDesign::orthogonal ? theta : theta / (1.0 - rho * rho);
    case Method::ols_prototype:
      return spec.design == TheoryDesign::orthogonal ? theta : theta / (1.0 - rho * rho);
    case Method::lassopath_prototype:
    case Method::knockoff_ec:
    case Method::knockoff_ci:
      return theta;
    case Method::knockoff_ols:
      return theta / detail::sq2(1.0 - rho * rho);
    case Method::degm:
      return theta / (1.0 - rho * rho);
  }
  throw std::invalid_argument("h_ar_curve: unsupported method");
}

inline double h_er_curve(const MethodSpec& spec, double theta) {
  spec.validate();
  using detail::sq2;
  const double rho = spec.param;
  const double base = sq2(1.0 + std::sqrt(1.0 - theta));
  switch (spec.method) {
    case Method::bh_marginal:
      return base;
    case Method::knockoff_sgm: {
      const double a = std::abs(spec.param);
      return std::max((2.0 - 2.0 * theta) / (1.0 - a), base);
    }
    case Method::knockoff_dif: {
      const double a = std::abs(spec.param);
      return sq2(1.0 + std::sqrt((2.0 - 2.0 * theta) / (1.0 - a)));
    }
    case Method::gm_sgm:
      return spec.design == TheoryDesign::orthogonal ? base : base / (1.0 - rho * rho);
    case Method::gm_dif:
      if (spec.design == TheoryDesign::orthogonal) return sq2(1.0 + std::sqrt(2.0 - 2.0 * theta));
      throw std::invalid_argument("h_er_curve: gm_dif has no block2 phase curve");
    case Method::ols_prototype:
      return spec.design == TheoryDesign::orthogonal ? base : base / (1.0 - rho * rho);
    case Method::lassopath_prototype:
      return spec.design == TheoryDesign::orthogonal ? base : detail::lasso_h_er(theta, rho);
    case Method::knockoff_ols:
      return base / sq2(1.0 - rho * rho);
    case Method::degm:
      return base / (1.0 - rho * rho);
    case Method::knockoff_ci:
      return spec.design == TheoryDesign::orthogonal ? base : detail::lasso_h_er(theta, rho);
    case Method::knockoff_ec: {
      if (spec.design == TheoryDesign::orthogonal) return base;
      const double lp = detail::lasso_h_er(theta, rho);
      if (rho >= rho0()) return lp;
      if (rho > -0.5) {
        const double h5 = 2.0 * (1.0 - 2.0 * theta) * (1.0 + rho) / (sq2(1.0 + 2.0 * rho) * (1.0 - rho));
        return std::max(lp, h5);
      }
      return theta > 0.5 ? lp : kInf;  // rho <= -1/2: no exact recovery below theta = 1/2
    }
  }
  throw std::invalid_argument("h_er_curve: unsupported method");
}

inline PhaseCurves phase_curves(const MethodSpec& spec, int grid = 201) {
  if (grid < 2) throw std::invalid_argument("phase_curves: grid must have >= 2 points");
  PhaseCurves out;
  out.theta.reserve(grid);
  for (int i = 0; i < grid; ++i) {
    // open interval (0,1)
    const double t = (i + 0.5) / grid;
    out.theta.push_back(t);
    out.h_ar.push_back(h_ar_curve(spec, t));
    out.h_er.push_back(h_er_curve(spec, t));
  }
  return out;
}

}  // namespace fdrlab::theory
