#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "fdrlab/lasso_path.hpp"
#include "fdrlab/mirror_stats.hpp"
#include "fdrlab/theory/ellipsoid.hpp"
#include "fdrlab/theory/exponents.hpp"
#include "fdrlab/theory/regions.hpp"

namespace fdrlab::theory {

// Exponents recomputed from rejection-region geometry: the probability of a
// selection error is p^{-b} with b the Sigma-metric distance from the
// conditional mean to the region (FP) or its complement (FN), assembled over
// the most-likely (beta_j, beta_{j+1}) cases. Feasibility uses the exact
// normalized statistics, so this route is independent of the closed forms in
// exponents.hpp.
inline ExponentPair oracle_fp_fn_exponents(const MethodSpec& spec, double theta, double r, double u) {
  spec.validate();
  const double sr = std::sqrt(r);
  const double su = std::sqrt(u);
  const double rho = spec.param;
  const double ar = std::abs(rho);
  using StatFn = std::function<double(const Eigen::VectorXd&)>;

  auto dist = [&](const Region& region, const StatFn& stat, const Eigen::VectorXd& mu,
                  const Eigen::MatrixXd& sigma, bool complement) {
    EllipsoidProblem prob;
    prob.mu = mu;
    prob.sigma = sigma;
    prob.region = region;
    prob.stat = stat;
    prob.threshold = su;
    prob.orientation =
        complement ? EllipsoidProblem::Orientation::Complement : EllipsoidProblem::Orientation::Set;
    return ellipsoid_exponent(prob).b;
  };

  ExponentPair out;
  switch (spec.method) {
    case Method::bh_marginal: {
      if (spec.design != TheoryDesign::orthogonal)
        throw std::invalid_argument("oracle: bh_marginal needs orthogonal design");
      Region reg = marginal_region(u);
      StatFn stat = [](const Eigen::VectorXd& x) { return std::abs(x[0]); };
      Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(1), mu1 = Eigen::VectorXd::Constant(1, sr);
      Eigen::MatrixXd sig = Eigen::MatrixXd::Identity(1, 1);
      out.exp_fp = 1.0 - dist(reg, stat, mu0, sig, false);
      out.exp_fn = 1.0 - theta - dist(reg, stat, mu1, sig, true);
      break;
    }
    case Method::knockoff_sgm:
    case Method::knockoff_dif: {
      if (spec.design != TheoryDesign::orthogonal)
        throw std::invalid_argument("oracle: knockoff sgm/dif needs orthogonal design");
      const double a = std::abs(spec.param);  // exponents depend on |a|
      const bool sgm = spec.method == Method::knockoff_sgm;
      Region reg = sgm ? knockoff_ortho_sgm_region(u) : knockoff_ortho_dif_region(a, u);
      StatFn stat = [a, sgm](const Eigen::VectorXd& x) {
        auto [z, zt] = bivariate_entry_times(x[0], x[1], a);
        return sgm ? signed_max(z, zt) : z - zt;
      };
      Eigen::MatrixXd sig(2, 2);
      sig << 1, a, a, 1;
      Eigen::Vector2d mu0(0, 0), mu1(sr, a * sr);
      out.exp_fp = 1.0 - dist(reg, stat, mu0, sig, false);
      out.exp_fn = 1.0 - theta - dist(reg, stat, mu1, sig, true);
      break;
    }
    case Method::gm_sgm:
    case Method::gm_dif: {
      const double omega =
          spec.design == TheoryDesign::orthogonal ? 1.0 : 1.0 / (1.0 - rho * rho);
      const StatKind kind = spec.method == Method::gm_sgm ? StatKind::signed_max : StatKind::difference;
      Region reg = kind == StatKind::signed_max ? gm_sgm_region(u) : gm_dif_region(u);
      StatFn stat = [kind](const Eigen::VectorXd& x) { return mirror_stat(x[0], x[1], kind); };
      Eigen::MatrixXd sig = 0.5 * omega * Eigen::MatrixXd::Identity(2, 2);
      Eigen::Vector2d mu0(0, 0), mu1(0.5 * sr, 0.5 * sr);
      out.exp_fp = 1.0 - dist(reg, stat, mu0, sig, false);
      out.exp_fn = 1.0 - theta - dist(reg, stat, mu1, sig, true);
      break;
    }
    case Method::ols_prototype:
    case Method::lassopath_prototype: {
      const double arr = spec.design == TheoryDesign::orthogonal ? 0.0 : ar;
      const bool ols = spec.method == Method::ols_prototype;
      Region reg = ols ? ols_region(arr, u) : lasso_path_region(arr, u);
      StatFn stat = [arr, ols](const Eigen::VectorXd& x) {
        if (ols) return std::abs(x[0] - arr * x[1]) / (1.0 - arr * arr);
        return bivariate_entry_times(x[0], x[1], arr).first;
      };
      Eigen::MatrixXd sig(2, 2);
      sig << 1, arr, arr, 1;
      // most-likely case centers; negative rho reflects the 2nd coordinate
      Eigen::Vector2d mu1(0, 0), mu2, mu3, mu4;
      if (rho >= 0 || spec.design == TheoryDesign::orthogonal) {
        mu2 = {arr * sr, sr};
        mu3 = {sr, arr * sr};
        mu4 = {(1 + arr) * sr, (1 + arr) * sr};
      } else {
        mu2 = {-arr * sr, -sr};
        mu3 = {sr, arr * sr};
        mu4 = {(1 - arr) * sr, -(1 - arr) * sr};
      }
      out.exp_fp = 1.0 - std::min(dist(reg, stat, mu1, sig, false), theta + dist(reg, stat, mu2, sig, false));
      out.exp_fn = 1.0 - std::min(theta + dist(reg, stat, mu3, sig, true),
                                  2.0 * theta + dist(reg, stat, mu4, sig, true));
      break;
    }
    case Method::knockoff_ec: {
      if (spec.design != TheoryDesign::block2 || ar < 0.5)
        throw std::invalid_argument("oracle: knockoff_ec oracle covers block2 with |rho| >= 1/2");
      Region reg = ec_knockoff_3d_region(ar, u);
      // tie-broken selections (variable and knockoff entering together) count
      // as selected: the ties fill positive-probability regions here and the
      // exponents treat them as full members
      StatFn stat = [ar](const Eigen::VectorXd& x) {
        QuadEntry q = quad_degenerate_path(x[2], x[0], x[1], ar);
        const double m = std::max(q.z1, q.zt1);
        return q.z1 >= q.zt1 - 1e-12 * std::max(1.0, m) ? m : -m;
      };
      Eigen::MatrixXd sig = Eigen::Vector3d(1.0 - ar, 1.0 - ar, ar).asDiagonal();
      Eigen::Vector3d c1(0, 0, 0), c2, c3((1 - ar) * sr, 0, ar * sr), c4;
      if (rho >= 0) {
        c2 = {0, (1 - ar) * sr, ar * sr};
        c4 = {(1 - ar) * sr, (1 - ar) * sr, 2 * ar * sr};
      } else {  // signed duality: effective coefficients (beta_j, -beta_{j+1})
        c2 = {0, -(1 - ar) * sr, -ar * sr};
        c4 = {(1 - ar) * sr, -(1 - ar) * sr, 0};
      }
      out.exp_fp = 1.0 - std::min(dist(reg, stat, c1, sig, false), theta + dist(reg, stat, c2, sig, false));
      out.exp_fn = 1.0 - std::min(theta + dist(reg, stat, c3, sig, true),
                                  2.0 * theta + dist(reg, stat, c4, sig, true));
      break;
    }
    default:
      throw std::invalid_argument("oracle_fp_fn_exponents: no region oracle for this method");
  }
  out.exp_hamm = std::max(out.exp_fp, out.exp_fn);
  return out;
}

}  // namespace fdrlab::theory
