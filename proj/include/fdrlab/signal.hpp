#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fdrlab/design.hpp"
#include "fdrlab/rng.hpp"

namespace fdrlab {

struct SignalConfig {
  double theta = 0.5;  // sparsity exponent, in (0,1)
  double r = 1.0;      // signal strength exponent, > 0
  bool signed_beta = false;
  int p = 2;

  void validate() const {
    if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("signal: theta must be in (0,1)");
    if (!(r >= 0.0)) throw std::invalid_argument("signal: r must be >= 0");
    if (p < 1) throw std::invalid_argument("signal: p must be >= 1");
  }
  double epsilon() const { return std::pow(static_cast<double>(p), -theta); }
  double tau() const { return std::sqrt(2.0 * r * std::log(static_cast<double>(p))); }
};

struct BetaVector {
  Eigen::VectorXd beta;
  std::vector<int> support;
};

struct Response {
  Eigen::VectorXd y;
  double sigma = 1.0;
};

inline BetaVector draw_beta(const SignalConfig& config, uint64_t seed) {
  config.validate();
  Rng rng(derive_seed(seed, 0xBE7A));
  const double eps = config.epsilon();
  const double tau = config.tau();
  BetaVector out;
  out.beta = Eigen::VectorXd::Zero(config.p);
  for (int j = 0; j < config.p; ++j) {
    if (rng.uniform() < eps) {
      double v = tau;
      if (config.signed_beta && rng.uniform() < 0.5) v = -tau;
      out.beta[j] = v;
      // the mixture draw defines the support; it equals {beta_j != 0}
      // whenever tau_p > 0 and keeps r = 0 meaningful (tau_p = 0)
      out.support.push_back(j);
    }
  }
  return out;
}

// sigma is fixed to 1; the override exists for noiseless test hooks only
inline Response draw_response(const DesignMatrix& design, const BetaVector& beta, uint64_t seed,
                              double sigma = 1.0) {
  if (beta.beta.size() != design.p()) throw std::invalid_argument("draw_response: dimension mismatch");
  Rng rng(derive_seed(seed, 0x9E5));
  Response out;
  out.sigma = sigma;
  out.y = design.X * beta.beta;
  if (sigma != 0.0)
    for (int i = 0; i < design.n(); ++i) out.y[i] += sigma * rng.normal();
  return out;
}

}  // namespace fdrlab
