#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fdrlab {

// Thrown when the homotopy would need a singular active-set Gram (e.g. the
// equi-correlated knockoff blocks with |rho| >= 1/2). Callers route those
// blocks to quad_degenerate_path.
struct DegenerateGramError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EntryTimes {
  Eigen::VectorXd lambda_entry;  // one per column, >= 0; 0 means never entered
};

namespace detail {

// Cholesky factor of the active-set Gram with append/remove updates.
class ActiveChol {
 public:
  void reset(int cap) {
    L_.setZero(cap, cap);
    k_ = 0;
  }
  int size() const { return k_; }

  // try to append a variable whose Gram column against the current active
  // set is g (size k) and self-inner-product is d
  bool append(const Eigen::VectorXd& g, double d, double tol) {
    Eigen::VectorXd w(k_);
    for (int i = 0; i < k_; ++i) {
      double s = g[i];
      for (int j = 0; j < i; ++j) s -= L_(i, j) * w[j];
      w[i] = s / L_(i, i);
    }
    const double rest = d - w.squaredNorm();
    if (rest <= tol) return false;
    for (int i = 0; i < k_; ++i) L_(k_, i) = w[i];
    L_(k_, k_) = std::sqrt(rest);
    ++k_;
    return true;
  }

  // remove the variable at active position idx (Givens re-triangularization)
  void remove(int idx) {
    for (int i = idx; i + 1 < k_; ++i)
      for (int j = 0; j <= i + 1; ++j) L_(i, j) = L_(i + 1, j);
    --k_;
    for (int i = idx; i < k_; ++i) {
      const double a = L_(i, i), b = L_(i, i + 1);
      const double r = std::hypot(a, b);
      const double c = a / r, s = b / r;
      L_(i, i) = r;
      L_(i, i + 1) = 0.0;
      for (int m = i + 1; m < k_; ++m) {
        const double x = L_(m, i), y = L_(m, i + 1);
        L_(m, i) = c * x + s * y;
        L_(m, i + 1) = -s * x + c * y;
      }
    }
    for (int i = 0; i < k_; ++i)
      for (int j = i + 1; j <= k_; ++j) L_(i, j) = 0.0;
  }

  // solve (L L') x = b
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x(k_);
    for (int i = 0; i < k_; ++i) {
      double s = b[i];
      for (int j = 0; j < i; ++j) s -= L_(i, j) * x[j];
      x[i] = s / L_(i, i);
    }
    for (int i = k_ - 1; i >= 0; --i) {
      double s = x[i];
      for (int j = i + 1; j < k_; ++j) s -= L_(j, i) * x[j];
      x[i] = s / L_(i, i);
    }
    return x;
  }

 private:
  Eigen::MatrixXd L_;
  int k_ = 0;
};

}  // namespace detail

// Exact LARS homotopy with the lasso modification, in Gram form. Records the
// first (largest) lambda at which each variable enters; by path continuity
// that equals sup{lambda > 0 : coefficient != 0}.
inline EntryTimes lasso_entry_times(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty) {
  const int m = static_cast<int>(gram.rows());
  if (gram.cols() != m || xty.size() != m) throw std::invalid_argument("lasso_entry_times: dimension mismatch");

  EntryTimes out;
  out.lambda_entry = Eigen::VectorXd::Zero(m);

  const double lambda_max = xty.cwiseAbs().maxCoeff();
  if (lambda_max <= 0.0) return out;  // path never activates
  const double tol = 1e-10 * lambda_max;
  const double sing_tol = 1e-12;

  std::vector<int> active;                 // variable indices, in active order
  std::vector<double> signs;               // matching signs
  std::vector<char> in_active(m, 0);
  std::vector<char> entered(m, 0);
  detail::ActiveChol chol;
  chol.reset(m);
  int n_entered = 0;

  double lambda = lambda_max;

  // seed the active set with every variable tied at lambda_max
  auto try_activate = [&](int j, double sign_j, double at_lambda) {
    Eigen::VectorXd g(chol.size());
    for (int i = 0; i < chol.size(); ++i) g[i] = gram(active[i], j);
    if (!chol.append(g, gram(j, j), sing_tol))
      throw DegenerateGramError(
          "lasso_entry_times: singular active-set Gram; use the closed-form degenerate path "
          "(quad_degenerate_path) for equi-correlated knockoff blocks with |rho| >= 1/2");
    active.push_back(j);
    signs.push_back(sign_j);
    in_active[j] = 1;
    if (!entered[j]) {
      entered[j] = 1;
      out.lambda_entry[j] = at_lambda;
      ++n_entered;
    }
  };

  for (int j = 0; j < m; ++j)
    if (std::abs(xty[j]) >= lambda_max - tol) try_activate(j, xty[j] > 0 ? 1.0 : -1.0, lambda_max);

  const int max_steps = 16 * m + 64;
  for (int step = 0; step < max_steps; ++step) {
    if (n_entered == m || lambda <= tol) break;
    const int k = chol.size();
    Eigen::VectorXd hA(k), sA(k);
    for (int i = 0; i < k; ++i) {
      hA[i] = xty[active[i]];
      sA[i] = signs[i];
    }
    // b_A(lam) = b0 - lam * dvec on the current segment
    Eigen::VectorXd b0 = chol.solve(hA);
    Eigen::VectorXd dvec = chol.solve(sA);

    // entry candidates: c_j(lam) = alpha_j + lam * beta_j crosses +-lam
    double next_entry = -1.0;
    std::vector<std::pair<int, double>> entries;  // (var, sign)
    for (int j = 0; j < m; ++j) {
      if (in_active[j]) continue;
      double gb0 = 0.0, gd = 0.0;
      for (int i = 0; i < k; ++i) {
        gb0 += gram(j, active[i]) * b0[i];
        gd += gram(j, active[i]) * dvec[i];
      }
      const double alpha = xty[j] - gb0;
      const double beta = gd;
      // c_j(lam) = alpha + lam*beta; entry when |c_j| = lam
      for (int s = -1; s <= 1; s += 2) {
        const double denom = static_cast<double>(s) - beta;
        if (std::abs(denom) < 1e-14) continue;
        const double cand = alpha / denom;
        if (cand > tol && cand < lambda - tol) {
          if (cand > next_entry + tol) {
            next_entry = cand;
            entries.clear();
          }
          if (std::abs(cand - next_entry) <= tol) entries.push_back({j, static_cast<double>(s)});
        }
      }
    }

    // exit candidates: active coefficient hits zero
    double next_exit = -1.0;
    int exit_pos = -1;
    for (int i = 0; i < k; ++i) {
      if (std::abs(dvec[i]) < 1e-14) continue;
      const double cand = b0[i] / dvec[i];
      if (cand > tol && cand < lambda - tol && cand > next_exit) {
        next_exit = cand;
        exit_pos = i;
      }
    }

    if (next_entry < 0.0 && next_exit < 0.0) break;  // nothing left before lambda -> 0

    if (next_exit > next_entry) {
      lambda = next_exit;
      const int var = active[exit_pos];
      chol.remove(exit_pos);
      active.erase(active.begin() + exit_pos);
      signs.erase(signs.begin() + exit_pos);
      in_active[var] = 0;
    } else {
      lambda = next_entry;
      // dedupe ties on the same variable (can appear for both sign roots)
      for (auto& [j, s] : entries)
        if (!in_active[j]) try_activate(j, s, next_entry);
    }
  }
  return out;
}

// Closed-form entry times of the two-variable path (eight-region case
// analysis). For rho < 0 the problem maps to (h1, -h2, -rho).
inline std::pair<double, double> bivariate_entry_times(double h1, double h2, double rho) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("bivariate_entry_times: |rho| must be < 1");
  if (rho < 0.0) {
    h2 = -h2;
    rho = -rho;
  }
  if (h1 == 0.0 && h2 == 0.0) return {0.0, 0.0};
  auto second = [rho](double first_h, double other_h) {
    // entry of the remaining variable once |first_h| leads
    const double g = other_h - rho * first_h;
    if (first_h >= 0.0) return std::max(g / (1.0 - rho), -g / (1.0 + rho));
    return std::max(g / (1.0 + rho), -g / (1.0 - rho));
  };
  if (std::abs(h1) >= std::abs(h2)) {
    return {std::abs(h1), std::max(0.0, second(h1, h2))};
  }
  return {std::max(0.0, second(h2, h1)), std::abs(h2)};
}

// Entry times (Z_j, Z_{j+1}, Ztilde_j, Ztilde_{j+1}) of the degenerate
// four-variate block produced by the equi-correlated knockoff on a 2x2
// block design with rho >= 1/2. Inputs are the reparametrized statistics:
// (h1,h2,h3,h4) = (m+d1, m+d2, m-d1, m-d2).
struct QuadEntry {
  double z1, z2, zt1, zt2;
};

inline QuadEntry quad_degenerate_path(double m, double d1, double d2, double rho) {
  if (!(rho >= 0.5 && rho < 1.0))
    throw std::invalid_argument("quad_degenerate_path: rho must be in [1/2, 1)");

  // reduce to d1 >= 0, d2 >= 0 (a sign flip of d_i swaps a variable with its
  // knockoff) and to |d1| >= |d2| (pair swap)
  const bool flip1 = d1 < 0.0, flip2 = d2 < 0.0;
  double D1 = std::abs(d1), D2 = std::abs(d2);
  const bool pair_swap = D1 < D2;
  if (pair_swap) std::swap(D1, D2);

  const double c = rho / (1.0 - rho);
  double e1, e2, e3, e4;  // entries of (var1, var2, knockoff1, knockoff2), D1 >= D2 >= 0
  if (m >= c * (D1 - D2)) {  // row 4: variable 1 first, then variable 2
    e1 = m + D1;
    e2 = m - c * D1 + D2 / (1.0 - rho);
    const double l3 = 0.5 * (D1 + D2) - (1.0 - rho) * m / (2.0 * rho);
    e3 = e4 = std::max(0.0, l3);
  } else if (m >= 0.0) {  // row 3: variable 1, knockoff 1, then {2, knockoff 2} together
    e1 = m + D1;
    e3 = (rho - 1.0) * m / rho + D1;
    e2 = e4 = D2;
  } else if (m > -c * (D1 - D2)) {  // row 2: knockoff 1, variable 1, then {2, knockoff 2}
    e3 = -m + D1;
    e1 = (1.0 - rho) * m / rho + D1;
    e2 = e4 = D2;
  } else {  // row 1: mirror image of row 4
    e3 = -m + D1;
    e4 = -m - c * D1 + D2 / (1.0 - rho);
    const double l3 = 0.5 * (D1 + D2) + (1.0 - rho) * m / (2.0 * rho);
    e1 = e2 = std::max(0.0, l3);
  }

  if (pair_swap) {
    std::swap(e1, e2);
    std::swap(e3, e4);
  }
  QuadEntry q{e1, e2, e3, e4};
  if (flip1) std::swap(q.z1, q.zt1);
  if (flip2) std::swap(q.z2, q.zt2);
  return q;
}

// Same block, addressed by the raw inner products h = y'[x_j, x_{j+1},
// xt_j, xt_{j+1}] and a signed rho with |rho| >= 1/2.
inline QuadEntry quad_degenerate_path_from_h(const std::array<double, 4>& h, double rho) {
  if (!(std::abs(rho) >= 0.5 && std::abs(rho) < 1.0))
    throw std::invalid_argument("quad_degenerate_path_from_h: |rho| must be in [1/2, 1)");
  double h1 = h[0], h2 = h[1], h3 = h[2], h4 = h[3];
  if (rho < 0.0) {  // negating variables 2 and 4 maps the block to +|rho|
    h2 = -h2;
    h4 = -h4;
  }
  // h lies in the range of the singular Gram, so (h1+h3) == (h2+h4) up to
  // numerical error; average the two readings of m
  const double m = 0.25 * (h1 + h3 + h2 + h4);
  const double d1 = 0.5 * (h1 - h3);
  const double d2 = 0.5 * (h2 - h4);
  return quad_degenerate_path(m, d1, d2, std::abs(rho));
}

struct LSCoefficients {
  Eigen::VectorXd beta_hat;
};

// Least squares through the normal equations; singular Gram is an error
// rather than a pseudo-inverse fallback.
inline LSCoefficients least_squares(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty) {
  const int m = static_cast<int>(gram.rows());
  if (gram.cols() != m || xty.size() != m) throw std::invalid_argument("least_squares: dimension mismatch");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.vectorD().minCoeff() < 1e-12)
    throw DegenerateGramError("least_squares: singular Gram matrix");
  LSCoefficients out{ldlt.solve(xty)};
  const double rel = (gram * out.beta_hat - xty).norm() / std::max(1.0, xty.norm());
  if (rel > 1e-8) throw std::runtime_error("least_squares: normal equations residual too large");
  return out;
}

}  // namespace fdrlab
