#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fdrlab/design.hpp"
#include "fdrlab/rng.hpp"

namespace fdrlab {

enum class SFlavor { equicorrelated, conditional_independence, custom };

inline const char* to_string(SFlavor f) {
  switch (f) {
    case SFlavor::equicorrelated: return "ec";
    case SFlavor::conditional_independence: return "ci";
    case SFlavor::custom: return "custom";
  }
  return "?";
}

struct SVector {
  Eigen::VectorXd s;
  SFlavor flavor = SFlavor::equicorrelated;
  double alpha = 1.0;  // CI truncation factor actually used
};

struct KnockoffBundle {
  Eigen::MatrixXd X;
  Eigen::MatrixXd Xtilde;
  SVector s;
  GramMatrix gram;

  // Gram of [X, Xtilde], assembled analytically from (G, s)
  Eigen::MatrixXd tampered_gram() const {
    const int p = static_cast<int>(gram.G.rows());
    Eigen::MatrixXd GS = gram.G;
    GS.diagonal() -= s.s;
    Eigen::MatrixXd T(2 * p, 2 * p);
    T.topLeftCorner(p, p) = gram.G;
    T.bottomRightCorner(p, p) = gram.G;
    T.topRightCorner(p, p) = GS;
    T.bottomLeftCorner(p, p) = GS;
    return T;
  }
};

namespace detail {
inline double min_eig_2G_minus_S(const Eigen::MatrixXd& G, const Eigen::VectorXd& s) {
  Eigen::MatrixXd M = 2.0 * G;
  M.diagonal() -= s;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}
}  // namespace detail

// diag(s) for the standard flavors. Equi-correlated: s_j = min(1, 2 lambda_min(G)).
// Conditional independence: s_j = alpha / omega_j with alpha the largest value
// in [0,1] keeping diag(s) <= 2G (bisection to 1e-10).
inline SVector knockoff_s(const GramMatrix& gram, SFlavor flavor,
                          const Eigen::VectorXd* custom = nullptr) {
  const int p = gram.p();
  SVector out;
  out.flavor = flavor;
  switch (flavor) {
    case SFlavor::equicorrelated: {
      const double lmin = min_eigenvalue(gram);
      if (lmin <= 0) throw std::invalid_argument("knockoff_s: G not positive definite");
      out.s = Eigen::VectorXd::Constant(p, std::min(1.0, 2.0 * lmin));
      break;
    }
    case SFlavor::conditional_independence: {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.G);
      if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0)
        throw std::invalid_argument("knockoff_s: G not positive definite");
      Eigen::VectorXd omega = ldlt.solve(Eigen::MatrixXd::Identity(p, p)).diagonal();
      Eigen::VectorXd s_full = omega.cwiseInverse();
      double alpha = 1.0;
      if (detail::min_eig_2G_minus_S(gram.G, s_full) < -1e-10) {
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-10) {
          const double mid = 0.5 * (lo + hi);
          if (detail::min_eig_2G_minus_S(gram.G, mid * s_full) >= 0.0)
            lo = mid;
          else
            hi = mid;
        }
        alpha = lo;
      }
      out.alpha = alpha;
      out.s = alpha * s_full;
      break;
    }
    case SFlavor::custom: {
      if (!custom) throw std::invalid_argument("knockoff_s: custom flavor needs an s vector");
      if (custom->size() != p) throw std::invalid_argument("knockoff_s: custom s has wrong length");
      if (custom->minCoeff() < 0.0) throw std::invalid_argument("knockoff_s: custom s must be nonnegative");
      const double me = detail::min_eig_2G_minus_S(gram.G, *custom);
      if (me < -1e-10) {
        std::ostringstream msg;
        msg << "knockoff_s: custom s violates diag(s) <= 2G (min eigenvalue of 2G - diag(s) is " << me << ")";
        throw std::invalid_argument(msg.str());
      }
      out.s = *custom;
      break;
    }
  }
  return out;
}

// Fixed-X knockoff realization: Xtilde = X(I - G^{-1} diag(s)) + Utilde C with
// C'C = 2 diag(s) - diag(s) G^{-1} diag(s) and Utilde an orthonormal frame
// orthogonal to col(X). Requires n >= 2p.
inline KnockoffBundle build_knockoffs(const DesignMatrix& design, const SVector& s, uint64_t seed) {
  const int n = design.n(), p = design.p();
  if (n < 2 * p) throw std::invalid_argument("build_knockoffs: requires n >= 2p");
  const Eigen::MatrixXd& G = design.gram.G;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0)
    throw std::invalid_argument("build_knockoffs: G not positive definite");
  Eigen::MatrixXd Ginv_S = ldlt.solve(Eigen::MatrixXd(s.s.asDiagonal()));

  // C'C = 2 diag(s) - diag(s) G^{-1} diag(s), clipped at -1e-12
  Eigen::MatrixXd CtC = s.s.asDiagonal() * Ginv_S;
  CtC = -CtC;
  CtC.diagonal() += 2.0 * s.s;
  CtC = 0.5 * (CtC + CtC.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(CtC);
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < p; ++i) {
    if (ev[i] < -1e-12) {
      std::ostringstream msg;
      msg << "build_knockoffs: 2 diag(s) - diag(s) G^{-1} diag(s) indefinite (eigenvalue " << ev[i] << ")";
      throw std::invalid_argument(msg.str());
    }
    ev[i] = std::max(ev[i], 0.0);
  }
  Eigen::MatrixXd C = ev.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();

  // orthonormal complement frame from a seeded Gaussian
  Rng rng(derive_seed(seed, 0x70FF));
  Eigen::MatrixXd A(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
  // project out col(X), then orthonormalize
  Eigen::HouseholderQR<Eigen::MatrixXd> qrx(design.X);
  Eigen::MatrixXd Qx = qrx.householderQ() * Eigen::MatrixXd::Identity(n, p);
  A -= Qx * (Qx.transpose() * A);
  Eigen::HouseholderQR<Eigen::MatrixXd> qra(A);
  Eigen::MatrixXd U = qra.householderQ() * Eigen::MatrixXd::Identity(n, p);

  KnockoffBundle out;
  out.X = design.X;
  out.Xtilde = design.X - design.X * Ginv_S + U * C;
  out.s = s;
  out.gram = design.gram;
  return out;
}

struct GMAugmentation {
  int j = 0;
  Eigen::VectorXd x_plus;
  Eigen::VectorXd x_minus;
  double c_j = 0.0;        // randomized variant only
  Eigen::VectorXd z_j;     // random direction; empty for the de-randomized variant
};

namespace detail {
// thin Q of X with column j removed
inline Eigen::MatrixXd q_minus_j(const Eigen::MatrixXd& X, int j) {
  const int n = static_cast<int>(X.rows()), p = static_cast<int>(X.cols());
  Eigen::MatrixXd Xm(n, p - 1);
  for (int c = 0, t = 0; c < p; ++c)
    if (c != j) Xm.col(t++) = X.col(c);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xm);
  if (qr.rank() < p - 1) throw std::runtime_error("gm_augment: X_{-j} is rank deficient");
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p - 1);
  return Q;
}
}  // namespace detail

// Gaussian mirror pair x_j +- c_j z_j with c_j matching the residual norms.
inline GMAugmentation gm_augment(const DesignMatrix& design, int j, uint64_t seed) {
  const int n = design.n(), p = design.p();
  if (n < p + 1) throw std::invalid_argument("gm_augment: requires n >= p+1");
  if (j < 0 || j >= p) throw std::invalid_argument("gm_augment: index out of range");
  Eigen::MatrixXd Q = detail::q_minus_j(design.X, j);

  Rng rng(derive_seed(seed, 0x63A2, static_cast<uint64_t>(j)));
  Eigen::VectorXd z(n);
  for (int i = 0; i < n; ++i) z[i] = rng.normal();

  const Eigen::VectorXd xj = design.X.col(j);
  const Eigen::VectorXd xres = xj - Q * (Q.transpose() * xj);
  const Eigen::VectorXd zres = z - Q * (Q.transpose() * z);
  const double zn = zres.norm();
  if (zn < 1e-12) throw std::runtime_error("gm_augment: degenerate z draw");
  GMAugmentation out;
  out.j = j;
  out.c_j = xres.norm() / zn;
  out.z_j = z;
  out.x_plus = xj + out.c_j * z;
  out.x_minus = xj - out.c_j * z;
  return out;
}

// De-randomized mirror pair x_j +- xt_j; xt must match the residual norm of
// x_j (knockoff columns always do).
inline GMAugmentation degm_augment(const DesignMatrix& design, const Eigen::MatrixXd& Xtilde, int j) {
  const int n = design.n(), p = design.p();
  if (j < 0 || j >= p) throw std::invalid_argument("degm_augment: index out of range");
  if (Xtilde.rows() != n || Xtilde.cols() != p) throw std::invalid_argument("degm_augment: Xtilde shape mismatch");
  Eigen::MatrixXd Q = detail::q_minus_j(design.X, j);
  const Eigen::VectorXd xj = design.X.col(j);
  const Eigen::VectorXd xt = Xtilde.col(j);
  const double nx = (xj - Q * (Q.transpose() * xj)).norm();
  const double nt = (xt - Q * (Q.transpose() * xt)).norm();
  if (std::abs(nx - nt) > 1e-6) {
    std::ostringstream msg;
    msg << "degm_augment: residual norms differ (" << nx << " vs " << nt << ")";
    throw std::invalid_argument(msg.str());
  }
  GMAugmentation out;
  out.j = j;
  out.x_plus = xj + xt;
  out.x_minus = xj - xt;
  return out;
}

}  // namespace fdrlab
