#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "fdrlab/design.hpp"
#include "fdrlab/tamper.hpp"

namespace fdrlab::theory {

// Per-variable variance constants driving the least-squares-ranked methods:
//   omega_j   -- diagonal of G^{-1} (plain least squares / Gaussian mirror)
//   omega_1j, omega_2j -- (j,j) and (j,j+p) entries of the 2p x 2p tampered
//                Gram inverse (knockoff-OLS)
//   sigma_1j, sigma_2j -- 2x2 block of the (p+1)-column Gram inverse for the
//                de-randomized mirror
struct VarianceProfile {
  Eigen::VectorXd omega;
  Eigen::VectorXd omega1, omega2;
  Eigen::VectorXd sigma1, sigma2;
};

// Gram-level computation; sigma uses the block inverse
// D_j^{-1} = (x_j, xt_j)' (I - P_{-j}) (x_j, xt_j).
inline VarianceProfile variance_profile(const GramMatrix& gram, const SVector& s) {
  const int p = gram.p();
  const Eigen::MatrixXd& G = gram.G;
  VarianceProfile out;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
  if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0)
    throw std::invalid_argument("variance_profile: G not positive definite");
  Eigen::MatrixXd Ginv = ldlt.solve(Eigen::MatrixXd::Identity(p, p));
  out.omega = Ginv.diagonal();

  // tampered Gram inverse
  Eigen::MatrixXd GS = G;
  GS.diagonal() -= s.s;
  Eigen::MatrixXd T(2 * p, 2 * p);
  T.topLeftCorner(p, p) = G;
  T.bottomRightCorner(p, p) = G;
  T.topRightCorner(p, p) = GS;
  T.bottomLeftCorner(p, p) = GS;
  Eigen::LDLT<Eigen::MatrixXd> tl(T);
  if (tl.info() != Eigen::Success || tl.vectorD().minCoeff() <= 1e-12)
    throw std::invalid_argument("variance_profile: tampered Gram singular (omega_1j undefined)");
  Eigen::MatrixXd Tinv = tl.solve(Eigen::MatrixXd::Identity(2 * p, 2 * p));
  out.omega1.resize(p);
  out.omega2.resize(p);
  for (int j = 0; j < p; ++j) {
    out.omega1[j] = Tinv(j, j);
    out.omega2[j] = Tinv(j, j + p);
  }

  out.sigma1.resize(p);
  out.sigma2.resize(p);
  for (int j = 0; j < p; ++j) {
    // A = G_{-j,-j}, B = [G_{-j,j}, (G - S)_{-j,j}], C = 2x2 Gram of (x_j, xt_j)
    Eigen::MatrixXd A(p - 1, p - 1);
    Eigen::MatrixXd B(p - 1, 2);
    for (int r_ = 0, ri = 0; r_ < p; ++r_) {
      if (r_ == j) continue;
      for (int c_ = 0, ci = 0; c_ < p; ++c_) {
        if (c_ == j) continue;
        A(ri, ci) = G(r_, c_);
        ++ci;
      }
      B(ri, 0) = G(r_, j);
      B(ri, 1) = GS(r_, j);
      ++ri;
    }
    Eigen::Matrix2d C;
    C << 1.0, GS(j, j), GS(j, j), 1.0;
    Eigen::Matrix2d Dinv = C - B.transpose() * A.ldlt().solve(B);
    Eigen::Matrix2d D = Dinv.inverse();
    out.sigma1[j] = D(0, 0);
    out.sigma2[j] = D(0, 1);
  }
  return out;
}

}  // namespace fdrlab::theory
