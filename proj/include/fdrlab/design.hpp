#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fdrlab/rng.hpp"

namespace fdrlab {

enum class DesignKind { orthogonal, block2, block_d, factor, expdecay, wishart };

inline const char* to_string(DesignKind k) {
  switch (k) {
    case DesignKind::orthogonal: return "orthogonal";
    case DesignKind::block2: return "block2";
    case DesignKind::block_d: return "block_d";
    case DesignKind::factor: return "factor";
    case DesignKind::expdecay: return "expdecay";
    case DesignKind::wishart: return "wishart";
  }
  return "?";
}

struct DesignSpec {
  DesignKind kind = DesignKind::orthogonal;
  int p = 2;
  int n = 4;
  double rho = 0.0;  // block2, block_d, expdecay
  int d = 2;         // block_d
  int k = 2;         // factor
  uint64_t seed = 1;

  void validate() const {
    if (p < 2) throw std::invalid_argument("design: p must be >= 2");
    if (n < p) throw std::invalid_argument("design: n must be >= p");
    switch (kind) {
      case DesignKind::block2:
      case DesignKind::expdecay:
        if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("design: rho must be in (-1,1)");
        break;
      case DesignKind::block_d:
        if (!(rho > -1.0 && rho < 1.0)) throw std::invalid_argument("design: rho must be in (-1,1)");
        if (d < 2) throw std::invalid_argument("design: block size d must be >= 2");
        if (p % d != 0) throw std::invalid_argument("design: d must divide p");
        break;
      case DesignKind::factor:
        if (k < 1) throw std::invalid_argument("design: factor rank k must be >= 1");
        break;
      default:
        break;
    }
  }
};

struct GramMatrix {
  Eigen::MatrixXd G;
  int p() const { return static_cast<int>(G.rows()); }
};

struct DesignMatrix {
  Eigen::MatrixXd X;
  GramMatrix gram;
  int n() const { return static_cast<int>(X.rows()); }
  int p() const { return static_cast<int>(X.cols()); }
};

inline double min_eigenvalue(const GramMatrix& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.G, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline GramMatrix make_gram(const DesignSpec& spec) {
  spec.validate();
  const int p = spec.p;
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(p, p);
  switch (spec.kind) {
    case DesignKind::orthogonal:
      break;
    case DesignKind::block2: {
      for (int j = 0; j + 1 < p; j += 2) {
        G(j, j + 1) = spec.rho;
        G(j + 1, j) = spec.rho;
      }
      // odd p: trailing block is the scalar 1, already set
      break;
    }
    case DesignKind::block_d: {
      if (spec.rho <= -1.0 / (spec.d - 1)) {
        Eigen::MatrixXd B = Eigen::MatrixXd::Constant(spec.d, spec.d, spec.rho);
        B.diagonal().setOnes();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B, Eigen::EigenvaluesOnly);
        std::ostringstream msg;
        msg << "block_d gram not positive definite: rho=" << spec.rho
            << " <= -1/(d-1), block min eigenvalue " << es.eigenvalues().minCoeff();
        throw std::invalid_argument(msg.str());
      }
      for (int b = 0; b < p; b += spec.d)
        for (int i = 0; i < spec.d; ++i)
          for (int j = 0; j < spec.d; ++j)
            if (i != j) G(b + i, b + j) = spec.rho;
      break;
    }
    case DesignKind::factor: {
      Rng rng(derive_seed(spec.seed, 0xFAC702));
      Eigen::MatrixXd B(p, spec.k);
      if (spec.k == 2) {
        for (int j = 0; j < p; ++j) {
          const double alpha = 2.0 * M_PI * rng.uniform();
          B(j, 0) = std::cos(alpha);
          B(j, 1) = std::sin(alpha);
        }
      } else {
        for (int j = 0; j < p; ++j) {
          double nrm2 = 0.0;
          do {
            for (int c = 0; c < spec.k; ++c) B(j, c) = rng.normal();
            nrm2 = B.row(j).squaredNorm();
          } while (nrm2 < 1e-300);
          B.row(j) /= std::sqrt(nrm2);
        }
      }
      G = 0.5 * (B * B.transpose() + Eigen::MatrixXd::Identity(p, p));
      // rows of B are unit, so the diagonal is already 1; rescale anyway to
      // keep the invariant exact under roundoff
      Eigen::VectorXd dinv = G.diagonal().cwiseSqrt().cwiseInverse();
      G = dinv.asDiagonal() * G * dinv.asDiagonal();
      break;
    }
    case DesignKind::expdecay: {
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) G(i, j) = std::pow(spec.rho, std::abs(i - j));
      break;
    }
    case DesignKind::wishart: {
      // sample correlation of n iid N(0, I_p) draws; redraw degenerate samples
      for (int attempt = 0; attempt < 64; ++attempt) {
        Rng rng(derive_seed(spec.seed, 0x815A27, attempt));
        Eigen::MatrixXd Z(spec.n, p);
        for (int i = 0; i < spec.n; ++i)
          for (int j = 0; j < p; ++j) Z(i, j) = rng.normal();
        Eigen::RowVectorXd mean = Z.colwise().mean();
        Z.rowwise() -= mean;
        Eigen::MatrixXd S = Z.transpose() * Z;
        Eigen::VectorXd dinv = S.diagonal().cwiseSqrt().cwiseInverse();
        G = dinv.asDiagonal() * S * dinv.asDiagonal();
        G = 0.5 * (G + G.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() > 1e-6) break;
        if (attempt == 63) throw std::runtime_error("wishart: no positive definite sample after 64 attempts");
      }
      break;
    }
  }
  // exact symmetry and unit diagonal
  for (int i = 0; i < p; ++i) {
    G(i, i) = 1.0;
    for (int j = i + 1; j < p; ++j) G(j, i) = G(i, j);
  }
  return GramMatrix{std::move(G)};
}

// X = Q L' with L the lower Cholesky factor of G and Q a seeded random
// orthonormal n x p frame; any X with X'X = G is equivalent downstream.
inline DesignMatrix realize_design(const GramMatrix& gram, int n, uint64_t seed) {
  const int p = gram.p();
  if (n < p) throw std::invalid_argument("realize_design: n must be >= p");
  Eigen::LLT<Eigen::MatrixXd> llt(gram.G);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.G, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "realize_design: cholesky failed, smallest eigenvalue " << es.eigenvalues().minCoeff();
    throw std::runtime_error(msg.str());
  }
  Rng rng(derive_seed(seed, 0xDE5160));
  Eigen::MatrixXd A(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) A(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, p);
  Eigen::MatrixXd L = llt.matrixL();
  return DesignMatrix{Q * L.transpose(), gram};
}

}  // namespace fdrlab
