#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fdrlab/theory/regions.hpp"

namespace fdrlab::theory {

// inf over S of (x - mu)' Sigma^{-1} (x - mu), where S is either a union of
// open polyhedra (orientation = Set) or its complement (orientation =
// Complement). The minimizer is mu itself or the Sigma-metric projection
// onto a face of the hyperplane arrangement, so enumerating projections onto
// all subsets of <= d hyperplanes is exhaustive.
//
// Polyhedral unions drop their interior facets (the open pieces do not cover
// shared boundaries), which breaks complement distances for means that sit
// exactly on such a facet. When the region is the level set {stat > t} of a
// continuous statistic, supplying (stat, threshold) makes feasibility exact:
// Set uses {stat >= t}, Complement uses {stat <= t}. The hyperplanes still
// generate the candidate projections.
struct EllipsoidProblem {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  Region region;
  enum class Orientation { Set, Complement } orientation = Orientation::Set;
  std::function<double(const Eigen::VectorXd&)> stat;  // optional
  double threshold = 0.0;
};

struct EllipsoidResult {
  double b = 0.0;
  bool mu_inside = false;  // mu lies in the target set, so b = 0
};

inline EllipsoidResult ellipsoid_exponent(const EllipsoidProblem& prob) {
  const int d = static_cast<int>(prob.mu.size());
  if (prob.sigma.rows() != d || prob.sigma.cols() != d)
    throw std::invalid_argument("ellipsoid_exponent: sigma shape mismatch");
  if (prob.region.parts.empty()) throw std::invalid_argument("ellipsoid_exponent: empty region");
  const bool complement = prob.orientation == EllipsoidProblem::Orientation::Complement;

  const double tol = 1e-9;
  auto feasible = [&](const Eigen::VectorXd& x) {
    if (prob.stat) {
      const double slack = tol * std::max(1.0, std::abs(prob.threshold));
      const double w = prob.stat(x);
      return complement ? w <= prob.threshold + slack : w >= prob.threshold - slack;
    }
    // target set: closure(region) for Set, complement of the open region
    // for Complement; candidates sit on hyperplanes, so allow tol slack
    return complement ? !prob.region.contains_open(x, tol) : prob.region.contains_closed(x, tol);
  };

  if (feasible(prob.mu)) return {0.0, true};

  Eigen::LLT<Eigen::MatrixXd> llt(prob.sigma);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("ellipsoid_exponent: sigma not positive definite");
  auto quad = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd dlt = x - prob.mu;
    return dlt.dot(llt.solve(dlt));
  };

  // collect hyperplanes (deduplicated up to scale)
  std::vector<Halfspace> planes;
  auto add_plane = [&](const Halfspace& f) {
    const double nf = f.a.norm();
    if (nf < 1e-14) return;
    Eigen::VectorXd a = f.a / nf;
    const double c = f.c / nf;
    for (const auto& g : planes) {
      if ((g.a - a).norm() < 1e-12 && std::abs(g.c - c) < 1e-12) return;
      if ((g.a + a).norm() < 1e-12 && std::abs(g.c + c) < 1e-12) return;
    }
    planes.push_back({a, c});
  };
  for (const auto& part : prob.region.parts)
    for (const auto& f : part.faces) add_plane(f);

  const int np = static_cast<int>(planes.size());
  double best = std::numeric_limits<double>::infinity();

  // project mu (in the Sigma metric) onto the affine subspace of an index set
  auto project = [&](const std::vector<int>& idx) -> bool {
    const int k = static_cast<int>(idx.size());
    Eigen::MatrixXd A(k, d);
    Eigen::VectorXd c(k);
    for (int i = 0; i < k; ++i) {
      A.row(i) = planes[idx[i]].a.transpose();
      c[i] = planes[idx[i]].c;
    }
    // minimize (x-mu)' Sigma^{-1} (x-mu) s.t. A x = c:
    // x = mu + Sigma A' (A Sigma A')^{-1} (c - A mu)
    Eigen::MatrixXd M = A * prob.sigma * A.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) return false;
    Eigen::VectorXd x = prob.mu + prob.sigma * A.transpose() * lu.solve(c - A * prob.mu);
    if (!feasible(x)) return false;
    best = std::min(best, quad(x));
    return true;
  };

  std::vector<int> idx;
  // subsets of size 1..d
  for (int i = 0; i < np; ++i) {
    idx = {i};
    project(idx);
    if (d >= 2) {
      for (int j = i + 1; j < np; ++j) {
        idx = {i, j};
        project(idx);
        if (d >= 3) {
          for (int k = j + 1; k < np; ++k) {
            idx = {i, j, k};
            project(idx);
          }
        }
      }
    }
  }
  if (!std::isfinite(best)) throw std::runtime_error("ellipsoid_exponent: no feasible candidate found");
  return {best, false};
}

}  // namespace fdrlab::theory
