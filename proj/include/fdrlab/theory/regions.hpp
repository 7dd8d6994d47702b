#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fdrlab::theory {

// Half-space a.x > c (open). Regions are unions of open polyhedra.
struct Halfspace {
  Eigen::VectorXd a;
  double c;
};

struct Polyhedron {
  std::vector<Halfspace> faces;

  bool contains_open(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (const auto& f : faces)
      if (!(f.a.dot(x) > f.c + tol)) return false;
    return true;
  }
  bool contains_closed(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (const auto& f : faces)
      if (!(f.a.dot(x) >= f.c - tol)) return false;
    return true;
  }
};

struct Region {
  std::vector<Polyhedron> parts;
  int dim() const { return parts.empty() || parts[0].faces.empty() ? 0 : static_cast<int>(parts[0].faces[0].a.size()); }

  bool contains_open(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (const auto& p : parts)
      if (p.contains_open(x, tol)) return true;
    return false;
  }
  bool contains_closed(const Eigen::VectorXd& x, double tol = 0.0) const {
    for (const auto& p : parts)
      if (p.contains_closed(x, tol)) return true;
    return false;
  }
};

namespace detail {
inline Halfspace hs2(double a1, double a2, double c) {
  Halfspace h;
  h.a = Eigen::Vector2d(a1, a2);
  h.c = c;
  return h;
}
inline Halfspace hs3(double a1, double a2, double a3, double c) {
  Halfspace h;
  h.a = Eigen::Vector3d(a1, a2, a3);
  h.c = c;
  return h;
}
}  // namespace detail

// Lasso-path rejection region in the (h1, h2) plane: W*_j > sqrt(2u log p)
// iff hhat is in this set. The rho < 0 region is the x-axis reflection.
inline Region lasso_path_region(double rho, double u) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("lasso_path_region: |rho| must be < 1");
  const double su = std::sqrt(u);
  const double sign2 = rho < 0 ? -1.0 : 1.0;  // reflect h2 for negative rho
  const double ar = std::abs(rho);
  using detail::hs2;
  Region r;
  {
    Polyhedron p;  // h1 - rho h2 > (1-rho) su, h1 > su
    p.faces.push_back(hs2(1.0, -ar * sign2, (1.0 - ar) * su));
    p.faces.push_back(hs2(1.0, 0.0, su));
    r.parts.push_back(p);
  }
  {
    Polyhedron p;  // h1 - rho h2 > (1+rho) su
    p.faces.push_back(hs2(1.0, -ar * sign2, (1.0 + ar) * su));
    r.parts.push_back(p);
  }
  {
    Polyhedron p;  // h1 - rho h2 < -(1-rho) su, h1 < -su
    p.faces.push_back(hs2(-1.0, ar * sign2, (1.0 - ar) * su));
    p.faces.push_back(hs2(-1.0, 0.0, su));
    r.parts.push_back(p);
  }
  {
    Polyhedron p;  // h1 - rho h2 < -(1+rho) su
    p.faces.push_back(hs2(-1.0, ar * sign2, (1.0 + ar) * su));
    r.parts.push_back(p);
  }
  return r;
}

// Least-squares rejection region: |h1 - rho h2| > (1 - rho^2) sqrt(u).
inline Region ols_region(double rho, double u) {
  if (!(std::abs(rho) < 1.0)) throw std::invalid_argument("ols_region: |rho| must be < 1");
  const double c = (1.0 - rho * rho) * std::sqrt(u);
  using detail::hs2;
  Region r;
  Polyhedron p1, p2;
  p1.faces.push_back(hs2(1.0, -rho, c));
  p2.faces.push_back(hs2(-1.0, rho, c));
  r.parts = {p1, p2};
  return r;
}

inline bool rejection_region_membership(double h1, double h2, double rho, double u, bool lasso_path) {
  Eigen::VectorXd x(2);
  x << h1, h2;
  return lasso_path ? lasso_path_region(rho, u).contains_open(x) : ols_region(rho, u).contains_open(x);
}

// Knockoff on orthogonal designs with diag(s) = (1-a) I, signed maximum:
// {|h1| > |h2|, |h1| > sqrt(u)}. Caller should pass a >= 0 (exponents depend
// on |a| only).
inline Region knockoff_ortho_sgm_region(double u) {
  const double su = std::sqrt(u);
  using detail::hs2;
  Region r;
  Polyhedron p1, p2;
  p1.faces = {hs2(1, -1, 0), hs2(1, 1, 0), hs2(1, 0, su)};
  p2.faces = {hs2(-1, 1, 0), hs2(-1, -1, 0), hs2(-1, 0, su)};
  r.parts = {p1, p2};
  return r;
}

// Same design, difference statistic: the four A_k cones intersected with the
// W^dif > sqrt(2u log p) half-spaces.
inline Region knockoff_ortho_dif_region(double a, double u) {
  if (!(a >= 0.0 && a < 1.0)) throw std::invalid_argument("knockoff_ortho_dif_region: need 0 <= a < 1");
  const double su = std::sqrt(u);
  using detail::hs2;
  Region r;
  {
    Polyhedron p;  // A1: h1 > 0, a h1 < h2 < h1, and h1 - h2 > (1-a) su
    p.faces = {hs2(1, 0, 0), hs2(-a, 1, 0), hs2(1, -1, 0), hs2(1, -1, (1.0 - a) * su)};
    r.parts.push_back(p);
  }
  {
    Polyhedron p;  // A2: h1 > 0, -h1 < h2 < a h1, and h1 + h2 > (1+a) su
    p.faces = {hs2(1, 0, 0), hs2(1, 1, 0), hs2(a, -1, 0), hs2(1, 1, (1.0 + a) * su)};
    r.parts.push_back(p);
  }
  {
    Polyhedron p;  // A3: h1 < 0, a h1 < h2 < -h1, and h1 + h2 < -(1+a) su
    p.faces = {hs2(-1, 0, 0), hs2(-a, 1, 0), hs2(-1, -1, 0), hs2(-1, -1, (1.0 + a) * su)};
    r.parts.push_back(p);
  }
  {
    Polyhedron p;  // A4: h1 < 0, h1 < h2 < a h1, and h1 - h2 < -(1-a) su
    p.faces = {hs2(-1, 0, 0), hs2(1, -1, 0), hs2(a, -1, 0), hs2(-1, 1, (1.0 - a) * su)};
    r.parts.push_back(p);
  }
  return r;
}

// Gaussian mirror regions in the (bhat_plus, bhat_minus) plane.
inline Region gm_sgm_region(double u) {
  const double su = std::sqrt(u);
  using detail::hs2;
  Region r;
  Polyhedron p1, p2;
  p1.faces = {hs2(1, 0, 0), hs2(0, 1, 0), hs2(1, 1, su)};
  p2.faces = {hs2(-1, 0, 0), hs2(0, -1, 0), hs2(-1, -1, su)};
  r.parts = {p1, p2};
  return r;
}

inline Region gm_dif_region(double u) {
  // |h1+h2| - |h1-h2| = 2 sgn(h1) sgn(h2) min(|h1|, |h2|) > sqrt(u)
  const double h = 0.5 * std::sqrt(u);
  using detail::hs2;
  Region r;
  Polyhedron p1, p2;
  p1.faces = {hs2(1, 0, h), hs2(0, 1, h)};
  p2.faces = {hs2(-1, 0, h), hs2(0, -1, h)};
  r.parts = {p1, p2};
  return r;
}

// Marginal-threshold (prototype on orthogonal designs): |h1| > sqrt(u), 1-D.
inline Region marginal_region(double u) {
  Region r;
  Polyhedron p1, p2;
  Halfspace f1, f2;
  f1.a = Eigen::VectorXd::Constant(1, 1.0);
  f1.c = std::sqrt(u);
  f2.a = Eigen::VectorXd::Constant(1, -1.0);
  f2.c = std::sqrt(u);
  p1.faces = {f1};
  p2.faces = {f2};
  r.parts = {p1, p2};
  return r;
}

// Selection region of the equi-correlated knockoff on 2x2 blocks with
// rho >= 1/2, in the reparametrized coordinates (x, y, z) = (d1, d2, m).
// The half-weighted tie subregions count as full members (exponent-only).
inline Region ec_knockoff_3d_region(double rho, double u) {
  if (!(rho >= 0.5 && rho < 1.0)) throw std::invalid_argument("ec_knockoff_3d_region: rho in [1/2,1)");
  const double T = std::sqrt(u);
  const double c = rho / (1.0 - rho);
  using detail::hs3;
  std::vector<Polyhedron> base;
  {
    Polyhedron p;  // R_{1,1}: x>0, y>0, x>y, z>0, x+z>T
    p.faces = {hs3(1, 0, 0, 0), hs3(0, 1, 0, 0), hs3(1, -1, 0, 0), hs3(0, 0, 1, 0), hs3(1, 0, 1, T)};
    base.push_back(p);
  }
  {
    Polyhedron p;  // R_{1,2}: x>0, y>0, x<y, z<0, z>x-y, x>T
    p.faces = {hs3(1, 0, 0, 0), hs3(0, 1, 0, 0), hs3(-1, 1, 0, 0), hs3(0, 0, -1, 0),
               hs3(-1, 1, 1, 0), hs3(1, 0, 0, T)};
    base.push_back(p);
  }
  {
    Polyhedron p;  // R_{1,3}: x>0, y>0, x<y, z>0, z < c(y-x), x>T
    p.faces = {hs3(1, 0, 0, 0), hs3(0, 1, 0, 0), hs3(-1, 1, 0, 0), hs3(0, 0, 1, 0),
               hs3(-c, c, -1, 0), hs3(1, 0, 0, T)};
    base.push_back(p);
  }
  {
    Polyhedron p;  // R_{1,4}: x>0, y>0, x<y, z > c(y-x), z > T + c y - (1+c) x
    p.faces = {hs3(1, 0, 0, 0), hs3(0, 1, 0, 0), hs3(-1, 1, 0, 0), hs3(c, -c, 1, 0),
               hs3(1.0 / (1.0 - rho), -c, 1, T)};
    base.push_back(p);
  }
  Region r;
  auto reflect = [](const Polyhedron& p, double sx, double sy, double sz) {
    Polyhedron q = p;
    for (auto& f : q.faces) {
      f.a[0] *= sx;
      f.a[1] *= sy;
      f.a[2] *= sz;
    }
    return q;
  };
  for (const auto& p : base) {
    r.parts.push_back(p);
    r.parts.push_back(reflect(p, -1, 1, -1));   // R_2
    r.parts.push_back(reflect(p, 1, -1, 1));    // R_3
    r.parts.push_back(reflect(p, -1, -1, -1));  // R_4
  }
  return r;
}

}  // namespace fdrlab::theory
