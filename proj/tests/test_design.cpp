#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "fdrlab/design.hpp"

using namespace fdrlab;

namespace {

// characteristic-polynomial oracle for the smallest eigenvalue of a small
// symmetric matrix: Newton-identity coefficients + scan-and-bisect root find
double charpoly_min_eig(const Eigen::MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  // p(x) = det(xI - A) = x^n + c1 x^{n-1} + ... + cn, via power traces
  std::vector<double> tr(n + 1, 0.0);
  Eigen::MatrixXd P = Eigen::MatrixXd::Identity(n, n);
  for (int k = 1; k <= n; ++k) {
    P = P * A;
    tr[k] = P.trace();
  }
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    double s = tr[k];
    for (int i = 1; i < k; ++i) s += c[i] * tr[k - i];
    c[k] = -s / k;
  }
  auto poly = [&](double x) {
    double v = 0.0;
    for (int k = 0; k <= n; ++k) v = v * x + c[k];
    return v;
  };
  double prev_x = -5.0, prev_v = poly(prev_x);
  for (double x = -5.0 + 1e-4; x < 5.0; x += 1e-4) {
    const double v = poly(x);
    if (prev_v == 0.0) return prev_x;
    if ((prev_v < 0) != (v < 0)) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((poly(lo) < 0) != (poly(mid) < 0))
          hi = mid;
        else
          lo = mid;
      }
      return 0.5 * (lo + hi);
    }
    prev_x = x;
    prev_v = v;
  }
  FAIL("charpoly oracle found no root");
  return 0.0;
}

}  // namespace

TEST_CASE("make_gram: block2") {
  DesignSpec spec;
  spec.kind = DesignKind::block2;
  spec.p = 4;
  spec.n = 8;
  spec.rho = 0.5;
  GramMatrix g = make_gram(spec);
  Eigen::MatrixXd want(4, 4);
  want << 1, 0.5, 0, 0, 0.5, 1, 0, 0, 0, 0, 1, 0.5, 0, 0, 0.5, 1;
  REQUIRE((g.G - want).cwiseAbs().maxCoeff() == 0.0);

  spec.rho = 0.0;
  REQUIRE(make_gram(spec).G.isIdentity(0.0));

  spec.p = 5;  // odd p: trailing scalar block
  spec.rho = 0.5;
  GramMatrix g5 = make_gram(spec);
  REQUIRE(g5.G(4, 4) == 1.0);
  REQUIRE(g5.G(4, 3) == 0.0);
}

TEST_CASE("make_gram: expdecay") {
  DesignSpec spec;
  spec.kind = DesignKind::expdecay;
  spec.p = 3;
  spec.n = 6;
  spec.rho = 0.6;
  GramMatrix g = make_gram(spec);
  REQUIRE(g.G(0, 2) == Catch::Approx(0.36).margin(1e-15));
  REQUIRE(g.G(0, 1) == Catch::Approx(0.6).margin(1e-15));
}

TEST_CASE("make_gram: block_d rejects non positive definite rho") {
  DesignSpec spec;
  spec.kind = DesignKind::block_d;
  spec.p = 8;
  spec.n = 16;
  spec.d = 4;
  spec.rho = -0.4;  // <= -1/(d-1) = -1/3
  REQUIRE_THROWS_WITH(make_gram(spec), Catch::Matchers::ContainsSubstring("eigenvalue"));
}

TEST_CASE("make_gram: unit diagonal and exact symmetry across families") {
  std::vector<DesignSpec> specs;
  for (uint64_t seed : {1ull, 7ull}) {
    DesignSpec s;
    s.seed = seed;
    s.p = 60;
    s.n = 300;
    s.kind = DesignKind::orthogonal;
    specs.push_back(s);
    s.kind = DesignKind::block2;
    s.rho = -0.6;
    specs.push_back(s);
    s.kind = DesignKind::block_d;
    s.d = 4;
    s.rho = 0.4;
    specs.push_back(s);
    s.kind = DesignKind::factor;
    s.k = 2;
    specs.push_back(s);
    s.kind = DesignKind::factor;
    s.k = 5;
    specs.push_back(s);
    s.kind = DesignKind::expdecay;
    s.rho = 0.6;
    specs.push_back(s);
    s.kind = DesignKind::wishart;
    specs.push_back(s);
  }
  DesignSpec big;
  big.kind = DesignKind::block2;
  big.p = 300;
  big.n = 600;
  big.rho = 0.5;
  specs.push_back(big);
  for (const auto& s : specs) {
    GramMatrix g = make_gram(s);
    for (int i = 0; i < s.p; ++i) {
      REQUIRE(g.G(i, i) == 1.0);
      for (int j = 0; j < s.p; ++j) REQUIRE(g.G(i, j) == g.G(j, i));
    }
    REQUIRE(min_eigenvalue(g) > 0.0);
  }
}

TEST_CASE("block_d eigenvalues: 1+(d-1)rho and 1-rho") {
  for (int d : {2, 4, 5}) {
    DesignSpec spec;
    spec.kind = DesignKind::block_d;
    spec.p = 20;
    spec.n = 40;
    spec.d = d;
    spec.rho = 0.3;
    GramMatrix g = make_gram(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.G, Eigen::EigenvaluesOnly);
    Eigen::VectorXd ev = es.eigenvalues();
    const int n_top = spec.p / d;
    for (int i = 0; i < spec.p; ++i) {
      const double want = (i >= spec.p - n_top) ? 1.0 + (d - 1) * spec.rho : 1.0 - spec.rho;
      REQUIRE(ev[i] == Catch::Approx(want).margin(1e-12));
    }
  }
}

TEST_CASE("min_eigenvalue") {
  DesignSpec spec;
  spec.kind = DesignKind::block2;
  spec.p = 6;
  spec.n = 12;
  spec.rho = 0.7;
  REQUIRE(min_eigenvalue(make_gram(spec)) == Catch::Approx(0.3).margin(1e-12));

  spec.kind = DesignKind::orthogonal;
  REQUIRE(min_eigenvalue(make_gram(spec)) == Catch::Approx(1.0).margin(1e-14));

  spec.kind = DesignKind::expdecay;
  spec.p = 5;
  spec.rho = 0.6;
  GramMatrix g = make_gram(spec);
  REQUIRE(min_eigenvalue(g) == Catch::Approx(charpoly_min_eig(g.G)).margin(1e-8));
}

TEST_CASE("realize_design") {
  SECTION("identity gram") {
    GramMatrix g{Eigen::MatrixXd::Identity(2, 2)};
    DesignMatrix d = realize_design(g, 4, 3);
    REQUIRE((d.X.transpose() * d.X - g.G).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("block2 rho=0.7 p=2") {
    DesignSpec spec;
    spec.kind = DesignKind::block2;
    spec.p = 2;
    spec.n = 6;
    spec.rho = 0.7;
    DesignMatrix d = realize_design(make_gram(spec), 6, 11);
    REQUIRE(d.X.col(0).dot(d.X.col(1)) == Catch::Approx(0.7).margin(1e-8));
    REQUIRE(d.X.col(0).norm() == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("block2 rho=0.5 p=100 n=300") {
    DesignSpec spec;
    spec.kind = DesignKind::block2;
    spec.p = 100;
    spec.n = 300;
    spec.rho = 0.5;
    GramMatrix g = make_gram(spec);
    DesignMatrix d = realize_design(g, 300, 5);
    REQUIRE((d.X.transpose() * d.X - g.G).cwiseAbs().maxCoeff() < 1e-8);
    for (int j = 0; j < 100; ++j) REQUIRE(std::abs(d.X.col(j).norm() - 1.0) < 1e-10);
  }
  SECTION("deterministic given (G, n, seed)") {
    DesignSpec spec;
    spec.kind = DesignKind::expdecay;
    spec.p = 12;
    spec.n = 30;
    spec.rho = 0.6;
    GramMatrix g = make_gram(spec);
    DesignMatrix a = realize_design(g, 30, 17);
    DesignMatrix b = realize_design(g, 30, 17);
    REQUIRE((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
    DesignMatrix c = realize_design(g, 30, 18);
    REQUIRE((a.X - c.X).cwiseAbs().maxCoeff() > 1e-6);
  }
}
