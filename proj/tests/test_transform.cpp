#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cusp_spectra/transform.hpp"

using namespace cusp;

namespace {

const CuspGeometry& geo9() {
  static const CuspGeometry g(0.9, 0.2);
  return g;
}

// interior sample of Omega_eps0 away from interfaces and kink lines
Vec2 sample_interior(std::mt19937_64& rng, double eps, double margin = 1e-4) {
  const CuspGeometry& geo = geo9();
  std::uniform_real_distribution<double> ux(-0.999, 0.999);
  for (;;) {
    const double x = ux(rng);
    const double yb = geo.bottom(x) + 1e-3;
    const double yt = geo.top(x, geo.eps0) - 1e-3;
    if (yt <= yb) continue;
    std::uniform_real_distribution<double> uy(yb, yt);
    const double y = uy(rng);
    if (std::abs(std::abs(x) - std::pow(eps, 1.0 / geo.alpha)) < margin) continue;
    if (std::abs(std::abs(x) - std::pow(geo.eps0, 1.0 / geo.alpha)) < margin)
      continue;
    if (std::abs(y - h_eps(std::abs(x), EpsLevel{eps}, geo)) < margin) continue;
    return Vec2(x, y);
  }
}

} // namespace

TEST_CASE("phi_eps is the identity at eps = eps0 and on OmegaHat_eps") {
  const CuspGeometry& geo = geo9();
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p = sample_interior(rng, geo.eps0);
    const Vec2 q = phi_eps_map(p, EpsLevel{geo.eps0}, geo);
    CHECK(q.x() == p.x());
    CHECK(q.y() == p.y());
  }
  const EpsLevel lv{0.08};
  for (int i = 0; i < 200; ++i) {
    const Vec2 p = sample_interior(rng, lv.eps);
    if (p.y() < h_eps(std::abs(p.x()), lv, geo)) {
      const Vec2 q = phi_eps_map(p, lv, geo);
      CHECK(q.x() == p.x());
      CHECK(q.y() == p.y());
      CHECK(phi_eps_jacobian(p, lv, geo) == Mat2::Identity());
    }
  }
}

TEST_CASE("phi_eps top edge collapses to the perturbed profile") {
  const CuspGeometry& geo = geo9();
  const EpsLevel lv{0.07};
  const double r0 = std::pow(geo.eps0, 1.0 / geo.alpha);
  for (double x : {0.0, 0.2 * r0, 0.6 * r0, 0.95 * r0}) {
    const Vec2 q = phi_eps_map(Vec2(x, 1.0 - geo.eps0), lv, geo);
    const double want = 1.0 - std::max(std::pow(std::abs(x), geo.alpha), lv.eps);
    CHECK(q.y() == doctest::Approx(want).epsilon(1e-14));
  }
}

TEST_CASE("phi_eps maps the reference top boundary onto the perturbed one") {
  const CuspGeometry& geo = geo9();
  const EpsLevel lv{0.05};
  for (int i = 0; i <= 60; ++i) {
    const double x = -0.99 + 1.98 * i / 60.0;
    const Vec2 q = phi_eps_map(Vec2(x, geo.top(x, geo.eps0)), lv, geo);
    CHECK(q.x() == x);
    CHECK(q.y() == doctest::Approx(geo.top(x, lv.eps)).epsilon(1e-9));
  }
}

TEST_CASE("phi_eps branch continuity at the interface") {
  const CuspGeometry& geo = geo9();
  const EpsLevel lv{0.06};
  for (double x : {0.0, 0.05, 0.12}) {
    const double h = h_eps(std::abs(x), lv, geo);
    // the second branch evaluated exactly at x_N = h must return h
    const Vec2 q = phi_eps_map(Vec2(x, h), lv, geo);
    CHECK(std::abs(q.y() - h) <= 1e-10);
    const Vec2 above = phi_eps_map(Vec2(x, h + 1e-9), lv, geo);
    const Vec2 below = phi_eps_map(Vec2(x, h - 1e-9), lv, geo);
    CHECK(std::abs(above.y() - below.y()) <= 1e-8);
  }
}

TEST_CASE("phi_eps domain and interface errors") {
  const CuspGeometry& geo = geo9();
  const EpsLevel lv{0.1};
  CHECK_THROWS_AS(phi_eps_map(Vec2(0.0, 0.95), lv, geo), out_of_domain_error);
  CHECK_THROWS_AS(phi_eps_map(Vec2(1.5, 0.0), lv, geo), out_of_domain_error);
  const double h = h_eps(0.05, lv, geo);
  CHECK_THROWS_AS(phi_eps_jacobian(Vec2(0.05, h), lv, geo), interface_error);
}

TEST_CASE("phi_eps jacobian: finite differences, determinant >= 1") {
  const CuspGeometry& geo = geo9();
  std::mt19937_64 rng(17);
  const double step = 1e-6;
  for (int i = 0; i < 150; ++i) {
    const double eps = (i % 3 == 0) ? 0.02 : (i % 3 == 1 ? 0.1 : 0.18);
    const EpsLevel lv{eps};
    const Vec2 p = sample_interior(rng, eps);
    const Mat2 jac = phi_eps_jacobian(p, lv, geo);
    Mat2 fd;
    for (int c = 0; c < 2; ++c) {
      Vec2 dp = Vec2::Zero();
      dp[c] = step;
      fd.col(c) =
          (phi_eps_map(p + dp, lv, geo) - phi_eps_map(p - dp, lv, geo)) /
          (2.0 * step);
    }
    const double scale = std::max(1.0, jac.cwiseAbs().maxCoeff());
    CHECK((jac - fd).cwiseAbs().maxCoeff() <= 1e-6 * scale);
    CHECK(jac.determinant() >= 1.0 - 1e-12);
  }
}

TEST_CASE("determinant ratio bound from the weight lemma") {
  const CuspGeometry& geo = geo9();
  geo.require_ratio_hypothesis();
  const double bound = 2.0 / (c_alpha(geo.alpha) * c_alpha(geo.alpha));
  std::mt19937_64 rng(23);
  const double pairs[][2] = {{0.1, 0.0}, {0.15, 0.05}, {0.2, 0.1}, {0.08, 0.02}};
  for (const auto& pr : pairs) {
    const EpsLevel hi{pr[0]}, lo{pr[1]};
    for (int i = 0; i < 100; ++i) {
      Vec2 p = sample_interior(rng, hi.eps);
      if (std::abs(std::abs(p.x()) - std::pow(std::max(lo.eps, 1e-14),
                                              1.0 / geo.alpha)) < 1e-4)
        continue;
      double dh, dl;
      try {
        dh = phi_eps_jacobian(p, hi, geo).determinant();
        dl = phi_eps_jacobian(p, lo, geo).determinant();
      } catch (const interface_error&) {
        continue;
      }
      CHECK(dh / dl <= bound + 1e-9);
    }
  }
}

TEST_CASE("phi_eps transform inverse round trip") {
  const CuspGeometry& geo = geo9();
  const Transformation t = phi_eps_transform(EpsLevel{0.06}, geo);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p = sample_interior(rng, 0.06);
    const Vec2 q = t.map(p);
    const auto back = t.inverse(q);
    REQUIRE(back.has_value());
    CHECK((*back - p).norm() <= 1e-10);
  }
  // a point above the image is rejected
  CHECK_FALSE(t.inverse(Vec2(0.0, 0.97)).has_value());
}

TEST_CASE("simple transformation factories") {
  const Transformation id = identity_transform();
  CHECK(id.map(Vec2(0.3, -0.2)) == Vec2(0.3, -0.2));
  CHECK(id.jacobian(Vec2(0, 0)) == Mat2::Identity());

  const Transformation dil = dilation_transform(2.0);
  CHECK(dil.map(Vec2(1.0, -0.5)) == Vec2(2.0, -1.0));
  CHECK(dil.jacobian(Vec2(0, 0))(0, 0) == 2.0);
  CHECK((*dil.inverse(Vec2(2.0, -1.0)) - Vec2(1.0, -0.5)).norm() == 0.0);
  CHECK_THROWS_AS(dilation_transform(0.0), input_error);

  const Transformation tr = translation_transform(Vec2(0.1, 0.2));
  CHECK(tr.map(Vec2(0, 0)) == Vec2(0.1, 0.2));
  CHECK(tr.jacobian(Vec2(0, 0)) == Mat2::Identity());
}

TEST_CASE("graph morph identity, stretch and patch locality") {
  GraphDomain base = unit_square_domain();

  const Transformation same = graph_morph(base, base);
  for (double y : {0.1, 0.3, 0.7, 0.999})
    CHECK(same.map(Vec2(0.4, y)) == Vec2(0.4, y));

  GraphDomain lifted = base;
  lifted.profile = [](double) { return 1.1; };
  lifted.profile_grad = [](double) { return 0.0; };
  const Transformation up = graph_morph(base, lifted);
  // blend zone boundary at floor + rho/2 = 0.25
  CHECK(up.map(Vec2(0.5, 0.2)) == Vec2(0.5, 0.2));
  CHECK(up.jacobian(Vec2(0.5, 0.2)) == Mat2::Identity());
  const double ratio = (1.1 - 0.25) / (1.0 - 0.25);
  CHECK(up.jacobian(Vec2(0.5, 0.6))(1, 1) == doctest::Approx(ratio).epsilon(1e-15));
  CHECK(up.jacobian(Vec2(0.5, 0.6)).determinant() ==
        doctest::Approx(ratio).epsilon(1e-15));
  CHECK(up.map(Vec2(0.5, 1.0)).y() == doctest::Approx(1.1).epsilon(1e-15));
  // inverse round trip
  const Vec2 q = up.map(Vec2(0.3, 0.8));
  CHECK((*up.inverse(q) - Vec2(0.3, 0.8)).norm() <= 1e-14);

  GraphDomain bumped = base;
  bumped.lipschitz_bound = 4.0;
  bumped.profile = [](double x) {
    const double u = (x - 0.5) / 0.2;
    return std::abs(u) >= 1.0 ? 1.0 : 1.0 + 0.05 * (1 - u * u) * (1 - u * u);
  };
  bumped.profile_grad = [](double x) {
    const double u = (x - 0.5) / 0.2;
    if (std::abs(u) >= 1.0) return 0.0;
    return 0.05 * 2.0 * (1 - u * u) * (-2.0 * u) / 0.2;
  };
  const Transformation morph = graph_morph(base, bumped);
  // identity where the profiles coincide
  for (double x : {0.05, 0.25, 0.75, 0.95})
    CHECK(morph.map(Vec2(x, 0.9)) == Vec2(x, 0.9));
  CHECK(morph.map(Vec2(0.5, 0.9)).y() > 0.9);

  GraphDomain sunk = base;
  sunk.profile = [](double) { return 0.4; }; // below floor + rho
  CHECK_THROWS_AS(graph_morph(base, sunk), invalid_domain_error);

  GraphDomain other_floor = base;
  other_floor.floor_y = 0.1;
  CHECK_THROWS_AS(graph_morph(base, other_floor), invalid_domain_error);
}

TEST_CASE("pullback of identity and dilation") {
  const CoefficientField eye = identity_coefficients();
  const PullbackFields f_id = pullback(identity_transform(), eye);
  CHECK(f_id.g(Vec2(0.3, 0.4)) == 1.0);
  CHECK(f_id.a(Vec2(0.3, 0.4)) == Mat2::Identity());

  const PullbackFields f_dil = pullback(dilation_transform(2.0), eye);
  CHECK(f_dil.g(Vec2(0.1, 0.1)) == 4.0);
  CHECK((f_dil.a(Vec2(0.1, 0.1)) - 0.25 * Mat2::Identity()).norm() <= 1e-16);
}

TEST_CASE("pullback fields of phi_eps stay symmetric positive definite") {
  const CuspGeometry& geo = geo9();
  const PullbackFields f =
      pullback(phi_eps_transform(EpsLevel{0.05}, geo), identity_coefficients());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uxi(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 p = sample_interior(rng, 0.05);
    Mat2 a;
    double g;
    try {
      a = f.a(p);
      g = f.g(p);
    } catch (const interface_error&) {
      continue;
    }
    CHECK(g > 0.0);
    CHECK(a(0, 1) == a(1, 0));
    Eigen::SelfAdjointEigenSolver<Mat2> es(a);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    const Vec2 xi(uxi(rng), uxi(rng));
    if (xi.norm() > 1e-8) CHECK(xi.dot(a * xi) > 0.0);
  }
}

TEST_CASE("pullback flags singular jacobians") {
  Transformation degenerate;
  degenerate.map = [](const Vec2& p) { return p; };
  degenerate.jacobian = [](const Vec2&) { return Mat2(Mat2::Zero()); };
  const PullbackFields f = pullback(degenerate, identity_coefficients());
  CHECK_THROWS_AS(f.g(Vec2(0.5, 0.5)), singularity_error);
  CHECK_THROWS_AS(f.a(Vec2(0.5, 0.5)), singularity_error);
}

TEST_CASE("pair fields: trivial, constant and generic cases") {
  const CoefficientField eye = identity_coefficients();
  const PullbackFields f =
      pullback(phi_eps_transform(EpsLevel{0.05}, geo9()), eye);
  const PairFields same = pair_fields(f, f);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 50; ++i) {
    const Vec2 p = sample_interior(rng, 0.05);
    try {
      CHECK(same.w(p) == 1.0);
      CHECK(same.S(p) == Mat2::Identity());
    } catch (const interface_error&) {
    }
  }

  // g = 4 g~, a = a~ = I: w = 2, S = I/4
  PullbackFields f4, f1;
  f4.g = [](const Vec2&) { return 4.0; };
  f4.a = [](const Vec2&) { return Mat2::Identity(); };
  f1.g = [](const Vec2&) { return 1.0; };
  f1.a = [](const Vec2&) { return Mat2::Identity(); };
  const PairFields pf = pair_fields(f4, f1);
  CHECK(pf.w(Vec2(0, 0)) == 2.0);
  CHECK((pf.S(Vec2(0, 0)) - 0.25 * Mat2::Identity()).norm() <= 1e-15);

  // generic pair: S symmetric to 1e-12 and positive definite
  const PullbackFields f2 =
      pullback(phi_eps_transform(EpsLevel{0.12}, geo9()), eye);
  const PairFields gen = pair_fields(f, f2);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p = sample_interior(rng, 0.05);
    try {
      const Mat2 s = gen.S(p);
      CHECK(std::abs(s(0, 1) - s(1, 0)) <= 1e-12);
      Eigen::SelfAdjointEigenSolver<Mat2> es(s);
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    } catch (const interface_error&) {
    }
  }
}

TEST_CASE("weight cocycle across eps levels") {
  const CoefficientField eye = identity_coefficients();
  const CuspGeometry& geo = geo9();
  const PullbackFields f0 = pullback(phi_eps_transform(EpsLevel{geo.eps0}, geo), eye);
  const PullbackFields fm = pullback(phi_eps_transform(EpsLevel{0.1}, geo), eye);
  const PullbackFields fs = pullback(phi_eps_transform(EpsLevel{0.03}, geo), eye);
  const PairFields w_0s = pair_fields(f0, fs);
  const PairFields w_ms = pair_fields(fm, fs);
  const PairFields w_0m = pair_fields(f0, fm);
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p = sample_interior(rng, 0.03);
    try {
      const double lhs = w_0s.w(p);
      const double rhs = w_ms.w(p) * w_0m.w(p);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    } catch (const interface_error&) {
    }
  }
}

TEST_CASE("spd square root") {
  CHECK((spd_sqrt(Mat2(Mat2::Identity())) - Mat2::Identity()).norm() <= 1e-14);
  Mat2 d;
  d << 4.0, 0.0, 0.0, 9.0;
  Mat2 r = spd_sqrt(d);
  CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(r(0, 1)) <= 1e-14);

  std::mt19937_64 rng(19);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < 25; ++i) {
    const int n = 2 + static_cast<int>(i % 5);
    Eigen::MatrixXd b(n, n);
    for (int r2 = 0; r2 < n; ++r2)
      for (int c = 0; c < n; ++c) b(r2, c) = normal(rng);
    Eigen::MatrixXd m = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd s = spd_sqrt(m);
    CHECK((s * s - m).cwiseAbs().maxCoeff() <= 1e-12 * m.cwiseAbs().maxCoeff());
    CHECK((s - s.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }

  Mat2 asym;
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(spd_sqrt(asym), matrix_domain_error);
  Mat2 indef;
  indef << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_AS(spd_sqrt(indef), matrix_domain_error);
}
