#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "cusp_spectra/experiments.hpp"
#include "cusp_spectra/fem_function.hpp"
#include "cusp_spectra/metrics.hpp"
#include "cusp_spectra/vicinity.hpp"

using namespace cusp;

namespace {

std::vector<double> analytic_square_spectrum(int count, double side) {
  std::vector<double> out;
  const int range = static_cast<int>(std::ceil(std::sqrt(4.0 * count))) + 2;
  for (int m = 1; m <= range; ++m)
    for (int n = 1; n <= range; ++n)
      out.push_back(M_PI * M_PI * (m * m + n * n) / (side * side));
  std::sort(out.begin(), out.end());
  out.resize(count);
  return out;
}

double direct_schatten_sum(const std::vector<double>& a,
                           const std::vector<double>& b, int k) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::pow(b[i] + 1.0, -k) - std::pow(a[i] + 1.0, -k);
    s += d * d;
  }
  return std::sqrt(s);
}

} // namespace

TEST_CASE("schatten distance basics") {
  const std::vector<double> lam = {1.0, 2.0, 3.0};
  const SchattenDistance zero = schatten_distance(lam, lam, 2);
  CHECK(zero.value == 0.0);
  CHECK(zero.tail_bound == 0.0);
  CHECK(zero.tail_certified);
  CHECK(zero.n_used == 3);

  const std::vector<double> a = {0.0};
  const std::vector<double> b = {1.0};
  CHECK(schatten_distance(a, b, 1).value == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("schatten distance against analytic square spectra") {
  const std::vector<double> lam = analytic_square_spectrum(3000, 1.0);
  const std::vector<double> lam_scaled = analytic_square_spectrum(3000, 0.9);
  const std::vector<double> lam400(lam.begin(), lam.begin() + 400);
  const std::vector<double> lam_scaled400(lam_scaled.begin(),
                                          lam_scaled.begin() + 400);
  const int k = 2;
  const SchattenDistance sd = schatten_distance(lam400, lam_scaled400, k);
  CHECK(sd.value ==
        doctest::Approx(direct_schatten_sum(lam400, lam_scaled400, k))
            .epsilon(1e-15));
  // truncation certificate: tail_bound dominates the tail sum of squares
  const double full = direct_schatten_sum(lam, lam_scaled, k);
  CHECK(full * full - sd.value * sd.value <= sd.tail_bound);
  CHECK(std::abs(full - sd.value) <= std::sqrt(sd.tail_bound));
  CHECK(sd.tail_certified);
}

TEST_CASE("schatten distance is a metric on truncated sequences") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 20;
    auto make = [&] {
      std::vector<double> v(n);
      double acc = u(rng);
      for (int i = 0; i < n; ++i) {
        acc += 0.2 + 3.0 * u(rng);
        v[i] = acc;
      }
      return v;
    };
    const auto a = make(), b = make(), c = make();
    const double ab = schatten_distance(a, b, 2).value;
    const double ba = schatten_distance(b, a, 2).value;
    const double ac = schatten_distance(a, c, 2).value;
    const double cb = schatten_distance(c, b, 2).value;
    CHECK(ab == ba);
    CHECK(ab <= ac + cb + 1e-15);
    CHECK(ab >= 0.0);
  }
}

TEST_CASE("schatten distance input validation") {
  const std::vector<double> a = {1.0, 2.0};
  const std::vector<double> b = {1.0};
  const std::vector<double> down = {2.0, 1.0};
  const std::vector<double> low = {-1.5, 2.0};
  CHECK_THROWS_AS(schatten_distance(a, b, 1), input_error);
  CHECK_THROWS_AS(schatten_distance(down, down, 1), input_error);
  CHECK_THROWS_AS(schatten_distance(low, a, 1), input_error);
  CHECK_THROWS_AS(schatten_distance(a, a, 0), input_error);
}

TEST_CASE("projector check: trivial and two-by-two hand case") {
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.0, 2.0;
  const ProjectorCheck same = projector_check(a, a, 1.0);
  CHECK(same.op_distance <= 1e-14);
  CHECK(same.admissible);
  CHECK(same.bound_holds);
  CHECK(same.minmax_holds);
  CHECK(same.gap == doctest::Approx(1.0));

  Eigen::MatrixXd b(2, 2);
  b << 1.1, 0.0, 0.0, 2.0;
  const ProjectorCheck chk = projector_check(a, b, 1.0);
  CHECK(chk.admissible);
  CHECK(chk.gap == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(chk.a_minus_b_norm == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(chk.bound == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(chk.op_distance <= 1e-12);
  CHECK(chk.bound_holds);
  CHECK(chk.minmax_holds);

  // precondition violated: verdict, not a crash
  Eigen::MatrixXd far(2, 2);
  far << 1.6, 0.0, 0.0, 2.0;
  const ProjectorCheck viol = projector_check(a, far, 1.0);
  CHECK_FALSE(viol.admissible);
  CHECK(viol.minmax_holds);

  CHECK_THROWS_AS(projector_check(a, b, 5.0), input_error); // nu not a spectrum point
}

TEST_CASE("projector ensemble has zero violations") {
  RunConfig c;
  c.experiment = ExperimentKind::projector_ensemble;
  c.count = 2000;
  c.seed = 99;
  c.out_dir = (std::filesystem::temp_directory_path() / "cusp_proj_unit").string();
  std::filesystem::create_directories(c.out_dir);
  const ProjectorEnsembleArtifacts art = run_projector_ensemble(c, c.out_dir);
  CHECK(art.samples == 2000);
  CHECK(art.admissible > 0);
  CHECK(art.bound_violations == 0);
  CHECK(art.minmax_violations == 0);
}

TEST_CASE("fit_rate exact and noisy power laws") {
  const std::vector<double> xs = {1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(std::pow(x, 0.4));
  FitResult f = fit_rate(xs, ys);
  CHECK(f.slope == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  ys.clear();
  for (double x : xs) ys.push_back(3.0 * x);
  f = fit_rate(xs, ys);
  CHECK(f.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  const double b = 0.73, cc = 2.1;
  ys.clear();
  for (double x : xs) ys.push_back(cc * std::pow(x, b) * (1.0 + noise(rng)));
  f = fit_rate(xs, ys);
  CHECK(std::abs(f.slope - b) <= 0.02);

  const std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_AS(fit_rate(two, two), fit_error);
  const std::vector<double> neg = {1.0, -2.0, 3.0};
  CHECK_THROWS_AS(fit_rate(xs, {neg.begin(), neg.end()}), fit_error);
}

TEST_CASE("rate exponent table") {
  CHECK(rate_exponent(2, 1.0).b_alpha == 0.5); // exact limit value

  const ExponentTable t = rate_exponent(2, 0.95);
  CHECK(t.b_alpha == doctest::Approx(0.5 - 0.25 / 1.95).epsilon(1e-15));
  CHECK(t.n_alpha == doctest::Approx(2.0 + (1.0 / 0.95 - 1.0)).epsilon(1e-15));
  CHECK(t.q0_max == doctest::Approx(1.95 / 0.05).epsilon(1e-12));
  CHECK(t.gamma_min == doctest::Approx(t.n_alpha / 4.0).epsilon(1e-15));
  CHECK(t.rho == doctest::Approx(0.5 + t.n_alpha / 4.0).epsilon(1e-12));
  CHECK(t.n_alpha >= 2.0);

  // tau at beta = 0 reduces to (M/m)(1/p - 1/q)
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> up(1.01, 40.0);
  const std::vector<int> beta0 = {0, 0};
  for (int i = 0; i < 100; ++i) {
    const double p = up(rng), q = up(rng);
    const double lhs = t.tau(2, beta0, t.n_alpha, p, q);
    const double rhs = (t.n_alpha / 2.0) * (1.0 / p - 1.0 / q);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
  // gradient multi-index tau at q = infinity
  const std::vector<int> grad = {0, 1};
  const double beta_alpha = 0.95;
  const double tau_grad = t.tau(2, grad, t.n_alpha, t.n_alpha, q_infinity);
  const double want = (beta_alpha + 0.95 * t.n_alpha / t.n_alpha) /
                      (beta_alpha + 0.95 * 1.0);
  CHECK(tau_grad == doctest::Approx(want).epsilon(1e-12));

  // monotone in alpha with the right limit
  double prev = 0.0;
  for (double alpha : {0.88, 0.92, 0.96, 0.9999}) {
    const double b = rate_exponent(2, alpha).b_alpha;
    CHECK(b > prev);
    prev = b;
  }
  CHECK(std::abs(rate_exponent(2, 1.0 - 1e-12).b_alpha - 0.5) <= 1e-11);

  // q0_max > 14 exactly on the admissible side
  for (double alpha : {0.87, 0.95, 0.99})
    CHECK(rate_exponent(2, alpha).q0_max > 14.0);

  CHECK_THROWS_AS(rate_exponent(2, 0.86), hypothesis_error);
  CHECK_THROWS_AS(rate_exponent(2, 1.0 - 2.0 / 15.0), hypothesis_error);
  CHECK_THROWS_AS(rate_exponent(2, 1.1), hypothesis_error);
  CHECK_THROWS_AS(rate_exponent(1, 0.95), unsupported_dimension_error);
}

TEST_CASE("eigenfunction distance: identity, signs, analytic overlap") {
  const TriangleMesh mesh = mesh_unit_square(1.0 / 32.0);
  const Transformation id = identity_transform();
  const PullbackFields f = pullback(id, identity_coefficients());
  const AssembledSystem sys = assemble(mesh, f, BoundaryCondition::dirichlet, 3);
  const EigenDecomposition dec = solve_lowest(sys, 4, 1e-10);

  const PushedDecomposition pa{&dec, &sys, &mesh, &id};
  const std::vector<int> ground = {0};
  CHECK(eigenfunction_distance(pa, pa, ground, mesh) == 0.0);

  EigenDecomposition flipped = dec;
  flipped.vectors.col(0) *= -1.0;
  const PushedDecomposition pb{&flipped, &sys, &mesh, &id};
  CHECK(eigenfunction_distance(pa, pb, ground, mesh) <= 1e-12);

  // scaled square: compare with the separable analytic overlap
  const double s = 1.05;
  const Transformation dil = dilation_transform(s);
  const PullbackFields fs = pullback(dil, identity_coefficients());
  const AssembledSystem sys_s = assemble(mesh, fs, BoundaryCondition::dirichlet, 3);
  const EigenDecomposition dec_s = solve_lowest(sys_s, 4, 1e-10);
  const PushedDecomposition ps{&dec_s, &sys_s, &mesh, &dil};
  const TriangleMesh union_mesh = push_forward(mesh, dil);
  const double got = eigenfunction_distance(pa, ps, ground, union_mesh);

  // Simpson oracle for the 1-D overlap integral
  const int n = 20000;
  double o1 = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = double(i) / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    o1 += w * (std::sqrt(2.0) * std::sin(M_PI * x)) *
          (std::sqrt(2.0 / s) * std::sin(M_PI * x / s));
  }
  o1 *= (1.0 / n) / 3.0;
  const double want = std::sqrt(std::max(0.0, 2.0 - 2.0 * o1 * o1));
  CHECK(got == doctest::Approx(want).epsilon(0.05));
  CHECK(std::abs(got - want) <= 5e-3);
}

TEST_CASE("cluster projector distance is rotation invariant and guarded") {
  const TriangleMesh mesh = mesh_unit_square(1.0 / 24.0);
  const Transformation id = identity_transform();
  const PullbackFields f = pullback(id, identity_coefficients());
  const AssembledSystem sys = assemble(mesh, f, BoundaryCondition::dirichlet, 3);
  const EigenDecomposition dec = solve_lowest(sys, 4, 1e-10);

  EigenDecomposition rotated = dec;
  const double theta = 0.7;
  rotated.vectors.col(1) =
      std::cos(theta) * dec.vectors.col(1) + std::sin(theta) * dec.vectors.col(2);
  rotated.vectors.col(2) =
      -std::sin(theta) * dec.vectors.col(1) + std::cos(theta) * dec.vectors.col(2);

  const PushedDecomposition pa{&dec, &sys, &mesh, &id};
  const PushedDecomposition pb{&rotated, &sys, &mesh, &id};
  const std::vector<int> pair = {1, 2};
  // sin-angle distances bottom out at sqrt(machine eps)
  CHECK(eigenfunction_distance(pa, pb, pair, mesh) <= 1e-7);

  // splitting an exactly degenerate group is a cluster mismatch
  EigenDecomposition degen = dec;
  degen.lambdas[2] = degen.lambdas[1];
  const PushedDecomposition pd{&degen, &sys, &mesh, &id};
  const std::vector<int> half = {1};
  CHECK_THROWS_AS(eigenfunction_distance(pd, pd, half, mesh), cluster_error);
  const std::vector<int> oob = {3, 4};
  CHECK_THROWS_AS(eigenfunction_distance(pa, pb, oob, mesh), cluster_error);
}

TEST_CASE("property (P) fits") {
  const TriangleMesh mesh = mesh_unit_square(1.0 / 24.0);
  const PullbackFields f = pullback(identity_transform(), identity_coefficients());
  const AssembledSystem sys = assemble(mesh, f, BoundaryCondition::dirichlet, 3);
  const EigenDecomposition dec = solve_lowest(sys, 25, 1e-8);
  const PropertyPFit fit = property_p_fit(dec, sys, mesh, f, q_infinity);
  CHECK(fit.n_used == 25);
  MESSAGE("square gamma1_hat = ", fit.gamma1_hat, ", gamma2_hat = ", fit.gamma2_hat);
  CHECK(fit.gamma1_hat > -0.5);
  CHECK(fit.gamma1_hat < 1.0);
  for (double v : fit.norms) CHECK(v > 0.0);

  // Neumann: the constant zero mode is excluded automatically
  const AssembledSystem nsys = assemble(mesh, f, BoundaryCondition::neumann, 3);
  const EigenDecomposition ndec = solve_lowest(nsys, 12, 1e-9);
  REQUIRE(std::abs(ndec.lambdas[0]) <= 1e-8);
  const PropertyPFit nfit = property_p_fit(ndec, nsys, mesh, f, q_infinity);
  CHECK(nfit.n_used == 11);

  // finite q0 path
  const PropertyPFit f4 = property_p_fit(dec, sys, mesh, f, 4.0);
  CHECK(f4.n_used == 25);
  for (double v : f4.norms) CHECK(v > 0.0);

  // too few usable pairs
  const EigenDecomposition small = solve_lowest(sys, 5, 1e-9);
  CHECK_THROWS_AS(property_p_fit(small, sys, mesh, f, q_infinity), input_error);
  CHECK_THROWS_AS(property_p_fit(dec, sys, mesh, f, 1.5), input_error);
}

TEST_CASE("property (P) on the cusp pull-back") {
  const CuspGeometry geo(0.95, 0.2);
  const std::vector<double> levels = {0.05};
  const TriangleMesh mesh = mesh_reference(geo, 0.1, 2.0, levels);
  const Transformation t = phi_eps_transform(EpsLevel{0.05}, geo);
  const PullbackFields f = pullback(t, identity_coefficients());
  const AssembledSystem sys = assemble(mesh, f, BoundaryCondition::dirichlet, 7);
  const EigenDecomposition dec = solve_lowest(sys, 20, 1e-8);
  const PropertyPFit fit = property_p_fit(dec, sys, mesh, f, q_infinity);
  const double gamma_cap = rate_exponent(2, geo.alpha).gamma_min + 0.2;
  MESSAGE("cusp gamma1_hat = ", fit.gamma1_hat, " cap ", gamma_cap);
  CHECK(fit.gamma1_hat <= gamma_cap);
}
