#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "cusp_spectra/eigensolve.hpp"

using namespace cusp;

namespace {

AssembledSystem square_system(double h, BoundaryCondition bc) {
  const TriangleMesh m = mesh_unit_square(h);
  const PullbackFields f = pullback(identity_transform(), identity_coefficients());
  return assemble(m, f, bc, 3);
}

// independent dense oracle for small systems
std::vector<double> dense_eigenvalues(const AssembledSystem& sys, int count) {
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(
      Eigen::MatrixXd(sys.stiffness), Eigen::MatrixXd(sys.mass));
  return {ges.eigenvalues().data(), ges.eigenvalues().data() + count};
}

constexpr double kPi2 = M_PI * M_PI;

} // namespace

TEST_CASE("sparse path matches the dense oracle on a small system") {
  const AssembledSystem sys = square_system(1.0 / 5.0, BoundaryCondition::dirichlet);
  REQUIRE(sys.dofs() <= 200);
  const int count = 10;
  REQUIRE(count <= sys.dofs() / 4);
  const EigenDecomposition dec = solve_lowest(sys, count, 1e-12);
  const std::vector<double> oracle = dense_eigenvalues(sys, count);
  for (int i = 0; i < count; ++i)
    CHECK(std::abs(dec.lambdas[i] - oracle[i]) <= 1e-9 * oracle[i]);
}

TEST_CASE("dirichlet unit square eigenvalues near the analytic spectrum") {
  const AssembledSystem sys = square_system(1.0 / 32.0, BoundaryCondition::dirichlet);
  const EigenDecomposition dec = solve_lowest(sys, 4, 1e-9);
  CHECK(std::abs(dec.lambdas[0] - 2.0 * kPi2) <= 0.01 * 2.0 * kPi2);
  CHECK(std::abs(dec.lambdas[1] - 5.0 * kPi2) <= 0.01 * 5.0 * kPi2);
  CHECK(std::abs(dec.lambdas[2] - 5.0 * kPi2) <= 0.01 * 5.0 * kPi2);
  CHECK(dec.lambdas[0] > 0.0); // Dirichlet ground state strictly positive
  for (double r : dec.residuals) CHECK(r <= 1e-9);

  // M-orthonormal eigenvectors
  Eigen::MatrixXd gram =
      dec.vectors.transpose() * (sys.mass * dec.vectors);
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("neumann unit square: zero mode plus pi^2") {
  const AssembledSystem sys = square_system(1.0 / 32.0, BoundaryCondition::neumann);
  const EigenDecomposition dec = solve_lowest(sys, 3, 1e-10);
  CHECK(std::abs(dec.lambdas[0]) <= 1e-8);
  CHECK(std::abs(dec.lambdas[1] - kPi2) <= 0.01 * kPi2);
  CHECK(std::abs(dec.lambdas[2] - kPi2) <= 0.01 * kPi2);
}

TEST_CASE("weyl growth diagnostic on the square") {
  const AssembledSystem sys = square_system(1.0 / 48.0, BoundaryCondition::dirichlet);
  const EigenDecomposition dec = solve_lowest(sys, 40, 1e-8);
  // fitted slope of log lambda_n vs log n over n in [5, 40]
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (int i = 4; i < 40; ++i) {
    const double lx = std::log(double(i + 1));
    const double ly = std::log(dec.lambdas[i]);
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.15)); // 2/N with N = 2
}

TEST_CASE("identical solves are bitwise identical") {
  const AssembledSystem sys = square_system(1.0 / 16.0, BoundaryCondition::dirichlet);
  const EigenDecomposition a = solve_lowest(sys, 6, 1e-10);
  const EigenDecomposition b = solve_lowest(sys, 6, 1e-10);
  for (int i = 0; i < 6; ++i) CHECK(a.lambdas[i] == b.lambdas[i]);
  CHECK((a.vectors - b.vectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("min-max monotonicity under domain shrinking") {
  GraphDomain small = unit_square_domain();
  small.profile = [](double) { return 0.9; };
  small.profile_grad = [](double) { return 0.0; };
  const TriangleMesh m_small = mesh_graph_domain(small, 1.0 / 16.0);
  const PullbackFields f = pullback(identity_transform(), identity_coefficients());
  const AssembledSystem sys_small =
      assemble(m_small, f, BoundaryCondition::dirichlet, 3);
  const AssembledSystem sys_big = square_system(1.0 / 16.0, BoundaryCondition::dirichlet);
  const double l_small = solve_lowest(sys_small, 1, 1e-10).lambdas[0];
  const double l_big = solve_lowest(sys_big, 1, 1e-10).lambdas[0];
  CHECK(l_small > l_big);
}

TEST_CASE("input validation and partial results") {
  const AssembledSystem sys = square_system(1.0 / 8.0, BoundaryCondition::dirichlet);
  CHECK_THROWS_AS(solve_lowest(sys, 0, 1e-8), input_error);
  CHECK_THROWS_AS(solve_lowest(sys, sys.dofs() / 4 + 1, 1e-8), input_error);
  CHECK_THROWS_AS(solve_lowest(sys, 2, -1.0), input_error);

  SolveOptions strangled;
  strangled.max_iterations = 1;
  try {
    solve_lowest(sys, 5, 1e-14, strangled);
    CHECK(false); // must not converge in one iteration at this tolerance
  } catch (const partial_result_error& e) {
    CHECK(e.converged >= 0);
    CHECK(e.converged < 5);
  }
}

TEST_CASE("eigenpair cache round trip") {
  const AssembledSystem sys = square_system(1.0 / 8.0, BoundaryCondition::dirichlet);
  const EigenDecomposition dec = solve_lowest(sys, 4, 1e-10);
  const std::uint64_t h = system_hash(sys);
  std::stringstream ss;
  write_eigen_cache(ss, dec, h);

  auto restored = read_eigen_cache(ss, h);
  REQUIRE(restored.has_value());
  for (int i = 0; i < 4; ++i) {
    CHECK(restored->lambdas[i] == dec.lambdas[i]); // 17-digit round trip
    CHECK(restored->residuals[i] == dec.residuals[i]);
  }
  CHECK((restored->vectors - dec.vectors).cwiseAbs().maxCoeff() == 0.0);

  std::stringstream ss2;
  write_eigen_cache(ss2, dec, h);
  CHECK_FALSE(read_eigen_cache(ss2, h + 1).has_value());
}

TEST_CASE("eigenvalue clustering by relative gap") {
  const std::vector<double> lam = {1.0, 1.0 + 5e-7, 2.0, 2.0000001, 7.0};
  const auto clusters = eigenvalue_clusters(lam, 1e-6);
  REQUIRE(clusters.size() == 3);
  CHECK(clusters[0] == std::vector<int>{0, 1});
  CHECK(clusters[1] == std::vector<int>{2, 3});
  CHECK(clusters[2] == std::vector<int>{4});
}
