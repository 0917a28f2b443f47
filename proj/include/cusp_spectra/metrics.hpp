#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cusp_spectra/eigensolve.hpp"
#include "cusp_spectra/mesh.hpp"
#include "cusp_spectra/transform.hpp"

namespace cusp {

// l2 distance of the shifted inverse-power sequences (lambda_n + 1)^-k with a
// Weyl-law tail certificate: tail_bound = 2 sum_{n > n_used} (c n^p + 1)^-2k
// bounds the truncated tail sum of squares, so the truncation error of value
// is at most sqrt(tail_bound).
struct SchattenDistance {
  int k = 1;
  double value = 0.0;
  double tail_bound = 0.0;
  int n_used = 0;
  bool tail_certified = false;
};

SchattenDistance schatten_distance(std::span<const double> lam,
                                   std::span<const double> lam_tilde, int k);

// Spectral projector perturbation check: P from A's nu-eigenspace, Q from B's
// eigenvectors at the same sorted indices; admissible when |A-B| < d/2.
struct ProjectorCheck {
  Eigen::MatrixXd P, Q;
  std::vector<int> cluster;
  double gap = 0.0;          // d
  double a_minus_b_norm = 0.0;
  double op_distance = 0.0;  // |P - Q|
  double bound = 0.0;        // 2 (1 + |cluster|) / d * |A - B|
  bool admissible = false;
  bool bound_holds = false;
  bool minmax_holds = false; // |lambda_i - mu_i| <= |A - B| for all i
};

ProjectorCheck projector_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               double nu);

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0; // natural log scale
  double r2 = 0.0;
};

// Ordinary least squares on (log x, log y).
FitResult fit_rate(std::span<const double> xs, std::span<const double> ys);

// Exponent calculus of the cusp rate theory.
struct ExponentTable {
  int ambient_dim = 2;
  double alpha = 1.0;
  double n_alpha = 0.0;   // N + (N-1)(1/alpha - 1)
  double b_alpha = 0.0;   // 1/2 - 5(1-alpha)/(N-1+alpha)
  double gamma_min = 0.0; // n_alpha / 4
  double q0_max = 0.0;    // (N-1+alpha)/(1-alpha)
  double rho = 0.0;       // canonical gradient exponent 1/2 + n_alpha/4

  // Interpolation exponent; beta is a multi-index of length ambient_dim,
  // q may be infinite.
  double tau(int m, std::span<const int> beta, double big_m, double p,
             double q) const;
  // Bootstrap exponent inf over p > max(M/(m-|beta|), p0).
  double rho_exponent(int m, std::span<const int> beta, double p0) const;
};

ExponentTable rate_exponent(int N, double alpha);

// One eigendecomposition together with everything needed to evaluate and push
// forward its eigenfunctions.
struct PushedDecomposition {
  const EigenDecomposition* dec = nullptr;
  const AssembledSystem* sys = nullptr;
  const TriangleMesh* mesh = nullptr; // reference mesh
  const Transformation* t = nullptr;  // map with inverse
};

// Simple eigenvalue: L2 distance of the pushed-forward eigenfunctions over the
// union domain (covered by union_mesh), sign-aligned, zero-extended. Cluster:
// sin of the largest principal angle between the M-orthonormal cluster spans
// (M of the first decomposition).
double eigenfunction_distance(const PushedDecomposition& a,
                              const PushedDecomposition& b,
                              std::span<const int> cluster,
                              const TriangleMesh& union_mesh,
                              int quad_points = 7);

struct PropertyPFit {
  double gamma1_hat = 0.0;
  double gamma2_hat = 0.0;
  int n_used = 0;
  FitResult fit1, fit2;
  std::vector<double> lambdas, norms, grad_norms;
};

// Fits log |psi_n|_{L^q0(g dx)} and log |grad psi_n|_{L^q0(g dx)} against
// log lambda_n; zero eigenvalues are excluded.
PropertyPFit property_p_fit(const EigenDecomposition& dec,
                            const AssembledSystem& sys, const TriangleMesh& m,
                            const PullbackFields& f, double q0);

} // namespace cusp
