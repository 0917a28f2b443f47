#pragma once

#include <functional>
#include <vector>

#include "cusp_spectra/errors.hpp"
#include "cusp_spectra/types.hpp"

namespace cusp {

// Perturbation parameter of the Lipschitz truncations Omega_eps.
struct EpsLevel {
  double eps = 0.0;
};

// Planar domain with a single outward power cusp at (0, 1):
//   Omega ∩ ]-1,1[^2 = { (x, y) : y < 1 - |x|^alpha },
// closed below by a configurable polyline (a graph over x on [-1, 1]).
struct CuspGeometry {
  double alpha;
  double eps0;
  int dim = 2;
  // Closure polyline vertices, strictly increasing in x, strictly below y = 0;
  // the implicit first/last boundary points (-1, 0) and (1, 0) attach it to
  // the cusp profile.
  std::vector<Vec2> outer;

  CuspGeometry(double alpha, double eps0, int dim = 2,
               std::vector<Vec2> outer = default_outer());

  static std::vector<Vec2> default_outer();

  // Lower boundary y(x) from the closure polyline, x in [-1, 1].
  double bottom(double x) const;
  // Upper boundary of Omega_eps: min(1 - eps, 1 - |x|^alpha).
  double top(double x, double eps) const;

  // Thm. hypotheses, checked on demand by the experiments that need them.
  void require_rate_hypothesis() const;   // alpha in (1 - dim/15, 1)
  void require_ratio_hypothesis() const;  // alpha > 1/2 (eps0 <= 1/4 holds by construction)
};

// C_alpha = 1 - 1/2^(2 alpha - 1); defined for alpha in (1/2, 1].
double c_alpha(double alpha);

// Cut-off profile h_eps(|xbar|). Explicit branch 1 - |xbar|^alpha for
// |xbar| >= eps0^(1/alpha); otherwise the implicit equation is solved by
// bisection inside the bracket guaranteed by the C_alpha inequality, down to
// |residual| <= tol.
double h_eps(double xbar_norm, EpsLevel level, const CuspGeometry& geo,
             double tol = 1e-12);

namespace detail {
// Residual of the implicit equation at candidate value h.
double h_residual(double h, double alpha, double eps0, double eps,
                  double xbar_norm);
// Implicit-branch solver on raw parameters (also used to exercise the
// bracket-failure path with hypotheses the CuspGeometry constructor rejects).
double h_eps_implicit(double alpha, double eps0, double eps, double xbar_norm,
                      double tol);
// d h_eps / d|xbar| on the implicit branch (0 where max{|xbar|^2, eps^(2/a)}
// is flat in xbar).
double h_eps_grad(double h, double alpha, double eps0, double eps,
                  double xbar_norm);
} // namespace detail

struct RegionSpec {
  enum class Kind { omega, omega_eps, omega_hat_eps };
  Kind kind = Kind::omega;
  EpsLevel level{};
};

RegionSpec omega();
RegionSpec omega_eps(double eps);
RegionSpec omega_hat_eps(double eps);

// Exact membership predicate for the three set definitions (open sets).
bool membership(const Vec2& p, const RegionSpec& region, const CuspGeometry& geo);

// |Omega \ Omega_eps| = 2 alpha eps^(1 + 1/alpha) / (alpha + 1), N = 2 only.
double cusp_cap_measure(EpsLevel level, const CuspGeometry& geo);

// Domain { x in (x_lo, x_hi), floor_y < y < profile(x) }; profile_grad may be
// empty, in which case morph Jacobians fall back to a central difference.
struct GraphDomain {
  double x_lo = 0.0;
  double x_hi = 1.0;
  double floor_y = 0.0;
  double lipschitz_bound = 1.0;
  double rho = 0.5;
  std::function<double(double)> profile;
  std::function<double(double)> profile_grad;
};

// Checks floor_y + rho <= profile <= everywhere on a sample grid and a
// finite-difference Lipschitz estimate <= lipschitz_bound.
void validate_graph_domain(const GraphDomain& gd, int samples = 257);

GraphDomain unit_square_domain();

} // namespace cusp
