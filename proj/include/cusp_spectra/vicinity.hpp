#pragma once

#include <limits>
#include <optional>

#include "cusp_spectra/mesh.hpp"
#include "cusp_spectra/transform.hpp"

namespace cusp {

inline constexpr double q_infinity = std::numeric_limits<double>::infinity();

struct VicinityReport {
  double q = 2.0;
  double delta1 = 0.0; // |w-1| + |w^-1 - 1| parts
  double delta2 = 0.0; // (S^1/2 - S^-1/2) a^1/2 and (S - I) a^1/2 parts
  double delta = 0.0;  // delta1 + delta2
  double delta1_unweighted = 0.0; // Lebesgue-weight diagnostics
  double delta2_unweighted = 0.0;
  std::optional<double> sobolev_comparison;
};

// Measure of vicinity in L^q(Omega, g dx); pointwise matrix norm is
// Frobenius, q = infinity takes the max over quadrature points (a lower bound
// of the essential sup).
VicinityReport delta_q(const PairFields& pf, const PullbackFields& f,
                       const TriangleMesh& m, double q, int quad_points = 7);

// |phi - phi~|_{L^q} + |grad phi - grad phi~|_{L^q}, unweighted.
double sobolev_distance(const Transformation& t, const Transformation& t_tilde,
                        const TriangleMesh& m, double q, int quad_points = 7);

} // namespace cusp
