#pragma once

#include <array>
#include <vector>

#include "cusp_spectra/errors.hpp"
#include "cusp_spectra/types.hpp"

namespace cusp {

// Symmetric Gauss rules on the reference triangle, weights normalized to 1.
// Points are interior, so piecewise fields are never sampled on mesh edges.
struct TriangleRule {
  std::vector<std::array<double, 3>> bary;
  std::vector<double> weights;
  int degree = 0;

  static const TriangleRule& points3(); // degree 2
  static const TriangleRule& points7(); // degree 5
  static const TriangleRule& get(int n_points);
};

// Evaluate f at x; if the field reports a branch interface, retry once with x
// nudged 1e-13 toward the element centroid (an asymmetric fallback direction
// covers the point at the centroid itself).
template <class F>
auto eval_nudged(F&& f, const Vec2& x, const Vec2& centroid)
    -> decltype(f(x)) {
  try {
    return f(x);
  } catch (const interface_error&) {
    Vec2 dir = centroid - x;
    double n = dir.norm();
    if (n == 0.0) {
      dir = Vec2(0.76480135261534, -0.64427862463509);
      n = 1.0;
    }
    const Vec2 moved = x + (1e-13 / n) * dir;
    return f(moved);
  }
}

} // namespace cusp
