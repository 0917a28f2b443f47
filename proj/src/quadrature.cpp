#include "cusp_spectra/quadrature.hpp"

namespace cusp {

const TriangleRule& TriangleRule::points3() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 2;
    const double a = 1.0 / 6.0, b = 2.0 / 3.0, w = 1.0 / 3.0;
    r.bary = {{b, a, a}, {a, b, a}, {a, a, b}};
    r.weights = {w, w, w};
    return r;
  }();
  return rule;
}

const TriangleRule& TriangleRule::points7() {
  static const TriangleRule rule = [] {
    TriangleRule r;
    r.degree = 5;
    const double a1 = 0.059715871789769820;
    const double b1 = 0.470142064105115090;
    const double w1 = 0.132394152788506180;
    const double a2 = 0.797426985353087320;
    const double b2 = 0.101286507323456340;
    const double w2 = 0.125939180544827150;
    r.bary = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0},
              {a1, b1, b1},
              {b1, a1, b1},
              {b1, b1, a1},
              {a2, b2, b2},
              {b2, a2, b2},
              {b2, b2, a2}};
    r.weights = {0.225, w1, w1, w1, w2, w2, w2};
    return r;
  }();
  return rule;
}

const TriangleRule& TriangleRule::get(int n_points) {
  if (n_points == 3) return points3();
  if (n_points == 7) return points7();
  throw input_error("quadrature rule must use 3 or 7 points per triangle");
}

} // namespace cusp
