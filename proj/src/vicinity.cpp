#include "cusp_spectra/vicinity.hpp"

#include <cmath>
#include <sstream>

#include "cusp_spectra/quadrature.hpp"

namespace cusp {

namespace {

struct LqAccumulator {
  double q;
  double power_sum = 0.0; // sum w |f|^q  (finite q)
  double sup = 0.0;       // max |f|      (q = infinity)

  void add(double value, double weight) {
    if (std::isinf(q))
      sup = std::max(sup, std::abs(value));
    else
      power_sum += weight * std::pow(std::abs(value), q);
  }
  double norm() const {
    return std::isinf(q) ? sup : std::pow(power_sum, 1.0 / q);
  }
};

void check_finite(double v, const Vec2& x, const char* what) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite " << what << " at (" << x.x() << ", " << x.y() << ")";
    throw quadrature_error(os.str(), x);
  }
}

} // namespace

VicinityReport delta_q(const PairFields& pf, const PullbackFields& f,
                       const TriangleMesh& m, double q, int quad_points) {
  if (!(q > 1.0) && !std::isinf(q))
    throw input_error("delta_q requires q > 1 or q = infinity");
  const TriangleRule& rule = TriangleRule::get(quad_points);

  LqAccumulator w1{q}, w2{q}, s1{q}, s2{q};       // weighted with g dx
  LqAccumulator u_w1{q}, u_w2{q}, u_s1{q}, u_s2{q}; // unweighted diagnostics

  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tr = m.triangles[t];
    const Vec2& p0 = m.nodes[tr[0]];
    const Vec2& p1 = m.nodes[tr[1]];
    const Vec2& p2 = m.nodes[tr[2]];
    const double area = m.triangle_area(t);
    const Vec2 centroid = (p0 + p1 + p2) / 3.0;
    for (std::size_t qp = 0; qp < rule.bary.size(); ++qp) {
      const auto& b = rule.bary[qp];
      const Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
      double wv, gv;
      Mat2 sv, av;
      try {
        wv = eval_nudged(pf.w, x, centroid);
        sv = eval_nudged(pf.S, x, centroid);
        gv = eval_nudged(f.g, x, centroid);
        av = eval_nudged(f.a, x, centroid);
      } catch (const singularity_error& e) {
        throw quadrature_error(e.what(), e.point);
      }
      check_finite(wv, x, "w");
      check_finite(gv, x, "g");
      Mat2 s_half, s_inv_half, a_half;
      try {
        s_half = spd_pow(sv, 0.5);
        s_inv_half = spd_pow(sv, -0.5);
        a_half = spd_pow(av, 0.5);
      } catch (const matrix_domain_error& e) {
        throw quadrature_error(e.what(), x);
      }
      const double f1a = wv - 1.0;
      const double f1b = 1.0 / wv - 1.0;
      const double f2a = ((s_half - s_inv_half) * a_half).norm(); // Frobenius
      const double f2b = ((sv - Mat2::Identity()) * a_half).norm();
      check_finite(f1b, x, "w^-1 - 1");
      check_finite(f2a, x, "(S^1/2 - S^-1/2) a^1/2");
      check_finite(f2b, x, "(S - I) a^1/2");
      const double wq = rule.weights[qp] * area;
      w1.add(f1a, wq * gv);
      w2.add(f1b, wq * gv);
      s1.add(f2a, wq * gv);
      s2.add(f2b, wq * gv);
      u_w1.add(f1a, wq);
      u_w2.add(f1b, wq);
      u_s1.add(f2a, wq);
      u_s2.add(f2b, wq);
    }
  }

  VicinityReport rep;
  rep.q = q;
  rep.delta1 = w1.norm() + w2.norm();
  rep.delta2 = s1.norm() + s2.norm();
  rep.delta = rep.delta1 + rep.delta2;
  rep.delta1_unweighted = u_w1.norm() + u_w2.norm();
  rep.delta2_unweighted = u_s1.norm() + u_s2.norm();
  return rep;
}

double sobolev_distance(const Transformation& t, const Transformation& t_tilde,
                        const TriangleMesh& m, double q, int quad_points) {
  if (!(q > 1.0) && !std::isinf(q))
    throw input_error("sobolev_distance requires q > 1 or q = infinity");
  if (!t.map || !t.jacobian || !t_tilde.map || !t_tilde.jacobian)
    throw input_error("sobolev_distance needs maps with Jacobians");
  const TriangleRule& rule = TriangleRule::get(quad_points);
  LqAccumulator val{q}, grad{q};
  for (int tri = 0; tri < m.triangle_count(); ++tri) {
    const auto& tr = m.triangles[tri];
    const Vec2& p0 = m.nodes[tr[0]];
    const Vec2& p1 = m.nodes[tr[1]];
    const Vec2& p2 = m.nodes[tr[2]];
    const double area = m.triangle_area(tri);
    const Vec2 centroid = (p0 + p1 + p2) / 3.0;
    for (std::size_t qp = 0; qp < rule.bary.size(); ++qp) {
      const auto& b = rule.bary[qp];
      const Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
      const Vec2 dv = eval_nudged(t.map, x, centroid) -
                      eval_nudged(t_tilde.map, x, centroid);
      const Mat2 dj = eval_nudged(t.jacobian, x, centroid) -
                      eval_nudged(t_tilde.jacobian, x, centroid);
      check_finite(dv.norm(), x, "map difference");
      check_finite(dj.norm(), x, "jacobian difference");
      const double wq = rule.weights[qp] * area;
      val.add(dv.norm(), wq);
      grad.add(dj.norm(), wq);
    }
  }
  return val.norm() + grad.norm();
}

} // namespace cusp
