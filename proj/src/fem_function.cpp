#include "cusp_spectra/fem_function.hpp"

#include <algorithm>
#include <cmath>

namespace cusp {

MeshLocator::MeshLocator(const TriangleMesh& m) : mesh_(&m) {
  double x1 = -1e300, y1 = -1e300;
  x0_ = 1e300;
  y0_ = 1e300;
  for (const Vec2& p : m.nodes) {
    x0_ = std::min(x0_, p.x());
    y0_ = std::min(y0_, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
  const int target = std::max(1, static_cast<int>(std::sqrt(
                                     static_cast<double>(m.triangle_count()))));
  nx_ = target;
  ny_ = target;
  dx_ = std::max((x1 - x0_) / nx_, 1e-12);
  dy_ = std::max((y1 - y0_) / ny_, 1e-12);
  bins_.assign(static_cast<std::size_t>(nx_) * ny_, {});
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tr = m.triangles[t];
    double bx0 = 1e300, by0 = 1e300, bx1 = -1e300, by1 = -1e300;
    for (int i = 0; i < 3; ++i) {
      bx0 = std::min(bx0, m.nodes[tr[i]].x());
      by0 = std::min(by0, m.nodes[tr[i]].y());
      bx1 = std::max(bx1, m.nodes[tr[i]].x());
      by1 = std::max(by1, m.nodes[tr[i]].y());
    }
    const int i0 = std::clamp(static_cast<int>((bx0 - x0_) / dx_), 0, nx_ - 1);
    const int i1 = std::clamp(static_cast<int>((bx1 - x0_) / dx_), 0, nx_ - 1);
    const int j0 = std::clamp(static_cast<int>((by0 - y0_) / dy_), 0, ny_ - 1);
    const int j1 = std::clamp(static_cast<int>((by1 - y0_) / dy_), 0, ny_ - 1);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        bins_[static_cast<std::size_t>(i) * ny_ + j].push_back(t);
  }
}

int MeshLocator::locate(const Vec2& p, std::array<double, 3>& bary,
                        double tol) const {
  const int i = static_cast<int>((p.x() - x0_) / dx_);
  const int j = static_cast<int>((p.y() - y0_) / dy_);
  if (i < 0 || i >= nx_ || j < 0 || j >= ny_) return -1;
  const TriangleMesh& m = *mesh_;
  for (int t : bins_[static_cast<std::size_t>(i) * ny_ + j]) {
    const auto& tr = m.triangles[t];
    const Vec2& a = m.nodes[tr[0]];
    const Vec2& b = m.nodes[tr[1]];
    const Vec2& c = m.nodes[tr[2]];
    const double det = (b.x() - a.x()) * (c.y() - a.y()) -
                       (c.x() - a.x()) * (b.y() - a.y());
    if (det <= 0.0) continue;
    const double l1 = ((p.x() - a.x()) * (c.y() - a.y()) -
                       (c.x() - a.x()) * (p.y() - a.y())) /
                      det;
    const double l2 = ((b.x() - a.x()) * (p.y() - a.y()) -
                       (p.x() - a.x()) * (b.y() - a.y())) /
                      det;
    const double l0 = 1.0 - l1 - l2;
    if (l0 >= -tol && l1 >= -tol && l2 >= -tol) {
      bary = {l0, l1, l2};
      return t;
    }
  }
  return -1;
}

double nodal_value(const AssembledSystem& sys, const Eigen::VectorXd& dof_vec,
                   int node) {
  const int d = sys.node_to_dof[node];
  return d < 0 ? 0.0 : dof_vec[d];
}

double p1_value(const TriangleMesh& m, const AssembledSystem& sys,
                const Eigen::VectorXd& dof_vec, int tri,
                const std::array<double, 3>& bary) {
  const auto& tr = m.triangles[tri];
  return bary[0] * nodal_value(sys, dof_vec, tr[0]) +
         bary[1] * nodal_value(sys, dof_vec, tr[1]) +
         bary[2] * nodal_value(sys, dof_vec, tr[2]);
}

Vec2 p1_gradient(const TriangleMesh& m, const AssembledSystem& sys,
                 const Eigen::VectorXd& dof_vec, int tri) {
  const auto& tr = m.triangles[tri];
  const Vec2& p0 = m.nodes[tr[0]];
  const Vec2& p1 = m.nodes[tr[1]];
  const Vec2& p2 = m.nodes[tr[2]];
  const double area = m.triangle_area(tri);
  const Vec2 g0 = Vec2(p1.y() - p2.y(), p2.x() - p1.x()) / (2.0 * area);
  const Vec2 g1 = Vec2(p2.y() - p0.y(), p0.x() - p2.x()) / (2.0 * area);
  const Vec2 g2 = Vec2(p0.y() - p1.y(), p1.x() - p0.x()) / (2.0 * area);
  return nodal_value(sys, dof_vec, tr[0]) * g0 +
         nodal_value(sys, dof_vec, tr[1]) * g1 +
         nodal_value(sys, dof_vec, tr[2]) * g2;
}

TriangleMesh push_forward(const TriangleMesh& m, const Transformation& t) {
  if (!t.map) throw input_error("push_forward needs a map");
  TriangleMesh out = m;
  for (int i = 0; i < m.node_count(); ++i) out.nodes[i] = t.map(m.nodes[i]);
  out.h_max = 0.0;
  for (int tr = 0; tr < out.triangle_count(); ++tr) {
    if (!(out.triangle_area(tr) > 0.0))
      throw meshing_error("push_forward inverted a triangle");
    out.h_max = std::max(out.h_max, out.triangle_diameter(tr));
  }
  return out;
}

} // namespace cusp
