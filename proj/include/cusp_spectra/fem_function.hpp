#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "cusp_spectra/assembly.hpp"
#include "cusp_spectra/mesh.hpp"
#include "cusp_spectra/transform.hpp"

namespace cusp {

// Uniform-grid point locator over a triangle mesh.
class MeshLocator {
 public:
  explicit MeshLocator(const TriangleMesh& m);
  // Triangle containing p (barycentric within -tol), or -1.
  int locate(const Vec2& p, std::array<double, 3>& bary, double tol = 1e-9) const;

 private:
  const TriangleMesh* mesh_;
  double x0_, y0_, dx_, dy_;
  int nx_, ny_;
  std::vector<std::vector<int>> bins_;
};

// Nodal value of a dof vector; eliminated (Dirichlet) nodes read as zero.
double nodal_value(const AssembledSystem& sys, const Eigen::VectorXd& dof_vec,
                   int node);

double p1_value(const TriangleMesh& m, const AssembledSystem& sys,
                const Eigen::VectorXd& dof_vec, int tri,
                const std::array<double, 3>& bary);

// Constant per-element P1 gradient.
Vec2 p1_gradient(const TriangleMesh& m, const AssembledSystem& sys,
                 const Eigen::VectorXd& dof_vec, int tri);

// Node-wise image of the mesh under t (triangles unchanged).
TriangleMesh push_forward(const TriangleMesh& m, const Transformation& t);

} // namespace cusp
