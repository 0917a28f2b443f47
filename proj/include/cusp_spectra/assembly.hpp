#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/SparseCore>

#include "cusp_spectra/mesh.hpp"
#include "cusp_spectra/transform.hpp"

namespace cusp {

enum class BoundaryCondition { dirichlet, neumann };

// Sparse symmetric stiffness/mass pair of the weighted form
//   K_ij = int a grad(phi_j) . grad(phi_i) g dx,  M_ij = int phi_j phi_i g dx,
// on the free nodes after boundary-condition elimination.
struct AssembledSystem {
  Eigen::SparseMatrix<double> stiffness;
  Eigen::SparseMatrix<double> mass;
  std::vector<int> node_to_dof; // -1 for eliminated nodes
  std::vector<int> dof_to_node;
  BoundaryCondition bc = BoundaryCondition::dirichlet;

  int dofs() const { return static_cast<int>(dof_to_node.size()); }
};

AssembledSystem assemble(const TriangleMesh& m, const PullbackFields& f,
                         BoundaryCondition bc, int quad_points = 7);

// Coordinate text dump, 0-based, symmetric lower triangle only.
void write_matrix_coord(std::ostream& os, const Eigen::SparseMatrix<double>& m);

std::uint64_t system_hash(const AssembledSystem& sys);

} // namespace cusp
