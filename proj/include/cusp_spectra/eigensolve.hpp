#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cusp_spectra/assembly.hpp"

namespace cusp {

// Lowest eigenpairs of K psi = lambda M psi, ascending, M-orthonormal,
// residuals = |K psi - lambda M psi| / |M psi|.
struct EigenDecomposition {
  std::vector<double> lambdas;
  Eigen::MatrixXd vectors; // dofs x count
  std::vector<double> residuals;
};

struct SolveOptions {
  double shift = -1.0; // valid below the spectrum since K >= 0
  int max_iterations = 400;
  int block_extra = 8;
};

EigenDecomposition solve_lowest(const AssembledSystem& sys, int count,
                                double tol, const SolveOptions& opts = {});

void write_eigen_cache(std::ostream& os, const EigenDecomposition& dec,
                       std::uint64_t hash);
// Returns nullopt when the header hash does not match.
std::optional<EigenDecomposition> read_eigen_cache(std::istream& is,
                                                   std::uint64_t expected_hash);

// Groups of indices whose eigenvalues agree to rel_tol.
std::vector<std::vector<int>> eigenvalue_clusters(std::span<const double> lambdas,
                                                  double rel_tol = 1e-6);

} // namespace cusp
