#include "cusp_spectra/eigensolve.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace cusp {

namespace {

// Cholesky-QR against the M inner product, two passes.
void m_orthonormalize(Eigen::MatrixXd& v, const Eigen::SparseMatrix<double>& m) {
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::MatrixXd g = v.transpose() * (m * v);
    g = 0.5 * (g + g.transpose().eval());
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
      throw solver_error("subspace lost rank during M-orthonormalization");
    v = llt.matrixU().solve<Eigen::OnTheRight>(v);
  }
}

} // namespace

EigenDecomposition solve_lowest(const AssembledSystem& sys, int count,
                                double tol, const SolveOptions& opts) {
  const int n = sys.dofs();
  if (count < 1) throw input_error("eigenpair count must be >= 1");
  if (count > n / 4)
    throw input_error("eigenpair count must be <= dof/4 for this solver");
  if (!(tol > 0.0)) throw input_error("solver tolerance must be positive");

  const Eigen::SparseMatrix<double>& k = sys.stiffness;
  const Eigen::SparseMatrix<double>& m = sys.mass;
  Eigen::SparseMatrix<double> shifted = k - opts.shift * m;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success)
    throw solver_error("sparse factorization of the shifted operator failed");

  const int block = std::min(n, std::max(2 * count, count + opts.block_extra));
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd v(n, block);
  for (int j = 0; j < block; ++j)
    for (int i = 0; i < n; ++i) v(i, j) = uni(rng);
  m_orthonormalize(v, m);

  Eigen::VectorXd theta(block);
  std::vector<double> residuals(count, 1.0);
  bool converged = false;
  int converged_count = 0;

  for (int it = 0; it < opts.max_iterations && !converged; ++it) {
    Eigen::MatrixXd w = ldlt.solve(m * v);
    if (ldlt.info() != Eigen::Success)
      throw solver_error("sparse solve failed during subspace iteration");
    m_orthonormalize(w, m);
    Eigen::MatrixXd h = w.transpose() * (k * w);
    h = 0.5 * (h + h.transpose().eval());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success)
      throw solver_error("dense Rayleigh-Ritz eigensolve failed");
    v = w * es.eigenvectors();
    theta = es.eigenvalues();

    converged_count = 0;
    for (int i = 0; i < count; ++i) {
      const Eigen::VectorXd kv = k * v.col(i);
      const Eigen::VectorXd mv = m * v.col(i);
      residuals[i] = (kv - theta[i] * mv).norm() / mv.norm();
      if (residuals[i] <= tol) ++converged_count;
    }
    converged = (converged_count == count);
  }

  if (!converged) {
    std::ostringstream os;
    os << "subspace iteration converged only " << converged_count << " of "
       << count << " pairs after " << opts.max_iterations << " iterations";
    throw partial_result_error(os.str(), converged_count);
  }

  EigenDecomposition dec;
  dec.lambdas.assign(theta.data(), theta.data() + count);
  dec.vectors = v.leftCols(count);
  dec.residuals = residuals;
  // deterministic sign: largest-magnitude coefficient positive
  for (int j = 0; j < count; ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double a = std::abs(dec.vectors(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (dec.vectors(arg, j) < 0.0) dec.vectors.col(j) *= -1.0;
  }
  return dec;
}

void write_eigen_cache(std::ostream& os, const EigenDecomposition& dec,
                       std::uint64_t hash) {
  char buf[64];
  const int count = static_cast<int>(dec.lambdas.size());
  const int dof = static_cast<int>(dec.vectors.rows());
  os << "eigs " << count << ' ' << dof << ' ' << hash << "\n";
  for (int i = 0; i < count; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g", dec.lambdas[i],
                  dec.residuals[i]);
    os << buf << "\n";
  }
  for (int j = 0; j < count; ++j) {
    for (int i = 0; i < dof; ++i) {
      std::snprintf(buf, sizeof buf, i + 1 == dof ? "%.17g" : "%.17g ",
                    dec.vectors(i, j));
      os << buf;
    }
    os << "\n";
  }
}

std::optional<EigenDecomposition> read_eigen_cache(std::istream& is,
                                                   std::uint64_t expected_hash) {
  std::string word;
  int count = 0, dof = 0;
  std::uint64_t hash = 0;
  if (!(is >> word >> count >> dof >> hash) || word != "eigs") return std::nullopt;
  if (hash != expected_hash) return std::nullopt;
  EigenDecomposition dec;
  dec.lambdas.resize(count);
  dec.residuals.resize(count);
  dec.vectors.resize(dof, count);
  for (int i = 0; i < count; ++i)
    if (!(is >> dec.lambdas[i] >> dec.residuals[i])) return std::nullopt;
  for (int j = 0; j < count; ++j)
    for (int i = 0; i < dof; ++i)
      if (!(is >> dec.vectors(i, j))) return std::nullopt;
  return dec;
}

std::vector<std::vector<int>> eigenvalue_clusters(std::span<const double> lambdas,
                                                  double rel_tol) {
  std::vector<std::vector<int>> clusters;
  for (int i = 0; i < static_cast<int>(lambdas.size()); ++i) {
    if (!clusters.empty()) {
      const double prev = lambdas[clusters.back().back()];
      const double scale = std::max({std::abs(prev), std::abs(lambdas[i]), 1.0});
      if (std::abs(lambdas[i] - prev) <= rel_tol * scale) {
        clusters.back().push_back(i);
        continue;
      }
    }
    clusters.push_back({i});
  }
  return clusters;
}

} // namespace cusp
