#pragma once

#include <string>
#include <vector>

#include "cusp_spectra/config.hpp"
#include "cusp_spectra/eigensolve.hpp"
#include "cusp_spectra/metrics.hpp"

namespace cusp {

// Shift-invert solve with a text cache keyed by the system/count/tol hash.
EigenDecomposition solve_cached(const AssembledSystem& sys, int count, double tol,
                                const std::string& cache_dir, bool* cache_hit);

std::vector<double> square_dirichlet_spectrum(int count, double side = 1.0);
std::vector<double> square_neumann_spectrum(int count, double side = 1.0);

struct SquareSanityArtifacts {
  std::vector<double> lambdas, analytic, rel_err;
  FitResult weyl_fit; // log lambda_n vs log n over n in [5, count]
};

struct LipschitzArtifacts {
  std::vector<double> t, sym_diff, schatten;
  std::vector<bool> tail_certified;
  FitResult fit;
  double theoretical_exponent = 0.5;
};

struct CuspRateArtifacts {
  std::vector<double> eps;  // comparison levels, descending
  std::vector<double> cap, delta, schatten, eig1_dist;
  std::vector<double> lambda1, lambda2, lambda3;
  std::vector<double> one_plus_delta_s; // technical factor, logged only
  std::vector<bool> tail_certified;
  std::vector<double> sweep_eps_ascending;   // for the delta-to-identity sweep
  std::vector<double> delta_vs_identity;     // delta_q(phi_eps0, phi_eps)
  FitResult fit;
  double b_alpha = 0.0, q = 0.0, q0 = 0.0, s = 0.0;
  double lambda1_ref = 0.0;
};

struct ProjectorEnsembleArtifacts {
  int samples = 0;
  int admissible = 0;
  int bound_violations = 0;
  int minmax_violations = 0;
};

struct PropertyPArtifacts {
  PropertyPFit fit;
  double gamma_min = 0.0;
  double q0 = 0.0;
};

SquareSanityArtifacts run_square_sanity(const RunConfig& c, const std::string& out_dir);
LipschitzArtifacts run_lipschitz_rate(const RunConfig& c, const std::string& out_dir);
CuspRateArtifacts run_cusp_rate(const RunConfig& c, const std::string& out_dir);
ProjectorEnsembleArtifacts run_projector_ensemble(const RunConfig& c,
                                                  const std::string& out_dir);
PropertyPArtifacts run_property_p(const RunConfig& c, const std::string& out_dir);

// Dispatches on c.experiment, writes report.csv / report.svg / summary.txt
// under the output directory; returns a process exit status.
int run_experiment(const RunConfig& c);

} // namespace cusp
