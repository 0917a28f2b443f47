#pragma once

#include <stdexcept>
#include <string>

#include "cusp_spectra/types.hpp"

namespace cusp {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// h_eps: both bracket endpoints have the same residual sign.
struct bracket_error : error {
  bracket_error(const std::string& msg, double lo, double hi, double r_lo, double r_hi)
      : error(msg), lo(lo), hi(hi), residual_lo(r_lo), residual_hi(r_hi) {}
  double lo, hi, residual_lo, residual_hi;
};

struct hypothesis_error : error {
  using error::error;
};

struct unsupported_dimension_error : error {
  using error::error;
};

struct invalid_domain_error : error {
  using error::error;
};

struct out_of_domain_error : error {
  out_of_domain_error(const std::string& msg, Vec2 p) : error(msg), point(p) {}
  Vec2 point;
};

// Evaluation exactly on a branch interface of a piecewise map.
struct interface_error : error {
  interface_error(const std::string& msg, Vec2 p) : error(msg), point(p) {}
  Vec2 point;
};

struct singularity_error : error {
  singularity_error(const std::string& msg, Vec2 p) : error(msg), point(p) {}
  Vec2 point;
};

struct matrix_domain_error : error {
  using error::error;
};

struct meshing_error : error {
  using error::error;
};

struct quadrature_error : error {
  quadrature_error(const std::string& msg, Vec2 p) : error(msg), point(p) {}
  Vec2 point;
};

struct assembly_error : error {
  assembly_error(const std::string& msg, int element) : error(msg), element(element) {}
  int element;
};

struct input_error : error {
  using error::error;
};

struct solver_error : error {
  using error::error;
};

struct partial_result_error : error {
  partial_result_error(const std::string& msg, int converged) : error(msg), converged(converged) {}
  int converged;
};

struct cluster_error : error {
  using error::error;
};

struct fit_error : error {
  using error::error;
};

struct config_error : error {
  using error::error;
};

} // namespace cusp
