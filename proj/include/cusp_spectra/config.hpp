#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cusp_spectra/errors.hpp"

namespace cusp {

enum class ExperimentKind {
  square_sanity,
  lipschitz_rate,
  cusp_rate,
  projector_ensemble,
  property_p,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct RunConfig {
  ExperimentKind experiment = ExperimentKind::square_sanity;

  // [geometry]
  double alpha = 0.95;
  double eps0 = 0.2;
  std::vector<double> eps_levels; // strictly decreasing, in (0, eps0]
  double eps_ref = 0.005;

  // [discretization]
  double h = 0.05;
  double grading = 4.0;
  int quad_points = 7;

  // [solver]
  int count = 10;
  double tol = 1e-8;
  int k = 3;
  double q0 = 0.0; // 0 = use the exponent-table maximum
  std::uint64_t seed = 12345;

  // [output]
  std::string out_dir = "out";
  int workers = 1;

  bool operator==(const RunConfig&) const = default;
};

RunConfig parse_config(std::istream& is);
RunConfig parse_config_file(const std::string& path);
std::string serialize_config(const RunConfig& c);
void validate_config(const RunConfig& c);

} // namespace cusp
