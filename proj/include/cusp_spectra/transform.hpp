#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "cusp_spectra/geometry.hpp"
#include "cusp_spectra/types.hpp"

namespace cusp {

// A point map with analytic Jacobian. `inverse` may be empty; when present it
// returns nullopt for points outside the image.
struct Transformation {
  std::function<Vec2(const Vec2&)> map;
  std::function<Mat2(const Vec2&)> jacobian;
  std::string domain_hint;
  std::function<std::optional<Vec2>(const Vec2&)> inverse;
};

// Base coefficients A(x) with ellipticity constant theta >= 1.
struct CoefficientField {
  std::function<Mat2(const Vec2&)> A;
  double theta = 1.0;
};

// Weight g = |det grad(phi)| and pulled-back matrix
// a = (grad phi)^-1 A(phi) (grad phi)^-t, both evaluated lazily per point.
struct PullbackFields {
  std::function<double(const Vec2&)> g;
  std::function<Mat2(const Vec2&)> a;
  std::string provenance;
};

// w = (g / g~)^(1/2) and S = w^-2 a^(-1/2) a~ a^(-1/2).
struct PairFields {
  std::function<double(const Vec2&)> w;
  std::function<Mat2(const Vec2&)> S;
};

// The cusp truncation map Omega_{eps0} -> Omega_eps: identity on
// OmegaHat_eps, vertical compression of the cap strip above it.
Vec2 phi_eps_map(const Vec2& p, EpsLevel level, const CuspGeometry& geo);

// Analytic Jacobian of phi_eps_map; throws interface_error on the branch
// interface x_N = h_eps(|xbar|) (callers nudge quadrature points off it).
Mat2 phi_eps_jacobian(const Vec2& p, EpsLevel level, const CuspGeometry& geo);

Transformation identity_transform();
Transformation dilation_transform(double factor);
Transformation translation_transform(const Vec2& shift);
Transformation phi_eps_transform(EpsLevel level, const CuspGeometry& geo);

// Vertical stretch mapping the graph of source.profile onto target.profile,
// identity below floor + rho/2 and wherever the profiles coincide.
Transformation graph_morph(const GraphDomain& source, const GraphDomain& target);

CoefficientField identity_coefficients();

PullbackFields pullback(const Transformation& t, const CoefficientField& c);

PairFields pair_fields(const PullbackFields& f, const PullbackFields& f_tilde);

// Principal square root of a symmetric positive-definite matrix.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);
Mat2 spd_sqrt(const Mat2& m);

// Symmetric power m^p through the eigendecomposition (p = -1/2 gives the
// inverse principal root).
Eigen::MatrixXd spd_pow(const Eigen::MatrixXd& m, double p);
Mat2 spd_pow(const Mat2& m, double p);

} // namespace cusp
