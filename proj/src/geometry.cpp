#include "cusp_spectra/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cusp {

std::vector<Vec2> CuspGeometry::default_outer() {
  return {Vec2(-1.0, -1.0), Vec2(1.0, -1.0)};
}

CuspGeometry::CuspGeometry(double alpha_, double eps0_, int dim_,
                           std::vector<Vec2> outer_)
    : alpha(alpha_), eps0(eps0_), dim(dim_), outer(std::move(outer_)) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw hypothesis_error("cusp exponent alpha must lie in (0, 1]");
  if (!(eps0 > 0.0 && eps0 <= 0.25))
    throw hypothesis_error("reference cut eps0 must lie in (0, 1/4]");
  if (dim < 2) throw unsupported_dimension_error("ambient dimension must be >= 2");
  if (outer.size() < 2) throw invalid_domain_error("closure polyline needs >= 2 vertices");
  for (std::size_t i = 0; i < outer.size(); ++i) {
    if (outer[i].y() >= 0.0)
      throw invalid_domain_error("closure polyline must stay below y = 0");
    if (i > 0 && !(outer[i].x() > outer[i - 1].x()))
      throw invalid_domain_error("closure polyline must be a graph over x");
  }
  if (std::abs(outer.front().x() + 1.0) > 1e-12 ||
      std::abs(outer.back().x() - 1.0) > 1e-12)
    throw invalid_domain_error("closure polyline must span x in [-1, 1]");
}

double CuspGeometry::bottom(double x) const {
  if (x <= outer.front().x()) return outer.front().y();
  if (x >= outer.back().x()) return outer.back().y();
  auto it = std::upper_bound(outer.begin(), outer.end(), x,
                             [](double v, const Vec2& p) { return v < p.x(); });
  const Vec2& b = *it;
  const Vec2& a = *(it - 1);
  const double t = (x - a.x()) / (b.x() - a.x());
  return a.y() + t * (b.y() - a.y());
}

double CuspGeometry::top(double x, double eps) const {
  return std::min(1.0 - eps, 1.0 - std::pow(std::abs(x), alpha));
}

void CuspGeometry::require_rate_hypothesis() const {
  const double lo = 1.0 - static_cast<double>(dim) / 15.0;
  if (!(alpha > lo && alpha < 1.0)) {
    std::ostringstream os;
    os << "rate experiments need alpha in (" << lo << ", 1), got " << alpha;
    throw hypothesis_error(os.str());
  }
}

void CuspGeometry::require_ratio_hypothesis() const {
  if (!(alpha > 0.5))
    throw hypothesis_error("determinant-ratio bound needs alpha > 1/2");
  if (!(eps0 <= 0.25))
    throw hypothesis_error("determinant-ratio bound needs eps0 <= 1/4");
}

double c_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw hypothesis_error("c_alpha requires alpha in (1/2, 1]");
  return 1.0 - std::pow(2.0, 1.0 - 2.0 * alpha);
}

namespace detail {

double h_residual(double h, double alpha, double eps0, double eps,
                  double xbar_norm) {
  const double maxx = std::max(xbar_norm * xbar_norm,
                               std::pow(eps, 2.0 / alpha));
  const double d = 1.0 - eps0 - h;
  return h - (1.0 - 2.0 * eps0) - std::pow(d * d * d * d + maxx, alpha / 2.0);
}

double h_eps_implicit(double alpha, double eps0, double eps, double xbar_norm,
                      double tol) {
  const double maxterm = std::max(std::pow(xbar_norm, alpha), eps);
  if (maxterm >= eps0) return 1.0 - eps0; // bracket collapses; exact root
  const double ca = c_alpha(alpha);
  // 1 - eps0 - h in [ca*(eps0 - maxterm), eps0 - maxterm]
  double lo = 1.0 - eps0 - (eps0 - maxterm);
  double hi = 1.0 - eps0 - ca * (eps0 - maxterm);
  double r_lo = h_residual(lo, alpha, eps0, eps, xbar_norm);
  double r_hi = h_residual(hi, alpha, eps0, eps, xbar_norm);
  if (std::abs(r_lo) <= tol) return lo;
  if (std::abs(r_hi) <= tol) return hi;
  if ((r_lo < 0.0) == (r_hi < 0.0)) {
    std::ostringstream os;
    os << "h_eps bracket residuals have the same sign (" << r_lo << ", " << r_hi
       << "): hypotheses violated (alpha=" << alpha << ", eps0=" << eps0 << ")";
    throw bracket_error(os.str(), lo, hi, r_lo, r_hi);
  }
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double r = h_residual(mid, alpha, eps0, eps, xbar_norm);
    if (std::abs(r) <= tol) return mid;
    if ((r < 0.0) == (r_lo < 0.0)) {
      lo = mid;
      r_lo = r;
    } else {
      hi = mid;
    }
  }
  return mid;
}

double h_eps_grad(double h, double alpha, double eps0, double eps,
                  double xbar_norm) {
  const double eps_pow = std::pow(eps, 2.0 / alpha);
  if (xbar_norm * xbar_norm <= eps_pow) return 0.0; // flat max branch
  const double d = 1.0 - eps0 - h;
  const double g_val = d * d * d * d + xbar_norm * xbar_norm;
  const double gp = std::pow(g_val, (alpha - 2.0) / 2.0);
  // implicit differentiation of h = 1 - 2 eps0 + G^(alpha/2), G = d^4 + |x|^2
  const double dmax = 2.0 * xbar_norm;
  return 0.5 * alpha * gp * dmax / (1.0 + 2.0 * alpha * gp * d * d * d);
}

} // namespace detail

double h_eps(double xbar_norm, EpsLevel level, const CuspGeometry& geo,
             double tol) {
  if (!(tol > 0.0)) throw input_error("h_eps tolerance must be positive");
  if (xbar_norm < 0.0) throw input_error("xbar_norm must be >= 0");
  if (level.eps < 0.0 || level.eps > geo.eps0 + 1e-15)
    throw input_error("eps level must lie in [0, eps0]");
  if (xbar_norm >= std::pow(geo.eps0, 1.0 / geo.alpha))
    return 1.0 - std::pow(xbar_norm, geo.alpha);
  return detail::h_eps_implicit(geo.alpha, geo.eps0, level.eps, xbar_norm, tol);
}

RegionSpec omega() { return {RegionSpec::Kind::omega, EpsLevel{0.0}}; }
RegionSpec omega_eps(double eps) {
  return {RegionSpec::Kind::omega_eps, EpsLevel{eps}};
}
RegionSpec omega_hat_eps(double eps) {
  return {RegionSpec::Kind::omega_hat_eps, EpsLevel{eps}};
}

bool membership(const Vec2& p, const RegionSpec& region, const CuspGeometry& geo) {
  const double x = p.x();
  const double y = p.y();
  if (!(std::abs(x) < 1.0)) return false;
  if (!(y > geo.bottom(x))) return false;
  switch (region.kind) {
    case RegionSpec::Kind::omega:
      return y < 1.0 - std::pow(std::abs(x), geo.alpha);
    case RegionSpec::Kind::omega_eps:
      return y < geo.top(x, region.level.eps);
    case RegionSpec::Kind::omega_hat_eps:
      return y < h_eps(std::abs(x), region.level, geo);
  }
  return false;
}

double cusp_cap_measure(EpsLevel level, const CuspGeometry& geo) {
  if (geo.dim != 2)
    throw unsupported_dimension_error("cusp_cap_measure supports dim = 2 only");
  if (level.eps < 0.0) throw input_error("eps must be >= 0");
  const double a = geo.alpha;
  return 2.0 * a * std::pow(level.eps, 1.0 + 1.0 / a) / (a + 1.0);
}

void validate_graph_domain(const GraphDomain& gd, int samples) {
  if (!(gd.x_hi > gd.x_lo)) throw invalid_domain_error("empty graph-domain base");
  if (!(gd.rho > 0.0)) throw invalid_domain_error("rho must be positive");
  if (!gd.profile) throw invalid_domain_error("graph domain has no profile");
  const double dx = (gd.x_hi - gd.x_lo) / (samples - 1);
  double prev = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = gd.x_lo + i * dx;
    const double v = gd.profile(x);
    if (!(v >= gd.floor_y + gd.rho - 1e-12)) {
      std::ostringstream os;
      os << "profile dips below floor + rho at x = " << x;
      throw invalid_domain_error(os.str());
    }
    if (i > 0) {
      const double slope = std::abs(v - prev) / dx;
      if (slope > gd.lipschitz_bound + 1e-9) {
        std::ostringstream os;
        os << "finite-difference Lipschitz estimate " << slope
           << " exceeds bound " << gd.lipschitz_bound << " near x = " << x;
        throw invalid_domain_error(os.str());
      }
    }
    prev = v;
  }
}

GraphDomain unit_square_domain() {
  GraphDomain gd;
  gd.x_lo = 0.0;
  gd.x_hi = 1.0;
  gd.floor_y = 0.0;
  gd.lipschitz_bound = 1.0;
  gd.rho = 0.5;
  gd.profile = [](double) { return 1.0; };
  gd.profile_grad = [](double) { return 0.0; };
  return gd;
}

} // namespace cusp
