#include "cusp_spectra/transform.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace cusp {

namespace {

constexpr double kClosureTol = 1e-9;

void require_in_reference(const Vec2& p, const CuspGeometry& geo) {
  const double x = p.x();
  const double y = p.y();
  if (std::abs(x) > 1.0 + kClosureTol || y < geo.bottom(x) - kClosureTol ||
      y > geo.top(x, geo.eps0) + kClosureTol) {
    std::ostringstream os;
    os << "point (" << x << ", " << y << ") lies outside closure(Omega_eps0)";
    throw out_of_domain_error(os.str(), p);
  }
}

double max_sq_term(double x, double eps, double alpha) {
  return std::max(x * x, std::pow(eps, 2.0 / alpha));
}

} // namespace

Vec2 phi_eps_map(const Vec2& p, EpsLevel level, const CuspGeometry& geo) {
  require_in_reference(p, geo);
  const double x = p.x();
  const double y = p.y();
  const double ax = std::abs(x);
  // outside |xbar| < eps0^(1/alpha) the cap strip is empty and phi_eps = id
  if (ax >= std::pow(geo.eps0, 1.0 / geo.alpha)) return p;
  const double h = h_eps(ax, level, geo);
  if (y <= h) return p; // first branch: identity on OmegaHat_eps
  const double eps0 = geo.eps0;
  const double alpha = geo.alpha;
  const double d = 1.0 - eps0 - h;
  const double j = 1.0 - eps0 - y;
  const double maxx = max_sq_term(x, level.eps, alpha);
  const double yn = -1.0 + 2.0 * eps0 + 2.0 * y -
                    std::pow(d * d * j * j + maxx, alpha / 2.0);
  return Vec2(x, yn);
}

Mat2 phi_eps_jacobian(const Vec2& p, EpsLevel level, const CuspGeometry& geo) {
  require_in_reference(p, geo);
  const double x = p.x();
  const double y = p.y();
  const double ax = std::abs(x);
  if (ax >= std::pow(geo.eps0, 1.0 / geo.alpha)) return Mat2::Identity();
  const double h = h_eps(ax, level, geo);
  if (std::abs(y - h) < 1e-13) {
    std::ostringstream os;
    os << "point sits on the branch interface x_N = h_eps at x = " << x;
    throw interface_error(os.str(), p);
  }
  if (y < h) return Mat2::Identity();
  const double eps0 = geo.eps0;
  const double alpha = geo.alpha;
  const double d = 1.0 - eps0 - h;
  const double j = 1.0 - eps0 - y;
  const double maxx = max_sq_term(x, level.eps, alpha);
  const double g2 = d * d * j * j + maxx;
  const double gp = std::pow(g2, (alpha - 2.0) / 2.0);
  Mat2 jac = Mat2::Identity();
  jac(1, 1) = 2.0 + alpha * j * gp * d * d;
  // xbar-derivative through h_eps (implicit) and through max{|x|^2, eps^(2/a)}
  double dmax_dx = 0.0;
  double dh_dx = 0.0;
  if (x * x > std::pow(level.eps, 2.0 / alpha)) {
    dmax_dx = 2.0 * x;
    const double s = (x >= 0.0) ? 1.0 : -1.0;
    dh_dx = detail::h_eps_grad(h, alpha, eps0, level.eps, ax) * s;
  }
  const double dG_dx = -2.0 * d * dh_dx * j * j + dmax_dx;
  jac(1, 0) = -0.5 * alpha * gp * dG_dx;
  return jac;
}

Transformation identity_transform() {
  Transformation t;
  t.map = [](const Vec2& p) { return p; };
  t.jacobian = [](const Vec2&) { return Mat2::Identity(); };
  t.domain_hint = "identity";
  t.inverse = [](const Vec2& p) { return std::optional<Vec2>(p); };
  return t;
}

Transformation dilation_transform(double factor) {
  if (!(factor > 0.0)) throw input_error("dilation factor must be positive");
  Transformation t;
  t.map = [factor](const Vec2& p) { return Vec2(factor * p); };
  t.jacobian = [factor](const Vec2&) { return Mat2(factor * Mat2::Identity()); };
  t.domain_hint = "dilation";
  t.inverse = [factor](const Vec2& p) { return std::optional<Vec2>(p / factor); };
  return t;
}

Transformation translation_transform(const Vec2& shift) {
  Transformation t;
  t.map = [shift](const Vec2& p) { return Vec2(p + shift); };
  t.jacobian = [](const Vec2&) { return Mat2::Identity(); };
  t.domain_hint = "translation";
  t.inverse = [shift](const Vec2& p) { return std::optional<Vec2>(p - shift); };
  return t;
}

Transformation phi_eps_transform(EpsLevel level, const CuspGeometry& geo) {
  if (level.eps < 0.0 || level.eps > geo.eps0 + 1e-15)
    throw input_error("eps level must lie in [0, eps0]");
  Transformation t;
  t.map = [level, geo](const Vec2& p) { return phi_eps_map(p, level, geo); };
  t.jacobian = [level, geo](const Vec2& p) {
    return phi_eps_jacobian(p, level, geo);
  };
  t.domain_hint = "phi_eps";
  // phi_eps fixes xbar and is strictly increasing in x_N: invert the vertical
  // slice by bisecting the closed-form second branch (h_eps hoisted out).
  t.inverse = [level, geo](const Vec2& q) -> std::optional<Vec2> {
    const double x = q.x();
    if (std::abs(x) >= 1.0) return std::nullopt;
    const double yq = q.y();
    if (yq < geo.bottom(x) - kClosureTol) return std::nullopt;
    const double ax = std::abs(x);
    const double alpha = geo.alpha;
    const double eps0 = geo.eps0;
    if (ax >= std::pow(eps0, 1.0 / alpha)) {
      if (yq > geo.top(x, eps0) + kClosureTol) return std::nullopt;
      return Vec2(x, yq);
    }
    const double h = h_eps(ax, level, geo);
    if (yq <= h) return Vec2(x, yq); // identity branch
    const double image_top =
        1.0 - std::max(std::pow(ax, alpha), level.eps);
    if (yq > image_top + kClosureTol) return std::nullopt;
    const double d = 1.0 - eps0 - h;
    const double maxx = max_sq_term(x, level.eps, alpha);
    auto branch2 = [&](double y) {
      const double j = 1.0 - eps0 - y;
      return -1.0 + 2.0 * eps0 + 2.0 * y -
             std::pow(d * d * j * j + maxx, alpha / 2.0);
    };
    double lo = h, hi = geo.top(x, eps0);
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (branch2(mid) < yq)
        lo = mid;
      else
        hi = mid;
    }
    return Vec2(x, 0.5 * (lo + hi));
  };
  return t;
}

Transformation graph_morph(const GraphDomain& source, const GraphDomain& target) {
  if (std::abs(source.x_lo - target.x_lo) > 1e-12 ||
      std::abs(source.x_hi - target.x_hi) > 1e-12 ||
      std::abs(source.floor_y - target.floor_y) > 1e-12)
    throw invalid_domain_error("graph_morph domains must share base and floor");
  validate_graph_domain(source);
  validate_graph_domain(target);
  const double rho = std::min(source.rho, target.rho);
  const double z = source.floor_y + 0.5 * rho;
  const double fd_step = 1e-7 * (source.x_hi - source.x_lo);

  auto src = source.profile;
  auto tgt = target.profile;
  auto src_grad = source.profile_grad;
  auto tgt_grad = target.profile_grad;
  auto dsrc = [src, src_grad, fd_step](double x) {
    if (src_grad) return src_grad(x);
    return (src(x + fd_step) - src(x - fd_step)) / (2.0 * fd_step);
  };
  auto dtgt = [tgt, tgt_grad, fd_step](double x) {
    if (tgt_grad) return tgt_grad(x);
    return (tgt(x + fd_step) - tgt(x - fd_step)) / (2.0 * fd_step);
  };

  Transformation t;
  t.domain_hint = "graph_morph";
  t.map = [src, tgt, z](const Vec2& p) {
    if (p.y() <= z) return p;
    const double r = (tgt(p.x()) - z) / (src(p.x()) - z);
    if (r == 1.0) return p;
    return Vec2(p.x(), z + (p.y() - z) * r);
  };
  t.jacobian = [src, tgt, dsrc, dtgt, z](const Vec2& p) {
    Mat2 jac = Mat2::Identity();
    if (p.y() <= z) return jac;
    const double s = src(p.x()) - z;
    const double g = tgt(p.x()) - z;
    jac(1, 1) = g / s;
    jac(1, 0) = (p.y() - z) * (dtgt(p.x()) * s - g * dsrc(p.x())) / (s * s);
    return jac;
  };
  t.inverse = [src, tgt, z](const Vec2& q) -> std::optional<Vec2> {
    if (q.y() <= z) return q;
    const double r = (tgt(q.x()) - z) / (src(q.x()) - z);
    const double y = z + (q.y() - z) / r;
    return Vec2(q.x(), y);
  };
  return t;
}

CoefficientField identity_coefficients() {
  CoefficientField c;
  c.A = [](const Vec2&) { return Mat2::Identity(); };
  c.theta = 1.0;
  return c;
}

PullbackFields pullback(const Transformation& t, const CoefficientField& c) {
  if (!t.map || !t.jacobian) throw input_error("pullback needs map and jacobian");
  PullbackFields f;
  f.provenance = t.domain_hint;
  auto jac = t.jacobian;
  auto map = t.map;
  auto coef = c.A;
  f.g = [jac](const Vec2& p) {
    const Mat2 j = jac(p);
    const double det = j.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) {
      std::ostringstream os;
      os << "singular Jacobian (det = " << det << ") at (" << p.x() << ", "
         << p.y() << ")";
      throw singularity_error(os.str(), p);
    }
    return std::abs(det);
  };
  f.a = [jac, map, coef](const Vec2& p) {
    const Mat2 j = jac(p);
    const double det = j.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-14) {
      std::ostringstream os;
      os << "singular Jacobian (det = " << det << ") at (" << p.x() << ", "
         << p.y() << ")";
      throw singularity_error(os.str(), p);
    }
    const Mat2 jinv = j.inverse();
    Mat2 a = jinv * coef(map(p)) * jinv.transpose();
    a = 0.5 * (a + a.transpose().eval()); // exact symmetry
    return a;
  };
  return f;
}

PairFields pair_fields(const PullbackFields& f, const PullbackFields& f_tilde) {
  PairFields pf;
  auto g = f.g;
  auto gt = f_tilde.g;
  auto a = f.a;
  auto at = f_tilde.a;
  pf.w = [g, gt](const Vec2& p) { return std::sqrt(g(p) / gt(p)); };
  pf.S = [g, gt, a, at](const Vec2& p) {
    const double w2 = g(p) / gt(p);
    const Mat2 av = a(p);
    const Mat2 atv = at(p);
    // identical fields give S = I identically; keep that exact
    if (w2 == 1.0 && (av.array() == atv.array()).all())
      return Mat2(Mat2::Identity());
    Mat2 s;
    try {
      const Mat2 a_inv_sqrt = spd_pow(av, -0.5);
      s = (1.0 / w2) * (a_inv_sqrt * atv * a_inv_sqrt);
    } catch (const matrix_domain_error& e) {
      std::ostringstream os;
      os << "non-SPD intermediate in S at (" << p.x() << ", " << p.y()
         << "): " << e.what();
      throw singularity_error(os.str(), p);
    }
    s = 0.5 * (s + s.transpose().eval());
    return s;
  };
  return pf;
}

Eigen::MatrixXd spd_pow(const Eigen::MatrixXd& m, double p) {
  if (m.rows() != m.cols()) throw matrix_domain_error("spd_pow: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw matrix_domain_error("spd_pow: matrix not symmetric");
  bool diagonal = true;
  for (Eigen::Index i = 0; i < m.rows() && diagonal; ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (i != j && m(i, j) != 0.0) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (!(m(i, i) > 0.0))
        throw matrix_domain_error("spd_pow: matrix not positive definite");
      r(i, i) = std::pow(m(i, i), p);
    }
    return r;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw matrix_domain_error("spd_pow: eigendecomposition failed");
  const Eigen::VectorXd evals = es.eigenvalues();
  if (evals.minCoeff() <= 0.0)
    throw matrix_domain_error("spd_pow: matrix not positive definite");
  Eigen::VectorXd powed(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    powed[i] = std::pow(evals[i], p);
  Eigen::MatrixXd r =
      es.eigenvectors() * powed.asDiagonal() * es.eigenvectors().transpose();
  return 0.5 * (r + r.transpose().eval());
}

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) { return spd_pow(m, 0.5); }

Mat2 spd_pow(const Mat2& m, double p) {
  Eigen::MatrixXd r = spd_pow(Eigen::MatrixXd(m), p);
  return Mat2(r);
}

Mat2 spd_sqrt(const Mat2& m) { return spd_pow(m, 0.5); }

} // namespace cusp
