#include "cusp_spectra/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cusp_spectra/fem_function.hpp"
#include "cusp_spectra/quadrature.hpp"

namespace cusp {

namespace {

double spectral_norm_sym(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void check_spectrum_input(std::span<const double> lam, const char* name) {
  for (std::size_t i = 0; i < lam.size(); ++i) {
    if (lam[i] <= -1.0)
      throw input_error("eigenvalue <= -1 makes (lambda+1)^-k undefined");
    if (i > 0 && lam[i] < lam[i - 1] - 1e-12 * std::max(1.0, std::abs(lam[i])))
      throw input_error(std::string(name) + " must be ascending");
  }
}

} // namespace

SchattenDistance schatten_distance(std::span<const double> lam,
                                   std::span<const double> lam_tilde, int k) {
  if (k < 1) throw input_error("resolvent power k must be >= 1");
  if (lam.size() != lam_tilde.size())
    throw input_error("spectra must have equal truncation lengths");
  if (lam.empty()) throw input_error("empty spectra");
  check_spectrum_input(lam, "lambda");
  check_spectrum_input(lam_tilde, "lambda~");

  SchattenDistance out;
  out.k = k;
  out.n_used = static_cast<int>(lam.size());
  double sum = 0.0;
  bool identical = true;
  for (std::size_t i = 0; i < lam.size(); ++i) {
    const double d =
        std::pow(lam_tilde[i] + 1.0, -k) - std::pow(lam[i] + 1.0, -k);
    sum += d * d;
    identical = identical && (lam[i] == lam_tilde[i]);
  }
  out.value = std::sqrt(sum);

  if (identical) {
    out.tail_bound = 0.0;
    out.tail_certified = true;
    return out;
  }

  // Weyl fit lambda_n ~ c n^p on the upper half of the elementwise minimum.
  std::vector<double> ns, ls;
  for (std::size_t i = lam.size() / 2; i < lam.size(); ++i) {
    const double v = std::min(lam[i], lam_tilde[i]);
    if (v > 0.0) {
      ns.push_back(static_cast<double>(i + 1));
      ls.push_back(v);
    }
  }
  if (ns.size() < 3) {
    out.tail_bound = std::numeric_limits<double>::infinity();
    out.tail_certified = false;
    return out;
  }
  const FitResult fit = fit_rate(ns, ls);
  const double c = std::exp(fit.intercept);
  const double p = fit.slope;
  if (!(2.0 * k * p > 1.0) || !(c > 0.0)) {
    out.tail_bound = std::numeric_limits<double>::infinity();
    out.tail_certified = false;
    return out;
  }
  double tail = 0.0;
  std::size_t i = lam.size() + 1;
  for (; i < lam.size() + 2000000; ++i) {
    const double term = std::pow(c * std::pow(double(i), p) + 1.0, -2.0 * k);
    tail += term;
    if (term < 1e-16 * std::max(tail, 1e-300) && i > lam.size() + 32) break;
  }
  // integral remainder, (c t^p + 1)^-2k <= (c t^p)^-2k
  tail += std::pow(double(i), 1.0 - 2.0 * k * p) /
          (std::pow(c, 2.0 * k) * (2.0 * k * p - 1.0));
  out.tail_bound = 2.0 * tail;
  out.tail_certified = out.tail_bound <= 0.01 * out.value;
  return out;
}

ProjectorCheck projector_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                               double nu) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows())
    throw input_error("projector_check needs square matrices of equal size");
  const double scale = std::max({1.0, A.cwiseAbs().maxCoeff(), B.cwiseAbs().maxCoeff()});
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale ||
      (B - B.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw input_error("projector_check needs symmetric matrices");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(A), eb(B);
  const Eigen::VectorXd la = ea.eigenvalues();
  const Eigen::VectorXd lb = eb.eigenvalues();
  const int n = static_cast<int>(la.size());

  ProjectorCheck out;
  const double ctol = 1e-9 * std::max(1.0, la.cwiseAbs().maxCoeff());
  for (int i = 0; i < n; ++i)
    if (std::abs(la[i] - nu) <= ctol) out.cluster.push_back(i);
  if (out.cluster.empty())
    throw input_error("nu is not an eigenvalue of A");
  if (static_cast<int>(out.cluster.size()) == n)
    throw input_error("cluster covers the whole spectrum; gap d is undefined");

  out.gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    if (std::abs(la[i] - nu) <= ctol) continue;
    out.gap = std::min(out.gap, std::abs(la[i] - nu));
  }

  out.a_minus_b_norm = spectral_norm_sym(A - B);
  out.admissible = out.a_minus_b_norm < 0.5 * out.gap;

  const int m = static_cast<int>(out.cluster.size());
  Eigen::MatrixXd ua(n, m), vb(n, m);
  for (int j = 0; j < m; ++j) {
    ua.col(j) = ea.eigenvectors().col(out.cluster[j]);
    vb.col(j) = eb.eigenvectors().col(out.cluster[j]);
  }
  out.P = ua * ua.transpose();
  out.Q = vb * vb.transpose();
  out.op_distance = spectral_norm_sym(out.P - out.Q);
  const double factor = 2.0 * (1.0 + m) / out.gap;
  out.bound = factor * out.a_minus_b_norm;
  out.bound_holds = out.op_distance < out.bound + 1e-12 * (1.0 + factor);

  out.minmax_holds = true;
  const double slack = 1e-10 * std::max(1.0, scale);
  for (int i = 0; i < n; ++i)
    if (std::abs(la[i] - lb[i]) > out.a_minus_b_norm + slack)
      out.minmax_holds = false;
  return out;
}

FitResult fit_rate(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 3)
    throw fit_error("fit_rate needs >= 3 paired samples");
  const int n = static_cast<int>(xs.size());
  double sx = 0.0, sy = 0.0;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw fit_error("fit_rate needs strictly positive data");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
    sx += lx[i];
    sy += ly[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx < 1e-300) throw fit_error("fit_rate needs distinct x values");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0, ss_tot = 0.0;
  for (int i = 0; i < n; ++i) {
    const double pred = fit.intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  fit.r2 = ss_tot < 1e-300 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

double ExponentTable::tau(int m, std::span<const int> beta, double big_m,
                          double p, double q) const {
  if (static_cast<int>(beta.size()) != ambient_dim)
    throw input_error("beta must be a multi-index of length N");
  int abs_beta = 0;
  double beta_alpha = 0.0;
  for (int i = 0; i < ambient_dim; ++i) {
    if (beta[i] < 0) throw input_error("multi-index entries must be >= 0");
    abs_beta += beta[i];
    beta_alpha += (i + 1 == ambient_dim) ? alpha * beta[i] : double(beta[i]);
  }
  if (abs_beta >= m) throw input_error("tau needs |beta| < m");
  const double inv_q = std::isinf(q) ? 0.0 : 1.0 / q;
  return (beta_alpha + alpha * big_m * (1.0 / p - inv_q)) /
         (beta_alpha + alpha * (m - abs_beta));
}

double ExponentTable::rho_exponent(int m, std::span<const int> beta,
                                   double p0) const {
  int abs_beta = 0;
  for (int b : beta) abs_beta += b;
  if (abs_beta >= m) throw input_error("rho needs |beta| < m");
  if (!(p0 > 1.0)) throw input_error("rho needs p0 > 1");
  const double p_min = std::max(n_alpha / (m - abs_beta), p0);
  return tau(m, beta, n_alpha, p_min, std::numeric_limits<double>::infinity()) +
         (n_alpha / m) * (1.0 / p0 - 1.0 / p_min);
}

ExponentTable rate_exponent(int N, double alpha) {
  if (N < 2) throw unsupported_dimension_error("rate_exponent needs N >= 2");
  const double lo = 1.0 - static_cast<double>(N) / 15.0;
  if (!(alpha > lo && alpha <= 1.0)) {
    std::ostringstream os;
    os << "rate_exponent needs alpha in (1 - N/15, 1] = (" << lo
       << ", 1], got " << alpha;
    throw hypothesis_error(os.str());
  }
  ExponentTable t;
  t.ambient_dim = N;
  t.alpha = alpha;
  t.n_alpha = N + (N - 1) * (1.0 / alpha - 1.0);
  t.b_alpha = 0.5 - 5.0 * (1.0 - alpha) / (N - 1.0 + alpha);
  t.gamma_min = t.n_alpha / 4.0;
  t.q0_max = (alpha < 1.0) ? (N - 1.0 + alpha) / (1.0 - alpha)
                           : std::numeric_limits<double>::infinity();
  std::vector<int> grad_beta(N, 0);
  grad_beta[N - 1] = 1;
  t.rho = t.rho_exponent(2, grad_beta, 2.0);
  return t;
}

namespace {

void m_orthonormalize_cols(Eigen::MatrixXd& v, const Eigen::SparseMatrix<double>& m) {
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::MatrixXd g = v.transpose() * (m * v);
    g = 0.5 * (g + g.transpose().eval());
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
      throw cluster_error("cluster span is rank deficient");
    v = llt.matrixU().solve<Eigen::OnTheRight>(v);
  }
}

void check_cluster_consistency(const EigenDecomposition& dec,
                               std::span<const int> cluster) {
  const int n = static_cast<int>(dec.lambdas.size());
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    if (cluster[i] < 0 || cluster[i] >= n)
      throw cluster_error("cluster index out of range");
    if (i > 0 && cluster[i] != cluster[i - 1] + 1)
      throw cluster_error("cluster indices must be contiguous ascending");
  }
  // cluster boundaries must not split a rel-1e-6 eigenvalue cluster
  const auto groups = eigenvalue_clusters(dec.lambdas);
  const int lo = cluster.front(), hi = cluster.back();
  for (const auto& g : groups) {
    const bool overlaps = g.front() <= hi && g.back() >= lo;
    const bool contained = g.front() >= lo && g.back() <= hi;
    if (overlaps && !contained)
      throw cluster_error("cluster boundary splits a degenerate eigenvalue group");
  }
}

} // namespace

double eigenfunction_distance(const PushedDecomposition& a,
                              const PushedDecomposition& b,
                              std::span<const int> cluster,
                              const TriangleMesh& union_mesh, int quad_points) {
  if (!a.dec || !a.sys || !a.mesh || !a.t || !b.dec || !b.sys || !b.mesh || !b.t)
    throw input_error("eigenfunction_distance needs complete decompositions");
  if (cluster.empty()) throw cluster_error("empty cluster");
  check_cluster_consistency(*a.dec, cluster);
  check_cluster_consistency(*b.dec, cluster);

  if (cluster.size() > 1) {
    if (a.sys->dofs() != b.sys->dofs())
      throw cluster_error(
          "cluster projector distance needs decompositions on one discrete space");
    const int m = static_cast<int>(cluster.size());
    Eigen::MatrixXd va(a.sys->dofs(), m), vb(b.sys->dofs(), m);
    for (int j = 0; j < m; ++j) {
      va.col(j) = a.dec->vectors.col(cluster[j]);
      vb.col(j) = b.dec->vectors.col(cluster[j]);
    }
    const Eigen::SparseMatrix<double>& mass = a.sys->mass;
    m_orthonormalize_cols(va, mass);
    m_orthonormalize_cols(vb, mass);
    const Eigen::MatrixXd c = va.transpose() * (mass * vb);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c);
    const double smin = svd.singularValues().minCoeff();
    return std::sqrt(std::max(0.0, 1.0 - smin * smin));
  }

  // simple eigenvalue: physical L2 distance over the union, zero extension
  const int idx = cluster.front();
  if (!a.t->inverse || !b.t->inverse)
    throw input_error("eigenfunction_distance needs invertible transformations");
  const MeshLocator loc_a(*a.mesh);
  const MeshLocator loc_b(*b.mesh);
  const Eigen::VectorXd fa = a.dec->vectors.col(idx);
  const Eigen::VectorXd fb = b.dec->vectors.col(idx);
  const TriangleRule& rule = TriangleRule::get(quad_points);

  auto eval_pushed = [](const PushedDecomposition& side, const MeshLocator& loc,
                        const Eigen::VectorXd& coeffs, const Vec2& y) {
    const std::optional<Vec2> x = side.t->inverse(y);
    if (!x) return 0.0;
    std::array<double, 3> bary;
    const int tri = loc.locate(*x, bary, 1e-9);
    if (tri < 0) return 0.0;
    return p1_value(*side.mesh, *side.sys, coeffs, tri, bary);
  };

  double naa = 0.0, nbb = 0.0, nab = 0.0;
  for (int t = 0; t < union_mesh.triangle_count(); ++t) {
    const auto& tr = union_mesh.triangles[t];
    const Vec2& p0 = union_mesh.nodes[tr[0]];
    const Vec2& p1 = union_mesh.nodes[tr[1]];
    const Vec2& p2 = union_mesh.nodes[tr[2]];
    const double area = union_mesh.triangle_area(t);
    for (std::size_t qp = 0; qp < rule.bary.size(); ++qp) {
      const auto& bc = rule.bary[qp];
      const Vec2 y = bc[0] * p0 + bc[1] * p1 + bc[2] * p2;
      const double u = eval_pushed(a, loc_a, fa, y);
      const double v = eval_pushed(b, loc_b, fb, y);
      const double wq = rule.weights[qp] * area;
      naa += wq * u * u;
      nbb += wq * v * v;
      nab += wq * u * v;
    }
  }
  const double sign = nab >= 0.0 ? 1.0 : -1.0;
  return std::sqrt(std::max(0.0, naa + nbb - 2.0 * sign * nab));
}

PropertyPFit property_p_fit(const EigenDecomposition& dec,
                            const AssembledSystem& sys, const TriangleMesh& m,
                            const PullbackFields& f, double q0) {
  if (!(q0 > 2.0) && !std::isinf(q0))
    throw input_error("property (P) needs q0 in (2, infinity]");
  const int count = static_cast<int>(dec.lambdas.size());
  const double lam_scale = std::max(1.0, std::abs(dec.lambdas.back()));
  const TriangleRule& rule = TriangleRule::get(7);

  PropertyPFit out;
  for (int n = 0; n < count; ++n) {
    if (dec.lambdas[n] <= 1e-10 * lam_scale) continue; // lambda = 0 exclusion
    double pow_sum = 0.0, sup = 0.0;
    double gpow_sum = 0.0, gsup = 0.0;
    const Eigen::VectorXd coeffs = dec.vectors.col(n);
    for (int t = 0; t < m.triangle_count(); ++t) {
      const auto& tr = m.triangles[t];
      const Vec2& p0 = m.nodes[tr[0]];
      const Vec2& p1 = m.nodes[tr[1]];
      const Vec2& p2 = m.nodes[tr[2]];
      const double area = m.triangle_area(t);
      const Vec2 centroid = (p0 + p1 + p2) / 3.0;
      const Vec2 grad = p1_gradient(m, sys, coeffs, t);
      const double gn = grad.norm();
      for (std::size_t qp = 0; qp < rule.bary.size(); ++qp) {
        const auto& b = rule.bary[qp];
        const Vec2 x = b[0] * p0 + b[1] * p1 + b[2] * p2;
        const double gval = eval_nudged(f.g, x, centroid);
        const double val = p1_value(m, sys, coeffs, t, b);
        const double wq = rule.weights[qp] * area * gval;
        if (std::isinf(q0)) {
          sup = std::max(sup, std::abs(val));
          gsup = std::max(gsup, gn);
        } else {
          pow_sum += wq * std::pow(std::abs(val), q0);
          gpow_sum += wq * std::pow(gn, q0);
        }
      }
    }
    out.lambdas.push_back(dec.lambdas[n]);
    out.norms.push_back(std::isinf(q0) ? sup : std::pow(pow_sum, 1.0 / q0));
    out.grad_norms.push_back(std::isinf(q0) ? gsup
                                            : std::pow(gpow_sum, 1.0 / q0));
  }
  out.n_used = static_cast<int>(out.lambdas.size());
  if (out.n_used < 10)
    throw input_error("property (P) fit needs >= 10 nonzero eigenpairs");
  out.fit1 = fit_rate(out.lambdas, out.norms);
  out.fit2 = fit_rate(out.lambdas, out.grad_norms);
  out.gamma1_hat = out.fit1.slope;
  out.gamma2_hat = out.fit2.slope - 0.5;
  return out;
}

} // namespace cusp
