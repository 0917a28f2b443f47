#include "cusp_spectra/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/QR>

#include "cusp_spectra/fem_function.hpp"
#include "cusp_spectra/report.hpp"
#include "cusp_spectra/vicinity.hpp"

namespace fs = std::filesystem;

namespace cusp {

namespace {

void hash_mix_u64(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// Deterministic worker pool over independent level indices.
template <class Fn>
void parallel_for(int n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  const int nw = std::min(workers, n);
  for (int w = 0; w < nw; ++w) {
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::ofstream os(fs::path(dir) / name, std::ios::binary);
  if (!os) throw error("cannot open output file " + name + " under " + dir);
  return os;
}

} // namespace

EigenDecomposition solve_cached(const AssembledSystem& sys, int count, double tol,
                                const std::string& cache_dir, bool* cache_hit) {
  std::uint64_t h = system_hash(sys);
  hash_mix_u64(h, static_cast<std::uint64_t>(count));
  std::uint64_t tol_bits;
  std::memcpy(&tol_bits, &tol, sizeof tol_bits);
  hash_mix_u64(h, tol_bits);

  if (cache_hit) *cache_hit = false;
  fs::path file;
  if (!cache_dir.empty()) {
    fs::create_directories(cache_dir);
    file = fs::path(cache_dir) / ("eigs_" + hex64(h) + ".txt");
    std::ifstream is(file);
    if (is) {
      auto cached = read_eigen_cache(is, h);
      if (cached && static_cast<int>(cached->lambdas.size()) == count) {
        if (cache_hit) *cache_hit = true;
        std::cout << "cache hit: " << file.string() << "\n";
        return *cached;
      }
    }
  }
  EigenDecomposition dec = solve_lowest(sys, count, tol);
  if (!cache_dir.empty()) {
    std::ofstream os(file, std::ios::binary);
    write_eigen_cache(os, dec, h);
  }
  return dec;
}

std::vector<double> square_dirichlet_spectrum(int count, double side) {
  std::vector<double> out;
  const int range = static_cast<int>(std::ceil(std::sqrt(4.0 * count))) + 2;
  for (int m = 1; m <= range; ++m)
    for (int n = 1; n <= range; ++n)
      out.push_back(M_PI * M_PI * (m * m + n * n) / (side * side));
  std::sort(out.begin(), out.end());
  out.resize(count);
  return out;
}

std::vector<double> square_neumann_spectrum(int count, double side) {
  std::vector<double> out;
  const int range = static_cast<int>(std::ceil(std::sqrt(4.0 * count))) + 2;
  for (int m = 0; m <= range; ++m)
    for (int n = 0; n <= range; ++n)
      out.push_back(M_PI * M_PI * (m * m + n * n) / (side * side));
  std::sort(out.begin(), out.end());
  out.resize(count);
  return out;
}

SquareSanityArtifacts run_square_sanity(const RunConfig& c,
                                        const std::string& out_dir) {
  const TriangleMesh mesh = mesh_unit_square(c.h);
  const PullbackFields fields = pullback(identity_transform(), identity_coefficients());
  const AssembledSystem sys =
      assemble(mesh, fields, BoundaryCondition::dirichlet, c.quad_points);
  bool hit = false;
  const EigenDecomposition dec =
      solve_cached(sys, c.count, c.tol, (fs::path(out_dir) / "cache").string(), &hit);
  const std::vector<double> exact = square_dirichlet_spectrum(c.count);

  SquareSanityArtifacts art;
  art.lambdas = dec.lambdas;
  art.analytic = exact;
  for (int i = 0; i < c.count; ++i)
    art.rel_err.push_back(std::abs(dec.lambdas[i] - exact[i]) / exact[i]);

  auto csv = open_out(out_dir, "report.csv");
  csv << "n,lambda,analytic,rel_err\n";
  for (int i = 0; i < c.count; ++i) {
    csv << (i + 1) << ',' << fmt17(dec.lambdas[i]) << ',' << fmt17(exact[i])
        << ',' << fmt17(art.rel_err[i]) << "\n";
  }

  if (c.count >= 8) {
    std::vector<double> ns, ls;
    for (int i = 4; i < c.count; ++i) {
      ns.push_back(i + 1);
      ls.push_back(dec.lambdas[i]);
    }
    art.weyl_fit = fit_rate(ns, ls);
  }

  LogLogPlot plot;
  plot.title = "square_sanity: lambda_n vs n";
  plot.xlabel = "n";
  plot.ylabel = "lambda_n";
  for (int i = 0; i < c.count; ++i) {
    plot.xs.push_back(i + 1);
    plot.ys.push_back(dec.lambdas[i]);
  }
  plot.has_fit = c.count >= 8;
  plot.fit = art.weyl_fit;
  auto svg = open_out(out_dir, "report.svg");
  write_loglog_svg(svg, plot);

  auto sum = open_out(out_dir, "summary.txt");
  sum << "experiment: square_sanity\n";
  sum << "h = " << fmt17(c.h) << ", dof = " << sys.dofs() << "\n";
  sum << "lambda_1 = " << fmt17(dec.lambdas[0]) << " (analytic "
      << fmt17(exact[0]) << ", rel err " << fmt17(art.rel_err[0]) << ")\n";
  if (c.count >= 3)
    sum << "lambda_2, lambda_3 rel err = " << fmt17(art.rel_err[1]) << ", "
        << fmt17(art.rel_err[2]) << "\n";
  if (c.count >= 8)
    sum << "weyl fit slope over n in [5," << c.count
        << "] = " << fmt17(art.weyl_fit.slope) << " (expected 2/N = 1)\n";
  sum << (hit ? "eigenpair cache: hit\n" : "eigenpair cache: miss\n");
  return art;
}

namespace {

GraphDomain lipschitz_base_domain() {
  GraphDomain gd = unit_square_domain();
  gd.lipschitz_bound = 4.0;
  return gd;
}

GraphDomain lipschitz_target_domain(double t) {
  GraphDomain gd = lipschitz_base_domain();
  const double center = 0.5, radius = 0.35;
  gd.profile = [t, center, radius](double x) {
    const double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 1.0;
    const double s = 1.0 - u * u;
    return 1.0 + t * s * s;
  };
  gd.profile_grad = [t, center, radius](double x) {
    const double u = (x - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    const double s = 1.0 - u * u;
    return t * 2.0 * s * (-2.0 * u) / radius;
  };
  return gd;
}

double lipschitz_symmetric_difference(double t) {
  // composite Simpson over the bump support
  const double a = 0.15, b = 0.85;
  const int n = 4096;
  const double dx = (b - a) / n;
  const GraphDomain tgt = lipschitz_target_domain(t);
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * dx;
    const double f = std::abs(tgt.profile(x) - 1.0);
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * f;
  }
  return acc * dx / 3.0;
}

} // namespace

LipschitzArtifacts run_lipschitz_rate(const RunConfig& c,
                                      const std::string& out_dir) {
  const GraphDomain base = lipschitz_base_domain();
  const double patch_lo = 0.15, patch_hi = 0.85;
  const double blend = base.floor_y + 0.5 * base.rho;
  const std::vector<double> fixed_x = {patch_lo, patch_hi};
  const std::vector<double> fixed_y = {blend};
  const TriangleMesh mesh = mesh_graph_domain(base, c.h, fixed_x, fixed_y);
  const std::string cache = (fs::path(out_dir) / "cache").string();

  const PullbackFields base_fields =
      pullback(identity_transform(), identity_coefficients());
  const AssembledSystem base_sys =
      assemble(mesh, base_fields, BoundaryCondition::dirichlet, c.quad_points);
  const EigenDecomposition base_dec = solve_cached(base_sys, c.count, c.tol, cache, nullptr);

  const int n = static_cast<int>(c.eps_levels.size());
  std::vector<EigenDecomposition> decs(n);
  parallel_for(n, c.workers, [&](int i) {
    const double t = c.eps_levels[i];
    const Transformation morph = graph_morph(base, lipschitz_target_domain(t));
    const PullbackFields fields = pullback(morph, identity_coefficients());
    const AssembledSystem sys =
        assemble(mesh, fields, BoundaryCondition::dirichlet, c.quad_points);
    decs[i] = solve_cached(sys, c.count, c.tol, cache, nullptr);
  });

  LipschitzArtifacts art;
  auto csv = open_out(out_dir, "report.csv");
  csv << "t,sym_diff,schatten_k,schatten_value,tail_certified,lambda1\n";
  for (int i = 0; i < n; ++i) {
    const double t = c.eps_levels[i];
    const SchattenDistance sd =
        schatten_distance(base_dec.lambdas, decs[i].lambdas, c.k);
    art.t.push_back(t);
    art.sym_diff.push_back(lipschitz_symmetric_difference(t));
    art.schatten.push_back(sd.value);
    art.tail_certified.push_back(sd.tail_certified);
    csv << fmt17(t) << ',' << fmt17(art.sym_diff.back()) << ',' << c.k << ','
        << fmt17(sd.value) << ',' << (sd.tail_certified ? 1 : 0) << ','
        << fmt17(decs[i].lambdas[0]) << "\n";
  }
  art.fit = fit_rate(art.sym_diff, art.schatten);
  art.theoretical_exponent = 0.5; // C^{1,1} profile and coefficients: q0 = inf
  csv << "fit," << fmt17(art.fit.slope) << ',' << fmt17(art.fit.r2) << ','
      << fmt17(art.fit.intercept) << ",,\n";

  LogLogPlot plot;
  plot.title = "lipschitz_rate: schatten vs |sym diff|";
  plot.xlabel = "|Omega1 sym diff Omega2|";
  plot.ylabel = "schatten distance";
  plot.xs = art.sym_diff;
  plot.ys = art.schatten;
  plot.has_fit = true;
  plot.fit = art.fit;
  auto svg = open_out(out_dir, "report.svg");
  write_loglog_svg(svg, plot);

  auto sum = open_out(out_dir, "summary.txt");
  sum << "experiment: lipschitz_rate\n";
  sum << "dof = " << base_sys.dofs() << ", k = " << c.k << ", count = " << c.count
      << "\n";
  sum << "fitted slope = " << fmt17(art.fit.slope) << " (theoretical lower rate "
      << fmt17(art.theoretical_exponent) << ", r2 = " << fmt17(art.fit.r2)
      << ")\n";
  return art;
}

CuspRateArtifacts run_cusp_rate(const RunConfig& c, const std::string& out_dir) {
  const CuspGeometry geo(c.alpha, c.eps0);
  geo.require_rate_hypothesis();
  geo.require_ratio_hypothesis();
  const std::string cache = (fs::path(out_dir) / "cache").string();

  std::vector<double> all_levels = c.eps_levels; // descending
  all_levels.push_back(c.eps_ref);
  const TriangleMesh mesh = mesh_reference(geo, c.h, c.grading, all_levels);

  const ExponentTable table = rate_exponent(2, c.alpha);
  const double q0 = c.q0 > 2.0 ? c.q0 : table.q0_max;
  const double q = 2.0 * q0 / (q0 - 2.0);
  // technical factor 1 + delta_s with s above q0(alpha + 2 gamma)/(q0 - 2),
  // alpha = N/2 for the Weyl growth; logged only
  const double s_exponent =
      1.05 * q0 * (1.0 + 2.0 * table.gamma_min) / (q0 - 2.0);

  const int nl = static_cast<int>(all_levels.size());
  std::vector<Transformation> trans(nl);
  std::vector<PullbackFields> fields(nl);
  std::vector<AssembledSystem> systems(nl);
  std::vector<EigenDecomposition> decs(nl);
  for (int i = 0; i < nl; ++i)
    trans[i] = phi_eps_transform(EpsLevel{all_levels[i]}, geo);
  parallel_for(nl, c.workers, [&](int i) {
    fields[i] = pullback(trans[i], identity_coefficients());
    systems[i] =
        assemble(mesh, fields[i], BoundaryCondition::dirichlet, c.quad_points);
    decs[i] = solve_cached(systems[i], c.count, c.tol, cache, nullptr);
  });

  const int ref = nl - 1;
  const TriangleMesh union_mesh = push_forward(mesh, trans[ref]);

  CuspRateArtifacts art;
  art.b_alpha = table.b_alpha;
  art.q = q;
  art.q0 = q0;
  art.lambda1_ref = decs[ref].lambdas[0];

  const int nc = nl - 1; // comparisons against the reference
  art.eps.resize(nc);
  art.cap.resize(nc);
  art.delta.resize(nc);
  art.schatten.resize(nc);
  art.tail_certified.resize(nc);
  art.eig1_dist.resize(nc);
  art.lambda1.resize(nc);
  art.lambda2.resize(nc);
  art.lambda3.resize(nc);
  art.one_plus_delta_s.resize(nc);
  art.s = s_exponent;
  parallel_for(nc, c.workers, [&](int i) {
    const double eps = all_levels[i];
    const PairFields pf = pair_fields(fields[i], fields[ref]);
    const VicinityReport vr = delta_q(pf, fields[i], mesh, q, c.quad_points);
    art.one_plus_delta_s[i] =
        1.0 + delta_q(pf, fields[i], mesh, s_exponent, 3).delta;
    const SchattenDistance sd =
        schatten_distance(decs[i].lambdas, decs[ref].lambdas, c.k);
    const PushedDecomposition a{&decs[i], &systems[i], &mesh, &trans[i]};
    const PushedDecomposition b{&decs[ref], &systems[ref], &mesh, &trans[ref]};
    const std::vector<int> ground = {0};
    const double eig1 =
        eigenfunction_distance(a, b, ground, union_mesh, c.quad_points);
    art.eps[i] = eps;
    art.cap[i] = cusp_cap_measure(EpsLevel{eps}, geo);
    art.delta[i] = vr.delta;
    art.schatten[i] = sd.value;
    art.tail_certified[i] = sd.tail_certified;
    art.eig1_dist[i] = eig1;
    art.lambda1[i] = decs[i].lambdas[0];
    art.lambda2[i] = decs[i].lambdas.size() > 1 ? decs[i].lambdas[1] : 0.0;
    art.lambda3[i] = decs[i].lambdas.size() > 2 ? decs[i].lambdas[2] : 0.0;
  });

  auto csv = open_out(out_dir, "report.csv");
  csv << "eps,cap_measure,delta_q,lambda1,lambda2,lambda3,schatten_k,"
         "schatten_value,eig1_l2_dist\n";
  for (int i = 0; i < nc; ++i) {
    csv << fmt17(art.eps[i]) << ',' << fmt17(art.cap[i]) << ','
        << fmt17(art.delta[i]) << ',' << fmt17(art.lambda1[i]) << ','
        << fmt17(art.lambda2[i]) << ',' << fmt17(art.lambda3[i]) << ',' << c.k
        << ',' << fmt17(art.schatten[i]) << ',' << fmt17(art.eig1_dist[i])
        << "\n";
    csv.flush();
  }
  art.fit = fit_rate(art.cap, art.schatten);
  csv << "fit," << fmt17(art.fit.slope) << ',' << fmt17(art.fit.r2) << ','
      << fmt17(art.fit.intercept) << ',' << fmt17(art.b_alpha) << ",,,,\n";

  // delta_q(phi_eps0, phi_eps) sweep toward the identity, ascending eps
  const PullbackFields id_fields =
      pullback(identity_transform(), identity_coefficients());
  std::vector<double> sweep(c.eps_levels.rbegin(), c.eps_levels.rend());
  sweep.push_back(c.eps0);
  const int ns = static_cast<int>(sweep.size());
  art.sweep_eps_ascending = sweep;
  art.delta_vs_identity.resize(ns);
  parallel_for(ns, c.workers, [&](int i) {
    const Transformation t = phi_eps_transform(EpsLevel{sweep[i]}, geo);
    const PullbackFields f = pullback(t, identity_coefficients());
    const PairFields pf = pair_fields(id_fields, f);
    art.delta_vs_identity[i] = delta_q(pf, id_fields, mesh, q, c.quad_points).delta;
  });

  LogLogPlot plot;
  plot.title = "cusp_rate: schatten vs cap measure";
  plot.xlabel = "|Omega \\ Omega_eps|";
  plot.ylabel = "schatten distance";
  plot.xs = art.cap;
  plot.ys = art.schatten;
  plot.has_fit = true;
  plot.fit = art.fit;
  auto svg = open_out(out_dir, "report.svg");
  write_loglog_svg(svg, plot);

  auto sum = open_out(out_dir, "summary.txt");
  sum << "experiment: cusp_rate\n";
  sum << "alpha = " << fmt17(c.alpha) << ", eps0 = " << fmt17(c.eps0)
      << ", eps_ref = " << fmt17(c.eps_ref) << ", dof = " << systems[0].dofs()
      << "\n";
  sum << "q0 = " << fmt17(q0) << ", q = 2 q0 / (q0 - 2) = " << fmt17(q) << "\n";
  sum << "fitted slope = " << fmt17(art.fit.slope) << ", r2 = "
      << fmt17(art.fit.r2) << "\n";
  sum << "predicted rate b(alpha) = " << fmt17(art.b_alpha)
      << " (acceptance needs slope >= b - 0.05)\n";
  sum << "delta_q(phi_eps0, phi_eps) sweep (eps ascending):";
  for (double d : art.delta_vs_identity) sum << ' ' << fmt17(d);
  sum << "\n";
  sum << "technical factor 1 + delta_s at s = " << fmt17(art.s)
      << " (eps descending):";
  for (double d : art.one_plus_delta_s) sum << ' ' << fmt17(d);
  sum << "\n";
  sum << "lambda1 per level (eps descending):";
  for (double l : art.lambda1) sum << ' ' << fmt17(l);
  sum << ' ' << fmt17(art.lambda1_ref) << "\n";
  return art;
}

ProjectorEnsembleArtifacts run_projector_ensemble(const RunConfig& c,
                                                  const std::string& out_dir) {
  std::mt19937_64 rng(c.seed);
  std::uniform_int_distribution<int> dim_dist(2, 12);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  ProjectorEnsembleArtifacts art;
  art.samples = c.count;
  LogLogPlot plot;
  plot.title = "projector_ensemble: |P-Q| vs bound";
  plot.xlabel = "2(1+|cluster|)/d |A-B|";
  plot.ylabel = "|P-Q|";
  const int plot_stride = std::max(1, c.count / 400);
  auto csv = open_out(out_dir, "report.csv");
  csv << "idx,dim,cluster_size,gap,a_minus_b,p_minus_q,bound,bound_holds,"
         "minmax_holds\n";

  for (int s = 0; s < c.count; ++s) {
    const int n = dim_dist(rng);
    std::uniform_int_distribution<int> distinct_dist(2, n);
    const int n_distinct = distinct_dist(rng);
    std::vector<double> values(n_distinct);
    values[0] = 1.5 + uni(rng) * 1.5; // keeps B positive definite
    for (int i = 1; i < n_distinct; ++i)
      values[i] = values[i - 1] + 0.1 + 1.4 * uni(rng);
    std::vector<int> mult(n_distinct, 1);
    for (int extra = 0; extra < n - n_distinct; ++extra) {
      std::uniform_int_distribution<int> pick(0, n_distinct - 1);
      mult[pick(rng)] += 1;
    }
    Eigen::VectorXd evals(n);
    {
      int p = 0;
      for (int i = 0; i < n_distinct; ++i)
        for (int j = 0; j < mult[i]; ++j) evals[p++] = values[i];
    }
    Eigen::MatrixXd gauss(n, n);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gauss(i, j) = normal(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd u = qr.householderQ();
    Eigen::MatrixXd a = u * evals.asDiagonal() * u.transpose();
    a = 0.5 * (a + a.transpose().eval());

    std::uniform_int_distribution<int> cpick(0, n_distinct - 1);
    const int ci = cpick(rng);
    const double nu = values[ci];
    double d = std::numeric_limits<double>::infinity();
    if (ci > 0) d = std::min(d, nu - values[ci - 1]);
    if (ci + 1 < n_distinct) d = std::min(d, values[ci + 1] - nu);

    Eigen::MatrixXd e(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j <= i; ++j) {
        e(i, j) = normal(rng);
        e(j, i) = e(i, j);
      }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ee(e);
    const double e_norm = ee.eigenvalues().cwiseAbs().maxCoeff();
    const double target = (0.05 + 0.9 * uni(rng)) * 0.5 * d;
    e *= target / e_norm;
    const Eigen::MatrixXd b = a + e;

    const ProjectorCheck chk = projector_check(a, b, nu);
    if (chk.admissible) {
      ++art.admissible;
      if (!chk.bound_holds) ++art.bound_violations;
    }
    if (!chk.minmax_holds) ++art.minmax_violations;
    csv << s << ',' << n << ',' << chk.cluster.size() << ',' << fmt17(chk.gap)
        << ',' << fmt17(chk.a_minus_b_norm) << ',' << fmt17(chk.op_distance)
        << ',' << fmt17(chk.bound) << ',' << (chk.bound_holds ? 1 : 0) << ','
        << (chk.minmax_holds ? 1 : 0) << "\n";
    if (s % plot_stride == 0 && chk.bound > 0 && chk.op_distance > 0) {
      plot.xs.push_back(chk.bound);
      plot.ys.push_back(chk.op_distance);
    }
  }

  auto sum = open_out(out_dir, "summary.txt");
  sum << "experiment: projector_ensemble\n";
  sum << "samples = " << art.samples << ", admissible = " << art.admissible
      << "\n";
  sum << "bound violations = " << art.bound_violations << "\n";
  sum << "minmax violations = " << art.minmax_violations << "\n";

  auto svg = open_out(out_dir, "report.svg");
  write_loglog_svg(svg, plot);
  return art;
}

PropertyPArtifacts run_property_p(const RunConfig& c, const std::string& out_dir) {
  const CuspGeometry geo(c.alpha, c.eps0);
  const std::vector<double> levels = {c.eps_ref};
  const TriangleMesh mesh = mesh_reference(geo, c.h, c.grading, levels);
  const Transformation t = phi_eps_transform(EpsLevel{c.eps_ref}, geo);
  const PullbackFields fields = pullback(t, identity_coefficients());
  const AssembledSystem sys =
      assemble(mesh, fields, BoundaryCondition::dirichlet, c.quad_points);
  const EigenDecomposition dec = solve_cached(
      sys, c.count, c.tol, (fs::path(out_dir) / "cache").string(), nullptr);

  PropertyPArtifacts art;
  art.q0 = c.q0 > 2.0 ? c.q0 : q_infinity;
  art.fit = property_p_fit(dec, sys, mesh, fields, art.q0);
  art.gamma_min = rate_exponent(2, c.alpha).gamma_min;

  auto csv = open_out(out_dir, "report.csv");
  csv << "n,lambda,norm_q0,grad_norm_q0\n";
  for (int i = 0; i < art.fit.n_used; ++i) {
    csv << (i + 1) << ',' << fmt17(art.fit.lambdas[i]) << ','
        << fmt17(art.fit.norms[i]) << ',' << fmt17(art.fit.grad_norms[i])
        << "\n";
  }

  LogLogPlot plot;
  plot.title = "property_p: |psi_n|_q0 vs lambda_n";
  plot.xlabel = "lambda_n";
  plot.ylabel = "|psi_n|_q0";
  plot.xs = art.fit.lambdas;
  plot.ys = art.fit.norms;
  plot.has_fit = true;
  plot.fit = art.fit.fit1;
  auto svg = open_out(out_dir, "report.svg");
  write_loglog_svg(svg, plot);

  auto sum = open_out(out_dir, "summary.txt");
  sum << "experiment: property_p\n";
  sum << "alpha = " << fmt17(c.alpha) << ", eps = " << fmt17(c.eps_ref)
      << ", q0 = " << (std::isinf(art.q0) ? "inf" : fmt17(art.q0)) << "\n";
  sum << "gamma1_hat = " << fmt17(art.fit.gamma1_hat)
      << " (P1 reference N_alpha/4 = " << fmt17(art.gamma_min) << ")\n";
  sum << "gamma2_hat = " << fmt17(art.fit.gamma2_hat) << " (P2 exponent minus 1/2)\n";
  sum << "n_used = " << art.fit.n_used << "\n";
  return art;
}

int run_experiment(const RunConfig& c) {
  try {
    validate_config(c);
    fs::create_directories(c.out_dir);
    switch (c.experiment) {
      case ExperimentKind::square_sanity: run_square_sanity(c, c.out_dir); break;
      case ExperimentKind::lipschitz_rate: run_lipschitz_rate(c, c.out_dir); break;
      case ExperimentKind::cusp_rate: run_cusp_rate(c, c.out_dir); break;
      case ExperimentKind::projector_ensemble:
        run_projector_ensemble(c, c.out_dir);
        break;
      case ExperimentKind::property_p: run_property_p(c, c.out_dir); break;
    }
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::cout << "experiment " << to_string(c.experiment) << " complete; reports in "
            << c.out_dir << "\n";
  return 0;
}

} // namespace cusp
