#include "cusp_spectra/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ostream>
#include <sstream>

#include "cusp_spectra/quadrature.hpp"

namespace cusp {

namespace {

struct Triplet {
  int row, col;
  double value;
};

Eigen::SparseMatrix<double> compress(std::vector<Triplet>& trips, int n) {
  // Element-order-stable accumulation: mirror pairs see identical value
  // sequences, so the result is exactly symmetric.
  std::stable_sort(trips.begin(), trips.end(), [](const Triplet& a, const Triplet& b) {
    return a.col != b.col ? a.col < b.col : a.row < b.row;
  });
  Eigen::SparseMatrix<double> m(n, n);
  std::vector<Eigen::Triplet<double>> unique;
  unique.reserve(trips.size());
  std::size_t i = 0;
  while (i < trips.size()) {
    const int r = trips[i].row, c = trips[i].col;
    double sum = 0.0;
    while (i < trips.size() && trips[i].row == r && trips[i].col == c)
      sum += trips[i++].value;
    unique.emplace_back(r, c, sum);
  }
  m.setFromTriplets(unique.begin(), unique.end());
  m.makeCompressed();
  return m;
}

} // namespace

namespace {

struct ElementMats {
  double ke[3][3] = {};
  double me[3][3] = {};

  void add(const ElementMats& o) {
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        ke[i][j] += o.ke[i][j];
        me[i][j] += o.me[i][j];
      }
  }
  double max_diff(const ElementMats& o) const {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        d = std::max(d, std::abs(ke[i][j] - o.ke[i][j]));
        d = std::max(d, std::abs(me[i][j] - o.me[i][j]));
      }
    return d;
  }
  double max_abs() const {
    double d = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        d = std::max({d, std::abs(ke[i][j]), std::abs(me[i][j])});
    return d;
  }
};

using Bary = std::array<double, 3>;

struct ElementContext {
  const PullbackFields* fields;
  const TriangleRule* rule;
  const Vec2* verts; // parent vertices
  Vec2 grads[3];     // parent P1 gradients
  double parent_area;
  int element;
};

// Quadrature of the parent basis functions over one barycentric sub-triangle.
ElementMats subtriangle_rule(const ElementContext& ctx, const Bary& a,
                             const Bary& b, const Bary& c) {
  const Vec2 pa = a[0] * ctx.verts[0] + a[1] * ctx.verts[1] + a[2] * ctx.verts[2];
  const Vec2 pb = b[0] * ctx.verts[0] + b[1] * ctx.verts[1] + b[2] * ctx.verts[2];
  const Vec2 pc = c[0] * ctx.verts[0] + c[1] * ctx.verts[1] + c[2] * ctx.verts[2];
  const double area = 0.5 * std::abs((pb.x() - pa.x()) * (pc.y() - pa.y()) -
                                     (pc.x() - pa.x()) * (pb.y() - pa.y()));
  const Vec2 centroid = (pa + pb + pc) / 3.0;
  ElementMats out;
  for (std::size_t q = 0; q < ctx.rule->bary.size(); ++q) {
    const auto& w = ctx.rule->bary[q];
    Bary bp; // parent barycentric coordinates of the quadrature point
    for (int i = 0; i < 3; ++i) bp[i] = w[0] * a[i] + w[1] * b[i] + w[2] * c[i];
    const Vec2 x =
        bp[0] * ctx.verts[0] + bp[1] * ctx.verts[1] + bp[2] * ctx.verts[2];
    double gval;
    Mat2 aval;
    try {
      gval = eval_nudged(ctx.fields->g, x, centroid);
      aval = eval_nudged(ctx.fields->a, x, centroid);
    } catch (const singularity_error& e) {
      std::ostringstream os;
      os << "element " << ctx.element << ": " << e.what();
      throw assembly_error(os.str(), ctx.element);
    }
    if (!(aval(0, 0) > 0.0) || !(aval.determinant() > 0.0)) {
      std::ostringstream os;
      os << "element " << ctx.element
         << ": coefficient matrix not SPD at quadrature point (" << x.x() << ", "
         << x.y() << ")";
      throw assembly_error(os.str(), ctx.element);
    }
    const double wq = ctx.rule->weights[q] * area;
    const Vec2 agrad[3] = {aval * ctx.grads[0], aval * ctx.grads[1],
                           aval * ctx.grads[2]};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        out.ke[i][j] += wq * gval * ctx.grads[i].dot(agrad[j]);
        out.me[i][j] += wq * gval * bp[i] * bp[j];
      }
  }
  return out;
}

Bary bary_mid(const Bary& a, const Bary& b) {
  return {0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])};
}

// Piecewise-smooth coefficients (branch interfaces of phi_eps cross elements
// near anchor-snap zones): refine until the composite rule stabilizes.
void accumulate_adaptive(const ElementContext& ctx, const Bary& a, const Bary& b,
                         const Bary& c, int depth, ElementMats& total) {
  const ElementMats coarse = subtriangle_rule(ctx, a, b, c);
  const Bary mab = bary_mid(a, b), mbc = bary_mid(b, c), mca = bary_mid(c, a);
  ElementMats fine = subtriangle_rule(ctx, a, mab, mca);
  fine.add(subtriangle_rule(ctx, mab, b, mbc));
  fine.add(subtriangle_rule(ctx, mca, mbc, c));
  fine.add(subtriangle_rule(ctx, mab, mbc, mca));
  const double tol = 1e-13 * (1.0 + fine.max_abs());
  if (depth >= 9 || coarse.max_diff(fine) <= tol) {
    total.add(fine);
    return;
  }
  accumulate_adaptive(ctx, a, mab, mca, depth + 1, total);
  accumulate_adaptive(ctx, mab, b, mbc, depth + 1, total);
  accumulate_adaptive(ctx, mca, mbc, c, depth + 1, total);
  accumulate_adaptive(ctx, mab, mbc, mca, depth + 1, total);
}

} // namespace

AssembledSystem assemble(const TriangleMesh& m, const PullbackFields& f,
                         BoundaryCondition bc, int quad_points) {
  const TriangleRule& rule = TriangleRule::get(quad_points);
  AssembledSystem sys;
  sys.bc = bc;
  sys.node_to_dof.assign(m.node_count(), -1);
  for (int i = 0; i < m.node_count(); ++i) {
    if (bc == BoundaryCondition::dirichlet && m.node_on_boundary[i]) continue;
    sys.node_to_dof[i] = static_cast<int>(sys.dof_to_node.size());
    sys.dof_to_node.push_back(i);
  }
  const int n = sys.dofs();

  std::vector<Triplet> kt, mt;
  kt.reserve(9 * m.triangle_count());
  mt.reserve(9 * m.triangle_count());

  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tr = m.triangles[t];
    const Vec2 verts[3] = {m.nodes[tr[0]], m.nodes[tr[1]], m.nodes[tr[2]]};
    const double area = m.triangle_area(t);

    ElementContext ctx;
    ctx.fields = &f;
    ctx.rule = &rule;
    ctx.verts = verts;
    ctx.parent_area = area;
    ctx.element = t;
    ctx.grads[0] = Vec2(verts[1].y() - verts[2].y(), verts[2].x() - verts[1].x()) /
                   (2.0 * area);
    ctx.grads[1] = Vec2(verts[2].y() - verts[0].y(), verts[0].x() - verts[2].x()) /
                   (2.0 * area);
    ctx.grads[2] = Vec2(verts[0].y() - verts[1].y(), verts[1].x() - verts[0].x()) /
                   (2.0 * area);

    ElementMats elem;
    accumulate_adaptive(ctx, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, 0, elem);
    const auto& ke = elem.ke;
    const auto& me = elem.me;

    for (int i = 0; i < 3; ++i) {
      const int di = sys.node_to_dof[tr[i]];
      if (di < 0) continue;
      for (int j = i; j < 3; ++j) {
        const int dj = sys.node_to_dof[tr[j]];
        if (dj < 0) continue;
        kt.push_back({di, dj, ke[i][j]});
        mt.push_back({di, dj, me[i][j]});
        if (di != dj) {
          kt.push_back({dj, di, ke[i][j]});
          mt.push_back({dj, di, me[i][j]});
        }
      }
    }
  }

  sys.stiffness = compress(kt, n);
  sys.mass = compress(mt, n);
  return sys;
}

void write_matrix_coord(std::ostream& os, const Eigen::SparseMatrix<double>& m) {
  char buf[64];
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      if (it.row() < it.col()) continue;
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      os << it.row() << ' ' << it.col() << ' ' << buf << "\n";
    }
  }
}

namespace {

void hash_mix(std::uint64_t& h, std::uint64_t v) {
  // FNV-1a over the 8 bytes of v
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
}

void hash_matrix(std::uint64_t& h, const Eigen::SparseMatrix<double>& m) {
  for (int k = 0; k < m.outerSize(); ++k) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
      hash_mix(h, static_cast<std::uint64_t>(it.row()));
      hash_mix(h, static_cast<std::uint64_t>(it.col()));
      std::uint64_t bits;
      const double v = it.value();
      static_assert(sizeof bits == sizeof v);
      std::memcpy(&bits, &v, sizeof bits);
      hash_mix(h, bits);
    }
  }
}

} // namespace

std::uint64_t system_hash(const AssembledSystem& sys) {
  std::uint64_t h = 14695981039346656037ull;
  hash_mix(h, sys.bc == BoundaryCondition::dirichlet ? 1 : 2);
  hash_mix(h, static_cast<std::uint64_t>(sys.dofs()));
  hash_matrix(h, sys.stiffness);
  hash_matrix(h, sys.mass);
  return h;
}

} // namespace cusp
