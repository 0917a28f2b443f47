#include "cusp_spectra/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "cusp_spectra/errors.hpp"

namespace cusp {

double TriangleMesh::triangle_area(int t) const {
  const auto& tr = triangles[t];
  const Vec2& a = nodes[tr[0]];
  const Vec2& b = nodes[tr[1]];
  const Vec2& c = nodes[tr[2]];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                (c.x() - a.x()) * (b.y() - a.y()));
}

double TriangleMesh::triangle_diameter(int t) const {
  const auto& tr = triangles[t];
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    d = std::max(d, (nodes[tr[i]] - nodes[tr[(i + 1) % 3]]).norm());
  return d;
}

Vec2 TriangleMesh::centroid(int t) const {
  const auto& tr = triangles[t];
  return (nodes[tr[0]] + nodes[tr[1]] + nodes[tr[2]]) / 3.0;
}

double TriangleMesh::area() const {
  double a = 0.0;
  for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
  return a;
}

std::vector<int> TriangleMesh::boundary_nodes() const {
  std::vector<int> out;
  for (int i = 0; i < node_count(); ++i)
    if (node_on_boundary[i]) out.push_back(i);
  return out;
}

namespace {

// d strictly inside the circumcircle of ccw triangle (a, b, c)
double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const double adx = a.x() - d.x(), ady = a.y() - d.y();
  const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
  const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
  const double ad = adx * adx + ady * ady;
  const double bd = bdx * bdx + bdy * bdy;
  const double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

void split_interval(double a, double b,
                    const std::function<double(double)>& spacing,
                    std::vector<double>& out, int depth, double floor_spacing) {
  const double len = b - a;
  double s = std::min({spacing(a), spacing(b), spacing(0.5 * (a + b))});
  s = std::max(s, floor_spacing);
  if (len <= s || depth > 40) return;
  const double m = 0.5 * (a + b);
  split_interval(a, m, spacing, out, depth + 1, floor_spacing);
  out.push_back(m);
  split_interval(m, b, spacing, out, depth + 1, floor_spacing);
}

struct Column {
  double x = 0.0;
  std::vector<double> ys;
  std::vector<int> anchor_pos; // index into ys for each anchor curve
  std::vector<int> ids;        // global node ids, parallel to ys
};

// row_cap bounds the vertical spacing by the adjacent column gaps so strip
// cells keep a bounded aspect ratio.
Column build_column(const StripDomainSpec& spec, double x, double row_cap,
                    double floor_spacing) {
  Column col;
  col.x = x;
  const double yb = spec.bottom(x);
  const double yt = spec.top(x);
  if (!(yt > yb - 1e-12)) {
    std::ostringstream os;
    os << "boundary chains cross at x = " << x << " (top " << yt << " <= bottom "
       << yb << ")";
    throw meshing_error(os.str());
  }
  auto vertical_spacing = [&spec, x, row_cap](double y) {
    return std::min(spec.spacing(x, y), row_cap);
  };
  const std::size_t n_anchor = spec.anchors.size() + 2;
  std::vector<double> av(n_anchor);
  av.front() = yb;
  for (std::size_t i = 0; i < spec.anchors.size(); ++i) {
    double v = spec.anchors[i](x);
    v = std::clamp(v, av[i], yt);
    if (yt - v < spec.anchor_snap) v = yt;
    av[i + 1] = v;
  }
  av.back() = yt;
  for (std::size_t i = 1; i + 1 < n_anchor; ++i)
    av[i] = std::max(av[i], av[i - 1]);

  col.anchor_pos.resize(n_anchor);
  col.ys.push_back(av.front());
  col.anchor_pos[0] = 0;
  for (std::size_t i = 1; i < n_anchor; ++i) {
    const double snap = (i + 1 == n_anchor) ? 1e-12 : spec.anchor_snap;
    if (av[i] > col.ys.back() + snap) {
      if (av[i] - col.ys.back() > 2.0 * spec.anchor_snap)
        split_interval(col.ys.back(), av[i], vertical_spacing, col.ys, 0,
                       floor_spacing);
      col.ys.push_back(av[i]);
    }
    col.anchor_pos[i] = static_cast<int>(col.ys.size()) - 1;
  }
  return col;
}

void ladder_triangulate(const TriangleMesh& m, std::span<const int> left,
                        std::span<const int> right,
                        std::vector<std::array<int, 3>>& out) {
  std::size_t il = 0, ir = 0;
  if (left.size() < 2 && right.size() < 2) return;
  while (il + 1 < left.size() || ir + 1 < right.size()) {
    bool advance_right;
    if (il + 1 >= left.size()) {
      advance_right = true;
    } else if (ir + 1 >= right.size()) {
      advance_right = false;
    } else {
      // Delaunay choice for the quad (L[il], R[ir], R[ir+1], L[il+1])
      const double det =
          incircle(m.nodes[left[il]], m.nodes[right[ir]], m.nodes[right[ir + 1]],
                   m.nodes[left[il + 1]]);
      advance_right = !(det > 0.0);
    }
    if (advance_right) {
      out.push_back({left[il], right[ir], right[ir + 1]});
      ++ir;
    } else {
      out.push_back({left[il], right[ir], left[il + 1]});
      ++il;
    }
  }
}

} // namespace

TriangleMesh build_strip_mesh(const StripDomainSpec& spec) {
  if (!spec.bottom || !spec.top || !spec.spacing || !spec.x_spacing)
    throw input_error("strip mesh spec is incomplete");
  if (!(spec.x_hi > spec.x_lo)) throw meshing_error("empty strip domain");

  const double width = spec.x_hi - spec.x_lo;
  const double floor_spacing = 1e-5 * width;

  std::vector<double> xs = spec.fixed_x;
  xs.push_back(spec.x_lo);
  xs.push_back(spec.x_hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end(),
                       [](double a, double b) { return std::abs(a - b) < 1e-12; }),
           xs.end());
  if (xs.front() < spec.x_lo - 1e-12 || xs.back() > spec.x_hi + 1e-12)
    throw meshing_error("fixed x line outside the domain base");
  std::vector<double> columns_x;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    columns_x.push_back(xs[i]);
    split_interval(xs[i], xs[i + 1], spec.x_spacing, columns_x, 0, floor_spacing);
  }
  columns_x.push_back(xs.back());

  TriangleMesh mesh;
  std::vector<Column> cols;
  cols.reserve(columns_x.size());
  for (std::size_t c = 0; c < columns_x.size(); ++c) {
    double gap = width;
    if (c > 0) gap = std::min(gap, columns_x[c] - columns_x[c - 1]);
    if (c + 1 < columns_x.size())
      gap = std::min(gap, columns_x[c + 1] - columns_x[c]);
    const double cap = 3.0 * std::max(gap, spec.row_cap_floor);
    cols.push_back(build_column(spec, columns_x[c], cap, floor_spacing));
  }

  for (std::size_t c = 0; c < cols.size(); ++c) {
    Column& col = cols[c];
    col.ids.resize(col.ys.size());
    const bool side = (c == 0 || c + 1 == cols.size());
    for (std::size_t r = 0; r < col.ys.size(); ++r) {
      col.ids[r] = mesh.node_count();
      mesh.nodes.emplace_back(col.x, col.ys[r]);
      const bool on_bottom = (r == 0);
      const bool on_top = (r + 1 == col.ys.size());
      mesh.node_on_boundary.push_back(side || on_bottom || on_top ? 1 : 0);
    }
  }

  const std::size_t n_anchor = spec.anchors.size() + 2;
  for (std::size_t c = 0; c + 1 < cols.size(); ++c) {
    const Column& lc = cols[c];
    const Column& rc = cols[c + 1];
    for (std::size_t seg = 0; seg + 1 < n_anchor; ++seg) {
      const int l0 = lc.anchor_pos[seg], l1 = lc.anchor_pos[seg + 1];
      const int r0 = rc.anchor_pos[seg], r1 = rc.anchor_pos[seg + 1];
      ladder_triangulate(mesh,
                         std::span<const int>(lc.ids.data() + l0, l1 - l0 + 1),
                         std::span<const int>(rc.ids.data() + r0, r1 - r0 + 1),
                         mesh.triangles);
    }
  }

  mesh.region_tag.assign(mesh.triangle_count(), 0);
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    if (!(mesh.triangle_area(t) > 0.0)) {
      std::ostringstream os;
      os << "non-positive triangle area at element " << t;
      throw meshing_error(os.str());
    }
    if (spec.region_classifier)
      mesh.region_tag[t] = spec.region_classifier(mesh.centroid(t));
    mesh.h_max = std::max(mesh.h_max, mesh.triangle_diameter(t));
  }
  return mesh;
}

TriangleMesh mesh_reference(const CuspGeometry& geo, double h, double grading,
                            std::span<const double> sweep_levels) {
  if (!(h > 0.0)) throw input_error("mesh size h must be positive");
  if (!(grading >= 1.0)) throw input_error("grading must be >= 1");
  const double alpha = geo.alpha;
  const double eps0 = geo.eps0;
  const double r0 = std::pow(eps0, 1.0 / alpha);
  const double band = 2.2 * r0;

  std::vector<double> levels(sweep_levels.begin(), sweep_levels.end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (double e : levels)
    if (!(e > 0.0 && e <= eps0 + 1e-15))
      throw input_error("sweep level outside (0, eps0]");

  StripDomainSpec spec;
  spec.x_lo = -1.0;
  spec.x_hi = 1.0;
  spec.bottom = [geo](double x) { return geo.bottom(x); };
  spec.top = [geo](double x) { return geo.top(x, geo.eps0); };
  spec.fixed_x = {-r0, r0};
  for (double e : levels) {
    const double xr = std::pow(e, 1.0 / alpha);
    spec.fixed_x.push_back(xr);
    spec.fixed_x.push_back(-xr);
  }
  for (double e : levels) {
    spec.anchors.push_back(
        [geo, e](double x) { return h_eps(std::abs(x), EpsLevel{e}, geo); });
  }
  const double base = h / std::sqrt(2.0);
  const double fine = h / (grading * std::sqrt(2.0));
  spec.row_cap_floor = 0.5 * fine;
  const std::vector<double> curve_levels = levels;
  spec.x_spacing = [=](double x) {
    double s = (std::abs(x) <= band) ? fine : base;
    const double ax = std::abs(x);
    if (ax > 0.999 * r0) {
      // chord-error control on the profile branch: sagitta <= h^2/8
      const double kappa = alpha * (1.0 - alpha) * std::pow(std::max(ax, r0), alpha - 2.0);
      if (kappa > 1.0) s = std::min(s, h / std::sqrt(kappa));
    }
    // chord control on the interface curves: their curvature spikes just
    // outside each kink radius, and misaligned chords there do not cancel
    // between sweep levels
    if (!curve_levels.empty() && ax < 1.05 * r0) {
      const double step = 1e-3;
      double kappa = 0.0;
      for (double e : curve_levels) {
        const EpsLevel lv{e};
        const double hm = h_eps(std::max(ax - step, 0.0), lv, geo);
        const double h0 = h_eps(ax, lv, geo);
        const double hp = h_eps(ax + step, lv, geo);
        kappa = std::max(kappa, std::abs(hp - 2.0 * h0 + hm) / (step * step));
      }
      const double sag_tol = h * h / 1024.0;
      if (kappa > 1.0)
        s = std::min(s, std::max(std::sqrt(8.0 * sag_tol / kappa), h / 128.0));
    }
    return s;
  };
  spec.spacing = [=](double x, double y) {
    return (std::abs(x) <= band && y >= 1.0 - eps0 - band) ? fine : base;
  };
  spec.region_classifier = [=](const Vec2& c) {
    return (std::abs(c.x()) <= r0 && c.y() >= 1.0 - 2.0 * eps0) ? 1 : 0;
  };
  return build_strip_mesh(spec);
}

TriangleMesh mesh_graph_domain(const GraphDomain& gd, double h,
                               std::span<const double> fixed_x,
                               std::span<const double> fixed_y) {
  if (!(h > 0.0)) throw input_error("mesh size h must be positive");
  validate_graph_domain(gd);
  StripDomainSpec spec;
  spec.x_lo = gd.x_lo;
  spec.x_hi = gd.x_hi;
  const double floor_y = gd.floor_y;
  spec.bottom = [floor_y](double) { return floor_y; };
  spec.top = gd.profile;
  spec.fixed_x.assign(fixed_x.begin(), fixed_x.end());
  for (double y : fixed_y) {
    spec.anchors.push_back([y](double) { return y; });
  }
  std::sort(spec.anchors.begin(), spec.anchors.end(),
            [](const auto& a, const auto& b) { return a(0.0) < b(0.0); });
  const double base = h / std::sqrt(2.0);
  spec.row_cap_floor = 0.5 * base;
  auto profile = gd.profile;
  const double lo = gd.x_lo, hi = gd.x_hi;
  spec.x_spacing = [base, h, profile, lo, hi](double x) {
    const double d = std::min(1e-4, 0.25 * (hi - lo));
    const double xm = std::clamp(x, lo + d, hi - d);
    const double kappa =
        std::abs(profile(xm + d) - 2.0 * profile(xm) + profile(xm - d)) / (d * d);
    double s = base;
    if (kappa > 1.0) s = std::min(s, h / std::sqrt(kappa));
    return s;
  };
  spec.spacing = [base](double, double) { return base; };
  return build_strip_mesh(spec);
}

TriangleMesh mesh_unit_square(double h) {
  return mesh_graph_domain(unit_square_domain(), h);
}

QualityReport mesh_quality(const TriangleMesh& m) {
  QualityReport q;
  q.element_count = m.triangle_count();
  q.min_angle_deg = 180.0;
  q.max_aspect = 0.0;
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tr = m.triangles[t];
    const double area = std::abs(m.triangle_area(t));
    double longest = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec2& a = m.nodes[tr[i]];
      const Vec2 u = m.nodes[tr[(i + 1) % 3]] - a;
      const Vec2 v = m.nodes[tr[(i + 2) % 3]] - a;
      longest = std::max(longest, u.norm());
      const double den = u.norm() * v.norm();
      if (den <= 0.0 || area <= 0.0) {
        q.min_angle_deg = 0.0;
        continue;
      }
      const double cosang = std::clamp(u.dot(v) / den, -1.0, 1.0);
      q.min_angle_deg =
          std::min(q.min_angle_deg, std::acos(cosang) * 180.0 / M_PI);
    }
    const double aspect =
        (area > 0.0) ? longest * longest / (2.0 * area)
                     : std::numeric_limits<double>::infinity();
    q.max_aspect = std::max(q.max_aspect, aspect);
  }
  if (m.triangle_count() == 0) q.min_angle_deg = 0.0;
  q.ok = q.min_angle_deg >= 15.0;
  return q;
}

bool is_conforming(const TriangleMesh& m) {
  std::map<std::pair<int, int>, int> edge_count;
  for (int t = 0; t < m.triangle_count(); ++t) {
    if (!(m.triangle_area(t) > 0.0)) return false;
    const auto& tr = m.triangles[t];
    for (int i = 0; i < 3; ++i) {
      const int a = tr[i], b = tr[(i + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  }
  for (const auto& [edge, count] : edge_count) {
    if (count > 2) return false;
    if (count == 1 &&
        (!m.node_on_boundary[edge.first] || !m.node_on_boundary[edge.second]))
      return false;
  }
  return true;
}

void write_mesh(std::ostream& os, const TriangleMesh& m) {
  char buf[64];
  os << "nodes " << m.node_count() << "\n";
  for (int i = 0; i < m.node_count(); ++i) {
    os << i;
    std::snprintf(buf, sizeof buf, " %.17g", m.nodes[i].x());
    os << buf;
    std::snprintf(buf, sizeof buf, " %.17g", m.nodes[i].y());
    os << buf << ' ' << int(m.node_on_boundary[i]) << "\n";
  }
  os << "triangles " << m.triangle_count() << "\n";
  for (int t = 0; t < m.triangle_count(); ++t) {
    const auto& tr = m.triangles[t];
    os << t << ' ' << tr[0] << ' ' << tr[1] << ' ' << tr[2] << ' '
       << m.region_tag[t] << "\n";
  }
}

TriangleMesh read_mesh(std::istream& is) {
  TriangleMesh m;
  std::string word;
  int count = 0;
  if (!(is >> word >> count) || word != "nodes")
    throw input_error("mesh file: expected 'nodes <count>'");
  m.nodes.resize(count);
  m.node_on_boundary.resize(count);
  for (int i = 0; i < count; ++i) {
    int id, b;
    double x, y;
    if (!(is >> id >> x >> y >> b) || id != i)
      throw input_error("mesh file: bad node record");
    m.nodes[i] = Vec2(x, y);
    m.node_on_boundary[i] = static_cast<std::uint8_t>(b);
  }
  if (!(is >> word >> count) || word != "triangles")
    throw input_error("mesh file: expected 'triangles <count>'");
  m.triangles.resize(count);
  m.region_tag.resize(count);
  for (int t = 0; t < count; ++t) {
    int id, a, b, c, tag;
    if (!(is >> id >> a >> b >> c >> tag) || id != t)
      throw input_error("mesh file: bad triangle record");
    m.triangles[t] = {a, b, c};
    m.region_tag[t] = tag;
  }
  for (int t = 0; t < m.triangle_count(); ++t)
    m.h_max = std::max(m.h_max, m.triangle_diameter(t));
  return m;
}

} // namespace cusp
