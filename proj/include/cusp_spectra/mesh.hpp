#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "cusp_spectra/geometry.hpp"
#include "cusp_spectra/types.hpp"

namespace cusp {

struct TriangleMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles; // counterclockwise
  std::vector<std::uint8_t> node_on_boundary;
  std::vector<int> region_tag; // per triangle
  double h_max = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int triangle_count() const { return static_cast<int>(triangles.size()); }
  double triangle_area(int t) const;
  double triangle_diameter(int t) const;
  Vec2 centroid(int t) const;
  double area() const;
  std::vector<int> boundary_nodes() const;
};

// Domain between two vertical-graph chains, triangulated strip by strip with
// the in-circle rule; every entry of fixed_x becomes a full mesh column and
// every anchor curve becomes a chain of element edges.
struct StripDomainSpec {
  double x_lo = 0.0;
  double x_hi = 1.0;
  std::function<double(double)> bottom;
  std::function<double(double)> top;
  std::vector<double> fixed_x;
  std::vector<std::function<double(double)>> anchors; // weakly ordered curves
  std::function<double(double, double)> spacing;      // target spacing at (x, y)
  std::function<double(double)> x_spacing;            // target column spacing
  std::function<int(const Vec2&)> region_classifier;  // optional, tags triangles
  // rows per column are capped at 3 * max(adjacent column gap, row_cap_floor)
  double row_cap_floor = 0.0;
  // anchors closer than this merge into one node chain (fp/conditioning floor;
  // thinner cells stay axis-aligned so only the min angle degrades)
  double anchor_snap = 1e-5;
};

TriangleMesh build_strip_mesh(const StripDomainSpec& spec);

// Graded conforming mesh of the polygonal approximation of Omega_{eps0};
// sweep_levels declares the eps values whose kink lines |x| = eps^(1/alpha)
// and interface curves y = h_eps(|x|) are embedded as constraints.
TriangleMesh mesh_reference(const CuspGeometry& geo, double h, double grading,
                            std::span<const double> sweep_levels = {});

TriangleMesh mesh_graph_domain(const GraphDomain& gd, double h,
                               std::span<const double> fixed_x = {},
                               std::span<const double> fixed_y = {});

TriangleMesh mesh_unit_square(double h);

struct QualityReport {
  double min_angle_deg = 0.0;
  double max_aspect = 0.0;
  int element_count = 0;
  bool ok = false;
};

// min angle, max aspect ratio, element count; ok is false below 15 degrees.
QualityReport mesh_quality(const TriangleMesh& m);

bool is_conforming(const TriangleMesh& m);

void write_mesh(std::ostream& os, const TriangleMesh& m);
TriangleMesh read_mesh(std::istream& is);

} // namespace cusp
