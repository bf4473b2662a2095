#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "sleevemap/geometry.hpp"

namespace sleevemap {

using TriangleId = std::int32_t;
using VertexId = std::int32_t;
inline constexpr TriangleId kNoTriangle = -1;
inline constexpr std::int32_t kNoOwner = -1;

/// Side i of a triangle is the edge opposite v[i], running v[i+1] -> v[i+2].
struct Triangle {
  std::array<VertexId, 3> v{};
  std::array<TriangleId, 3> neighbor{kNoTriangle, kNoTriangle, kNoTriangle};
  std::array<bool, 3> constrained{};  // side lies on an obstacle boundary
  std::int32_t owner = kNoOwner;      // node whose obstacle contains the interior
};

class CdtError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Constrained Delaunay triangulation of a rectangular frame around padded
/// obstacles. Each obstacle interior is a fan around its node's center vertex.
struct Cdt {
  std::vector<Point> points;
  std::vector<std::int32_t> pointOwner;  // node of an obstacle corner or center; kNoOwner for frame
  std::vector<Triangle> triangles;
  std::vector<VertexId> centerVertex;    // per node
  std::vector<std::vector<TriangleId>> owned;  // per node, ascending
  std::vector<TriangleId> vertexTriangle;      // one incident triangle per vertex
  Rect frame;

  std::size_t triangleCount() const { return triangles.size(); }
  Point corner(TriangleId t, int i) const { return points[triangles[t].v[i]]; }
  Point centroid(TriangleId t) const;
  double area(TriangleId t) const;
  /// Side index of t facing neighbor u, or -1.
  int sideToward(TriangleId t, TriangleId u) const;
  /// Triangles incident to vertex v in counterclockwise order.
  std::vector<TriangleId> trianglesAround(VertexId v) const;
  /// Containing triangle; points on shared sides or vertices go to the lowest id.
  /// Throws std::out_of_range outside the frame.
  TriangleId locate(const Point& p) const;
};

/// Frame used for routing scenes: obstacle bounds grown by twice the maximum padding.
Rect routingFrame(std::span<const ConvexPolygon> obstacles, double maxPadding);

/// `centers[i]` must lie strictly inside `obstacles[i]`; obstacles pairwise disjoint
/// and inside `frame`.
Cdt buildCdt(std::span<const ConvexPolygon> obstacles, std::span<const Point> centers, const Rect& frame);

/// Positive when d lies inside the circumcircle of counterclockwise (a, b, c),
/// zero within tolerance.
int inCircle(const Point& a, const Point& b, const Point& c, const Point& d);

struct DualArc {
  TriangleId to;
  double weight;
};

/// One vertex per triangle; one arc pair per shared side, weighted by centroid distance.
struct DualGraph {
  std::vector<std::uint32_t> offsets;  // CSR, size triangleCount + 1
  std::vector<DualArc> arcs;
  std::vector<Point> centroids;

  std::size_t vertexCount() const { return centroids.size(); }
  std::size_t edgeCount() const { return arcs.size() / 2; }
  std::span<const DualArc> arcsOf(TriangleId t) const {
    return {arcs.data() + offsets[t], arcs.data() + offsets[t + 1]};
  }
};

DualGraph buildDualGraph(const Cdt& cdt);

/// Compact JSON list of triangles for inspection in the viewer.
std::string cdtDebugJson(const Cdt& cdt);

}  // namespace sleevemap
