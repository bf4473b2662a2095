#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sleevemap/geometry.hpp"

namespace sleevemap {

/// True when some point of the open segment (a, b) lies inside `poly` deeper than `tol`.
bool segmentCrossesInterior(const ConvexPolygon& poly, const Point& a, const Point& b, double tol);

struct OraclePath {
  double length = 0.0;
  Polyline path;
};

/// Visibility graph over all obstacle corners. Node centers join a query only as
/// its endpoints, and each center sees through its own obstacle.
/// Brute force for verification; not used by the pipeline.
class VisibilityOracle {
 public:
  VisibilityOracle(std::span<const ConvexPolygon> obstacles, std::span<const Point> centers);

  /// Shortest obstacle-avoiding length from center(s) to each target center;
  /// infinity when disconnected.
  std::vector<double> lengthsFrom(std::size_t s, std::span<const std::size_t> targets) const;
  OraclePath shortestPath(std::size_t s, std::size_t t) const;

  /// Open segment against every obstacle interior, skipping obstacles skipA and skipB (or -1).
  bool clear(const Point& a, const Point& b, std::int64_t skipA = -1, std::int64_t skipB = -1) const;

  std::size_t cornerCount() const { return corners_.size(); }
  std::size_t edgeCount() const { return edgeTotal_; }

 private:
  struct Arc {
    std::uint32_t to;
    double weight;
  };
  struct Search {
    std::vector<double> dist;
    std::vector<std::int64_t> parent;
  };
  bool tangentAt(std::size_t corner, const Point& toward) const;
  std::vector<std::pair<std::uint32_t, double>> visibleCorners(std::size_t node) const;
  Search searchFrom(std::size_t s) const;

  std::vector<ConvexPolygon> obstacles_;
  std::vector<Point> centers_;
  std::vector<Point> corners_;
  std::vector<std::uint32_t> cornerOwner_;
  std::vector<std::array<Point, 2>> cornerNeighbors_;
  std::vector<std::vector<Arc>> adjacency_;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> centerVisible_;
  std::size_t edgeTotal_ = 0;
  double tol_ = 0.0;
  // Uniform grid over obstacle bounds.
  Rect gridBounds_;
  double cell_ = 1.0;
  int cols_ = 1, rows_ = 1;
  std::vector<std::vector<std::uint32_t>> cells_;
};

/// Shortest path from s to t inside the union of the given triangles (a sleeve
/// polygon), by Dijkstra on the visibility graph of the triangle corners.
OraclePath polygonGeodesic(std::span<const std::array<Point, 3>> triangles, const Point& s, const Point& t);

}  // namespace sleevemap
