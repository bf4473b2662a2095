#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sleevemap/cdt.hpp"
#include "sleevemap/graph_model.hpp"

namespace sleevemap {

enum class RoutingMode { AStar, Dijkstra, VcDijkstra };

std::string_view modeName(RoutingMode mode);
/// Accepts "astar", "dijkstra" and "vc_dijkstra".
std::optional<RoutingMode> parseMode(std::string_view text);

using NodePair = std::pair<NodeIndex, NodeIndex>;

/// Obstacles, CDT and dual graph for one routing pass.
struct RoutingScene {
  std::vector<Point> centers;
  std::vector<Rect> boxes;
  std::vector<ConvexPolygon> obstacles;
  Cdt cdt;
  DualGraph dual;
  std::vector<std::vector<Point>> fanCentroids;  // per node, centroids of its owned triangles

  std::size_t nodeCount() const { return centers.size(); }
};

RoutingScene makeRoutingScene(std::vector<Point> centers, std::vector<Rect> boxes,
                              std::vector<ConvexPolygon> obstacles, double maxPadding);
RoutingScene makeRoutingScene(const LaidOutGraph& g, const ObstacleSet& obstacles);

/// Vertex id used in a portal once the vertex has been collapsed to an endpoint.
inline constexpr VertexId kCollapsedVertex = -1;

/// A crossed triangle side as seen walking the sleeve.
struct Portal {
  Point left;
  Point right;
  VertexId leftVertex = kCollapsedVertex;
  VertexId rightVertex = kCollapsedVertex;
};

struct Sleeve {
  std::vector<TriangleId> triangles;
  std::vector<Portal> portals;  // triangles.size() - 1 entries
  double cost = 0.0;            // dual path length

  /// Same corridor walked from the other end.
  Sleeve reversed() const;
};

/// Center-to-center segment when the CDT walk between the two centers only
/// crosses free space and the two endpoint obstacles.
std::optional<Polyline> straightProbe(const RoutingScene& scene, NodeIndex s, NodeIndex t);

struct VertexCover {
  std::vector<NodeIndex> roots;     // in removal order
  std::vector<NodeIndex> edgeRoot;  // per demand edge, the endpoint removed first
};

/// Greedy maximum-degree cover; ties go to the lower node index.
VertexCover greedyVertexCover(std::size_t nodeCount, std::span<const NodePair> edges);

/// Reusable per-thread search state.
class SearchWorkspace {
 public:
  double distance(TriangleId t) const { return stamp_[t] >= epoch_ ? dist_[t] : kInf; }
  TriangleId parent(TriangleId t) const { return stamp_[t] >= epoch_ ? parent_[t] : kNoTriangle; }
  std::size_t expansions() const { return expansions_; }

 private:
  friend struct SearchAccess;
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist_;
  std::vector<TriangleId> parent_;
  std::vector<std::uint32_t> stamp_;
  std::vector<std::int32_t> targetSlot_;
  std::uint32_t epoch_ = 0;
  std::size_t expansions_ = 0;
};

/// Multi-source Dijkstra from every triangle owned by `root`. A triangle owned by
/// node u is entered only if u is the root or a target; target triangles are
/// terminal. Returns, per target, the first of its triangles settled (or kNoTriangle).
std::vector<TriangleId> dijkstraTree(const RoutingScene& scene, NodeIndex root,
                                     std::span<const NodeIndex> targets, SearchWorkspace& ws);

/// Single-pair A* under the same rules as dijkstraTree. The heuristic is the
/// straight-line distance to the nearest centroid of t's triangles.
std::optional<Sleeve> astarSingle(const RoutingScene& scene, NodeIndex s, NodeIndex t, SearchWorkspace& ws);

/// Sleeve ending at `target`, recovered from the parent pointers of the last search.
Sleeve extractSleeve(const RoutingScene& scene, const SearchWorkspace& ws, TriangleId target);

/// Replaces corner-hugging chain vertices of the source and target obstacles by
/// the endpoints and drops portals that become a single point.
Sleeve collapseEnds(const Sleeve& sleeve, const Cdt& cdt, NodeIndex s, NodeIndex t, const Point& sp,
                    const Point& tp);

/// Shortest path from sp to tp through the portals.
Polyline funnel(std::span<const Portal> portals, const Point& sp, const Point& tp);

struct TrimmedPath {
  Polyline path;
  bool stub = false;
};

/// Clips the first and last runs of the path at the boundaries of the two boxes.
TrimmedPath trimRoute(const Polyline& path, const Rect& sBox, const Rect& tBox);

enum class RouteKind { Straight, Sleeve, Fallback };
std::string_view routeKindName(RouteKind kind);

struct Route {
  EdgeIndex edge = 0;
  NodeIndex source = 0;
  NodeIndex target = 0;
  RouteKind kind = RouteKind::Straight;
  Polyline path;        // trimmed at the node boxes
  Polyline centerline;  // untrimmed, center to center
  bool stub = false;
  double dualCost = std::numeric_limits<double>::quiet_NaN();  // sleeve routes only
  std::vector<TriangleId> sleeve;
};

struct RoutingStats {
  std::size_t edges = 0;
  std::size_t sources = 0;  // distinct lower-index endpoints
  std::size_t roots = 0;    // search roots for the mode
  std::size_t treesLaunched = 0;
  std::size_t expansions = 0;
  std::size_t probeHits = 0;
  std::size_t failures = 0;
  double probeSeconds = 0.0;
  double searchSeconds = 0.0;
  double geometrySeconds = 0.0;
  double totalSeconds = 0.0;
};

struct RouterOptions {
  RoutingMode mode = RoutingMode::VcDijkstra;
  bool straightProbe = true;
  bool collapse = true;
  bool keepSleeves = false;
  int threads = 1;
};

struct RoutingResult {
  std::vector<Route> routes;  // one per edge, in edge order
  RoutingStats stats;
};

RoutingResult routeAll(const RoutingScene& scene, std::span<const NodePair> edges, const RouterOptions& options);

std::vector<NodePair> edgePairs(const LaidOutGraph& g);

}  // namespace sleevemap
