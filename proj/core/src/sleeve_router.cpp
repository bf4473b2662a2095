#include "sleevemap/sleeve_router.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_set>

#include "sleevemap/parallel.hpp"

namespace sleevemap {

std::string_view modeName(RoutingMode mode) {
  switch (mode) {
    case RoutingMode::AStar: return "astar";
    case RoutingMode::Dijkstra: return "dijkstra";
    case RoutingMode::VcDijkstra: return "vc_dijkstra";
  }
  return "?";
}

std::optional<RoutingMode> parseMode(std::string_view text) {
  if (text == "astar") return RoutingMode::AStar;
  if (text == "dijkstra") return RoutingMode::Dijkstra;
  if (text == "vc_dijkstra") return RoutingMode::VcDijkstra;
  return std::nullopt;
}

std::string_view routeKindName(RouteKind kind) {
  switch (kind) {
    case RouteKind::Straight: return "straight";
    case RouteKind::Sleeve: return "sleeve";
    case RouteKind::Fallback: return "fallback";
  }
  return "?";
}

RoutingScene makeRoutingScene(std::vector<Point> centers, std::vector<Rect> boxes,
                              std::vector<ConvexPolygon> obstacles, double maxPadding) {
  RoutingScene scene;
  scene.centers = std::move(centers);
  scene.boxes = std::move(boxes);
  scene.obstacles = std::move(obstacles);
  scene.cdt = buildCdt(scene.obstacles, scene.centers, routingFrame(scene.obstacles, maxPadding));
  scene.dual = buildDualGraph(scene.cdt);
  scene.fanCentroids.resize(scene.centers.size());
  for (std::size_t n = 0; n < scene.centers.size(); ++n) {
    for (TriangleId t : scene.cdt.owned[n]) scene.fanCentroids[n].push_back(scene.dual.centroids[t]);
  }
  return scene;
}

RoutingScene makeRoutingScene(const LaidOutGraph& g, const ObstacleSet& obstacles) {
  std::vector<Point> centers;
  std::vector<Rect> boxes;
  for (const auto& n : g.nodes) {
    centers.push_back(n.center);
    boxes.push_back(n.box);
  }
  double maxPad = 0.0;
  for (double p : obstacles.padding) maxPad = std::max(maxPad, p);
  return makeRoutingScene(std::move(centers), std::move(boxes), obstacles.polygons, maxPad);
}

Sleeve Sleeve::reversed() const {
  Sleeve r;
  r.cost = cost;
  r.triangles.assign(triangles.rbegin(), triangles.rend());
  r.portals.reserve(portals.size());
  for (auto it = portals.rbegin(); it != portals.rend(); ++it) {
    r.portals.push_back({it->right, it->left, it->rightVertex, it->leftVertex});
  }
  return r;
}

std::optional<Polyline> straightProbe(const RoutingScene& scene, NodeIndex s, NodeIndex t) {
  const Cdt& cdt = scene.cdt;
  const Point p = scene.centers[s];
  const Point q = scene.centers[t];
  const Point d = q - p;
  const auto si = static_cast<std::int32_t>(s);
  const auto ti = static_cast<std::int32_t>(t);
  auto side = [&](VertexId v) {
    const double c = cross(d, cdt.points[v] - p);
    return (c > 0.0) - (c < 0.0);
  };
  auto ownerOf = [&](TriangleId tri) { return cdt.triangles[tri].owner; };
  auto allowed = [&](TriangleId tri) {
    const auto o = ownerOf(tri);
    return o == kNoOwner || o == si || o == ti;
  };
  const Polyline segment{{p, q}};

  // Either standing on vertex `at` (cur == kNoTriangle) or inside `cur`, entered
  // across the side from `right` (right of the line) to `left`.
  VertexId at = cdt.centerVertex[s];
  TriangleId cur = kNoTriangle;
  VertexId left = -1, right = -1;
  for (std::size_t guard = 4 * cdt.triangleCount() + 16; guard > 0; --guard) {
    if (cur == kNoTriangle) {
      if (at == cdt.centerVertex[t]) return segment;
      bool moved = false;
      for (TriangleId tri : cdt.trianglesAround(at)) {
        const Triangle& T = cdt.triangles[tri];
        const int j = T.v[0] == at ? 0 : (T.v[1] == at ? 1 : 2);
        const VertexId a = T.v[(j + 1) % 3];
        const VertexId b = T.v[(j + 2) % 3];
        const int sa = side(a);
        const int sb = side(b);
        if (sa == 0 && dot(cdt.points[a] - cdt.points[at], d) > 0.0) {
          // Running along the side at-a: blocked only inside a single foreign obstacle.
          const TriangleId other = T.neighbor[(j + 2) % 3];
          const auto o = ownerOf(tri);
          if (o != kNoOwner && o != si && o != ti && other != kNoTriangle && ownerOf(other) == o) {
            return std::nullopt;
          }
          at = a;
          moved = true;
          break;
        }
        if (sa < 0 && sb > 0) {
          if (!allowed(tri)) return std::nullopt;
          if (ownerOf(tri) == ti) return segment;
          cur = T.neighbor[j];
          if (cur == kNoTriangle) return std::nullopt;
          right = a;
          left = b;
          moved = true;
          break;
        }
      }
      if (!moved) return std::nullopt;
      continue;
    }
    if (!allowed(cur)) return std::nullopt;
    if (ownerOf(cur) == ti) return segment;
    const Triangle& T = cdt.triangles[cur];
    int k = 0;
    while (T.v[k] == left || T.v[k] == right) ++k;
    const VertexId c = T.v[k];
    const int sc = side(c);
    if (sc == 0) {
      at = c;
      cur = kNoTriangle;
      continue;
    }
    // Leave across the side that keeps c on the same side of the line as the vertex it replaces.
    const VertexId stay = sc > 0 ? right : left;
    int opposite = 0;
    while (T.v[opposite] == c || T.v[opposite] == stay) ++opposite;
    cur = T.neighbor[opposite];
    (sc > 0 ? left : right) = c;
    if (cur == kNoTriangle) return std::nullopt;
  }
  return std::nullopt;
}

VertexCover greedyVertexCover(std::size_t nodeCount, std::span<const NodePair> edges) {
  VertexCover out;
  out.edgeRoot.assign(edges.size(), 0);
  std::vector<std::vector<EdgeIndex>> incident(nodeCount);
  std::vector<std::size_t> degree(nodeCount, 0);
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    auto [a, b] = edges[e];
    if (a == b) continue;
    incident[a].push_back(e);
    incident[b].push_back(e);
    ++degree[a];
    ++degree[b];
  }
  const std::size_t maxDegree = nodeCount ? *std::max_element(degree.begin(), degree.end()) : 0;
  std::vector<std::set<NodeIndex>> buckets(maxDegree + 1);
  for (NodeIndex v = 0; v < nodeCount; ++v) {
    if (degree[v] > 0) buckets[degree[v]].insert(v);
  }
  std::vector<bool> removed(edges.size(), false);
  std::size_t top = maxDegree;
  while (true) {
    while (top > 0 && buckets[top].empty()) --top;
    if (top == 0) break;
    const NodeIndex v = *buckets[top].begin();
    buckets[top].erase(buckets[top].begin());
    out.roots.push_back(v);
    for (EdgeIndex e : incident[v]) {
      if (removed[e]) continue;
      removed[e] = true;
      out.edgeRoot[e] = v;
      const NodeIndex u = edges[e].first == v ? edges[e].second : edges[e].first;
      buckets[degree[u]].erase(u);
      if (--degree[u] > 0) buckets[degree[u]].insert(u);
    }
    degree[v] = 0;
  }
  return out;
}

struct SearchAccess {
  static void prepare(SearchWorkspace& ws, std::size_t triangles, std::size_t nodes) {
    if (ws.dist_.size() != triangles) {
      ws.dist_.assign(triangles, 0.0);
      ws.parent_.assign(triangles, kNoTriangle);
      ws.stamp_.assign(triangles, 0);
      ws.epoch_ = 0;
    }
    if (ws.targetSlot_.size() != nodes) ws.targetSlot_.assign(nodes, -1);
    // Two stamps per search: epoch marks a labelled vertex, epoch + 1 a settled one.
    ws.epoch_ += 2;
    if (ws.epoch_ < 2) {
      std::fill(ws.stamp_.begin(), ws.stamp_.end(), 0);
      ws.epoch_ = 2;
    }
    ws.expansions_ = 0;
  }
  static bool labelled(const SearchWorkspace& ws, TriangleId t) { return ws.stamp_[t] >= ws.epoch_; }
  static bool settled(const SearchWorkspace& ws, TriangleId t) { return ws.stamp_[t] == ws.epoch_ + 1; }
  static double dist(const SearchWorkspace& ws, TriangleId t) {
    return labelled(ws, t) ? ws.dist_[t] : SearchWorkspace::kInf;
  }
  static void label(SearchWorkspace& ws, TriangleId t, double d, TriangleId parent) {
    ws.dist_[t] = d;
    ws.parent_[t] = parent;
    ws.stamp_[t] = ws.epoch_;
  }
  static void settle(SearchWorkspace& ws, TriangleId t) {
    ws.stamp_[t] = ws.epoch_ + 1;
    ++ws.expansions_;
  }
  static std::int32_t& slot(SearchWorkspace& ws, NodeIndex n) { return ws.targetSlot_[n]; }
};

namespace {

using QueueEntry = std::pair<double, TriangleId>;
using MinQueue = std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>>;

}  // namespace

std::vector<TriangleId> dijkstraTree(const RoutingScene& scene, NodeIndex root,
                                     std::span<const NodeIndex> targets, SearchWorkspace& ws) {
  const Cdt& cdt = scene.cdt;
  SearchAccess::prepare(ws, cdt.triangleCount(), scene.nodeCount());
  std::vector<TriangleId> slotReached;
  for (NodeIndex n : targets) {
    auto& slot = SearchAccess::slot(ws, n);
    if (slot < 0 && n != root) {
      slot = static_cast<std::int32_t>(slotReached.size());
      slotReached.push_back(kNoTriangle);
    }
  }
  std::size_t remaining = slotReached.size();
  const auto rootOwner = static_cast<std::int32_t>(root);
  MinQueue queue;
  if (remaining > 0) {
    for (TriangleId t : cdt.owned[root]) {
      SearchAccess::label(ws, t, 0.0, kNoTriangle);
      queue.emplace(0.0, t);
    }
  }
  while (!queue.empty() && remaining > 0) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (SearchAccess::settled(ws, u) || d > SearchAccess::dist(ws, u)) continue;
    SearchAccess::settle(ws, u);
    const auto owner = cdt.triangles[u].owner;
    if (owner != kNoOwner && owner != rootOwner) {
      auto& reached = slotReached[SearchAccess::slot(ws, static_cast<NodeIndex>(owner))];
      if (reached == kNoTriangle) {
        reached = u;
        --remaining;
      }
      continue;
    }
    for (const DualArc& arc : scene.dual.arcsOf(u)) {
      const auto o = cdt.triangles[arc.to].owner;
      if (o != kNoOwner && o != rootOwner && SearchAccess::slot(ws, static_cast<NodeIndex>(o)) < 0) continue;
      if (SearchAccess::settled(ws, arc.to)) continue;
      const double nd = d + arc.weight;
      if (nd < SearchAccess::dist(ws, arc.to)) {
        SearchAccess::label(ws, arc.to, nd, u);
        queue.emplace(nd, arc.to);
      }
    }
  }
  std::vector<TriangleId> reached(targets.size(), kNoTriangle);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto slot = SearchAccess::slot(ws, targets[i]);
    if (slot >= 0) reached[i] = slotReached[slot];
  }
  for (NodeIndex n : targets) SearchAccess::slot(ws, n) = -1;
  return reached;
}

std::optional<Sleeve> astarSingle(const RoutingScene& scene, NodeIndex s, NodeIndex t, SearchWorkspace& ws) {
  const Cdt& cdt = scene.cdt;
  SearchAccess::prepare(ws, cdt.triangleCount(), scene.nodeCount());
  const auto so = static_cast<std::int32_t>(s);
  const auto to = static_cast<std::int32_t>(t);
  const auto& goals = scene.fanCentroids[t];
  auto heuristic = [&](TriangleId u) {
    double h = std::numeric_limits<double>::infinity();
    for (const Point& g : goals) h = std::min(h, distance(scene.dual.centroids[u], g));
    return h;
  };
  MinQueue queue;
  for (TriangleId u : cdt.owned[s]) {
    SearchAccess::label(ws, u, 0.0, kNoTriangle);
    queue.emplace(heuristic(u), u);
  }
  TriangleId found = kNoTriangle;
  while (!queue.empty()) {
    const TriangleId u = queue.top().second;
    queue.pop();
    if (SearchAccess::settled(ws, u)) continue;
    SearchAccess::settle(ws, u);
    const double g = SearchAccess::dist(ws, u);
    if (cdt.triangles[u].owner == to) {
      found = u;
      break;
    }
    for (const DualArc& arc : scene.dual.arcsOf(u)) {
      const auto o = cdt.triangles[arc.to].owner;
      if (o != kNoOwner && o != so && o != to) continue;
      if (SearchAccess::settled(ws, arc.to)) continue;
      const double ng = g + arc.weight;
      if (ng < SearchAccess::dist(ws, arc.to)) {
        SearchAccess::label(ws, arc.to, ng, u);
        queue.emplace(ng + heuristic(arc.to), arc.to);
      }
    }
  }
  if (found == kNoTriangle) return std::nullopt;
  return extractSleeve(scene, ws, found);
}

Sleeve extractSleeve(const RoutingScene& scene, const SearchWorkspace& ws, TriangleId target) {
  const Cdt& cdt = scene.cdt;
  Sleeve sleeve;
  sleeve.cost = ws.distance(target);
  for (TriangleId t = target; t != kNoTriangle; t = ws.parent(t)) sleeve.triangles.push_back(t);
  std::reverse(sleeve.triangles.begin(), sleeve.triangles.end());
  for (std::size_t k = 0; k + 1 < sleeve.triangles.size(); ++k) {
    const TriangleId a = sleeve.triangles[k];
    const int i = cdt.sideToward(a, sleeve.triangles[k + 1]);
    const Triangle& T = cdt.triangles[a];
    const VertexId l = T.v[(i + 2) % 3];
    const VertexId r = T.v[(i + 1) % 3];
    sleeve.portals.push_back({cdt.points[l], cdt.points[r], l, r});
  }
  return sleeve;
}

namespace {

// Vertices of one chain (right when `rightChain`) to collapse onto `origin`.
std::unordered_set<VertexId> chainCollapse(const Sleeve& sleeve, const Cdt& cdt, NodeIndex node,
                                           const Point& origin, const Point& far, bool rightChain) {
  std::vector<VertexId> chain;
  for (const Portal& p : sleeve.portals) {
    const VertexId v = rightChain ? p.rightVertex : p.leftVertex;
    if (chain.empty() || chain.back() != v) chain.push_back(v);
  }
  const auto owner = static_cast<std::int32_t>(node);
  const int wanted = rightChain ? -1 : 1;
  Point prev = origin;
  std::ptrdiff_t last = -1;
  for (std::size_t j = 0; j < chain.size(); ++j) {
    const Point here = cdt.points[chain[j]];
    const Point next = j + 1 < chain.size() ? cdt.points[chain[j + 1]] : far;
    if (cdt.pointOwner[chain[j]] == owner && orient(prev, here, next) == wanted) {
      last = static_cast<std::ptrdiff_t>(j);
      break;
    }
    prev = here;
  }
  std::unordered_set<VertexId> out;
  for (std::ptrdiff_t j = 0; j <= last; ++j) {
    if (cdt.pointOwner[chain[j]] == owner) out.insert(chain[j]);
  }
  return out;
}

}  // namespace

Sleeve collapseEnds(const Sleeve& sleeve, const Cdt& cdt, NodeIndex s, NodeIndex t, const Point& sp,
                    const Point& tp) {
  // All decisions are taken on the uncollapsed chains.
  const auto sRight = chainCollapse(sleeve, cdt, s, sp, tp, true);
  const auto sLeft = chainCollapse(sleeve, cdt, s, sp, tp, false);
  const Sleeve back = sleeve.reversed();
  const auto tLeft = chainCollapse(back, cdt, t, tp, sp, true);  // right chain walking back
  const auto tRight = chainCollapse(back, cdt, t, tp, sp, false);

  Sleeve out;
  out.triangles = sleeve.triangles;
  out.cost = sleeve.cost;
  for (Portal p : sleeve.portals) {
    if (sRight.count(p.rightVertex)) {
      p.right = sp;
      p.rightVertex = kCollapsedVertex;
    } else if (tRight.count(p.rightVertex)) {
      p.right = tp;
      p.rightVertex = kCollapsedVertex;
    }
    if (sLeft.count(p.leftVertex)) {
      p.left = sp;
      p.leftVertex = kCollapsedVertex;
    } else if (tLeft.count(p.leftVertex)) {
      p.left = tp;
      p.leftVertex = kCollapsedVertex;
    }
    if (p.left == p.right) continue;
    out.portals.push_back(p);
  }
  return out;
}

Polyline funnel(std::span<const Portal> portals, const Point& sp, const Point& tp) {
  std::vector<std::pair<Point, Point>> gates;
  gates.reserve(portals.size() + 2);
  gates.emplace_back(sp, sp);
  for (const Portal& p : portals) gates.emplace_back(p.left, p.right);
  gates.emplace_back(tp, tp);

  std::vector<Point> path{sp};
  Point apex = sp, left = sp, right = sp;
  std::size_t apexIndex = 0, leftIndex = 0, rightIndex = 0;
  // A leg whose end coincides with the apex (a fan around the apex, or a portal
  // collapsed onto an endpoint) constrains nothing.
  for (std::size_t i = 1; i < gates.size(); ++i) {
    const Point& l = gates[i].first;
    const Point& r = gates[i].second;
    if (r == apex) {
      right = r;
      rightIndex = i;
    } else if (cross(right - apex, r - apex) >= 0.0) {
      if (left == apex || cross(left - apex, r - apex) < 0.0) {
        right = r;
        rightIndex = i;
      } else {
        path.push_back(left);
        apex = left;
        apexIndex = leftIndex;
        right = left = apex;
        rightIndex = leftIndex = apexIndex;
        i = apexIndex;
        continue;
      }
    }
    if (l == apex) {
      left = l;
      leftIndex = i;
    } else if (cross(left - apex, l - apex) <= 0.0) {
      if (right == apex || cross(right - apex, l - apex) > 0.0) {
        left = l;
        leftIndex = i;
      } else {
        path.push_back(right);
        apex = right;
        apexIndex = rightIndex;
        right = left = apex;
        rightIndex = leftIndex = apexIndex;
        i = apexIndex;
        continue;
      }
    }
  }
  path.push_back(tp);

  // Drop repeated points and vertices where the path runs straight on.
  Polyline out;
  for (const Point& p : path) {
    if (!out.vertices.empty() && out.vertices.back() == p) continue;
    while (out.vertices.size() >= 2) {
      const Point& a = out.vertices[out.vertices.size() - 2];
      const Point& b = out.vertices.back();
      if (orient(a, b, p) == 0 && dot(b - a, p - b) > 0.0) {
        out.vertices.pop_back();
      } else {
        break;
      }
    }
    out.vertices.push_back(p);
  }
  if (out.vertices.size() == 1) out.vertices.push_back(tp);
  return out;
}

namespace {

// Parameter in [0,1] at which the segment a->b (a inside, b outside) leaves the box.
double exitParameter(const Rect& box, const Point& a, const Point& b) {
  double t = 1.0;
  const Point d = b - a;
  if (d.x > 0.0) t = std::min(t, (box.max.x - a.x) / d.x);
  if (d.x < 0.0) t = std::min(t, (box.min.x - a.x) / d.x);
  if (d.y > 0.0) t = std::min(t, (box.max.y - a.y) / d.y);
  if (d.y < 0.0) t = std::min(t, (box.min.y - a.y) / d.y);
  return std::clamp(t, 0.0, 1.0);
}

Point snapToBoundary(const Rect& box, Point p) {
  const double dl = std::abs(p.x - box.min.x), dr = std::abs(p.x - box.max.x);
  const double db = std::abs(p.y - box.min.y), dt = std::abs(p.y - box.max.y);
  const double m = std::min({dl, dr, db, dt});
  if (m == dl) p.x = box.min.x;
  else if (m == dr) p.x = box.max.x;
  else if (m == db) p.y = box.min.y;
  else p.y = box.max.y;
  return p;
}

}  // namespace

TrimmedPath trimRoute(const Polyline& path, const Rect& sBox, const Rect& tBox) {
  const auto& v = path.vertices;
  const std::size_t n = v.size();
  TrimmedPath out;
  if (n < 2) {
    out.path = path;
    return out;
  }
  std::vector<double> at(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) at[i] = at[i - 1] + distance(v[i - 1], v[i]);

  // Start: first segment that leaves the source box.
  std::size_t first = 0;
  Point start = v[0];
  double startPos = 0.0;
  bool startFound = !sBox.contains(v[0]);
  for (std::size_t i = 0; i + 1 < n && !startFound; ++i) {
    if (sBox.contains(v[i + 1])) continue;
    const double u = exitParameter(sBox, v[i], v[i + 1]);
    start = snapToBoundary(sBox, v[i] + (v[i + 1] - v[i]) * u);
    startPos = at[i] + u * (at[i + 1] - at[i]);
    first = i + 1;
    startFound = true;
  }
  // End: last segment that enters the target box.
  std::size_t last = n - 1;
  Point end = v[n - 1];
  double endPos = at[n - 1];
  bool endFound = !tBox.contains(v[n - 1]);
  for (std::size_t i = n - 1; i > 0 && !endFound; --i) {
    if (tBox.contains(v[i - 1])) continue;
    const double u = exitParameter(tBox, v[i], v[i - 1]);
    end = snapToBoundary(tBox, v[i] + (v[i - 1] - v[i]) * u);
    endPos = at[i] - u * (at[i] - at[i - 1]);
    last = i - 1;
    endFound = true;
  }
  if (!startFound || !endFound || endPos <= startPos) {
    // Nothing of the route is visible between the boxes: keep a short stub at the middle.
    const double mid = 0.5 * (startFound ? startPos : 0.0) + 0.5 * (endFound ? endPos : at[n - 1]);
    const double half = 5e-4 * at[n - 1];
    out.path.vertices = {path.pointAtLength(mid - half), path.pointAtLength(mid + half)};
    out.stub = true;
    return out;
  }
  out.path.vertices.push_back(start);
  for (std::size_t i = first; i <= last; ++i) {
    if (!(out.path.vertices.back() == v[i])) out.path.vertices.push_back(v[i]);
  }
  if (!(out.path.vertices.back() == end)) out.path.vertices.push_back(end);
  if (out.path.vertices.size() < 2) out.path.vertices.push_back(end);
  return out;
}

std::vector<NodePair> edgePairs(const LaidOutGraph& g) {
  std::vector<NodePair> out;
  out.reserve(g.edges.size());
  for (const auto& e : g.edges) out.emplace_back(e.source, e.target);
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Task {
  NodeIndex root = 0;
  std::vector<EdgeIndex> edges;
};

struct TaskOutcome {
  std::size_t expansions = 0;
  std::size_t failures = 0;
  double searchSeconds = 0.0;
  double geometrySeconds = 0.0;
};

void finishSleeve(const RoutingScene& scene, Route& route, const Sleeve& sleeve, const RouterOptions& options) {
  route.kind = RouteKind::Sleeve;
  route.dualCost = sleeve.cost;
  if (options.keepSleeves) route.sleeve = sleeve.triangles;
  const Point sp = scene.centers[route.source];
  const Point tp = scene.centers[route.target];
  if (options.collapse) {
    const Sleeve collapsed = collapseEnds(sleeve, scene.cdt, route.source, route.target, sp, tp);
    route.centerline = funnel(collapsed.portals, sp, tp);
  } else {
    route.centerline = funnel(sleeve.portals, sp, tp);
  }
}

void finishFallback(const RoutingScene& scene, Route& route) {
  route.kind = RouteKind::Fallback;
  route.centerline.vertices = {scene.centers[route.source], scene.centers[route.target]};
}

}  // namespace

RoutingResult routeAll(const RoutingScene& scene, std::span<const NodePair> edges, const RouterOptions& options) {
  const auto t0 = Clock::now();
  RoutingResult result;
  RoutingStats& stats = result.stats;
  stats.edges = edges.size();
  result.routes.resize(edges.size());
  for (EdgeIndex e = 0; e < edges.size(); ++e) {
    result.routes[e].edge = e;
    result.routes[e].source = edges[e].first;
    result.routes[e].target = edges[e].second;
  }
  const int threads = resolveThreads(options.threads);

  std::vector<char> pending(edges.size(), 1);
  if (options.straightProbe) {
    const auto tp = Clock::now();
    parallelFor(edges.size(), threads, [&](std::size_t, std::size_t e) {
      if (auto seg = straightProbe(scene, edges[e].first, edges[e].second)) {
        result.routes[e].kind = RouteKind::Straight;
        result.routes[e].centerline = std::move(*seg);
        pending[e] = 0;
      }
    });
    stats.probeSeconds = secondsSince(tp);
    stats.probeHits = static_cast<std::size_t>(std::count(pending.begin(), pending.end(), 0));
  }

  {
    std::set<NodeIndex> sources;
    for (auto [a, b] : edges) sources.insert(std::min(a, b));
    stats.sources = sources.size();
  }

  // Group pending edges into searches.
  std::vector<Task> tasks;
  if (options.mode == RoutingMode::AStar) {
    stats.roots = edges.size();
    for (EdgeIndex e = 0; e < edges.size(); ++e) {
      if (pending[e]) tasks.push_back({edges[e].first, {e}});
    }
  } else {
    std::vector<NodeIndex> rootOf(edges.size());
    std::vector<NodeIndex> order;
    if (options.mode == RoutingMode::VcDijkstra) {
      VertexCover cover = greedyVertexCover(scene.nodeCount(), edges);
      rootOf = std::move(cover.edgeRoot);
      order = std::move(cover.roots);
    } else {
      std::set<NodeIndex> roots;
      for (EdgeIndex e = 0; e < edges.size(); ++e) {
        rootOf[e] = std::min(edges[e].first, edges[e].second);
        roots.insert(rootOf[e]);
      }
      order.assign(roots.begin(), roots.end());
    }
    stats.roots = order.size();
    std::vector<std::int64_t> taskOf(scene.nodeCount(), -1);
    for (NodeIndex r : order) {
      taskOf[r] = static_cast<std::int64_t>(tasks.size());
      tasks.push_back({r, {}});
    }
    for (EdgeIndex e = 0; e < edges.size(); ++e) {
      if (pending[e]) tasks[taskOf[rootOf[e]]].edges.push_back(e);
    }
    std::erase_if(tasks, [](const Task& t) { return t.edges.empty(); });
  }
  stats.treesLaunched = tasks.size();

  std::vector<SearchWorkspace> workspaces(static_cast<std::size_t>(threads));
  std::vector<TaskOutcome> outcomes(tasks.size());
  parallelFor(tasks.size(), threads, [&](std::size_t worker, std::size_t i) {
    const Task& task = tasks[i];
    SearchWorkspace& ws = workspaces[worker];
    TaskOutcome& outcome = outcomes[i];
    if (options.mode == RoutingMode::AStar) {
      Route& route = result.routes[task.edges.front()];
      const auto ts = Clock::now();
      auto sleeve = astarSingle(scene, route.source, route.target, ws);
      outcome.searchSeconds += secondsSince(ts);
      outcome.expansions += ws.expansions();
      const auto tg = Clock::now();
      if (sleeve) {
        finishSleeve(scene, route, *sleeve, options);
      } else {
        finishFallback(scene, route);
        ++outcome.failures;
      }
      outcome.geometrySeconds += secondsSince(tg);
      return;
    }
    std::vector<NodeIndex> targets;
    for (EdgeIndex e : task.edges) {
      targets.push_back(edges[e].first == task.root ? edges[e].second : edges[e].first);
    }
    const auto ts = Clock::now();
    const auto reached = dijkstraTree(scene, task.root, targets, ws);
    outcome.searchSeconds += secondsSince(ts);
    outcome.expansions += ws.expansions();
    const auto tg = Clock::now();
    for (std::size_t k = 0; k < task.edges.size(); ++k) {
      Route& route = result.routes[task.edges[k]];
      if (reached[k] == kNoTriangle) {
        finishFallback(scene, route);
        ++outcome.failures;
        continue;
      }
      Sleeve sleeve = extractSleeve(scene, ws, reached[k]);
      if (route.source != task.root) sleeve = sleeve.reversed();
      finishSleeve(scene, route, sleeve, options);
    }
    outcome.geometrySeconds += secondsSince(tg);
  });
  for (const auto& o : outcomes) {
    stats.expansions += o.expansions;
    stats.failures += o.failures;
    stats.searchSeconds += o.searchSeconds;
    stats.geometrySeconds += o.geometrySeconds;
  }

  const auto tt = Clock::now();
  parallelFor(edges.size(), threads, [&](std::size_t, std::size_t e) {
    Route& route = result.routes[e];
    auto trimmed = trimRoute(route.centerline, scene.boxes[route.source], scene.boxes[route.target]);
    route.path = std::move(trimmed.path);
    route.stub = trimmed.stub;
  });
  stats.geometrySeconds += secondsSince(tt);
  stats.totalSeconds = secondsSince(t0);
  return result;
}

}  // namespace sleevemap
