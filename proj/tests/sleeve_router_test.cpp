#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "sleevemap/oracle.hpp"
#include "sleevemap/sleeve_router.hpp"

namespace sleevemap {
namespace {

using fixtures::sceneFor;

using fixtures::referenceDualDistance;

bool isCover(std::span<const NodePair> edges, const std::vector<NodeIndex>& cover) {
  std::set<NodeIndex> c(cover.begin(), cover.end());
  return std::all_of(edges.begin(), edges.end(), [&](const NodePair& e) { return c.count(e.first) || c.count(e.second); });
}

TEST(StraightProbe, EmptySpaceAndBlocked) {
  auto g = parseGraph(R"({"nodes":[{"id":"a","x":0,"y":0},{"id":"b","x":10,"y":0}],"edges":[]})", GraphFormat::Json);
  auto scene = sceneFor(g, 0.2);
  auto seg = straightProbe(scene, 0, 1);
  ASSERT_TRUE(seg.has_value());
  EXPECT_EQ(seg->vertices.front(), (Point{0, 0}));
  EXPECT_EQ(seg->vertices.back(), (Point{10, 0}));

  auto g2 = parseGraph(R"({"nodes":[{"id":"a","x":0,"y":0},{"id":"b","x":10,"y":0},{"id":"c","x":5,"y":0}]})",
                       GraphFormat::Json);
  auto scene2 = sceneFor(g2, 0.2);
  EXPECT_FALSE(straightProbe(scene2, 0, 1).has_value());
  EXPECT_TRUE(straightProbe(scene2, 0, 2).has_value());
}

TEST(StraightProbe, AgreesWithBruteForce) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto g = fixtures::randomInstance(seed, 10, 0);
    const auto obs = buildObstacles(g, 0.3);
    const auto scene = makeRoutingScene(g, obs);
    std::vector<Point> centers = scene.centers;
    VisibilityOracle oracle(obs.polygons, centers);
    for (NodeIndex s = 0; s < g.nodeCount(); ++s) {
      for (NodeIndex t = 0; t < g.nodeCount(); ++t) {
        if (s == t) continue;
        const bool probe = straightProbe(scene, s, t).has_value();
        const bool brute = oracle.clear(centers[s], centers[t], static_cast<std::int64_t>(s), static_cast<std::int64_t>(t));
        EXPECT_EQ(probe, brute) << "seed " << seed << " " << s << "->" << t;
      }
    }
  }
}

TEST(VertexCover, StarAndTriangle) {
  std::vector<NodePair> star{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}};
  auto vc = greedyVertexCover(6, star);
  EXPECT_EQ(vc.roots, std::vector<NodeIndex>{0});
  for (NodeIndex r : vc.edgeRoot) EXPECT_EQ(r, 0u);

  std::vector<NodePair> tri{{0, 1}, {1, 2}, {2, 0}};
  vc = greedyVertexCover(3, tri);
  EXPECT_EQ(vc.roots.size(), 2u);
  EXPECT_TRUE(isCover(tri, vc.roots));
  for (NodeIndex v = 0; v < 3; ++v) EXPECT_FALSE(isCover(tri, {v}));
  EXPECT_EQ(vc.roots.front(), 0u);  // ties to the lowest index
}

TEST(VertexCover, RandomGraphsValidAndAssignedToFirstRemoved) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<NodePair> edges;
    const std::size_t m = rng() % 80;
    for (std::size_t k = 0; k < m; ++k) {
      NodeIndex a = rng() % n, b = rng() % n;
      if (a != b) edges.emplace_back(a, b);
    }
    const auto vc = greedyVertexCover(n, edges);
    EXPECT_TRUE(isCover(edges, vc.roots));
    std::vector<std::size_t> rank(n, SIZE_MAX);
    for (std::size_t i = 0; i < vc.roots.size(); ++i) rank[vc.roots[i]] = i;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto [a, b] = edges[e];
      EXPECT_TRUE(vc.edgeRoot[e] == a || vc.edgeRoot[e] == b);
      EXPECT_EQ(rank[vc.edgeRoot[e]], std::min(rank[a], rank[b]));
    }
  }
}

TEST(DijkstraTree, TwoNodeTreeReachesTarget) {
  auto g = parseGraph(R"({"nodes":[{"id":"a","x":0,"y":0},{"id":"b","x":3,"y":0}]})", GraphFormat::Json);
  auto scene = sceneFor(g, 0.2);
  SearchWorkspace ws;
  std::vector<NodeIndex> targets{1};
  const auto reached = dijkstraTree(scene, 0, targets, ws);
  ASSERT_NE(reached[0], kNoTriangle);
  EXPECT_EQ(scene.cdt.triangles[reached[0]].owner, 1);
  const auto sleeve = extractSleeve(scene, ws, reached[0]);
  EXPECT_EQ(scene.cdt.triangles[sleeve.triangles.front()].owner, 0);
  EXPECT_EQ(sleeve.portals.size() + 1, sleeve.triangles.size());
}

TEST(DijkstraTree, DistancesMatchReference) {
  std::mt19937_64 rng(77);
  int pairs = 0;
  for (std::uint64_t seed = 1; pairs < 100; ++seed) {
    const auto g = fixtures::randomInstance(seed, 12, 0);
    const auto scene = sceneFor(g, 0.3);
    SearchWorkspace ws;
    for (int k = 0; k < 5; ++k, ++pairs) {
      const NodeIndex s = rng() % g.nodeCount();
      std::vector<NodeIndex> targets;
      for (NodeIndex t = 0; t < g.nodeCount(); ++t) {
        if (t != s && rng() % 2) targets.push_back(t);
      }
      const auto reached = dijkstraTree(scene, s, targets, ws);
      for (std::size_t i = 0; i < targets.size(); ++i) {
        ASSERT_NE(reached[i], kNoTriangle);
        const double ref = referenceDualDistance(scene.cdt, s, targets[i]);
        EXPECT_NEAR(ws.distance(reached[i]), ref, 1e-12 * ref);
        const auto sleeve = extractSleeve(scene, ws, reached[i]);
        double sum = 0.0;
        for (std::size_t j = 0; j + 1 < sleeve.triangles.size(); ++j) {
          sum += distance(scene.cdt.centroid(sleeve.triangles[j]), scene.cdt.centroid(sleeve.triangles[j + 1]));
        }
        EXPECT_NEAR(sum, ref, 1e-9 * ref);
      }
    }
  }
}

TEST(AStar, CostEqualsDijkstra) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto g = fixtures::randomInstance(seed, 3, 15, 5, 40);
    const auto scene = sceneFor(g, 0.3);
    SearchWorkspace ws;
    for (const auto& e : g.edges) {
      const auto sleeve = astarSingle(scene, e.source, e.target, ws);
      ASSERT_TRUE(sleeve.has_value());
      const double ref = referenceDualDistance(scene.cdt, e.source, e.target);
      EXPECT_NEAR(sleeve->cost, ref, 1e-12 * ref);
    }
  }
}

TEST(ExtractSleeve, PortalOrientation) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = fixtures::randomInstance(seed, 3, 15, 5, 40);
    const auto scene = sceneFor(g, 0.3);
    SearchWorkspace ws;
    for (const auto& e : g.edges) {
      const auto sleeve = astarSingle(scene, e.source, e.target, ws);
      ASSERT_TRUE(sleeve.has_value());
      ASSERT_EQ(sleeve->portals.size() + 1, sleeve->triangles.size());
      for (std::size_t k = 0; k < sleeve->portals.size(); ++k) {
        const Point c = scene.cdt.centroid(sleeve->triangles[k]);
        EXPECT_GT(cross(sleeve->portals[k].left - sleeve->portals[k].right, c - sleeve->portals[k].right), 0.0);
        const Point next = scene.cdt.centroid(sleeve->triangles[k + 1]);
        EXPECT_LT(cross(sleeve->portals[k].left - sleeve->portals[k].right, next - sleeve->portals[k].right), 0.0);
      }
      for (std::size_t k = 1; k + 1 < sleeve->triangles.size(); ++k) {
        EXPECT_EQ(scene.cdt.triangles[sleeve->triangles[k]].owner, kNoOwner);
      }
    }
  }
}

TEST(Funnel, TrivialCases) {
  std::vector<Portal> none;
  auto p = funnel(none, {0, 0}, {1, 1});
  EXPECT_EQ(p.vertices.size(), 2u);
  // Corridor bending around (1,1): portals from the L-shape.
  std::vector<Portal> portals{{{0, 0}, {2, 1}}, {{0, 0}, {1, 1}}, {{0, 1}, {1, 1}}, {{0, 1}, {1, 3}}};
  p = funnel(portals, {1.8, 0.2}, {0.2, 2.8});
  ASSERT_EQ(p.vertices.size(), 3u);
  EXPECT_EQ(p.vertices[1], (Point{1, 1}));
}

TEST(Funnel, MatchesPolygonGeodesic) {
  int checked = 0;
  for (std::uint64_t seed = 1; checked < 100; ++seed) {
    const auto g = fixtures::randomInstance(seed, 3, 15, 5, 40);
    const auto scene = sceneFor(g, 0.3);
    SearchWorkspace ws;
    for (const auto& e : g.edges) {
      const auto sleeve = astarSingle(scene, e.source, e.target, ws);
      ASSERT_TRUE(sleeve.has_value());
      const Point s = scene.centers[e.source], t = scene.centers[e.target];
      const auto path = funnel(sleeve->portals, s, t);
      const auto oracle = polygonGeodesic(fixtures::sleeveTriangles(scene.cdt, *sleeve), s, t);
      EXPECT_NEAR(path.length(), oracle.length, 1e-9 * oracle.length) << "seed " << seed;
      // Interior vertices are portal endpoints.
      for (std::size_t k = 1; k + 1 < path.vertices.size(); ++k) {
        const Point v = path.vertices[k];
        EXPECT_TRUE(std::any_of(sleeve->portals.begin(), sleeve->portals.end(),
                                [&](const Portal& q) { return q.left == v || q.right == v; }));
      }
      ++checked;
    }
  }
}

TEST(CollapseEnds, IdentityWithoutOwnedChainVertices) {
  const auto g = fixtures::randomInstance(3, 8, 10);
  const auto scene = sceneFor(g, 0.3);
  SearchWorkspace ws;
  const auto& e = g.edges[0];
  const auto sleeve = astarSingle(scene, e.source, e.target, ws);
  ASSERT_TRUE(sleeve.has_value());
  // Collapse against nodes that own none of the chain vertices.
  NodeIndex other = 0;
  while (other == e.source || other == e.target) ++other;
  const auto same = collapseEnds(*sleeve, scene.cdt, other, other, scene.centers[e.source], scene.centers[e.target]);
  ASSERT_EQ(same.portals.size(), sleeve->portals.size());
  for (std::size_t k = 0; k < same.portals.size(); ++k) {
    EXPECT_EQ(same.portals[k].left, sleeve->portals[k].left);
    EXPECT_EQ(same.portals[k].right, sleeve->portals[k].right);
  }
}

TEST(CollapseEnds, RemovesCornerDetour) {
  // The target sits diagonally below the source, so the source's exit side
  // forces the uncollapsed path around a corner of the source obstacle.
  auto g = parseGraph(R"({"nodes":[{"id":"s","x":0,"y":0,"width":4,"height":1},
                                    {"id":"t","x":4,"y":-3,"width":1,"height":1}]})",
                      GraphFormat::Json);
  const auto scene = sceneFor(g, 0.5);
  SearchWorkspace ws;
  const auto sleeve = astarSingle(scene, 0, 1, ws);
  ASSERT_TRUE(sleeve.has_value());
  const Point s = scene.centers[0], t = scene.centers[1];
  const auto plain = funnel(sleeve->portals, s, t);
  const auto collapsed = collapseEnds(*sleeve, scene.cdt, 0, 1, s, t);
  const auto taut = funnel(collapsed.portals, s, t);
  EXPECT_LE(taut.length(), plain.length() + 1e-12);
  EXPECT_LT(taut.length(), plain.length() - 1e-9) << "expected a detour around a source corner";
  EXPECT_NEAR(taut.length(), distance(s, t), 1e-9);
}

TEST(CollapseEnds, NeverLongerAndSymmetric) {
  int shorter = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const auto g = fixtures::randomInstance(seed, 3, 15, 5, 40);
    const auto scene = sceneFor(g, 0.3);
    SearchWorkspace ws;
    for (const auto& e : g.edges) {
      const auto sleeve = astarSingle(scene, e.source, e.target, ws);
      ASSERT_TRUE(sleeve.has_value());
      const Point s = scene.centers[e.source], t = scene.centers[e.target];
      const auto fwd = collapseEnds(*sleeve, scene.cdt, e.source, e.target, s, t);
      const auto bwd = collapseEnds(sleeve->reversed(), scene.cdt, e.target, e.source, t, s).reversed();
      ASSERT_EQ(fwd.portals.size(), bwd.portals.size());
      for (std::size_t k = 0; k < fwd.portals.size(); ++k) {
        EXPECT_EQ(fwd.portals[k].left, bwd.portals[k].left);
        EXPECT_EQ(fwd.portals[k].right, bwd.portals[k].right);
      }
      const double before = funnel(sleeve->portals, s, t).length();
      const double after = funnel(fwd.portals, s, t).length();
      EXPECT_LE(after, before * (1 + 1e-12));
      shorter += after < before * (1 - 1e-9);
    }
  }
  EXPECT_GT(shorter, 0);
}

TEST(TrimRoute, StraightBetweenBoxes) {
  Polyline p{{{0, 0}, {10, 0}}};
  const auto r = trimRoute(p, Rect::around({0, 0}, 2, 2), Rect::around({10, 0}, 4, 2));
  ASSERT_EQ(r.path.vertices.size(), 2u);
  EXPECT_EQ(r.path.vertices[0], (Point{1, 0}));
  EXPECT_EQ(r.path.vertices[1], (Point{8, 0}));
  EXPECT_FALSE(r.stub);
}

TEST(TrimRoute, OnlyEndsChange) {
  Polyline p{{{0, 0}, {3, 3}, {6, -2}, {10, 0}}};
  const auto r = trimRoute(p, Rect::around({0, 0}, 2, 2), Rect::around({10, 0}, 2, 2));
  ASSERT_EQ(r.path.vertices.size(), 4u);
  EXPECT_EQ(r.path.vertices[1], (Point{3, 3}));
  EXPECT_EQ(r.path.vertices[2], (Point{6, -2}));
  EXPECT_DOUBLE_EQ(r.path.vertices[0].x, 1.0);
  EXPECT_DOUBLE_EQ(r.path.vertices[0].y, 1.0);
}

TEST(TrimRoute, OverlappingBoxesGiveStub) {
  Polyline p{{{0, 0}, {1, 0}}};
  const auto r = trimRoute(p, Rect::around({0, 0}, 4, 2), Rect::around({1, 0}, 4, 2));
  EXPECT_TRUE(r.stub);
  EXPECT_EQ(r.path.vertices.size(), 2u);
}

double boxBoundaryDistance(const Rect& b, const Point& p) {
  const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x});
  const double dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
  if (dx > 0 || dy > 0) return std::hypot(dx, dy);
  return std::min({p.x - b.min.x, b.max.x - p.x, p.y - b.min.y, b.max.y - p.y});
}

TEST(RouteAll, ModesAgreeAndEndpointsOnBoundaries) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto g = fixtures::randomInstance(seed, 3, 15, 5, 40);
    const auto scene = sceneFor(g, 0.3);
    const auto edges = edgePairs(g);
    RouterOptions opt;
    opt.straightProbe = false;
    std::vector<RoutingResult> results;
    for (RoutingMode m : {RoutingMode::AStar, RoutingMode::Dijkstra, RoutingMode::VcDijkstra}) {
      opt.mode = m;
      results.push_back(routeAll(scene, edges, opt));
    }
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const double ref = referenceDualDistance(scene.cdt, edges[e].first, edges[e].second);
      for (const auto& r : results) {
        ASSERT_EQ(r.routes[e].kind, RouteKind::Sleeve);
        EXPECT_NEAR(r.routes[e].dualCost, ref, 1e-12 * ref);
      }
      const Route& route = results[2].routes[e];
      if (route.stub) continue;
      const double scale = 1e-9 * std::max(1.0, route.centerline.length());
      EXPECT_LE(boxBoundaryDistance(scene.boxes[route.source], route.path.vertices.front()), scale);
      EXPECT_LE(boxBoundaryDistance(scene.boxes[route.target], route.path.vertices.back()), scale);
    }
    EXPECT_EQ(results[2].stats.roots, greedyVertexCover(g.nodeCount(), edges).roots.size());
  }
}

TEST(RouteAll, StraightRoutesAvoidObstacles) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = fixtures::randomInstance(seed, 3, 15, 5, 40);
    const auto obs = buildObstacles(g, 0.3);
    const auto scene = makeRoutingScene(g, obs);
    VisibilityOracle oracle(obs.polygons, scene.centers);
    const auto res = routeAll(scene, edgePairs(g), {});
    for (const auto& r : res.routes) {
      if (r.kind != RouteKind::Straight) continue;
      EXPECT_TRUE(oracle.clear(r.centerline.vertices.front(), r.centerline.vertices.back(),
                               static_cast<std::int64_t>(r.source), static_cast<std::int64_t>(r.target)));
    }
  }
}

TEST(RouteAll, EmptyEdgeList) {
  const auto g = fixtures::randomInstance(2, 5, 0);
  const auto scene = sceneFor(g, 0.3);
  const auto res = routeAll(scene, {}, {});
  EXPECT_TRUE(res.routes.empty());
  EXPECT_EQ(res.stats.roots, 0u);
}

TEST(RouteAll, ThreadCountDoesNotChangeOutput) {
  const auto g = fixtures::randomInstance(9, 15, 40);
  const auto scene = sceneFor(g, 0.3);
  const auto edges = edgePairs(g);
  RouterOptions one, four;
  four.threads = 4;
  const auto a = routeAll(scene, edges, one);
  const auto b = routeAll(scene, edges, four);
  ASSERT_EQ(a.routes.size(), b.routes.size());
  for (std::size_t e = 0; e < a.routes.size(); ++e) {
    EXPECT_EQ(a.routes[e].path.vertices, b.routes[e].path.vertices);
  }
  EXPECT_EQ(a.stats.expansions, b.stats.expansions);
}

TEST(RouteAll, RouteLengthBoundedBelowByVisibilityOptimum) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto g = fixtures::randomInstance(seed, 10, 20);
    const auto obs = buildObstacles(g, 0.3);
    const auto scene = makeRoutingScene(g, obs);
    VisibilityOracle oracle(obs.polygons, scene.centers);
    RouterOptions plain;
    plain.collapse = false;
    const auto res = routeAll(scene, edgePairs(g), plain);
    for (const auto& r : res.routes) {
      const double opt = oracle.shortestPath(r.source, r.target).length;
      EXPECT_GE(r.centerline.length(), opt * (1 - 1e-9)) << "seed " << seed << " edge " << r.edge;
    }
  }
}

}  // namespace
}  // namespace sleevemap
