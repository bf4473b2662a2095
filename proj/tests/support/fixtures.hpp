#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sleevemap/graph_model.hpp"
#include "sleevemap/sleeve_router.hpp"

namespace sleevemap::fixtures {

/// Desk-scale instance: `nodes` random disjoint boxes and `edges` random node pairs.
LaidOutGraph randomInstance(std::uint64_t seed, int nodes, int edges);

/// Same, with node and edge counts drawn from the given ranges.
LaidOutGraph randomInstance(std::uint64_t seed, int minNodes, int maxNodes, int minEdges, int maxEdges);

/// Seeded stand-in with the size of the Game of Thrones benchmark (407 nodes,
/// 2639 edges): preferential attachment plus a force-directed placement.
LaidOutGraph surrogateGotGraph(std::uint64_t seed = 2018);

/// Scale-free graph of the requested size with a force-directed placement.
LaidOutGraph socialGraph(std::uint64_t seed, int nodes, int edges);

/// Routing scene with uniform padding.
RoutingScene sceneFor(const LaidOutGraph& g, double padding);

/// Triangles of a sleeve as point triples.
std::vector<std::array<Point, 3>> sleeveTriangles(const Cdt& cdt, const Sleeve& sleeve);

/// Independent single-pair Dijkstra over triangle adjacency between the fans of s
/// and t, through unowned triangles only; infinity when unreachable.
double referenceDualDistance(const Cdt& cdt, NodeIndex s, NodeIndex t);

/// Brute-force convex polygon disjointness (separating axis test).
bool polygonsOverlap(const ConvexPolygon& a, const ConvexPolygon& b);

/// Directory holding the optional benchmark datasets (env SLEEVEMAP_DATA_DIR or <repo>/data).
std::string dataDirectory();

}  // namespace sleevemap::fixtures
