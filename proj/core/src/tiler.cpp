#include "sleevemap/tiler.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <unordered_map>

#include "sleevemap/parallel.hpp"

namespace sleevemap {

namespace {

double secondsSince(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double clampBetween(double v, double a, double b) { return std::clamp(v, std::min(a, b), std::max(a, b)); }

}  // namespace

TileGrid::TileGrid(const Rect& root) : root_(root), side_(std::max(root.width(), root.height())) {}

TileGrid TileGrid::around(const Rect& bounds) {
  double extent = bounds.isEmpty() ? 1.0 : std::max(bounds.width(), bounds.height());
  if (!(extent > 0.0)) extent = 1.0;
  double side = std::ldexp(1.0, static_cast<int>(std::ceil(std::log2(extent))));
  while (side < extent) side *= 2.0;
  const Point c = bounds.isEmpty() ? Point{} : bounds.center();
  TileGrid grid;
  grid.side_ = side;
  grid.root_ = {{c.x - side * 0.5, c.y - side * 0.5}, {c.x + side * 0.5, c.y + side * 0.5}};
  return grid;
}

double TileGrid::tileSide(int z) const { return std::ldexp(side_, -z); }

double TileGrid::lineX(int z, std::uint32_t i) const { return root_.min.x + side_ * std::ldexp(double(i), -z); }
double TileGrid::lineY(int z, std::uint32_t i) const { return root_.min.y + side_ * std::ldexp(double(i), -z); }

Rect TileGrid::tileRect(int z, TileKey key) const {
  return {{lineX(z, key.x), lineY(z, key.y)}, {lineX(z, key.x + 1), lineY(z, key.y + 1)}};
}

TileKey TileGrid::tileOf(int z, const Point& p) const {
  TileKey k;
  // Descend through the midlines so the answer agrees with clip splitting.
  for (int l = 0; l < z; ++l) {
    k.x = 2 * k.x + (p.x > lineX(l + 1, 2 * k.x + 1) ? 1 : 0);
    k.y = 2 * k.y + (p.y > lineY(l + 1, 2 * k.y + 1) ? 1 : 0);
  }
  return k;
}

std::size_t TileLevel::maxElements() const {
  std::size_t m = 0;
  for (const auto& [key, tile] : tiles) m = std::max(m, tile.elementCount());
  return m;
}

std::size_t TileLevel::elementCount() const {
  std::size_t n = 0;
  for (const auto& [key, tile] : tiles) n += tile.elementCount();
  return n;
}

std::vector<Polyline> cutAtAxisLines(const Polyline& curve, std::span<const double> xs, std::span<const double> ys) {
  std::vector<Polyline> out;
  const auto& v = curve.vertices;
  if (v.size() < 2) return out;
  Polyline cur;
  cur.vertices.push_back(v[0]);
  auto append = [&](const Point& p) {
    if (cur.vertices.back() != p) cur.vertices.push_back(p);
  };
  auto cutAt = [&](const Point& p) {
    append(p);
    if (cur.vertices.size() >= 2) out.push_back(std::move(cur));
    cur = Polyline{{p}};
  };
  struct Cut {
    double t;
    int axis;  // 0 vertical line, 1 horizontal
    double value;
  };
  std::vector<Cut> cuts;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const Point a = v[i], b = v[i + 1];
    const bool last = i + 2 == v.size();
    cuts.clear();
    bool endsOnLine = false;
    auto scan = [&](std::span<const double> lines, int axis) {
      for (double c : lines) {
        const double da = (axis == 0 ? a.x : a.y) - c;
        const double db = (axis == 0 ? b.x : b.y) - c;
        if (db == 0.0) {
          endsOnLine = true;
        } else if (da != 0.0 && (da < 0.0) != (db < 0.0)) {
          cuts.push_back({da / (da - db), axis, c});
        }
      }
    };
    scan(xs, 0);
    scan(ys, 1);
    std::sort(cuts.begin(), cuts.end(), [](const Cut& p, const Cut& q) { return p.t < q.t; });
    for (std::size_t c = 0; c < cuts.size();) {
      Point p{clampBetween(a.x + cuts[c].t * (b.x - a.x), a.x, b.x), clampBetween(a.y + cuts[c].t * (b.y - a.y), a.y, b.y)};
      std::size_t d = c;
      // Crossings through a grid corner arrive as two nearly equal parameters.
      for (; d < cuts.size() && cuts[d].t - cuts[c].t <= 1e-12; ++d) {
        (cuts[d].axis == 0 ? p.x : p.y) = cuts[d].value;
      }
      cutAt(p);
      c = d;
    }
    if (endsOnLine && !last) {
      cutAt(b);
    } else {
      append(b);
    }
  }
  if (cur.vertices.size() >= 2) out.push_back(std::move(cur));
  return out;
}

std::vector<Polyline> clipToRect(const Polyline& curve, const Rect& rect) {
  const std::array<double, 2> xs{rect.min.x, rect.max.x}, ys{rect.min.y, rect.max.y};
  std::vector<Polyline> out;
  for (auto& piece : cutAtAxisLines(curve, xs, ys)) {
    const auto& v = piece.vertices;
    const bool inside = std::all_of(v.begin(), v.end(), [&](const Point& p) { return rect.contains(p); });
    if (!inside) continue;
    bool interior = false;
    for (std::size_t i = 0; i + 1 < v.size() && !interior; ++i) {
      interior = rect.strictlyContains((v[i] + v[i + 1]) * 0.5);
    }
    if (interior) out.push_back(std::move(piece));
  }
  return out;
}

std::vector<std::pair<int, EdgeClip>> splitClipAt(const EdgeClip& clip, double midX, double midY) {
  const std::array<double, 1> xs{midX}, ys{midY};
  std::vector<std::pair<int, EdgeClip>> out;
  for (auto& piece : cutAtAxisLines(clip.curve, xs, ys)) {
    const auto& v = piece.vertices;
    const int qx = std::any_of(v.begin(), v.end(), [&](const Point& p) { return p.x > midX; }) ? 1 : 0;
    const int qy = std::any_of(v.begin(), v.end(), [&](const Point& p) { return p.y > midY; }) ? 1 : 0;
    out.push_back({qx + 2 * qy, EdgeClip{std::move(piece), clip.edges}});
  }
  return out;
}

std::vector<std::pair<int, EdgeClip>> splitClipByMidlines(const EdgeClip& clip, const Rect& tile) {
  const Point c = tile.center();
  return splitClipAt(clip, c.x, c.y);
}

void bundleClips(TileData& tile, double tol) {
  if (tile.clips.size() < 2) return;
  const double cell = tol > 0.0 ? tol : 1e-300;
  struct CellHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& k) const {
      return std::hash<std::int64_t>()(k.first * 73856093 ^ k.second * 19349663);
    }
  };
  std::unordered_map<std::pair<std::int64_t, std::int64_t>, std::vector<std::size_t>, CellHash> grid;
  auto cellOf = [&](const Point& p) {
    return std::pair<std::int64_t, std::int64_t>{static_cast<std::int64_t>(std::floor(p.x / cell)),
                                                 static_cast<std::int64_t>(std::floor(p.y / cell))};
  };
  auto near = [&](const Point& p, const Point& q) { return distance(p, q) <= tol; };
  std::vector<EdgeClip> kept;
  std::vector<std::size_t> candidates;
  for (auto& clip : tile.clips) {
    const Point a = clip.curve.vertices.front(), b = clip.curve.vertices.back();
    candidates.clear();
    const auto [cx, cy] = cellOf(a);
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find({cx + dx, cy + dy});
        if (it != grid.end()) candidates.insert(candidates.end(), it->second.begin(), it->second.end());
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    bool merged = false;
    for (std::size_t k : candidates) {
      const Point ka = kept[k].curve.vertices.front(), kb = kept[k].curve.vertices.back();
      if ((near(ka, a) && near(kb, b)) || (near(ka, b) && near(kb, a))) {
        kept[k].edges.insert(kept[k].edges.end(), clip.edges.begin(), clip.edges.end());
        merged = true;
        break;
      }
    }
    if (merged) continue;
    const std::size_t id = kept.size();
    grid[cellOf(a)].push_back(id);
    if (cellOf(b) != cellOf(a)) grid[cellOf(b)].push_back(id);
    kept.push_back(std::move(clip));
  }
  tile.clips = std::move(kept);
}

bool meetsBoundaryOnlyAtEnds(const Polyline& curve, const Rect& rect) {
  const auto& v = curve.vertices;
  if (v.size() < 2) return false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!rect.contains(v[i])) return false;
    if (i > 0 && i + 1 < v.size() && !rect.strictlyContains(v[i])) return false;
  }
  if (v.size() == 2) {
    const Point a = v[0], b = v[1];
    const bool alongSide = (a.x == b.x && (a.x == rect.min.x || a.x == rect.max.x)) ||
                           (a.y == b.y && (a.y == rect.min.y || a.y == rect.max.y));
    if (alongSide) return false;
  }
  return true;
}

Annotations placeLabelsAndArrowheads(const LaidOutGraph& g, std::span<const ScaledNode> nodes,
                                     std::span<const Route> routes, bool arrowheads) {
  Annotations out;
  for (const auto& n : nodes) {
    const auto& rec = g.nodes[n.node];
    if (!rec.label.empty()) out.labels.push_back({rec.label, rec.center, false, n.node});
  }
  for (const auto& r : routes) {
    const auto& v = r.path.vertices;
    if (v.empty()) continue;
    const auto& text = g.edges[r.edge].label;
    if (!text.empty()) out.labels.push_back({text, r.path.pointAtLength(r.path.length() * 0.5), true, r.edge});
    if (!arrowheads) continue;
    const Point tip = v.back();
    for (std::size_t i = v.size() - 1; i-- > 0;) {
      const Point d = tip - v[i];
      const double len = norm(d);
      if (len > 0.0) {
        out.arrowheads.push_back({tip, d * (1.0 / len), r.edge});
        break;
      }
    }
  }
  return out;
}

std::string_view stopReasonName(StopReason reason) {
  switch (reason) {
    case StopReason::Capacity: return "capacity";
    case StopReason::MinTileSize: return "min_tile_size";
    case StopReason::MemoryBudget: return "memory_budget";
  }
  return "?";
}

namespace {

// Nodes, labels and arrowheads of one level dropped into the tiles of level z by anchor.
void placeAnchored(TileLevel& level, const TileGrid& grid, int z, const LaidOutGraph& g,
                   std::span<const ScaledNode> nodes, const Annotations& notes) {
  for (const auto& n : nodes) {
    const auto& rec = g.nodes[n.node];
    level.tiles[grid.tileOf(z, rec.center)].nodes.push_back({n.node, rec.box.scaled(n.scale), n.scale});
  }
  for (const auto& l : notes.labels) level.tiles[grid.tileOf(z, l.anchor)].labels.push_back(l);
  for (const auto& a : notes.arrowheads) level.tiles[grid.tileOf(z, a.tip)].arrowheads.push_back(a);
}

// Clips of one route at level z, split from the root square down.
std::vector<std::pair<TileKey, EdgeClip>> routeClips(const Route& route, const TileGrid& grid, int z) {
  std::vector<std::pair<TileKey, EdgeClip>> cur, next;
  for (auto& piece : clipToRect(route.path, grid.root())) cur.push_back({TileKey{}, EdgeClip{std::move(piece), {route.edge}}});
  for (int l = 0; l < z; ++l) {
    next.clear();
    for (const auto& [key, clip] : cur) {
      const double midX = grid.lineX(l + 1, 2 * key.x + 1), midY = grid.lineY(l + 1, 2 * key.y + 1);
      for (auto& [q, sub] : splitClipAt(clip, midX, midY)) {
        next.push_back({TileKey{2 * key.x + static_cast<std::uint32_t>(q & 1), 2 * key.y + static_cast<std::uint32_t>(q >> 1)},
                        std::move(sub)});
      }
    }
    cur.swap(next);
  }
  return cur;
}

Rect drawingBounds(const LaidOutGraph& g, std::span<const Route> routes) {
  Rect b = Rect::empty();
  for (const auto& n : g.nodes) b.expand(n.box);
  for (const auto& r : routes) {
    for (const Point& p : r.path.vertices) b.expand(p);
  }
  return b;
}

}  // namespace

GrowthResult growPyramid(const LaidOutGraph& g, std::span<const Route> routes, const PyramidOptions& options) {
  GrowthResult res;
  TilePyramid& pyr = res.pyramid;
  pyr.capacity = options.capacity;
  pyr.grid = TileGrid::around(drawingBounds(g, routes));
  const TileGrid& grid = pyr.grid;

  TileLevel root;
  for (NodeIndex v = 0; v < g.nodeCount(); ++v) root.nodes.push_back({v, 1.0});
  for (const auto& r : routes) root.edges.push_back(r.edge);
  placeAnchored(root, grid, 0, g, root.nodes, placeLabelsAndArrowheads(g, root.nodes, routes, options.arrowheads));
  for (const auto& r : routes) {
    for (auto& [key, clip] : routeClips(r, grid, 0)) root.tiles[key].clips.push_back(std::move(clip));
  }
  for (auto& [key, tile] : root.tiles) bundleClips(tile, 1e-3 * grid.tileSide(0));
  res.usedElements = root.elementCount();
  pyr.levels.push_back(std::move(root));

  const double minW = options.minTileFactor * g.averageNodeWidth();
  const double minH = options.minTileFactor * g.averageNodeHeight();
  for (int z = 0;; ++z) {
    const TileLevel& cur = pyr.levels[z];
    if (cur.maxElements() <= options.capacity) {
      res.stop = StopReason::Capacity;
      break;
    }
    if (z + 1 >= options.maxLevels) {
      res.stop = StopReason::MinTileSize;
      break;
    }
    TileLevel next;
    next.nodes = cur.nodes;
    next.edges = cur.edges;
    const double tol = 1e-3 * grid.tileSide(z + 1);
    bool overBudget = false;
    for (const auto& [key, tile] : cur.tiles) {
      const double midX = grid.lineX(z + 1, 2 * key.x + 1), midY = grid.lineY(z + 1, 2 * key.y + 1);
      std::array<TileData, 4> kids;
      auto quadrant = [&](const Point& p) { return (p.x > midX ? 1 : 0) + (p.y > midY ? 2 : 0); };
      for (const auto& n : tile.nodes) kids[quadrant(g.nodes[n.node].center)].nodes.push_back(n);
      for (const auto& l : tile.labels) kids[quadrant(l.anchor)].labels.push_back(l);
      for (const auto& a : tile.arrowheads) kids[quadrant(a.tip)].arrowheads.push_back(a);
      for (const auto& clip : tile.clips) {
        for (auto& [q, sub] : splitClipAt(clip, midX, midY)) kids[q].clips.push_back(std::move(sub));
      }
      for (int q = 0; q < 4; ++q) {
        if (kids[q].empty()) continue;
        bundleClips(kids[q], tol);
        res.usedElements += kids[q].elementCount();
        next.tiles[{2 * key.x + static_cast<std::uint32_t>(q & 1), 2 * key.y + static_cast<std::uint32_t>(q >> 1)}] =
            std::move(kids[q]);
      }
      if (kElementBytes * static_cast<double>(res.usedElements) > static_cast<double>(options.memoryBudget)) {
        overBudget = true;
        break;
      }
    }
    if (overBudget) {
      res.stop = StopReason::MemoryBudget;
      break;
    }
    const double side = grid.tileSide(z + 1);
    if (side < minW && side < minH) {
      res.stop = StopReason::MinTileSize;
      break;
    }
    pyr.levels.push_back(std::move(next));
  }
  return res;
}

namespace {

struct LevelRouting {
  std::vector<Route> routes;  // edge, source and target in graph indices
  RoutingStats stats;
  std::size_t obstacleWarnings = 0;
};

LevelRouting routeLevel(const LaidOutGraph& g, std::span<const ScaledNode> nodes, double padding,
                        const PyramidOptions& options) {
  LevelRouting out;
  std::vector<std::int64_t> local(g.nodeCount(), -1);
  std::vector<Point> centers;
  std::vector<Rect> boxes;
  std::vector<double> pads;
  for (const auto& n : nodes) {
    local[n.node] = static_cast<std::int64_t>(centers.size());
    centers.push_back(g.nodes[n.node].center);
    boxes.push_back(g.nodes[n.node].box.scaled(n.scale));
    pads.push_back(padding * n.scale);
  }
  std::vector<NodePair> pairs;
  std::vector<EdgeIndex> ids;
  for (EdgeIndex e = 0; e < g.edgeCount(); ++e) {
    const auto& rec = g.edges[e];
    if (local[rec.source] < 0 || local[rec.target] < 0) continue;
    pairs.push_back({static_cast<NodeIndex>(local[rec.source]), static_cast<NodeIndex>(local[rec.target])});
    ids.push_back(e);
  }
  if (nodes.empty()) return out;
  auto obstacles = buildObstacles(boxes, pads);
  out.obstacleWarnings = obstacles.warnings.size();
  double maxPad = 0.0;
  for (double p : obstacles.padding) maxPad = std::max(maxPad, p);
  const auto scene = makeRoutingScene(std::move(centers), std::move(boxes), std::move(obstacles.polygons), maxPad);
  RouterOptions ro;
  ro.mode = options.mode;
  ro.threads = options.threads;
  auto res = routeAll(scene, pairs, ro);
  out.stats = res.stats;
  out.routes = std::move(res.routes);
  for (auto& r : out.routes) {
    r.edge = ids[r.edge];
    r.source = g.edges[r.edge].source;
    r.target = g.edges[r.edge].target;
  }
  return out;
}

TileLevel tileLevel(const LaidOutGraph& g, const TileGrid& grid, int z, std::vector<ScaledNode> nodes,
                    std::span<const Route> routes, double bundleTol, const PyramidOptions& options) {
  TileLevel level;
  level.nodes = std::move(nodes);
  for (const auto& r : routes) level.edges.push_back(r.edge);
  placeAnchored(level, grid, z, g, level.nodes, placeLabelsAndArrowheads(g, level.nodes, routes, options.arrowheads));
  std::vector<std::vector<std::pair<TileKey, EdgeClip>>> perRoute(routes.size());
  parallelFor(routes.size(), resolveThreads(options.threads),
              [&](std::size_t, std::size_t i) { perRoute[i] = routeClips(routes[i], grid, z); });
  for (auto& clips : perRoute) {
    for (auto& [key, clip] : clips) level.tiles[key].clips.push_back(std::move(clip));
  }
  for (auto& [key, tile] : level.tiles) bundleClips(tile, bundleTol);
  return level;
}

}  // namespace

BuildResult buildPyramid(const LaidOutGraph& g, const PyramidOptions& options) {
  if (options.capacity == 0) throw ParameterError("tile capacity must be positive");
  if (!(options.minTileFactor > 0.0)) throw ParameterError("min tile factor must be positive");
  if (options.memoryBudget == 0) throw ParameterError("memory budget must be positive");
  BuildResult out;
  BuildReport& rep = out.report;
  rep.padding = options.padding > 0.0 ? options.padding : defaultPadding(g);

  std::vector<ScaledNode> all;
  for (NodeIndex v = 0; v < g.nodeCount(); ++v) all.push_back({v, 1.0});
  auto t0 = std::chrono::steady_clock::now();
  LevelRouting full = routeLevel(g, all, rep.padding, options);
  rep.routingSeconds += secondsSince(t0);

  t0 = std::chrono::steady_clock::now();
  GrowthResult growth = growPyramid(g, full.routes, options);
  rep.tilingSeconds += secondsSince(t0);
  rep.stop = growth.stop;
  TilePyramid& pyr = growth.pyramid;
  const int Z = pyr.finestLevel();
  rep.levels.resize(Z + 1);
  {
    LevelReport& lr = rep.levels[Z];
    lr.z = Z;
    lr.nodes = g.nodeCount();
    lr.edges = full.routes.size();
    lr.routing = full.stats;
    lr.failures = full.stats.failures;
    lr.obstacleWarnings = full.obstacleWarnings;
    lr.tilingSeconds = secondsSince(t0);
  }
  rep.unfilteredFinestMax = pyr.levels[Z].maxElements();

  if (Z > 0) {
    const auto order = rankOrder(pagerank(g));
    std::vector<Rect> boxes;
    for (const auto& n : g.nodes) boxes.push_back(n.box);
    const double tol = 1e-3 * pyr.grid.tileSide(Z);
    for (int z = Z - 1; z >= 0; --z) {
      const int k = Z - z;
      auto sel = selectWithAdaptiveScale(levelPrefix(order, k), boxes, k);
      LevelReport& lr = rep.levels[z];
      lr.z = z;
      lr.nodes = sel.selected.size();
      lr.dropped = sel.dropped.size();
      t0 = std::chrono::steady_clock::now();
      LevelRouting routed = routeLevel(g, sel.selected, rep.padding, options);
      rep.routingSeconds += secondsSince(t0);
      lr.routing = routed.stats;
      lr.failures = routed.stats.failures;
      lr.edges = routed.routes.size();
      lr.obstacleWarnings = routed.obstacleWarnings;
      t0 = std::chrono::steady_clock::now();
      pyr.levels[z] = tileLevel(g, pyr.grid, z, std::move(sel.selected), routed.routes, tol, options);
      lr.tilingSeconds = secondsSince(t0);
      rep.tilingSeconds += lr.tilingSeconds;
    }
  }

  const PyramidStats stats = pyramidStats(pyr);
  rep.levelsBuilt = stats.levelsBuilt;
  rep.maxPerTile = stats.maxPerTile;
  rep.maxTileLevel = stats.maxTileLevel;
  for (int z = 0; z <= Z; ++z) {
    rep.levels[z].tiles = stats.tilesPerLevel[z];
    rep.levels[z].maxElements = stats.maxPerLevel[z];
    rep.levels[z].elements = pyr.levels[z].elementCount();
  }
  out.pyramid = std::move(pyr);
  return out;
}

PyramidStats pyramidStats(const TilePyramid& p) {
  PyramidStats s;
  s.levelsBuilt = static_cast<int>(p.levels.size());
  for (int z = 0; z < s.levelsBuilt; ++z) {
    const auto& level = p.levels[z];
    std::size_t tiles = 0;
    for (const auto& [key, tile] : level.tiles) tiles += tile.empty() ? 0 : 1;
    const std::size_t m = level.maxElements();
    s.tilesPerLevel.push_back(tiles);
    s.maxPerLevel.push_back(m);
    if (m > s.maxPerTile) {
      s.maxPerTile = m;
      s.maxTileLevel = z;
    }
  }
  return s;
}

}  // namespace sleevemap
