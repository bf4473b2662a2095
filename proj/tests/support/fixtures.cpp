#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <queue>
#include <random>
#include <set>

#ifndef SLEEVEMAP_SOURCE_DIR
#define SLEEVEMAP_SOURCE_DIR "."
#endif

namespace sleevemap::fixtures {

LaidOutGraph randomInstance(std::uint64_t seed, int nodes, int edges) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, 40.0);
  std::uniform_real_distribution<double> width(1.0, 4.0);
  std::uniform_real_distribution<double> height(0.6, 2.0);
  std::vector<NodeRecord> recs;
  for (int attempt = 0; static_cast<int>(recs.size()) < nodes && attempt < 100000; ++attempt) {
    NodeRecord r;
    r.center = {pos(rng), pos(rng)};
    r.box = Rect::around(r.center, width(rng), height(rng));
    bool ok = true;
    for (const auto& o : recs) {
      if (boxGap(o.box, r.box) < 0.5) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    r.id = "n" + std::to_string(recs.size());
    r.label = r.id;
    recs.push_back(std::move(r));
  }
  const int n = static_cast<int>(recs.size());
  const int maxPairs = n * (n - 1) / 2;
  std::set<std::pair<int, int>> used;
  std::vector<EdgeRecord> es;
  std::uniform_int_distribution<int> pick(0, n - 1);
  while (static_cast<int>(es.size()) < std::min(edges, maxPairs)) {
    const int a = pick(rng);
    const int b = pick(rng);
    if (a == b || !used.emplace(std::min(a, b), std::max(a, b)).second) continue;
    es.push_back({static_cast<NodeIndex>(a), static_cast<NodeIndex>(b), {}});
  }
  return makeGraph(std::move(recs), std::move(es));
}

LaidOutGraph randomInstance(std::uint64_t seed, int minNodes, int maxNodes, int minEdges, int maxEdges) {
  std::mt19937_64 rng(seed ^ 0xA5A5A5A5ULL);
  const int n = std::uniform_int_distribution<int>(minNodes, maxNodes)(rng);
  const int m = std::uniform_int_distribution<int>(minEdges, maxEdges)(rng);
  return randomInstance(seed, n, m);
}

LaidOutGraph socialGraph(std::uint64_t seed, int nodes, int edges) {
  std::mt19937_64 rng(seed);
  const int core = 8;
  std::set<std::pair<int, int>> used;
  std::vector<std::pair<int, int>> es;
  std::vector<int> endpoints;
  auto add = [&](int a, int b) {
    if (a == b || !used.emplace(std::min(a, b), std::max(a, b)).second) return false;
    es.emplace_back(a, b);
    endpoints.push_back(a);
    endpoints.push_back(b);
    return true;
  };
  for (int i = 0; i < core; ++i) {
    for (int j = i + 1; j < core; ++j) add(i, j);
  }
  const int remaining = edges - static_cast<int>(es.size());
  const int newcomers = nodes - core;
  long long owed = 0;
  for (int v = core; v < nodes; ++v) {
    owed += remaining;
    int m = static_cast<int>(owed / newcomers);
    owed -= static_cast<long long>(m) * newcomers;
    m = std::min(m, v);
    int placed = 0;
    for (int guard = 0; placed < m && guard < 1000; ++guard) {
      const int u = endpoints[std::uniform_int_distribution<std::size_t>(0, endpoints.size() - 1)(rng)];
      if (add(v, u)) ++placed;
    }
  }

  // Force-directed placement in the unit square.
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point> p(nodes);
  for (auto& q : p) q = {unit(rng), unit(rng)};
  const double k = std::sqrt(1.0 / nodes);
  double temp = 0.1;
  std::vector<Point> disp(nodes);
  for (int iter = 0; iter < 300; ++iter) {
    std::fill(disp.begin(), disp.end(), Point{});
    for (int i = 0; i < nodes; ++i) {
      for (int j = i + 1; j < nodes; ++j) {
        Point d = p[i] - p[j];
        const double dist = std::max(1e-6, norm(d));
        const Point f = d * (k * k / (dist * dist));
        disp[i] = disp[i] + f;
        disp[j] = disp[j] - f;
      }
    }
    for (auto [a, b] : es) {
      Point d = p[a] - p[b];
      const double dist = std::max(1e-6, norm(d));
      const Point f = d * (dist / k);
      disp[a] = disp[a] - f;
      disp[b] = disp[b] + f;
    }
    for (int i = 0; i < nodes; ++i) {
      const double len = norm(disp[i]);
      if (len > 0) p[i] = p[i] + disp[i] * (std::min(len, temp) / len);
    }
    temp = std::max(0.002, temp * 0.985);
  }

  std::uniform_int_distribution<int> nameLen(4, 16);
  std::vector<NodeRecord> recs(nodes);
  for (int i = 0; i < nodes; ++i) {
    recs[i].id = "v" + std::to_string(i);
    std::string label(nameLen(rng), 'a');
    for (auto& ch : label) ch = static_cast<char>('a' + std::uniform_int_distribution<int>(0, 25)(rng));
    recs[i].label = label;
  }
  // Spread the placement until every pair of label boxes is separated.
  const double margin = 4.0;
  double factor = 1.0;
  for (int i = 0; i < nodes; ++i) {
    const double wi = 6.0 * recs[i].label.size() + 8.0, hi = 14.0;
    for (int j = i + 1; j < nodes; ++j) {
      const double wj = 6.0 * recs[j].label.size() + 8.0, hj = 14.0;
      const double dx = std::abs(p[i].x - p[j].x), dy = std::abs(p[i].y - p[j].y);
      const double needX = dx > 0 ? ((wi + wj) / 2 + margin) / dx : 1e300;
      const double needY = dy > 0 ? ((hi + hj) / 2 + margin) / dy : 1e300;
      factor = std::max(factor, std::min(needX, needY));
    }
  }
  for (int i = 0; i < nodes; ++i) {
    const Point c = p[i] * factor;
    recs[i].center = {std::round(c.x * 100.0) / 100.0, std::round(c.y * 100.0) / 100.0};
    recs[i].box = Rect::around(recs[i].center, 6.0 * recs[i].label.size() + 8.0, 14.0);
  }
  std::vector<EdgeRecord> records;
  records.reserve(es.size());
  for (auto [a, b] : es) records.push_back({static_cast<NodeIndex>(a), static_cast<NodeIndex>(b), {}});
  return makeGraph(std::move(recs), std::move(records));
}

LaidOutGraph surrogateGotGraph(std::uint64_t seed) { return socialGraph(seed, 407, 2639); }

RoutingScene sceneFor(const LaidOutGraph& g, double padding) {
  return makeRoutingScene(g, buildObstacles(g, padding));
}

std::vector<std::array<Point, 3>> sleeveTriangles(const Cdt& cdt, const Sleeve& sleeve) {
  std::vector<std::array<Point, 3>> out;
  for (TriangleId t : sleeve.triangles) out.push_back({cdt.corner(t, 0), cdt.corner(t, 1), cdt.corner(t, 2)});
  return out;
}

bool polygonsOverlap(const ConvexPolygon& a, const ConvexPolygon& b) {
  auto separated = [](const ConvexPolygon& p, const ConvexPolygon& q) {
    const std::size_t n = p.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point& u = p.vertices[i];
      const Point& v = p.vertices[(i + 1) % n];
      bool allOutside = true;
      for (const Point& w : q.vertices) {
        if (cross(v - u, w - u) > 0.0) {
          allOutside = false;
          break;
        }
      }
      if (allOutside) return true;
    }
    return false;
  };
  return !separated(a, b) && !separated(b, a);
}

std::string dataDirectory() {
  if (const char* env = std::getenv("SLEEVEMAP_DATA_DIR")) return env;
  return std::string(SLEEVEMAP_SOURCE_DIR) + "/data";
}

double referenceDualDistance(const Cdt& cdt, NodeIndex s, NodeIndex t) {
  const auto so = static_cast<std::int32_t>(s), to = static_cast<std::int32_t>(t);
  std::vector<Point> centroid(cdt.triangleCount());
  for (std::size_t i = 0; i < centroid.size(); ++i) {
    const auto& v = cdt.triangles[i].v;
    centroid[i] = (cdt.points[v[0]] + cdt.points[v[1]] + cdt.points[v[2]]) * (1.0 / 3.0);
  }
  std::vector<double> dist(cdt.triangleCount(), INFINITY);
  using Entry = std::pair<double, TriangleId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> q;
  for (TriangleId i = 0; i < static_cast<TriangleId>(cdt.triangleCount()); ++i) {
    if (cdt.triangles[i].owner == so) {
      dist[i] = 0.0;
      q.emplace(0.0, i);
    }
  }
  while (!q.empty()) {
    auto [d, u] = q.top();
    q.pop();
    if (d > dist[u]) continue;
    if (cdt.triangles[u].owner == to) return d;
    for (TriangleId v : cdt.triangles[u].neighbor) {
      if (v == kNoTriangle) continue;
      const auto o = cdt.triangles[v].owner;
      if (o != kNoOwner && o != so && o != to) continue;
      const double nd = d + distance(centroid[u], centroid[v]);
      if (nd < dist[v]) {
        dist[v] = nd;
        q.emplace(nd, v);
      }
    }
  }
  return INFINITY;
}

}  // namespace sleevemap::fixtures
