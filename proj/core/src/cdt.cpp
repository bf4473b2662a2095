#include "sleevemap/cdt.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

namespace sleevemap {

namespace {

constexpr std::uint8_t kFixed = 1;     // side may not be flipped
constexpr std::uint8_t kBoundary = 2;  // side lies on an obstacle boundary

inline int nx(int i) { return i == 2 ? 0 : i + 1; }
inline int pv(int i) { return i == 0 ? 2 : i - 1; }

// Hilbert index of (x, y) on a 2^16 grid.
std::uint64_t hilbertIndex(std::uint32_t x, std::uint32_t y) {
  constexpr std::uint32_t n = 1u << 16;
  std::uint64_t d = 0;
  for (std::uint32_t s = n / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) ? 1 : 0;
    const std::uint32_t ry = (y & s) ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = n - 1 - x;
        y = n - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

struct BTri {
  std::array<VertexId, 3> v{};
  std::array<TriangleId, 3> n{kNoTriangle, kNoTriangle, kNoTriangle};
  std::array<std::uint8_t, 3> f{};
};

class Builder {
 public:
  Builder(std::vector<Point>& pts, const Rect& frame) : p_(pts), frame_(frame) {
    scale_ = std::max({1.0, frame.width(), frame.height()});
    vtri_.assign(pts.size(), kNoTriangle);
    // Frame corners are vertices 0..3 counterclockwise from min.
    tris_.push_back({{0, 1, 2}, {kNoTriangle, 1, kNoTriangle}, {}});
    tris_.push_back({{0, 2, 3}, {kNoTriangle, kNoTriangle, 0}, {}});
    touch(0);
    touch(1);
  }

  /// Returns the vertex that represents p_[id] (an earlier duplicate, or id itself).
  VertexId insertPoint(VertexId id) {
    const Point& p = p_[id];
    TriangleId t = walk(p);
    const BTri& T = tris_[t];
    int zeroSide = -1;
    int zeros = 0;
    for (int i = 0; i < 3; ++i) {
      if (distance(p_[T.v[i]], p) <= kEpsGeom * scale_) return T.v[i];
      if (orient(p_[T.v[nx(i)]], p_[T.v[pv(i)]], p) == 0) {
        zeroSide = i;
        ++zeros;
      }
    }
    std::vector<std::pair<TriangleId, int>> stack;
    if (zeros == 1) {
      splitEdge(t, zeroSide, id, stack);
    } else {
      splitTriangle(t, id, stack);
    }
    legalize(stack);
    return id;
  }

  void insertSegment(VertexId a, VertexId b, std::uint8_t flags) {
    if (a == b) return;
    if (auto e = findEdge(a, b); e.first != kNoTriangle) {
      markSide(e.first, e.second, flags);
      return;
    }
    const Point A = p_[a];
    const Point B = p_[b];

    // First crossed side, found by rotating around a.
    TriangleId cur = kNoTriangle;
    int side = -1;
    for (TriangleId t : around(a)) {
      const BTri& T = tris_[t];
      const int k = indexOf(T, a);
      const VertexId x = T.v[nx(k)];
      const VertexId y = T.v[pv(k)];
      for (VertexId w : {x, y}) {
        if (orient(A, B, p_[w]) == 0 && dot(p_[w] - A, B - A) > 0.0 &&
            distance(A, p_[w]) < distance(A, B)) {
          insertSegment(a, w, flags);
          insertSegment(w, b, flags);
          return;
        }
      }
      if (orient(A, B, p_[x]) < 0 && orient(A, B, p_[y]) > 0) {
        cur = t;
        side = k;
        break;
      }
    }
    if (cur == kNoTriangle) throw CdtError("constraint walk found no starting triangle");

    std::deque<std::pair<VertexId, VertexId>> crossing;
    for (std::size_t guard = 0;; ++guard) {
      if (guard > tris_.size()) throw CdtError("constraint walk did not terminate");
      const BTri& T = tris_[cur];
      const VertexId x = T.v[nx(side)];
      const VertexId y = T.v[pv(side)];
      if (tris_[cur].f[side] & kFixed) throw CdtError("constraint crosses an existing constraint");
      crossing.emplace_back(x, y);
      const TriangleId nt = T.n[side];
      if (nt == kNoTriangle) throw CdtError("constraint leaves the frame");
      const int j = sideToward(nt, cur);
      const VertexId w = tris_[nt].v[j];
      if (w == b) break;
      const int ow = orient(A, B, p_[w]);
      if (ow == 0) {
        insertSegment(a, w, flags);
        insertSegment(w, b, flags);
        return;
      }
      cur = nt;
      side = ow < 0 ? pv(j) : nx(j);
    }

    std::vector<std::pair<VertexId, VertexId>> created;
    std::size_t stall = 0;
    while (!crossing.empty()) {
      if (stall > 4 * crossing.size() + 16) throw CdtError("constraint recovery stalled");
      auto [u, v] = crossing.front();
      crossing.pop_front();
      auto [t, s] = findEdge(u, v);
      if (t == kNoTriangle) throw CdtError("lost a crossing edge");
      const BTri& T = tris_[t];
      const TriangleId o = T.n[s];
      const VertexId qa = T.v[s];
      const VertexId qb = T.v[nx(s)];
      const VertexId qc = T.v[pv(s)];
      const VertexId qd = tris_[o].v[sideToward(o, t)];
      const bool convex = orient(p_[qa], p_[qd], p_[qb]) < 0 && orient(p_[qa], p_[qd], p_[qc]) > 0;
      if (!convex) {
        crossing.emplace_back(u, v);
        ++stall;
        continue;
      }
      stall = 0;
      flip(t, s);
      if (properlyCross(qa, qd, a, b)) {
        crossing.emplace_back(qa, qd);
      } else {
        created.emplace_back(qa, qd);
      }
    }
    auto e = findEdge(a, b);
    if (e.first == kNoTriangle) throw CdtError("constraint missing after recovery");
    markSide(e.first, e.second, flags);

    for (bool changed = true; changed;) {
      changed = false;
      for (auto& ed : created) {
        if ((ed.first == a && ed.second == b) || (ed.first == b && ed.second == a)) continue;
        auto [t, s] = findEdge(ed.first, ed.second);
        if (t == kNoTriangle || (tris_[t].f[s] & kFixed) || tris_[t].n[s] == kNoTriangle) continue;
        const BTri& T = tris_[t];
        const TriangleId o = T.n[s];
        const VertexId d = tris_[o].v[sideToward(o, t)];
        if (inCircle(p_[T.v[0]], p_[T.v[1]], p_[T.v[2]], p_[d]) > 0) {
          const VertexId apex = T.v[s];
          flip(t, s);
          ed = {apex, d};
          changed = true;
        }
      }
    }
  }

  void restoreDelaunay() {
    std::vector<std::pair<TriangleId, int>> stack;
    stack.reserve(tris_.size() * 3);
    for (TriangleId t = 0; t < static_cast<TriangleId>(tris_.size()); ++t) {
      for (int i = 0; i < 3; ++i) stack.emplace_back(t, i);
    }
    std::size_t flips = 0;
    const std::size_t cap = 64 * tris_.size() + 1024;
    while (!stack.empty()) {
      auto [t, s] = stack.back();
      stack.pop_back();
      const BTri& T = tris_[t];
      const TriangleId o = T.n[s];
      if (o == kNoTriangle || (T.f[s] & kFixed)) continue;
      const VertexId d = tris_[o].v[sideToward(o, t)];
      if (inCircle(p_[T.v[0]], p_[T.v[1]], p_[T.v[2]], p_[d]) <= 0) continue;
      if (++flips > cap) throw CdtError("Delaunay restoration did not converge");
      flip(t, s);
      stack.emplace_back(t, 0);
      stack.emplace_back(t, 2);
      stack.emplace_back(o, 0);
      stack.emplace_back(o, 2);
    }
  }

  const std::vector<BTri>& triangles() const { return tris_; }
  const std::vector<TriangleId>& vertexTriangles() const { return vtri_; }

 private:
  static int indexOf(const BTri& T, VertexId v) {
    return T.v[0] == v ? 0 : (T.v[1] == v ? 1 : 2);
  }

  int sideToward(TriangleId t, TriangleId u) const {
    const BTri& T = tris_[t];
    for (int i = 0; i < 3; ++i) {
      if (T.n[i] == u) return i;
    }
    throw CdtError("triangles are not adjacent");
  }

  void touch(TriangleId t) {
    for (VertexId v : tris_[t].v) vtri_[v] = t;
    last_ = t;
  }

  void replaceNeighbor(TriangleId t, TriangleId from, TriangleId to) {
    if (t == kNoTriangle) return;
    for (auto& n : tris_[t].n) {
      if (n == from) {
        n = to;
        return;
      }
    }
  }

  void markSide(TriangleId t, int s, std::uint8_t flags) {
    tris_[t].f[s] |= flags;
    const TriangleId o = tris_[t].n[s];
    if (o != kNoTriangle) tris_[o].f[sideToward(o, t)] |= flags;
  }

  bool properlyCross(VertexId a, VertexId b, VertexId c, VertexId d) const {
    if (a == c || a == d || b == c || b == d) return false;
    return orient(p_[a], p_[b], p_[c]) * orient(p_[a], p_[b], p_[d]) < 0 &&
           orient(p_[c], p_[d], p_[a]) * orient(p_[c], p_[d], p_[b]) < 0;
  }

  std::vector<TriangleId> around(VertexId v) const {
    std::vector<TriangleId> out;
    const TriangleId start = vtri_[v];
    TriangleId t = start;
    do {
      out.push_back(t);
      t = tris_[t].n[nx(indexOf(tris_[t], v))];
    } while (t != kNoTriangle && t != start);
    if (t == kNoTriangle) {
      t = tris_[start].n[pv(indexOf(tris_[start], v))];
      while (t != kNoTriangle) {
        out.insert(out.begin(), t);
        t = tris_[t].n[pv(indexOf(tris_[t], v))];
      }
    }
    return out;
  }

  std::pair<TriangleId, int> findEdge(VertexId u, VertexId v) const {
    for (TriangleId t : around(u)) {
      const BTri& T = tris_[t];
      const int k = indexOf(T, u);
      if (T.v[nx(k)] == v) return {t, pv(k)};
      if (T.v[pv(k)] == v) return {t, nx(k)};
    }
    return {kNoTriangle, -1};
  }

  TriangleId walk(const Point& p) {
    TriangleId t = last_;
    for (std::size_t steps = 0;; ++steps) {
      if (steps > 4 * tris_.size() + 64) throw CdtError("point location did not terminate");
      rng_ = rng_ * 6364136223846793005ULL + 1442695040888963407ULL;
      const int start = static_cast<int>((rng_ >> 33) % 3);
      bool moved = false;
      for (int k = 0; k < 3; ++k) {
        const int i = (start + k) % 3;
        const BTri& T = tris_[t];
        if (orient(p_[T.v[nx(i)]], p_[T.v[pv(i)]], p) < 0) {
          if (T.n[i] == kNoTriangle) throw CdtError("point outside the frame");
          t = T.n[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
  }

  void flip(TriangleId t, int i) {
    BTri& T = tris_[t];
    const VertexId a = T.v[i], b = T.v[nx(i)], c = T.v[pv(i)];
    const TriangleId nB = T.n[nx(i)], nC = T.n[pv(i)];
    const std::uint8_t fB = T.f[nx(i)], fC = T.f[pv(i)];
    const TriangleId u = T.n[i];
    BTri& U = tris_[u];
    const int j = sideToward(u, t);
    const VertexId d = U.v[j];
    const TriangleId uC = U.n[nx(j)], uB = U.n[pv(j)];
    const std::uint8_t fUC = U.f[nx(j)], fUB = U.f[pv(j)];
    T = {{a, b, d}, {uC, u, nC}, {fUC, 0, fC}};
    U = {{d, c, a}, {nB, t, uB}, {fB, 0, fUB}};
    replaceNeighbor(uC, u, t);
    replaceNeighbor(nB, t, u);
    touch(t);
    touch(u);
  }

  void splitTriangle(TriangleId t, VertexId p, std::vector<std::pair<TriangleId, int>>& stack) {
    const BTri T0 = tris_[t];
    const VertexId a = T0.v[0], b = T0.v[1], c = T0.v[2];
    const auto t1 = static_cast<TriangleId>(tris_.size());
    const TriangleId t2 = t1 + 1;
    tris_[t] = {{a, b, p}, {t1, t2, T0.n[2]}, {0, 0, T0.f[2]}};
    tris_.push_back({{b, c, p}, {t2, t, T0.n[0]}, {0, 0, T0.f[0]}});
    tris_.push_back({{c, a, p}, {t, t1, T0.n[1]}, {0, 0, T0.f[1]}});
    replaceNeighbor(T0.n[0], t, t1);
    replaceNeighbor(T0.n[1], t, t2);
    touch(t1);
    touch(t2);
    touch(t);
    stack.emplace_back(t, 2);
    stack.emplace_back(t1, 2);
    stack.emplace_back(t2, 2);
  }

  void splitEdge(TriangleId t, int i, VertexId p, std::vector<std::pair<TriangleId, int>>& stack) {
    const BTri T0 = tris_[t];
    const VertexId a = T0.v[i], b = T0.v[nx(i)], c = T0.v[pv(i)];
    const TriangleId nB = T0.n[nx(i)], nC = T0.n[pv(i)];
    const std::uint8_t fA = T0.f[i], fB = T0.f[nx(i)], fC = T0.f[pv(i)];
    const TriangleId u = T0.n[i];
    const auto t1 = static_cast<TriangleId>(tris_.size());
    if (u == kNoTriangle) {
      tris_[t] = {{a, b, p}, {kNoTriangle, t1, nC}, {fA, 0, fC}};
      tris_.push_back({{a, p, c}, {kNoTriangle, nB, t}, {fA, fB, 0}});
      replaceNeighbor(nB, t, t1);
      touch(t1);
      touch(t);
      stack.emplace_back(t, 2);
      stack.emplace_back(t1, 1);
      return;
    }
    const BTri U0 = tris_[u];
    const int j = sideToward(u, t);
    const VertexId d = U0.v[j];
    const TriangleId uC = U0.n[nx(j)], uB = U0.n[pv(j)];
    const std::uint8_t fUC = U0.f[nx(j)], fUB = U0.f[pv(j)];
    const TriangleId t3 = t1 + 1;
    tris_[t] = {{a, b, p}, {t3, t1, nC}, {fA, 0, fC}};
    tris_.push_back({{a, p, c}, {u, nB, t}, {fA, fB, 0}});
    tris_.push_back({{d, p, b}, {t, uC, u}, {fA, fUC, 0}});
    tris_[u] = {{d, c, p}, {t1, t3, uB}, {fA, 0, fUB}};
    replaceNeighbor(nB, t, t1);
    replaceNeighbor(uC, u, t3);
    touch(t1);
    touch(t3);
    touch(u);
    touch(t);
    stack.emplace_back(t, 2);
    stack.emplace_back(t1, 1);
    stack.emplace_back(u, 2);
    stack.emplace_back(t3, 1);
  }

  void legalize(std::vector<std::pair<TriangleId, int>>& stack) {
    while (!stack.empty()) {
      auto [t, s] = stack.back();
      stack.pop_back();
      const BTri& T = tris_[t];
      const TriangleId u = T.n[s];
      if (u == kNoTriangle || (T.f[s] & kFixed)) continue;
      const VertexId d = tris_[u].v[sideToward(u, t)];
      if (inCircle(p_[T.v[0]], p_[T.v[1]], p_[T.v[2]], p_[d]) > 0) {
        // Apex T.v[s] stays at index 0 of t and index 2 of u.
        flip(t, s);
        stack.emplace_back(t, 0);
        stack.emplace_back(u, 2);
      }
    }
  }

  std::vector<Point>& p_;
  Rect frame_;
  double scale_ = 1.0;
  std::vector<BTri> tris_;
  std::vector<TriangleId> vtri_;
  TriangleId last_ = 0;
  std::uint64_t rng_ = 0x9E3779B97F4A7C15ULL;
};

// Uniform grid over obstacle bounds for point-in-polygon queries.
class ObstacleGrid {
 public:
  ObstacleGrid(std::span<const ConvexPolygon> polys, const Rect& frame) : polys_(polys), frame_(frame) {
    const std::size_t n = std::max<std::size_t>(1, polys.size());
    dim_ = std::clamp<int>(static_cast<int>(std::sqrt(static_cast<double>(n))), 1, 1024);
    cells_.resize(static_cast<std::size_t>(dim_) * dim_);
    for (std::size_t i = 0; i < polys.size(); ++i) {
      const Rect b = polys[i].bounds();
      const auto [x0, y0] = cell(b.min);
      const auto [x1, y1] = cell(b.max);
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * dim_ + x].push_back(i);
      }
    }
  }

  std::int32_t ownerOf(const Point& p) const {
    const auto [x, y] = cell(p);
    for (std::size_t i : cells_[static_cast<std::size_t>(y) * dim_ + x]) {
      if (polys_[i].contains(p)) return static_cast<std::int32_t>(i);
    }
    return kNoOwner;
  }

 private:
  std::pair<int, int> cell(const Point& p) const {
    auto clampIdx = [&](double v, double lo, double span) {
      const double r = span > 0.0 ? (v - lo) / span : 0.0;
      return std::clamp(static_cast<int>(r * dim_), 0, dim_ - 1);
    };
    return {clampIdx(p.x, frame_.min.x, frame_.width()), clampIdx(p.y, frame_.min.y, frame_.height())};
  }

  std::span<const ConvexPolygon> polys_;
  Rect frame_;
  int dim_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
};

}  // namespace

int inCircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;
  const double bc = bdx * cdy - bdy * cdx;
  const double ca = cdx * ady - cdy * adx;
  const double ab = adx * bdy - ady * bdx;
  const double det = alift * bc + blift * ca + clift * ab;
  const double permanent = alift * std::abs(bc) + blift * std::abs(ca) + clift * std::abs(ab);
  const double tol = kEpsGeom * permanent;
  if (det > tol) return 1;
  if (det < -tol) return -1;
  return 0;
}

Point Cdt::centroid(TriangleId t) const {
  const Triangle& T = triangles[t];
  const Point& a = points[T.v[0]];
  const Point& b = points[T.v[1]];
  const Point& c = points[T.v[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

double Cdt::area(TriangleId t) const {
  const Triangle& T = triangles[t];
  return 0.5 * cross(points[T.v[1]] - points[T.v[0]], points[T.v[2]] - points[T.v[0]]);
}

int Cdt::sideToward(TriangleId t, TriangleId u) const {
  for (int i = 0; i < 3; ++i) {
    if (triangles[t].neighbor[i] == u) return i;
  }
  return -1;
}

std::vector<TriangleId> Cdt::trianglesAround(VertexId v) const {
  auto indexOf = [&](TriangleId t) {
    const auto& T = triangles[t];
    return T.v[0] == v ? 0 : (T.v[1] == v ? 1 : 2);
  };
  std::vector<TriangleId> out;
  const TriangleId start = vertexTriangle[v];
  if (start == kNoTriangle) return out;
  TriangleId t = start;
  do {
    out.push_back(t);
    t = triangles[t].neighbor[nx(indexOf(t))];
  } while (t != kNoTriangle && t != start);
  if (t == kNoTriangle) {
    t = triangles[start].neighbor[pv(indexOf(start))];
    while (t != kNoTriangle) {
      out.insert(out.begin(), t);
      t = triangles[t].neighbor[pv(indexOf(t))];
    }
  }
  return out;
}

TriangleId Cdt::locate(const Point& p) const {
  if (!frame.contains(p)) throw std::out_of_range("point outside the triangulation frame");
  TriangleId t = 0;
  std::uint64_t rng = static_cast<std::uint64_t>(std::hash<double>{}(p.x) ^ (std::hash<double>{}(p.y) << 1));
  for (std::size_t steps = 0;; ++steps) {
    if (steps > 8 * triangles.size() + 64) throw CdtError("point location did not terminate");
    rng = rng * 6364136223846793005ULL + 1442695040888963407ULL;
    const int start = static_cast<int>((rng >> 33) % 3);
    bool moved = false;
    for (int k = 0; k < 3; ++k) {
      const int i = (start + k) % 3;
      const Triangle& T = triangles[t];
      if (orient(points[T.v[nx(i)]], points[T.v[pv(i)]], p) < 0 && T.neighbor[i] != kNoTriangle) {
        t = T.neighbor[i];
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  // Resolve ties on sides and vertices toward the lowest id.
  const Triangle& T = triangles[t];
  TriangleId best = t;
  for (int i = 0; i < 3; ++i) {
    if (p == points[T.v[i]]) {
      for (TriangleId u : trianglesAround(T.v[i])) best = std::min(best, u);
      return best;
    }
  }
  for (int i = 0; i < 3; ++i) {
    if (orient(points[T.v[nx(i)]], points[T.v[pv(i)]], p) == 0 && T.neighbor[i] != kNoTriangle) {
      best = std::min(best, T.neighbor[i]);
    }
  }
  return best;
}

Rect routingFrame(std::span<const ConvexPolygon> obstacles, double maxPadding) {
  Rect r = Rect::empty();
  for (const auto& poly : obstacles) r.expand(poly.bounds());
  if (r.isEmpty()) r = {{0.0, 0.0}, {1.0, 1.0}};
  const double margin = std::max(2.0 * maxPadding, kEpsGeom * std::max({1.0, r.width(), r.height()}));
  return r.inflated(margin > 0.0 ? margin : 1.0);
}

Cdt buildCdt(std::span<const ConvexPolygon> obstacles, std::span<const Point> centers, const Rect& frame) {
  if (centers.size() != obstacles.size()) throw CdtError("one center per obstacle required");
  Cdt cdt;
  cdt.frame = frame;
  auto& pts = cdt.points;
  auto& owner = cdt.pointOwner;
  pts = {frame.min, {frame.max.x, frame.min.y}, frame.max, {frame.min.x, frame.max.y}};
  owner.assign(4, kNoOwner);
  std::vector<std::vector<VertexId>> ring(obstacles.size());
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    for (const Point& q : obstacles[i].vertices) {
      if (!frame.strictlyContains(q)) throw CdtError("obstacle outside the frame");
      ring[i].push_back(static_cast<VertexId>(pts.size()));
      pts.push_back(q);
      owner.push_back(static_cast<std::int32_t>(i));
    }
  }
  cdt.centerVertex.resize(obstacles.size());
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (!obstacles[i].strictlyContains(centers[i])) throw CdtError("center outside its obstacle");
    cdt.centerVertex[i] = static_cast<VertexId>(pts.size());
    pts.push_back(centers[i]);
    owner.push_back(static_cast<std::int32_t>(i));
  }

  std::vector<VertexId> order(pts.size() - 4);
  std::iota(order.begin(), order.end(), 4);
  std::vector<std::uint64_t> key(pts.size());
  const double w = std::max(frame.width(), 1e-300);
  const double h = std::max(frame.height(), 1e-300);
  for (VertexId v : order) {
    const auto gx = static_cast<std::uint32_t>(std::clamp((pts[v].x - frame.min.x) / w, 0.0, 1.0) * 65535.0);
    const auto gy = static_cast<std::uint32_t>(std::clamp((pts[v].y - frame.min.y) / h, 0.0, 1.0) * 65535.0);
    key[v] = hilbertIndex(gx, gy);
  }
  std::sort(order.begin(), order.end(), [&](VertexId a, VertexId b) {
    return key[a] < key[b] || (key[a] == key[b] && a < b);
  });

  Builder builder(pts, frame);
  std::vector<VertexId> alias(pts.size());
  std::iota(alias.begin(), alias.end(), 0);
  for (VertexId v : order) alias[v] = builder.insertPoint(v);
  for (VertexId v : order) {
    if (alias[v] != v) throw CdtError("coincident input vertices");
  }

  for (const auto& r : ring) {
    for (std::size_t k = 0; k < r.size(); ++k) {
      builder.insertSegment(r[k], r[(k + 1) % r.size()], kFixed | kBoundary);
    }
  }
  for (std::size_t i = 0; i < ring.size(); ++i) {
    for (VertexId q : ring[i]) builder.insertSegment(cdt.centerVertex[i], q, kFixed);
  }
  builder.restoreDelaunay();

  const auto& bt = builder.triangles();
  cdt.triangles.resize(bt.size());
  ObstacleGrid grid(obstacles, frame);
  cdt.owned.assign(obstacles.size(), {});
  for (std::size_t t = 0; t < bt.size(); ++t) {
    Triangle& T = cdt.triangles[t];
    T.v = bt[t].v;
    T.neighbor = bt[t].n;
    for (int i = 0; i < 3; ++i) T.constrained[i] = (bt[t].f[i] & kBoundary) != 0;
    T.owner = grid.ownerOf(cdt.centroid(static_cast<TriangleId>(t)));
    if (T.owner != kNoOwner) cdt.owned[T.owner].push_back(static_cast<TriangleId>(t));
  }
  cdt.vertexTriangle = builder.vertexTriangles();
  return cdt;
}

DualGraph buildDualGraph(const Cdt& cdt) {
  DualGraph d;
  const std::size_t n = cdt.triangles.size();
  d.centroids.resize(n);
  for (std::size_t t = 0; t < n; ++t) d.centroids[t] = cdt.centroid(static_cast<TriangleId>(t));
  d.offsets.assign(n + 1, 0);
  for (std::size_t t = 0; t < n; ++t) {
    std::uint32_t c = 0;
    for (TriangleId u : cdt.triangles[t].neighbor) c += u != kNoTriangle;
    d.offsets[t + 1] = d.offsets[t] + c;
  }
  d.arcs.resize(d.offsets[n]);
  for (std::size_t t = 0; t < n; ++t) {
    std::uint32_t k = d.offsets[t];
    std::array<TriangleId, 3> nb = cdt.triangles[t].neighbor;
    std::sort(nb.begin(), nb.end());
    for (TriangleId u : nb) {
      if (u == kNoTriangle) continue;
      d.arcs[k++] = {u, distance(d.centroids[t], d.centroids[u])};
    }
  }
  return d;
}

std::string cdtDebugJson(const Cdt& cdt) {
  std::string out = "[";
  char buf[256];
  for (std::size_t t = 0; t < cdt.triangles.size(); ++t) {
    const auto& T = cdt.triangles[t];
    const Point a = cdt.points[T.v[0]], b = cdt.points[T.v[1]], c = cdt.points[T.v[2]];
    std::snprintf(buf, sizeof buf, "%s{\"id\":%zu,\"owner\":%d,\"pts\":[[%.17g,%.17g],[%.17g,%.17g],[%.17g,%.17g]]}",
                  t ? "," : "", t, T.owner, a.x, a.y, b.x, b.y, c.x, c.y);
    out += buf;
  }
  out += "]";
  return out;
}

}  // namespace sleevemap
