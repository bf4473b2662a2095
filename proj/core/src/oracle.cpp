#include "sleevemap/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace sleevemap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

bool segmentCrossesInterior(const ConvexPolygon& poly, const Point& a, const Point& b, double tol) {
  const auto& v = poly.vertices;
  const std::size_t n = v.size();
  const Point d = b - a;
  double lo = 0.0, hi = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point& u = v[i];
    const Point& w = v[(i + 1) % n];
    const Point e = w - u;
    const double len = norm(e);
    if (len == 0.0) continue;
    const Point outward{e.y / len, -e.x / len};
    // Need f0 + t * f1 < 0 for t in (lo, hi).
    const double f0 = dot(outward, a - u) + tol;
    const double f1 = dot(outward, d);
    if (f1 == 0.0) {
      if (f0 >= 0.0) return false;
      continue;
    }
    const double tc = -f0 / f1;
    if (f1 > 0.0) {
      hi = std::min(hi, tc);
    } else {
      lo = std::max(lo, tc);
    }
    if (lo >= hi) return false;
  }
  return lo < hi;
}

VisibilityOracle::VisibilityOracle(std::span<const ConvexPolygon> obstacles, std::span<const Point> centers)
    : obstacles_(obstacles.begin(), obstacles.end()), centers_(centers.begin(), centers.end()) {
  gridBounds_ = Rect::empty();
  double extent = 0.0;
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const auto& ring = obstacles_[i].vertices;
    const Rect b = obstacles_[i].bounds();
    gridBounds_.expand(b);
    extent += std::max(b.width(), b.height());
    for (std::size_t k = 0; k < ring.size(); ++k) {
      corners_.push_back(ring[k]);
      cornerOwner_.push_back(static_cast<std::uint32_t>(i));
      cornerNeighbors_.push_back({ring[(k + ring.size() - 1) % ring.size()], ring[(k + 1) % ring.size()]});
    }
  }
  for (const Point& c : centers_) gridBounds_.expand(c);
  if (gridBounds_.isEmpty()) gridBounds_ = {{0, 0}, {1, 1}};
  tol_ = 1e-9 * std::max({1.0, gridBounds_.width(), gridBounds_.height()});

  cell_ = obstacles_.empty() ? 1.0 : 2.0 * extent / static_cast<double>(obstacles_.size());
  cell_ = std::max({cell_, gridBounds_.width() / 512.0, gridBounds_.height() / 512.0, 1e-12});
  cols_ = std::max(1, static_cast<int>(std::ceil(gridBounds_.width() / cell_)));
  rows_ = std::max(1, static_cast<int>(std::ceil(gridBounds_.height() / cell_)));
  cells_.assign(static_cast<std::size_t>(cols_) * rows_, {});
  const double pad = cell_ * 1e-6;
  for (std::size_t i = 0; i < obstacles_.size(); ++i) {
    const Rect b = obstacles_[i].bounds().inflated(pad);
    const int x0 = std::clamp(static_cast<int>(std::floor((b.min.x - gridBounds_.min.x) / cell_)), 0, cols_ - 1);
    const int x1 = std::clamp(static_cast<int>(std::floor((b.max.x - gridBounds_.min.x) / cell_)), 0, cols_ - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor((b.min.y - gridBounds_.min.y) / cell_)), 0, rows_ - 1);
    const int y1 = std::clamp(static_cast<int>(std::floor((b.max.y - gridBounds_.min.y) / cell_)), 0, rows_ - 1);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) cells_[static_cast<std::size_t>(y) * cols_ + x].push_back(static_cast<std::uint32_t>(i));
    }
  }

  adjacency_.assign(corners_.size(), {});
  for (std::size_t i = 0; i < corners_.size(); ++i) {
    for (std::size_t j = i + 1; j < corners_.size(); ++j) {
      if (!tangentAt(i, corners_[j]) || !tangentAt(j, corners_[i])) continue;
      if (!clear(corners_[i], corners_[j])) continue;
      const double w = distance(corners_[i], corners_[j]);
      adjacency_[i].push_back({static_cast<std::uint32_t>(j), w});
      adjacency_[j].push_back({static_cast<std::uint32_t>(i), w});
      ++edgeTotal_;
    }
  }
  centerVisible_.resize(centers_.size());
  for (std::size_t n = 0; n < centers_.size(); ++n) centerVisible_[n] = visibleCorners(n);
}

bool VisibilityOracle::tangentAt(std::size_t corner, const Point& toward) const {
  const Point& c = corners_[corner];
  if (toward == c) return false;
  const int o1 = orient(c, toward, cornerNeighbors_[corner][0]);
  const int o2 = orient(c, toward, cornerNeighbors_[corner][1]);
  return o1 * o2 >= 0;
}

bool VisibilityOracle::clear(const Point& a, const Point& b, std::int64_t skipA, std::int64_t skipB) const {
  auto cellIndex = [&](double v, double lo, int count) {
    return std::clamp(static_cast<int>(std::floor((v - lo) / cell_)), 0, count - 1);
  };
  int ix = cellIndex(a.x, gridBounds_.min.x, cols_), iy = cellIndex(a.y, gridBounds_.min.y, rows_);
  const int jx = cellIndex(b.x, gridBounds_.min.x, cols_), jy = cellIndex(b.y, gridBounds_.min.y, rows_);
  const Point d = b - a;
  const int stepX = d.x > 0 ? 1 : (d.x < 0 ? -1 : 0);
  const int stepY = d.y > 0 ? 1 : (d.y < 0 ? -1 : 0);
  auto firstCrossing = [&](double p, double dp, int idx, int step, double lo) {
    if (step == 0) return kInf;
    const double boundary = lo + (step > 0 ? idx + 1 : idx) * cell_;
    return (boundary - p) / dp;
  };
  double tMaxX = firstCrossing(a.x, d.x, ix, stepX, gridBounds_.min.x);
  double tMaxY = firstCrossing(a.y, d.y, iy, stepY, gridBounds_.min.y);
  const double tDeltaX = stepX ? cell_ / std::abs(d.x) : kInf;
  const double tDeltaY = stepY ? cell_ / std::abs(d.y) : kInf;

  std::vector<std::uint32_t> tested;
  for (int guard = cols_ + rows_ + 4; guard > 0; --guard) {
    for (std::uint32_t o : cells_[static_cast<std::size_t>(iy) * cols_ + ix]) {
      if (static_cast<std::int64_t>(o) == skipA || static_cast<std::int64_t>(o) == skipB) continue;
      if (std::find(tested.begin(), tested.end(), o) != tested.end()) continue;
      tested.push_back(o);
      if (segmentCrossesInterior(obstacles_[o], a, b, tol_)) return false;
    }
    if (ix == jx && iy == jy) break;
    if (tMaxX < tMaxY) {
      if (ix == jx) break;
      ix += stepX;
      tMaxX += tDeltaX;
    } else {
      if (iy == jy) break;
      iy += stepY;
      tMaxY += tDeltaY;
    }
  }
  // Floating drift in the walk can stop one cell short; finish the end cell.
  for (std::uint32_t o : cells_[static_cast<std::size_t>(jy) * cols_ + jx]) {
    if (static_cast<std::int64_t>(o) == skipA || static_cast<std::int64_t>(o) == skipB) continue;
    if (std::find(tested.begin(), tested.end(), o) != tested.end()) continue;
    tested.push_back(o);
    if (segmentCrossesInterior(obstacles_[o], a, b, tol_)) return false;
  }
  return true;
}

std::vector<std::pair<std::uint32_t, double>> VisibilityOracle::visibleCorners(std::size_t node) const {
  std::vector<std::pair<std::uint32_t, double>> out;
  const Point c = centers_[node];
  const auto self = static_cast<std::int64_t>(node);
  for (std::size_t k = 0; k < corners_.size(); ++k) {
    if (cornerOwner_[k] == node) continue;
    if (!tangentAt(k, c)) continue;
    if (!clear(c, corners_[k], self)) continue;
    out.emplace_back(static_cast<std::uint32_t>(k), distance(c, corners_[k]));
  }
  return out;
}

VisibilityOracle::Search VisibilityOracle::searchFrom(std::size_t s) const {
  Search out;
  out.dist.assign(corners_.size(), kInf);
  out.parent.assign(corners_.size(), -1);
  using Entry = std::pair<double, std::uint32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
  for (auto [k, w] : centerVisible_[s]) {
    if (w < out.dist[k]) {
      out.dist[k] = w;
      queue.emplace(w, k);
    }
  }
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d > out.dist[u]) continue;
    for (const Arc& a : adjacency_[u]) {
      const double nd = d + a.weight;
      if (nd < out.dist[a.to]) {
        out.dist[a.to] = nd;
        out.parent[a.to] = u;
        queue.emplace(nd, a.to);
      }
    }
  }
  return out;
}

std::vector<double> VisibilityOracle::lengthsFrom(std::size_t s, std::span<const std::size_t> targets) const {
  const Search search = searchFrom(s);
  std::vector<double> out;
  out.reserve(targets.size());
  for (std::size_t t : targets) {
    double best = kInf;
    if (clear(centers_[s], centers_[t], static_cast<std::int64_t>(s), static_cast<std::int64_t>(t))) {
      best = distance(centers_[s], centers_[t]);
    }
    for (auto [k, w] : centerVisible_[t]) best = std::min(best, search.dist[k] + w);
    out.push_back(best);
  }
  return out;
}

OraclePath VisibilityOracle::shortestPath(std::size_t s, std::size_t t) const {
  OraclePath out;
  out.length = kInf;
  if (clear(centers_[s], centers_[t], static_cast<std::int64_t>(s), static_cast<std::int64_t>(t))) {
    out.length = distance(centers_[s], centers_[t]);
    out.path.vertices = {centers_[s], centers_[t]};
  }
  const Search search = searchFrom(s);
  std::int64_t last = -1;
  for (auto [k, w] : centerVisible_[t]) {
    if (search.dist[k] + w < out.length) {
      out.length = search.dist[k] + w;
      last = k;
    }
  }
  if (last >= 0) {
    std::vector<Point> rev{centers_[t]};
    for (std::int64_t k = last; k >= 0; k = search.parent[k]) rev.push_back(corners_[k]);
    rev.push_back(centers_[s]);
    out.path.vertices.assign(rev.rbegin(), rev.rend());
  }
  return out;
}

OraclePath polygonGeodesic(std::span<const std::array<Point, 3>> triangles, const Point& s, const Point& t) {
  std::vector<Point> pts{s, t};
  Rect bounds = Rect::empty();
  for (const auto& tri : triangles) {
    for (const Point& p : tri) {
      bounds.expand(p);
      if (std::find(pts.begin(), pts.end(), p) == pts.end()) pts.push_back(p);
    }
  }
  const double tol = 1e-9 * std::max({1.0, bounds.width(), bounds.height()});

  auto inside = [&](const Point& m) {
    for (const auto& tri : triangles) {
      bool ok = true;
      for (int k = 0; k < 3 && ok; ++k) {
        const Point& p = tri[k];
        const Point& q = tri[(k + 1) % 3];
        const double len = distance(p, q);
        ok = len == 0.0 || cross(q - p, m - p) / len >= -tol;
      }
      if (ok) return true;
    }
    return false;
  };
  auto contained = [&](const Point& a, const Point& b) {
    const Point d = b - a;
    std::vector<double> cuts{0.0, 1.0};
    for (const auto& tri : triangles) {
      for (int k = 0; k < 3; ++k) {
        const Point& p = tri[k];
        const Point e = tri[(k + 1) % 3] - p;
        const double denom = cross(d, e);
        if (denom == 0.0) continue;
        const double u = cross(p - a, e) / denom;
        const double v = cross(p - a, d) / denom;
        if (u > 0.0 && u < 1.0 && v >= -1e-12 && v <= 1.0 + 1e-12) cuts.push_back(u);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      if (cuts[k + 1] - cuts[k] <= 1e-12) continue;
      if (!inside(a + d * (0.5 * (cuts[k] + cuts[k + 1])))) return false;
    }
    return true;
  };

  const std::size_t n = pts.size();
  std::vector<double> dist(n, kInf);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<bool> done(n, false);
  dist[0] = 0.0;
  for (std::size_t iter = 0; iter < n; ++iter) {
    std::size_t u = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!done[i] && dist[i] < kInf && (u == n || dist[i] < dist[u])) u = i;
    }
    if (u == n || u == 1) break;
    done[u] = true;
    for (std::size_t v = 0; v < n; ++v) {
      if (done[v]) continue;
      const double nd = dist[u] + distance(pts[u], pts[v]);
      if (nd < dist[v] && contained(pts[u], pts[v])) {
        dist[v] = nd;
        parent[v] = static_cast<std::int64_t>(u);
      }
    }
  }
  OraclePath out;
  out.length = dist[1];
  if (dist[1] < kInf) {
    std::vector<Point> rev;
    for (std::int64_t k = 1; k >= 0; k = parent[k]) rev.push_back(pts[k]);
    out.path.vertices.assign(rev.rbegin(), rev.rend());
  }
  return out;
}

}  // namespace sleevemap
