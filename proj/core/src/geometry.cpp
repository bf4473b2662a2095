#include "sleevemap/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

namespace sleevemap {

Point checkedPoint(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw ParameterError("non-finite coordinate");
  }
  return {x, y};
}

Rect Rect::scaled(double s) const {
  if (s == 1.0) return *this;
  const Point c = center();
  return around(c, width() * s, height() * s);
}

Rect Rect::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf}, {-inf, -inf}};
}

void Rect::expand(const Point& p) {
  min.x = std::min(min.x, p.x);
  min.y = std::min(min.y, p.y);
  max.x = std::max(max.x, p.x);
  max.y = std::max(max.y, p.y);
}

void Rect::expand(const Rect& r) {
  expand(r.min);
  expand(r.max);
}

bool interiorsOverlap(const Rect& a, const Rect& b) {
  return a.min.x < b.max.x && b.min.x < a.max.x && a.min.y < b.max.y && b.min.y < a.max.y;
}

double boxGap(const Rect& a, const Rect& b) {
  const double gx = std::max(a.min.x - b.max.x, b.min.x - a.max.x);
  const double gy = std::max(a.min.y - b.max.y, b.min.y - a.max.y);
  return std::max(gx, gy);
}

double Polyline::length() const {
  double total = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) total += distance(vertices[i - 1], vertices[i]);
  return total;
}

Point Polyline::pointAtLength(double s) const {
  if (vertices.empty()) return {};
  for (std::size_t i = 1; i < vertices.size(); ++i) {
    const double seg = distance(vertices[i - 1], vertices[i]);
    if (s <= seg && seg > 0.0) {
      const double t = s / seg;
      return vertices[i - 1] + (vertices[i] - vertices[i - 1]) * t;
    }
    s -= seg;
  }
  return vertices.back();
}

bool ConvexPolygon::contains(const Point& p) const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (orient(vertices[i], vertices[(i + 1) % n], p) < 0) return false;
  }
  return n >= 3;
}

bool ConvexPolygon::strictlyContains(const Point& p) const {
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (orient(vertices[i], vertices[(i + 1) % n], p) <= 0) return false;
  }
  return n >= 3;
}

double ConvexPolygon::area() const { return 0.5 * signedArea2(vertices); }

Rect ConvexPolygon::bounds() const {
  Rect r = Rect::empty();
  for (const Point& p : vertices) r.expand(p);
  return r;
}

int orient(const Point& a, const Point& b, const Point& c) {
  const Point u = b - a;
  const Point v = c - a;
  const double det = cross(u, v);
  const double tol = kEpsGeom * norm(u) * norm(v);
  if (det > tol) return 1;
  if (det < -tol) return -1;
  return 0;
}

namespace {

// Parameter of p projected on [a,b]; callers ensure a != b.
double projectParam(const Point& a, const Point& b, const Point& p) {
  const Point d = b - a;
  return dot(p - a, d) / dot(d, d);
}

bool onClosedSegment(const Point& a, const Point& b, const Point& p) {
  if (a == b) return p == a;
  const double t = projectParam(a, b, p);
  const double slack = kEpsGeom;
  return t >= -slack && t <= 1.0 + slack;
}

}  // namespace

SegmentIntersection segmentIntersection(const Point& p1, const Point& p2, const Point& q1,
                                        const Point& q2) {
  SegmentIntersection out;
  const int o1 = orient(p1, p2, q1);
  const int o2 = orient(p1, p2, q2);
  const int o3 = orient(q1, q2, p1);
  const int o4 = orient(q1, q2, p2);

  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: intersect parameter intervals along p.
    double a = projectParam(p1, p2, q1);
    double b = projectParam(p1, p2, q2);
    if (a > b) std::swap(a, b);
    const double lo = std::max(0.0, a);
    const double hi = std::min(1.0, b);
    if (hi < lo - kEpsGeom) return out;
    const Point d = p2 - p1;
    out.point = p1 + d * lo;
    out.point2 = p1 + d * hi;
    if ((hi - lo) * norm(d) <= kEpsGeom * std::max(1.0, norm(d))) {
      out.kind = IntersectionKind::EndpointTouch;
      out.point2 = out.point;
    } else {
      out.kind = IntersectionKind::Overlap;
    }
    return out;
  }

  if (o1 * o2 < 0 && o3 * o4 < 0) {
    const Point r = p2 - p1;
    const Point s = q2 - q1;
    const double t = cross(q1 - p1, s) / cross(r, s);
    out.kind = IntersectionKind::Proper;
    out.point = p1 + r * t;
    out.point2 = out.point;
    return out;
  }

  auto touch = [&](const Point& p) {
    out.kind = IntersectionKind::EndpointTouch;
    out.point = p;
    out.point2 = p;
    return out;
  };
  if (o1 == 0 && onClosedSegment(p1, p2, q1)) return touch(q1);
  if (o2 == 0 && onClosedSegment(p1, p2, q2)) return touch(q2);
  if (o3 == 0 && onClosedSegment(q1, q2, p1)) return touch(p1);
  if (o4 == 0 && onClosedSegment(q1, q2, p2)) return touch(p2);
  return out;
}

ConvexPolygon inflateBoxToPolygon(const Rect& box, double padding, int cornerCut) {
  if (!(padding > 0.0)) throw ParameterError("padding must be positive");
  if (cornerCut < 1) throw ParameterError("cornerCut must be at least 1");

  // Corners in counterclockwise order with the start angle of their arc.
  const Point corners[4] = {box.max, {box.min.x, box.max.y}, box.min, {box.max.x, box.min.y}};
  const double startAngle[4] = {0.0, 0.5, 1.0, 1.5};

  ConvexPolygon poly;
  poly.vertices.reserve(4 * (cornerCut + 1));
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i <= cornerCut; ++i) {
      const double theta = std::numbers::pi * (startAngle[c] + 0.5 * i / cornerCut);
      Point p{corners[c].x + padding * std::cos(theta), corners[c].y + padding * std::sin(theta)};
      // Exact axis values keep the straight sides axis-aligned.
      if (i == 0 || i == cornerCut) {
        const int quarter = (c + (i == cornerCut ? 1 : 0)) % 4;
        switch (quarter) {
          case 0: p = {corners[c].x + padding, corners[c].y}; break;
          case 1: p = {corners[c].x, corners[c].y + padding}; break;
          case 2: p = {corners[c].x - padding, corners[c].y}; break;
          default: p = {corners[c].x, corners[c].y - padding}; break;
        }
      }
      if (poly.vertices.empty() || !(poly.vertices.back() == p)) poly.vertices.push_back(p);
    }
  }
  while (poly.vertices.size() > 1 && poly.vertices.front() == poly.vertices.back()) {
    poly.vertices.pop_back();
  }
  return poly;
}

double pointSegmentDistance(const Point& p, const Point& a, const Point& b) {
  if (a == b) return distance(p, a);
  const double t = std::clamp(projectParam(a, b, p), 0.0, 1.0);
  return distance(p, a + (b - a) * t);
}

double signedArea2(std::span<const Point> ring) {
  double s = 0.0;
  const std::size_t n = ring.size();
  for (std::size_t i = 0; i < n; ++i) s += cross(ring[i], ring[(i + 1) % n]);
  return s;
}

}  // namespace sleevemap
