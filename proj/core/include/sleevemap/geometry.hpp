#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sleevemap {

/// Relative tolerance for collinearity and coincidence tests.
inline constexpr double kEpsGeom = 1e-9;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point&, const Point&) = default;
  constexpr Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
  constexpr Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
  constexpr Point operator*(double s) const { return {x * s, y * s}; }
};

inline double cross(const Point& a, const Point& b) { return a.x * b.y - a.y * b.x; }
inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Point& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point& a, const Point& b) { return norm(b - a); }
inline bool isFinite(const Point& p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Throws ParameterError for NaN or infinite coordinates.
Point checkedPoint(double x, double y);

struct Rect {
  Point min;
  Point max;

  friend constexpr bool operator==(const Rect&, const Rect&) = default;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  Point center() const { return {(min.x + max.x) * 0.5, (min.y + max.y) * 0.5}; }
  bool contains(const Point& p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  bool strictlyContains(const Point& p) const {
    return p.x > min.x && p.x < max.x && p.y > min.y && p.y < max.y;
  }
  Rect inflated(double d) const { return {{min.x - d, min.y - d}, {max.x + d, max.y + d}}; }
  /// Box scaled about its center.
  Rect scaled(double s) const;
  static Rect around(const Point& c, double w, double h) {
    return {{c.x - w * 0.5, c.y - h * 0.5}, {c.x + w * 0.5, c.y + h * 0.5}};
  }
  static Rect empty();
  bool isEmpty() const { return min.x > max.x || min.y > max.y; }
  void expand(const Point& p);
  void expand(const Rect& r);
};

/// Positive-area overlap of the two closed boxes (touching boxes do not overlap).
bool interiorsOverlap(const Rect& a, const Rect& b);

/// Separation between two boxes along the best axis; negative when they overlap.
double boxGap(const Rect& a, const Rect& b);

struct Polyline {
  std::vector<Point> vertices;

  double length() const;
  /// Point at the given arc length from the start, clamped to the curve.
  Point pointAtLength(double s) const;
};

struct ConvexPolygon {
  std::vector<Point> vertices;  // counterclockwise

  bool contains(const Point& p) const;
  /// True when p lies strictly inside (boundary excluded).
  bool strictlyContains(const Point& p) const;
  double area() const;
  Rect bounds() const;
};

/// Sign of (b-a)x(c-a); 0 when |sin| of the angle at a is within kEpsGeom.
int orient(const Point& a, const Point& b, const Point& c);

enum class IntersectionKind { None, Proper, EndpointTouch, Overlap };

struct SegmentIntersection {
  IntersectionKind kind = IntersectionKind::None;
  Point point;     // first intersection point
  Point point2;    // second endpoint of the shared piece for Overlap
};

SegmentIntersection segmentIntersection(const Point& p1, const Point& p2, const Point& q1,
                                        const Point& q2);

/// Box grown by `padding` with each corner replaced by `cornerCut` chords of the
/// padding circle around that corner. Throws ParameterError for padding <= 0.
ConvexPolygon inflateBoxToPolygon(const Rect& box, double padding, int cornerCut);

/// Distance from p to the closed segment [a,b].
double pointSegmentDistance(const Point& p, const Point& a, const Point& b);

/// Twice the signed area of a simple polygon.
double signedArea2(std::span<const Point> ring);

}  // namespace sleevemap
