#pragma once

// 2D geometric kernel: oriented boxes, convex clipping, distances, nearest
// centroid assignment and a grid medial-axis extractor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace roomopt {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
inline Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

/// Maps any angle onto [-pi, pi).
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  double out = r - std::numbers::pi;
  // fmod can round up to exactly +pi for inputs a hair below -pi.
  if (out >= std::numbers::pi) out -= two_pi;
  return out;
}

/// Axis-aligned extent of a rectangular room, origin at the southwest corner.
struct RoomExtent {
  double width = 0.0;   // along +x
  double length = 0.0;  // along +y
};

/// Rectangle footprint rotated about its center.
///
/// `width` runs along the object's left-right axis and `length` along its
/// front-back axis. theta = 0 means the front faces +y; positive angles turn
/// counterclockwise.
struct OrientedBox {
  Point2 center;
  double width = 1.0;
  double length = 1.0;
  double theta = 0.0;

  Point2 front() const { return {-std::sin(theta), std::cos(theta)}; }
  Point2 right() const { return {std::cos(theta), std::sin(theta)}; }
  /// Midpoint of the back edge.
  Point2 back_mid() const { return center - (0.5 * length) * front(); }
};

/// Corners in counterclockwise order, starting at the back-left corner.
inline std::array<Point2, 4> obb_corners(const OrientedBox& box) {
  const Point2 r = box.right();
  const Point2 f = box.front();
  const double hw = 0.5 * box.width;
  const double hl = 0.5 * box.length;
  return {box.center - hw * r - hl * f, box.center + hw * r - hl * f,
          box.center + hw * r + hl * f, box.center - hw * r + hl * f};
}

struct Aabb {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool overlaps(const Aabb& o) const {
    return min_x <= o.max_x && o.min_x <= max_x && min_y <= o.max_y && o.min_y <= max_y;
  }
  double area() const { return std::max(0.0, max_x - min_x) * std::max(0.0, max_y - min_y); }
};

/// Signed shoelace area; positive for counterclockwise loops.
inline double signed_area(std::span<const Point2> pts) {
  if (pts.size() < 3) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    acc += cross(pts[i], pts[(i + 1) % pts.size()]);
  }
  return 0.5 * acc;
}

/// Convex polygon with counterclockwise vertices. Clipping can produce
/// empty, point or segment results; those are kept and reported as
/// degenerate rather than rejected.
class ConvexPolygon {
 public:
  /// Area below which a polygon counts as degenerate (touching, not overlapping).
  static constexpr double kDegenerateArea = 1e-12;

  ConvexPolygon() = default;
  explicit ConvexPolygon(std::vector<Point2> vertices) : vertices_(std::move(vertices)) {
    if (signed_area(vertices_) < 0.0) std::reverse(vertices_.begin(), vertices_.end());
  }
  explicit ConvexPolygon(const OrientedBox& box) {
    const auto c = obb_corners(box);
    vertices_.assign(c.begin(), c.end());
  }

  const std::vector<Point2>& vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  double area() const { return std::abs(signed_area(vertices_)); }
  bool is_degenerate() const { return vertices_.size() < 3 || area() <= kDegenerateArea; }

  Aabb bounds() const {
    Aabb b{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : vertices_) {
      b.min_x = std::min(b.min_x, p.x);
      b.min_y = std::min(b.min_y, p.y);
      b.max_x = std::max(b.max_x, p.x);
      b.max_y = std::max(b.max_y, p.y);
    }
    return b;
  }

  /// Boundary points count as inside.
  bool contains(Point2 p, double eps = 1e-12) const {
    if (vertices_.size() < 3) return false;
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      const Point2 a = vertices_[i];
      const Point2 b = vertices_[(i + 1) % vertices_.size()];
      if (cross(b - a, p - a) < -eps * std::max(1.0, norm(b - a))) return false;
    }
    return true;
  }

 private:
  std::vector<Point2> vertices_;
};

namespace detail {

// Drops repeated and collinear vertices left behind by clipping.
inline std::vector<Point2> tidy_loop(std::vector<Point2> pts) {
  constexpr double kEps = 1e-12;
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) {
    if (out.empty() || distance(out.back(), p) > kEps) out.push_back(p);
  }
  while (out.size() > 1 && distance(out.front(), out.back()) <= kEps) out.pop_back();
  if (out.size() < 3) return out;
  bool changed = true;
  while (changed && out.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
      const Point2 prev = out[(i + out.size() - 1) % out.size()];
      const Point2 next = out[(i + 1) % out.size()];
      const Point2 e1 = out[i] - prev;
      const Point2 e2 = next - out[i];
      if (std::abs(cross(e1, e2)) <= kEps * std::max(1.0, norm(e1) * norm(e2)) &&
          dot(e1, e2) >= 0.0) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Intersection of two convex polygons by successive half-plane clipping of
/// `a` against every edge of `b`.
inline ConvexPolygon convex_clip(const ConvexPolygon& a, const ConvexPolygon& b) {
  if (a.size() < 3 || b.size() < 3) return {};
  if (!a.bounds().overlaps(b.bounds())) return {};

  std::vector<Point2> out(a.vertices());
  std::vector<Point2> in;
  const auto& clip = b.vertices();
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Point2 p0 = clip[e];
    const Point2 p1 = clip[(e + 1) % clip.size()];
    const Point2 edge = p1 - p0;
    in.swap(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Point2 cur = in[i];
      const Point2 nxt = in[(i + 1) % in.size()];
      const double dc = cross(edge, cur - p0);
      const double dn = cross(edge, nxt - p0);
      if (dc >= 0.0) out.push_back(cur);
      if ((dc >= 0.0) != (dn >= 0.0)) {
        const double t = dc / (dc - dn);
        out.push_back(cur + t * (nxt - cur));
      }
    }
  }
  // Points and segments stay representable; they are degenerate by size.
  return ConvexPolygon(detail::tidy_loop(std::move(out)));
}

/// Sum of squared edge lengths; zero for degenerate polygons.
inline double side_cost(const ConvexPolygon& poly) {
  if (poly.is_degenerate()) return 0.0;
  const auto& v = poly.vertices();
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point2 d = v[(i + 1) % v.size()] - v[i];
    acc += dot(d, d);
  }
  return acc;
}

inline double overlap_area(const ConvexPolygon& a, const ConvexPolygon& b) {
  const auto clipped = convex_clip(a, b);
  return clipped.is_degenerate() ? 0.0 : clipped.area();
}

inline double dist_point_segment(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 <= 0.0) return distance(p, a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + t * ab);
}

/// Distance to the polygon outline, regardless of which side p is on.
inline double dist_point_polygon_boundary(Point2 p, const ConvexPolygon& poly) {
  const auto& v = poly.vertices();
  if (v.empty()) return std::numeric_limits<double>::infinity();
  if (v.size() == 1) return distance(p, v[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    best = std::min(best, dist_point_segment(p, v[i], v[(i + 1) % v.size()]));
  }
  return best;
}

/// Distance to the filled polygon; zero inside.
inline double dist_point_polygon(Point2 p, const ConvexPolygon& poly) {
  if (poly.contains(p)) return 0.0;
  return dist_point_polygon_boundary(p, poly);
}

/// Smallest distance between two convex polygons; zero when they touch or overlap.
inline double polygon_gap(const ConvexPolygon& a, const ConvexPolygon& b) {
  for (const auto& p : a.vertices())
    if (b.contains(p)) return 0.0;
  for (const auto& p : b.vertices())
    if (a.contains(p)) return 0.0;
  if (!convex_clip(a, b).empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : a.vertices()) best = std::min(best, dist_point_polygon_boundary(p, b));
  for (const auto& p : b.vertices()) best = std::min(best, dist_point_polygon_boundary(p, a));
  return best;
}

inline bool inside_room(Point2 p, RoomExtent room) {
  return p.x >= 0.0 && p.x <= room.width && p.y >= 0.0 && p.y <= room.length;
}

/// Euclidean distance from p to the outline of the room rectangle.
inline double dist_point_boundary(Point2 p, RoomExtent room) {
  if (inside_room(p, room)) {
    return std::min({p.x, room.width - p.x, p.y, room.length - p.y});
  }
  const double cx = std::clamp(p.x, 0.0, room.width);
  const double cy = std::clamp(p.y, 0.0, room.length);
  return std::hypot(p.x - cx, p.y - cy);
}

inline ConvexPolygon room_polygon(RoomExtent room) {
  return ConvexPolygon(std::vector<Point2>{
      {0.0, 0.0}, {room.width, 0.0}, {room.width, room.length}, {0.0, room.length}});
}

class ZoningError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Index of the nearest centroid; ties go to the lowest index.
inline std::size_t voronoi_assign(Point2 p, std::span<const Point2> centroids) {
  if (centroids.empty()) throw ZoningError("voronoi_assign: no zone centroids");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const Point2 d = p - centroids[i];
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

/// Voronoi cell of centroid `index`, clipped to the room rectangle.
inline ConvexPolygon voronoi_cell(std::size_t index, std::span<const Point2> centroids,
                                  RoomExtent room) {
  if (index >= centroids.size()) throw ZoningError("voronoi_cell: index out of range");
  std::vector<Point2> cell = room_polygon(room).vertices();
  const Point2 c = centroids[index];
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    if (j == index || cell.empty()) continue;
    const Point2 o = centroids[j];
    const Point2 n = o - c;  // keep points with dot(p - mid, n) <= 0
    if (dot(n, n) == 0.0) {
      // Coincident centroids: the lower index owns the whole cell.
      if (j < index) cell.clear();
      continue;
    }
    const Point2 mid = 0.5 * (c + o);
    std::vector<Point2> out;
    for (std::size_t i = 0; i < cell.size(); ++i) {
      const Point2 cur = cell[i];
      const Point2 nxt = cell[(i + 1) % cell.size()];
      const double dc = -dot(cur - mid, n);
      const double dn = -dot(nxt - mid, n);
      if (dc >= 0.0) out.push_back(cur);
      if ((dc >= 0.0) != (dn >= 0.0)) out.push_back(cur + (dc / (dc - dn)) * (nxt - cur));
    }
    cell = detail::tidy_loop(std::move(out));
  }
  return ConvexPolygon(std::move(cell));
}

/// Grid skeleton of the free space together with its dilation into a walkway.
struct MedialAxis {
  double cell = 0.05;
  std::vector<Point2> skeleton;  // ridge cells with at least half the walkway width of clearance
  std::vector<Point2> pathway;   // cells within half the walkway width of the skeleton
};

inline constexpr double kPathwayWidth = 0.6;

/// Ridge cells of the distance field over the free space of the room.
///
/// A cell is a ridge when its clearance is a local maximum along one of the
/// four grid directions (non-strict on one side, strict on the other).
/// Ridges with clearance below half the walkway width are discarded, then the
/// remaining skeleton is dilated to the walkway width.
inline MedialAxis medial_axis(RoomExtent room, std::span<const OrientedBox> obstacles,
                              double cell = 0.05, double walkway = kPathwayWidth) {
  if (!(cell > 0.0)) throw std::invalid_argument("medial_axis: cell must be positive");
  MedialAxis out;
  out.cell = cell;
  const int nx = std::max(1, static_cast<int>(std::ceil(room.width / cell - 1e-9)));
  const int ny = std::max(1, static_cast<int>(std::ceil(room.length / cell - 1e-9)));
  const auto center_of = [&](int i, int j) {
    return Point2{std::min((i + 0.5) * cell, room.width), std::min((j + 0.5) * cell, room.length)};
  };

  std::vector<ConvexPolygon> polys;
  polys.reserve(obstacles.size());
  for (const auto& b : obstacles) polys.emplace_back(b);

  std::vector<double> clearance(static_cast<std::size_t>(nx) * ny, 0.0);
  const auto at = [&](int i, int j) -> double& {
    return clearance[static_cast<std::size_t>(j) * nx + i];
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const Point2 p = center_of(i, j);
      double d = dist_point_boundary(p, room);
      for (const auto& poly : polys) {
        if (poly.contains(p)) {
          d = 0.0;
          break;
        }
        d = std::min(d, dist_point_polygon_boundary(p, poly));
      }
      at(i, j) = d;
    }
  }

  const double half = 0.5 * walkway;
  constexpr double kTie = 1e-12;
  const auto value = [&](int i, int j) {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return 0.0;
    return at(i, j);
  };
  static constexpr std::array<std::array<int, 2>, 4> kDirs{{{1, 0}, {0, 1}, {1, 1}, {1, -1}}};
  std::vector<char> ridge(clearance.size(), 0);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const double d = at(i, j);
      if (d <= 0.0 || d < half) continue;
      for (const auto& dir : kDirs) {
        const double a = value(i - dir[0], j - dir[1]);
        const double b = value(i + dir[0], j + dir[1]);
        if (d >= a - kTie && d >= b - kTie && (d > a + kTie || d > b + kTie)) {
          ridge[static_cast<std::size_t>(j) * nx + i] = 1;
          break;
        }
      }
    }
  }

  std::vector<char> path(clearance.size(), 0);
  const int reach = static_cast<int>(std::ceil(half / cell));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (!ridge[static_cast<std::size_t>(j) * nx + i]) continue;
      const Point2 c = center_of(i, j);
      out.skeleton.push_back(c);
      for (int dj = -reach; dj <= reach; ++dj) {
        for (int di = -reach; di <= reach; ++di) {
          const int ii = i + di;
          const int jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx || jj >= ny) continue;
          if (distance(center_of(ii, jj), c) <= half + 1e-12) {
            path[static_cast<std::size_t>(jj) * nx + ii] = 1;
          }
        }
      }
    }
  }
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (path[static_cast<std::size_t>(j) * nx + i]) out.pathway.push_back(center_of(i, j));
  return out;
}

}  // namespace roomopt
