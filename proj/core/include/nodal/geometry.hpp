#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "nodal/errors.hpp"

namespace nodal::geo {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

using Point2 = Vec2;

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
inline double dist(Point2 a, Point2 b) { return norm(b - a); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }  // rotate +90 degrees

inline Vec2 normalized(Vec2 a) {
    double n = norm(a);
    if (n == 0.0) throw GeometryError("cannot normalize zero vector");
    return a / n;
}

// Distance from p to segment [a,b].
double point_segment_distance(Point2 p, Point2 a, Point2 b);

struct BBox {
    double xmin = 0, ymin = 0, xmax = 0, ymax = 0;
    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    Point2 min() const { return {xmin, ymin}; }
    Point2 max() const { return {xmax, ymax}; }
};

// Infinite oriented line: origin plus unit direction (|dir| = 1 within 1e-12).
struct Line2 {
    Point2 origin;
    Vec2 dir;

    static Line2 through(Point2 o, Vec2 direction) { return {o, normalized(direction)}; }
    Point2 at(double t) const { return origin + t * dir; }
    // Signed perpendicular offset of p from the line (positive to the left of dir).
    double offset(Point2 p) const { return cross(dir, p - origin); }
    double project(Point2 p) const { return dot(p - origin, dir); }
};

// Angle of the (unoriented) line direction against the +x axis, in [0, pi).
double line_angle_mod_pi(Vec2 dir);
// Angle of the line `dir` against the oriented reference line `base`, in [0, pi).
double line_angle_mod_pi(Vec2 dir, Vec2 base);
// Smaller of the two angles formed by two lines, in [0, pi/2].
double smaller_angle_between(Vec2 a, Vec2 b);

Point2 reflect_point_across_line(Point2 p, const Line2& L);
// Perpendicular bisector of x and y; throws GeometryError if |y - x| <= tol.
Line2 perpendicular_bisector(Point2 x, Point2 y, double tol = 1e-14);

enum class DomainKind { generic, obtuse_triangle, lip };

struct LipParams {
    double a = 0.0;
    double b = 0.0;
};

enum class PointLocation { inside, boundary, outside };

// Simple CCW polygon.  Construct through build_polygon which validates input.
class Domain {
public:
    const std::vector<Point2>& vertices() const { return verts_; }
    std::size_t edge_count() const { return verts_.size(); }
    std::pair<Point2, Point2> edge(std::size_t i) const {
        return {verts_[i], verts_[(i + 1) % verts_.size()]};
    }
    Line2 edge_line(std::size_t i) const {
        auto [a, b] = edge(i);
        return Line2::through(a, b - a);
    }
    DomainKind kind() const { return kind_; }
    const std::optional<LipParams>& lip_params() const { return lip_; }

    double area() const { return area_; }
    double diameter() const { return diameter_; }
    const BBox& bbox() const { return bbox_; }
    Point2 centroid() const;

    friend Domain build_polygon(std::vector<Point2> vertices, DomainKind kind,
                                std::optional<LipParams> lip);

private:
    Domain() = default;
    std::vector<Point2> verts_;
    DomainKind kind_ = DomainKind::generic;
    std::optional<LipParams> lip_;
    double area_ = 0.0;
    double diameter_ = 0.0;
    BBox bbox_;
};

// Validates the polygon (>= 3 vertices, simple, non-degenerate), fixes a
// clockwise input to CCW keeping vertices[0] first.
Domain build_polygon(std::vector<Point2> vertices,
                     DomainKind kind = DomainKind::generic,
                     std::optional<LipParams> lip = std::nullopt);

// Classification with an absolute boundary band of width 1e-9.
PointLocation point_in_domain(const Domain& d, Point2 p);
// Distance from p to the polygon boundary.
double boundary_distance(const Domain& d, Point2 p);

// Maximal sub-segments of L inside closure(D), endpoints on the boundary.
std::vector<std::pair<Point2, Point2>> line_domain_clip(const Line2& L, const Domain& d);

// True iff the boundary splits into an upper and a lower chain, each
// single-valued in x with all edge slopes |dy/dx| <= 1 (+1e-12); vertical
// runs are allowed only at the extreme x values.
bool is_lip_domain(const Domain& d);

// Marker points of the obtuse-triangle construction.  c4/c10 sit on c1c3,
// c6/c11 on c2c3, c5/c7/c8/c9/c12 on c1c2; r1 = d(c1,c3)/2, r2 = d(c2,c3)/2.
// beta1/beta2 are the mirror angles (against the oriented line c1->c2, mod pi)
// at which a mirror is perpendicular to c2c3 resp. c1c3; beta1 < beta2.
struct TriangleMarkers {
    Point2 c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12;
    double r1 = 0.0, r2 = 0.0;
    double beta1 = 0.0, beta2 = 0.0;
    // +1 if c3 lies to the left of c1->c2, -1 otherwise; angle conventions are
    // measured in the frame where the triangle interior is above the base.
    double side_sign = 1.0;

    Vec2 base_dir() const;                     // unit vector c1 -> c2
    double mirror_angle(const Line2& k) const; // angle of k against the base, in [0, pi)
};

// Throws GeometryError when the angle at c3 is not strictly obtuse, the
// triangle is degenerate, or a perpendicular foot leaves its target segment
// (marker inconsistency).
TriangleMarkers obtuse_triangle_markers(Point2 c1, Point2 c2, Point2 c3);

// Tagged membership predicate over the closure of a domain.  Membership uses a
// 1e-9 absolute band so that boundary points count as members.
class Region {
public:
    enum class Tag { triangle_a, triangle_a1, lip_a, lip_a1, half_domain };

    Tag tag() const { return tag_; }
    bool contains(Point2 p) const;

    // Signed margin of the region constraints at p (>= 0 inside, < 0 outside).
    // The ambient-domain test is not included; callers pass points already in
    // the domain closure.
    double margin(Point2 p) const;

    // Lower bound for margin over the segment [a,b]; exact for disc-complement
    // and strip regions, -inf for pentagon unions (forces per-point sampling).
    double segment_margin(Point2 a, Point2 b) const;

    // Direct factories, mainly for tests and adversarial inputs.
    static Region lip_strip(double halfwidth, const Domain& d, Tag tag = Tag::lip_a);
    static Region polygon_region(std::vector<Point2> verts, const Domain& d,
                                 Tag tag = Tag::half_domain);

    friend Region region_A_triangle(const TriangleMarkers& m, const Domain& d);
    friend Region region_A1_triangle(const TriangleMarkers& m, const Domain& d);

private:
    struct DiscComplement {           // triangle region A
        Point2 c1, c2;
        double r1, r2;
    };
    struct PentagonUnion {            // triangle region A1
        std::vector<Point2> penta1, penta2;
    };
    struct Strip {                    // lip regions A, A1 (|x| <= halfwidth)
        double halfwidth;
    };
    struct Poly {                     // half-domain D1 and friends
        std::vector<Point2> verts;
    };

    Region(Tag t, const Domain& d) : tag_(t), domain_(&d) {}
    Tag tag_;
    const Domain* domain_;
    std::variant<DiscComplement, PentagonUnion, Strip, Poly> impl_;
};

// Example-1 region A: points of closure(D) outside both discs.
Region region_A_triangle(const TriangleMarkers& m, const Domain& d);
// Example-1 region A1: union of the pentagons c3c4c8c9c6 and c3c10c5c7c11.
Region region_A1_triangle(const TriangleMarkers& m, const Domain& d);
// Example-2 strips A (halfwidth b + 1/(4a)) and A1 (one unit wider).  Validates
// a > 1/2, b < a - 1/(4a) and the required shape of D.
std::pair<Region, Region> lip_domain_regions(double a, double b, const Domain& d);

// point-in-polygon with boundary counted as inside (band 1e-9)
bool point_in_polygon(Point2 p, const std::vector<Point2>& poly);
double polygon_signed_area(const std::vector<Point2>& poly);
// Signed distance to the polygon: positive inside, negative outside.
double polygon_signed_distance(Point2 p, const std::vector<Point2>& poly);

// Fan/ear decomposition of a simple polygon into triangles (indices).
std::vector<std::array<int, 3>> ear_clip(const std::vector<Point2>& poly);
// Area of the intersection of a simple polygon with an axis-aligned box.
double polygon_box_intersection_area(const std::vector<Point2>& poly, const BBox& box);

}  // namespace nodal::geo
