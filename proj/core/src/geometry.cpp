#include "nodal/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nodal::geo {

namespace {

constexpr double kBoundaryBand = 1e-9;
constexpr double kRegionBand = 1e-9;
constexpr double kParallelTol = 1e-14;

// Proper or touching intersection test for segments ab and cd.
bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    auto orient = [](Point2 p, Point2 q, Point2 r) { return cross(q - p, r - p); };
    double d1 = orient(c, d, a);
    double d2 = orient(c, d, b);
    double d3 = orient(a, b, c);
    double d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    auto on_segment = [](Point2 p, Point2 q, Point2 r) {
        return std::min(p.x, r.x) - 1e-15 <= q.x && q.x <= std::max(p.x, r.x) + 1e-15 &&
               std::min(p.y, r.y) - 1e-15 <= q.y && q.y <= std::max(p.y, r.y) + 1e-15;
    };
    if (d1 == 0 && on_segment(c, a, d)) return true;
    if (d2 == 0 && on_segment(c, b, d)) return true;
    if (d3 == 0 && on_segment(a, c, b)) return true;
    if (d4 == 0 && on_segment(a, d, b)) return true;
    return false;
}

}  // namespace

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    Vec2 e = b - a;
    double len2 = norm2(e);
    if (len2 == 0.0) return dist(p, a);
    double t = std::clamp(dot(p - a, e) / len2, 0.0, 1.0);
    return dist(p, a + t * e);
}

double line_angle_mod_pi(Vec2 dir) {
    double a = std::atan2(dir.y, dir.x);
    if (a < 0) a += M_PI;
    if (a >= M_PI) a -= M_PI;
    return a;
}

double line_angle_mod_pi(Vec2 dir, Vec2 base) {
    double a = std::atan2(cross(base, dir), dot(base, dir));
    if (a < 0) a += M_PI;
    if (a >= M_PI) a -= M_PI;
    return a;
}

double smaller_angle_between(Vec2 a, Vec2 b) {
    return std::atan2(std::abs(cross(a, b)), std::abs(dot(a, b)));
}

Point2 reflect_point_across_line(Point2 p, const Line2& L) {
    Vec2 v = p - L.origin;
    Vec2 r = 2.0 * dot(v, L.dir) * L.dir - v;
    return L.origin + r;
}

Line2 perpendicular_bisector(Point2 x, Point2 y, double tol) {
    Vec2 d = y - x;
    if (norm(d) <= tol)
        throw GeometryError("perpendicular bisector undefined: points coincide (coupled state)");
    return Line2{(x + y) / 2.0, normalized(perp(d))};
}

Point2 Domain::centroid() const {
    // area-weighted centroid of the polygon
    double cx = 0, cy = 0, a2 = 0;
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        auto [p, q] = edge(i);
        double w = cross(p, q);
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
        a2 += w;
    }
    return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

Domain build_polygon(std::vector<Point2> vertices, DomainKind kind,
                     std::optional<LipParams> lip) {
    if (vertices.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
    for (auto& v : vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw GeometryError("polygon vertex is not finite");

    const std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (dist(vertices[i], vertices[(i + 1) % n]) < 1e-14)
            throw GeometryError("repeated consecutive vertices");
    }

    double area = polygon_signed_area(vertices);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        scale = std::max(scale, dist(vertices[i], vertices[(i + 1) % n]));
    if (std::abs(area) < 1e-14 * scale * scale)
        throw GeometryError("degenerate (collinear) polygon");
    if (area < 0) {
        // flip to CCW, keeping vertices[0] first
        std::reverse(vertices.begin() + 1, vertices.end());
        area = -area;
    }

    // anti-parallel consecutive edges are zero-area spikes
    for (std::size_t i = 0; i < n; ++i) {
        Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
        Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
        if (std::abs(cross(e0, e1)) < 1e-14 * norm(e0) * norm(e1) && dot(e0, e1) < 0)
            throw GeometryError("degenerate spike at vertex");
    }

    // simplicity: no two non-adjacent edges intersect
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            auto a = vertices[i], b = vertices[(i + 1) % n];
            auto c = vertices[j], d = vertices[(j + 1) % n];
            if (segments_intersect(a, b, c, d))
                throw GeometryError("self-intersecting polygon");
        }
    }

    Domain dom;
    dom.verts_ = std::move(vertices);
    dom.kind_ = kind;
    dom.lip_ = lip;
    dom.area_ = area;
    dom.bbox_.xmin = dom.bbox_.xmax = dom.verts_[0].x;
    dom.bbox_.ymin = dom.bbox_.ymax = dom.verts_[0].y;
    for (const auto& v : dom.verts_) {
        dom.bbox_.xmin = std::min(dom.bbox_.xmin, v.x);
        dom.bbox_.xmax = std::max(dom.bbox_.xmax, v.x);
        dom.bbox_.ymin = std::min(dom.bbox_.ymin, v.y);
        dom.bbox_.ymax = std::max(dom.bbox_.ymax, v.y);
    }
    for (std::size_t i = 0; i < dom.verts_.size(); ++i)
        for (std::size_t j = i + 1; j < dom.verts_.size(); ++j)
            dom.diameter_ = std::max(dom.diameter_, dist(dom.verts_[i], dom.verts_[j]));
    return dom;
}

double boundary_distance(const Domain& d, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < d.edge_count(); ++i) {
        auto [a, b] = d.edge(i);
        best = std::min(best, point_segment_distance(p, a, b));
    }
    return best;
}

PointLocation point_in_domain(const Domain& d, Point2 p) {
    if (boundary_distance(d, p) <= kBoundaryBand) return PointLocation::boundary;
    // ray casting with the half-open rule
    bool inside = false;
    const auto& v = d.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((v[i].y > p.y) != (v[j].y > p.y)) {
            double xint = v[i].x + (p.y - v[i].y) * (v[j].x - v[i].x) / (v[j].y - v[i].y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside ? PointLocation::inside : PointLocation::outside;
}

std::vector<std::pair<Point2, Point2>> line_domain_clip(const Line2& L, const Domain& d) {
    // Collect intersection parameters with every edge, then classify gap
    // midpoints; closure convention keeps collinear boundary runs.
    std::vector<double> ts;
    for (std::size_t i = 0; i < d.edge_count(); ++i) {
        auto [a, b] = d.edge(i);
        Vec2 e = b - a;
        double denom = cross(L.dir, e);
        Vec2 w = a - L.origin;
        if (std::abs(denom) < kParallelTol * norm(e)) {
            if (std::abs(L.offset(a)) < 1e-12) {  // edge collinear with the line
                ts.push_back(L.project(a));
                ts.push_back(L.project(b));
            }
            continue;
        }
        double t = cross(w, e) / denom;
        double s = cross(w, L.dir) / denom;
        if (s >= -1e-12 && s <= 1.0 + 1e-12) ts.push_back(t);
    }
    std::vector<std::pair<Point2, Point2>> out;
    if (ts.size() < 2) return out;
    std::sort(ts.begin(), ts.end());
    const double merge_tol = 1e-12 * std::max(1.0, d.diameter());
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
        if (ts[i + 1] - ts[i] < merge_tol) continue;
        Point2 mid = L.at(0.5 * (ts[i] + ts[i + 1]));
        if (point_in_domain(d, mid) == PointLocation::outside) continue;
        Point2 pa = L.at(ts[i]), pb = L.at(ts[i + 1]);
        if (!out.empty() && dist(out.back().second, pa) < merge_tol)
            out.back().second = pb;  // merge adjacent intervals
        else
            out.emplace_back(pa, pb);
    }
    return out;
}

bool is_lip_domain(const Domain& d) {
    const auto& v = d.vertices();
    const std::size_t n = v.size();
    const double xtol = 1e-12 * std::max(1.0, d.diameter());
    double xmin = d.bbox().xmin, xmax = d.bbox().xmax;

    auto at_min = [&](std::size_t i) { return v[i].x <= xmin + xtol; };
    auto at_max = [&](std::size_t i) { return v[i].x >= xmax - xtol; };

    // extreme-x vertices must each form one contiguous cyclic run
    auto contiguous_run = [&](auto pred, std::size_t& first, std::size_t& last) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < n; ++i)
            if (pred(i)) idx.push_back(i);
        if (idx.empty()) return false;
        // rotate so the run does not wrap
        std::size_t start = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            std::size_t prev = (idx[k] + n - 1) % n;
            if (!pred(prev)) { start = k; break; }
        }
        for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
            std::size_t cur = idx[(start + k) % idx.size()];
            std::size_t nxt = idx[(start + k + 1) % idx.size()];
            if ((cur + 1) % n != nxt) return false;
        }
        first = idx[start];
        last = idx[(start + idx.size() - 1) % idx.size()];
        return true;
    };

    std::size_t lfirst, llast, rfirst, rlast;
    if (!contiguous_run(at_min, lfirst, llast)) return false;
    if (!contiguous_run(at_max, rfirst, rlast)) return false;

    auto chain_ok = [&](std::size_t from, std::size_t to, double sign) {
        // walk CCW from `from` to `to`; x must advance with slope bound 1
        for (std::size_t i = from; i != to; i = (i + 1) % n) {
            std::size_t j = (i + 1) % n;
            double dx = (v[j].x - v[i].x) * sign;
            double dy = v[j].y - v[i].y;
            if (dx < xtol) return false;  // stalls or reverses in x
            if (std::abs(dy) > (1.0 + 1e-12) * dx) return false;
        }
        return true;
    };

    // CCW order: lower chain runs left->right, upper chain right->left.
    return chain_ok(llast, rfirst, +1.0) && chain_ok(rlast, lfirst, -1.0);
}

Vec2 TriangleMarkers::base_dir() const { return normalized(c2 - c1); }

double TriangleMarkers::mirror_angle(const Line2& k) const {
    Vec2 e = base_dir();
    Vec2 v = k.dir;
    double a = std::atan2(side_sign * cross(e, v), dot(e, v));
    if (a < 0) a += M_PI;
    if (a >= M_PI) a -= M_PI;
    return a;
}

TriangleMarkers obtuse_triangle_markers(Point2 c1, Point2 c2, Point2 c3) {
    double area2 = std::abs(cross(c2 - c1, c3 - c1));
    double scale = std::max({dist(c1, c2), dist(c1, c3), dist(c2, c3)});
    if (area2 < 1e-12 * scale * scale) throw GeometryError("degenerate triangle");
    if (dot(c1 - c3, c2 - c3) >= 0)
        throw GeometryError("angle at C3 must be strictly obtuse");

    TriangleMarkers m;
    m.c1 = c1;
    m.c2 = c2;
    m.c3 = c3;
    m.r1 = dist(c1, c3) / 2.0;
    m.r2 = dist(c2, c3) / 2.0;
    m.side_sign = cross(c2 - c1, c3 - c1) > 0 ? 1.0 : -1.0;

    Vec2 u12 = normalized(c2 - c1);
    Vec2 u13 = normalized(c3 - c1);
    Vec2 u23 = normalized(c3 - c2);

    m.c4 = (c1 + c3) / 2.0;
    m.c6 = (c2 + c3) / 2.0;
    m.c5 = c1 + m.r1 * u12;
    m.c7 = c2 - m.r2 * u12;

    // feet on the base of the perpendiculars through c4 / c6
    auto base_line = Line2::through(c1, c2 - c1);
    auto line_x_base = [&](Point2 p, Vec2 dir) {
        double denom = cross(dir, base_line.dir);
        if (std::abs(denom) < 1e-14)
            throw GeometryError("marker inconsistency: perpendicular parallel to base");
        double t = cross(base_line.origin - p, base_line.dir) / denom;
        return p + t * dir;
    };
    m.c8 = line_x_base(m.c4, perp(u23));
    m.c9 = line_x_base(m.c6, perp(u13));

    // projections of c5 / c7 onto the legs
    m.c10 = c1 + dot(m.c5 - c1, u13) * u13;
    m.c11 = c2 + dot(m.c7 - c2, u23) * u23;
    // altitude foot from c3
    m.c12 = c1 + dot(c3 - c1, u12) * u12;

    double base_len = dist(c1, c2);
    auto on_base = [&](Point2 p) {
        double t = dot(p - c1, u12);
        return t > 1e-12 && t < base_len - 1e-12;
    };
    if (!on_base(m.c5) || !on_base(m.c7) || !on_base(m.c8) || !on_base(m.c9) || !on_base(m.c12))
        throw GeometryError("marker inconsistency: a base point left segment C1C2");
    double t5 = dot(m.c5 - c1, u12), t7 = dot(m.c7 - c1, u12);
    if (!(t5 < t7))
        throw GeometryError("marker inconsistency: C5/C7 ordering violated");
    auto on_seg = [&](Point2 p, Point2 a, Point2 b) {
        Vec2 u = normalized(b - a);
        double t = dot(p - a, u);
        return t > -1e-12 && t < dist(a, b) + 1e-12;
    };
    if (!on_seg(m.c10, c1, c3) || !on_seg(m.c11, c2, c3))
        throw GeometryError("marker inconsistency: a foot left its leg segment");

    // mirror angles at which the mirror is perpendicular to the legs, measured
    // against c1->c2 in the frame with the interior above the base
    Vec2 e = u12;
    auto angle_of = [&](Vec2 v) {
        double a = std::atan2(m.side_sign * cross(e, v), dot(e, v));
        if (a < 0) a += M_PI;
        if (a >= M_PI) a -= M_PI;
        return a;
    };
    m.beta1 = angle_of(perp(u23));
    m.beta2 = angle_of(perp(u13));
    if (!(m.beta1 < m.beta2))
        throw GeometryError("marker inconsistency: beta1 >= beta2");
    return m;
}

bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        if (point_segment_distance(p, poly[i], poly[(i + 1) % n]) <= kBoundaryBand)
            return true;
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if ((poly[i].y > p.y) != (poly[j].y > p.y)) {
            double xint =
                poly[i].x + (p.y - poly[i].y) * (poly[j].x - poly[i].x) / (poly[j].y - poly[i].y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

double polygon_signed_area(const std::vector<Point2>& poly) {
    double a = 0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return a / 2.0;
}

double polygon_signed_distance(Point2 p, const std::vector<Point2>& poly) {
    double d = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        d = std::min(d, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    return point_in_polygon(p, poly) ? d : -d;
}

bool Region::contains(Point2 p) const {
    if (point_in_domain(*domain_, p) == PointLocation::outside) return false;
    return margin(p) >= -kRegionBand;
}

double Region::margin(Point2 p) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, DiscComplement>) {
                return std::min(dist(p, r.c1) - r.r1, dist(p, r.c2) - r.r2);
            } else if constexpr (std::is_same_v<T, PentagonUnion>) {
                return std::max(polygon_signed_distance(p, r.penta1),
                                polygon_signed_distance(p, r.penta2));
            } else if constexpr (std::is_same_v<T, Strip>) {
                return r.halfwidth - std::abs(p.x);
            } else {
                return polygon_signed_distance(p, r.verts);
            }
        },
        impl_);
}

double Region::segment_margin(Point2 a, Point2 b) const {
    return std::visit(
        [&](const auto& r) -> double {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, DiscComplement>) {
                // min over the segment of d(.,ci) - ri is exact
                return std::min(point_segment_distance(r.c1, a, b) - r.r1,
                                point_segment_distance(r.c2, a, b) - r.r2);
            } else if constexpr (std::is_same_v<T, Strip>) {
                return r.halfwidth - std::max(std::abs(a.x), std::abs(b.x));
            } else {
                return -std::numeric_limits<double>::infinity();
            }
        },
        impl_);
}

Region Region::lip_strip(double halfwidth, const Domain& d, Tag tag) {
    Region r(tag, d);
    r.impl_ = Strip{halfwidth};
    return r;
}

Region Region::polygon_region(std::vector<Point2> verts, const Domain& d, Tag tag) {
    Region r(tag, d);
    r.impl_ = Poly{std::move(verts)};
    return r;
}

Region region_A_triangle(const TriangleMarkers& m, const Domain& d) {
    Region r(Region::Tag::triangle_a, d);
    r.impl_ = Region::DiscComplement{m.c1, m.c2, m.r1, m.r2};
    return r;
}

Region region_A1_triangle(const TriangleMarkers& m, const Domain& d) {
    std::vector<Point2> p1{m.c3, m.c4, m.c8, m.c9, m.c6};
    std::vector<Point2> p2{m.c3, m.c10, m.c5, m.c7, m.c11};
    // build_polygon validates simplicity; non-simple pentagons signal marker trouble
    try {
        build_polygon(p1);
        build_polygon(p2);
    } catch (const GeometryError& e) {
        throw GeometryError(std::string("region A1 pentagon is not simple: ") + e.what());
    }
    Region r(Region::Tag::triangle_a1, d);
    r.impl_ = Region::PentagonUnion{std::move(p1), std::move(p2)};
    return r;
}

std::pair<Region, Region> lip_domain_regions(double a, double b, const Domain& d) {
    if (!(a > 0.5))
        throw GeometryError("lip example requires a > 1/2");
    if (!(b < a - 1.0 / (4.0 * a)))
        throw GeometryError("lip example requires b < a - 1/(4a)");
    if (b < 0) throw GeometryError("lip example requires b >= 0");

    // Boundary must contain [-a,a]x{0} and [-a,a]x{1}; caps confined to the
    // side boxes [-a-b,-a]x[0,1] and [a,a+b]x[0,1].
    const double tol = 1e-9;
    for (const auto& v : d.vertices()) {
        if (v.y < -tol || v.y > 1.0 + tol)
            throw GeometryError("lip domain vertices must satisfy 0 <= y <= 1");
        if (v.x > -a + tol && v.x < a - tol &&
            std::abs(v.y) > tol && std::abs(v.y - 1.0) > tol)
            throw GeometryError("lip domain boundary must be horizontal for |x| < a");
        if (v.x < -a - b - tol || v.x > a + b + tol)
            throw GeometryError("lip domain caps must stay within the side boxes");
    }
    for (Point2 p : {Point2{-a, 0.0}, Point2{a, 0.0}, Point2{-a, 1.0}, Point2{a, 1.0}})
        if (point_in_domain(d, p) != PointLocation::boundary)
            throw GeometryError("lip domain boundary must pass through (+-a, 0) and (+-a, 1)");
    // edges crossing the open strip must be horizontal at y in {0,1}
    for (std::size_t i = 0; i < d.edge_count(); ++i) {
        auto [p, q] = d.edge(i);
        double lo = std::min(p.x, q.x), hi = std::max(p.x, q.x);
        if (hi <= -a + tol || lo >= a - tol) continue;
        if (std::abs(p.y - q.y) > tol || (std::abs(p.y) > tol && std::abs(p.y - 1.0) > tol))
            throw GeometryError("lip domain boundary must be horizontal across the strip");
    }

    double w = b + 1.0 / (4.0 * a);
    return {Region::lip_strip(w, d, Region::Tag::lip_a),
            Region::lip_strip(w + 1.0, d, Region::Tag::lip_a1)};
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Point2>& poly) {
    const int n = static_cast<int>(poly.size());
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<std::array<int, 3>> tris;
    auto is_ear = [&](int a, int b, int c) {
        Point2 pa = poly[a], pb = poly[b], pc = poly[c];
        if (cross(pb - pa, pc - pa) <= 0) return false;  // reflex or degenerate
        for (int j : idx) {
            if (j == a || j == b || j == c) continue;
            Point2 p = poly[j];
            double d1 = cross(pb - pa, p - pa);
            double d2 = cross(pc - pb, p - pb);
            double d3 = cross(pa - pc, p - pc);
            if (d1 >= 0 && d2 >= 0 && d3 >= 0) return false;
        }
        return true;
    };
    int guard = 0;
    while (idx.size() > 3) {
        bool clipped = false;
        for (std::size_t k = 0; k < idx.size(); ++k) {
            int a = idx[(k + idx.size() - 1) % idx.size()];
            int b = idx[k];
            int c = idx[(k + 1) % idx.size()];
            if (is_ear(a, b, c)) {
                tris.push_back({a, b, c});
                idx.erase(idx.begin() + static_cast<long>(k));
                clipped = true;
                break;
            }
        }
        if (!clipped || ++guard > 4 * n)
            throw GeometryError("ear clipping failed (polygon not simple CCW?)");
    }
    tris.push_back({idx[0], idx[1], idx[2]});
    return tris;
}

namespace {

// Sutherland-Hodgman clip of a convex polygon against one half-plane.
std::vector<Point2> clip_half_plane(const std::vector<Point2>& poly, Vec2 n, double c) {
    // keep points with dot(n, p) <= c
    std::vector<Point2> out;
    const std::size_t sz = poly.size();
    for (std::size_t i = 0; i < sz; ++i) {
        Point2 a = poly[i], b = poly[(i + 1) % sz];
        double da = dot(n, a) - c, db = dot(n, b) - c;
        if (da <= 0) out.push_back(a);
        if ((da < 0 && db > 0) || (da > 0 && db < 0))
            out.push_back(a + (da / (da - db)) * (b - a));
    }
    return out;
}

}  // namespace

double polygon_box_intersection_area(const std::vector<Point2>& poly, const BBox& box) {
    auto tris = ear_clip(poly);
    double total = 0;
    for (const auto& t : tris) {
        std::vector<Point2> p{poly[t[0]], poly[t[1]], poly[t[2]]};
        p = clip_half_plane(p, {-1, 0}, -box.xmin);
        if (p.empty()) continue;
        p = clip_half_plane(p, {1, 0}, box.xmax);
        if (p.empty()) continue;
        p = clip_half_plane(p, {0, -1}, -box.ymin);
        if (p.empty()) continue;
        p = clip_half_plane(p, {0, 1}, box.ymax);
        if (p.size() >= 3) total += std::abs(polygon_signed_area(p));
    }
    return total;
}

}  // namespace nodal::geo
