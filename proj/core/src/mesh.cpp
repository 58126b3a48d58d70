#include "nodal/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>

namespace nodal::spectral {

using geo::Vec2;

namespace {

double tri_area(Point2 a, Point2 b, Point2 c) { return 0.5 * geo::cross(b - a, c - a); }

// Incremental Bowyer-Watson Delaunay triangulation with walk location.
class Delaunay {
public:
    explicit Delaunay(const std::vector<Point2>& pts) : p_(pts) {
        if (pts.size() < 3) throw MeshError("delaunay: need at least 3 points");
        geo::BBox box{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
        for (const auto& q : pts) {
            box.xmin = std::min(box.xmin, q.x);
            box.xmax = std::max(box.xmax, q.x);
            box.ymin = std::min(box.ymin, q.y);
            box.ymax = std::max(box.ymax, q.y);
        }
        double r = 16.0 * std::max({box.width(), box.height(), 1e-6});
        Point2 c{0.5 * (box.xmin + box.xmax), 0.5 * (box.ymin + box.ymax)};
        int n = static_cast<int>(p_.size());
        p_.push_back({c.x, c.y + 2.0 * r});
        p_.push_back({c.x - 1.8 * r, c.y - r});
        p_.push_back({c.x + 1.8 * r, c.y - r});
        tris_.push_back({{n, n + 1, n + 2}, {-1, -1, -1}, true});
        int hint = 0;
        for (int i = 0; i < n; ++i) hint = insert(i, hint);
    }

    std::vector<std::array<int, 3>> real_triangles() const {
        const int n = static_cast<int>(p_.size()) - 3;
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_) {
            if (!t.alive) continue;
            if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
            out.push_back(t.v);
        }
        return out;
    }

private:
    struct Tri {
        std::array<int, 3> v;  // CCW
        std::array<int, 3> n;  // n[i] across edge v[i] -> v[(i+1)%3]
        bool alive;
    };

    std::vector<Point2> p_;
    std::vector<Tri> tris_;

    bool in_circle(const Tri& t, Point2 q) const {
        Point2 a = p_[t.v[0]], b = p_[t.v[1]], c = p_[t.v[2]];
        long double ax = a.x - q.x, ay = a.y - q.y;
        long double bx = b.x - q.x, by = b.y - q.y;
        long double cx = c.x - q.x, cy = c.y - q.y;
        long double a2 = ax * ax + ay * ay;
        long double b2 = bx * bx + by * by;
        long double c2 = cx * cx + cy * cy;
        long double det = ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
                          a2 * (bx * cy - by * cx);
        long double m = std::max({a2, b2, c2});
        return det > 1e-14L * m * m;
    }

    int find_containing(Point2 q, int hint) const {
        int t = hint;
        if (t < 0 || t >= static_cast<int>(tris_.size()) || !tris_[t].alive) {
            t = -1;
            for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
                if (tris_[i].alive) { t = i; break; }
        }
        const int guard = 8 * static_cast<int>(tris_.size()) + 64;
        for (int step = 0; step < guard; ++step) {
            const Tri& tr = tris_[t];
            int next = -1;
            for (int i = 0; i < 3; ++i) {
                Point2 a = p_[tr.v[i]], b = p_[tr.v[(i + 1) % 3]];
                if (geo::cross(b - a, q - a) < -1e-14 * geo::norm(b - a)) {
                    next = tr.n[i];
                    break;
                }
            }
            if (next < 0) return t;
            t = next;
        }
        throw MeshError("delaunay: point location walk did not terminate");
    }

    int edge_index_of(const Tri& t, int a, int b) const {
        for (int i = 0; i < 3; ++i)
            if (t.v[i] == a && t.v[(i + 1) % 3] == b) return i;
        return -1;
    }

    int insert(int pi, int hint) {
        Point2 q = p_[pi];
        int tc = find_containing(q, hint);

        // grow the cavity of circumcircles containing q
        std::vector<int> cavity{tc};
        std::set<int> in_cavity{tc};
        for (std::size_t k = 0; k < cavity.size(); ++k) {
            const Tri& t = tris_[cavity[k]];
            for (int i = 0; i < 3; ++i) {
                int o = t.n[i];
                if (o < 0 || in_cavity.count(o)) continue;
                if (in_circle(tris_[o], q)) {
                    cavity.push_back(o);
                    in_cavity.insert(o);
                }
            }
        }

        struct BEdge {
            int a, b, outer;
        };
        std::vector<BEdge> boundary;
        for (int repair = 0; repair < 64; ++repair) {
            boundary.clear();
            for (int ti : cavity) {
                const Tri& t = tris_[ti];
                for (int i = 0; i < 3; ++i) {
                    int o = t.n[i];
                    if (o >= 0 && in_cavity.count(o)) continue;
                    boundary.push_back({t.v[i], t.v[(i + 1) % 3], o});
                }
            }
            // the cavity must be star-shaped around q
            int bad = -1;
            for (const auto& e : boundary) {
                Point2 a = p_[e.a], b = p_[e.b];
                if (geo::cross(b - a, q - a) <= 1e-14 * geo::norm(b - a)) {
                    for (int ti : cavity) {
                        if (ti == tc) continue;
                        if (edge_index_of(tris_[ti], e.a, e.b) >= 0) { bad = ti; break; }
                    }
                    break;
                }
            }
            if (bad < 0) break;
            in_cavity.erase(bad);
            cavity.erase(std::find(cavity.begin(), cavity.end(), bad));
            if (cavity.empty()) throw MeshError("delaunay: cavity repair failed");
        }

        for (int ti : cavity) tris_[ti].alive = false;

        std::map<int, int> start_at, end_at;  // boundary vertex -> new tri index
        std::vector<int> created;
        created.reserve(boundary.size());
        for (const auto& e : boundary) {
            Tri nt;
            nt.v = {pi, e.a, e.b};
            nt.n = {-1, e.outer, -1};
            nt.alive = true;
            int idx = static_cast<int>(tris_.size());
            tris_.push_back(nt);
            created.push_back(idx);
            start_at[e.a] = idx;
            end_at[e.b] = idx;
            if (e.outer >= 0) {
                int j = edge_index_of(tris_[e.outer], e.b, e.a);
                if (j >= 0) tris_[e.outer].n[j] = idx;
            }
        }
        for (std::size_t k = 0; k < boundary.size(); ++k) {
            const auto& e = boundary[k];
            int idx = created[k];
            auto it0 = end_at.find(e.a);    // fan neighbor across edge (pi, a)
            auto it2 = start_at.find(e.b);  // fan neighbor across edge (b, pi)
            tris_[idx].n[0] = it0 == end_at.end() ? -1 : it0->second;
            tris_[idx].n[2] = it2 == start_at.end() ? -1 : it2->second;
        }
        return created.empty() ? tc : created.back();
    }
};

struct BoundarySampling {
    std::vector<Point2> nodes;          // boundary nodes in CCW chain order
    std::vector<int> markers;           // polygon edge index per chain edge i -> i+1
};

BoundarySampling sample_boundary(const Domain& d, double spacing) {
    BoundarySampling bs;
    for (std::size_t e = 0; e < d.edge_count(); ++e) {
        auto [a, b] = d.edge(e);
        double len = geo::dist(a, b);
        int n = std::max(1, static_cast<int>(std::ceil(len / spacing - 1e-12)));
        for (int k = 0; k < n; ++k) {
            bs.nodes.push_back(a + (static_cast<double>(k) / n) * (b - a));
            bs.markers.push_back(static_cast<int>(e));
        }
    }
    return bs;
}

}  // namespace

double Mesh::triangle_area(std::size_t t) const {
    const auto& tr = triangles[t];
    return tri_area(nodes[tr[0]], nodes[tr[1]], nodes[tr[2]]);
}

double Mesh::total_area() const {
    double a = 0;
    for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
    return a;
}

double Mesh::max_element_diameter() const {
    double m = 0;
    for (const auto& t : triangles) {
        m = std::max({m, geo::dist(nodes[t[0]], nodes[t[1]]),
                      geo::dist(nodes[t[1]], nodes[t[2]]),
                      geo::dist(nodes[t[2]], nodes[t[0]])});
    }
    return m;
}

double Mesh::min_angle() const {
    double m = M_PI;
    for (const auto& t : triangles) {
        for (int i = 0; i < 3; ++i) {
            Vec2 u = nodes[t[(i + 1) % 3]] - nodes[t[i]];
            Vec2 v = nodes[t[(i + 2) % 3]] - nodes[t[i]];
            m = std::min(m, std::atan2(std::abs(geo::cross(u, v)), geo::dot(u, v)));
        }
    }
    return m;
}

Mesh triangulate(const Domain& d, double h) {
    if (!(h > 0)) throw MeshError("triangulate: h must be positive");
    if (!(h < d.diameter())) throw MeshError("triangulate: h must be below the domain diameter");

    for (int attempt = 0; attempt < 3; ++attempt) {
        const double spacing = h / static_cast<double>(1 << attempt);
        BoundarySampling bs = sample_boundary(d, spacing);
        const int nb = static_cast<int>(bs.nodes.size());

        std::vector<Point2> pts = bs.nodes;
        const double dy = h * std::sqrt(3.0) / 2.0;
        const double clearance = 0.6 * h;
        const auto& box = d.bbox();
        int rows = static_cast<int>(std::floor(box.height() / dy));
        for (int iy = 0; iy <= rows; ++iy) {
            double y = box.ymin + (iy + 0.5) * dy;
            if (y >= box.ymax) break;
            double x0 = box.xmin + ((iy % 2) ? 0.5 * h : 0.0);
            for (int ix = 0;; ++ix) {
                double x = x0 + (ix + 0.5) * h;
                if (x >= box.xmax) break;
                Point2 p{x, y};
                if (point_in_domain(d, p) != geo::PointLocation::inside) continue;
                if (geo::boundary_distance(d, p) < clearance) continue;
                pts.push_back(p);
            }
        }

        // Delaunay / flood-fill / Laplacian smoothing rounds
        std::vector<std::array<int, 3>> kept;
        bool conforming = true;
        for (int pass = 0; pass < 3; ++pass) {
            Delaunay dt(pts);
            auto tris = dt.real_triangles();

            // adjacency over undirected edges
            std::map<std::pair<int, int>, std::vector<int>> edge_tris;
            for (std::size_t t = 0; t < tris.size(); ++t) {
                for (int i = 0; i < 3; ++i) {
                    int a = tris[t][i], b = tris[t][(i + 1) % 3];
                    edge_tris[{std::min(a, b), std::max(a, b)}].push_back(static_cast<int>(t));
                }
            }

            // seed the interior flood fill from the CCW side of each chain edge
            std::set<std::pair<int, int>> chain;
            std::vector<char> keep_flag(tris.size(), 0);
            std::vector<int> queue;
            conforming = true;
            for (int k = 0; k < nb; ++k) {
                int a = k, b = (k + 1) % nb;
                chain.insert({std::min(a, b), std::max(a, b)});
                auto it = edge_tris.find({std::min(a, b), std::max(a, b)});
                bool seeded = false;
                if (it != edge_tris.end()) {
                    for (int t : it->second) {
                        for (int i = 0; i < 3; ++i) {
                            if (tris[t][i] == a && tris[t][(i + 1) % 3] == b) {
                                if (!keep_flag[t]) {
                                    keep_flag[t] = 1;
                                    queue.push_back(t);
                                }
                                seeded = true;
                            }
                        }
                    }
                }
                if (!seeded) {
                    conforming = false;
                    break;
                }
            }
            if (!conforming) break;

            while (!queue.empty()) {
                int t = queue.back();
                queue.pop_back();
                for (int i = 0; i < 3; ++i) {
                    int a = tris[t][i], b = tris[t][(i + 1) % 3];
                    auto key = std::make_pair(std::min(a, b), std::max(a, b));
                    if (chain.count(key)) continue;
                    for (int o : edge_tris[key]) {
                        if (!keep_flag[o]) {
                            keep_flag[o] = 1;
                            queue.push_back(o);
                        }
                    }
                }
            }

            kept.clear();
            for (std::size_t t = 0; t < tris.size(); ++t)
                if (keep_flag[t]) kept.push_back(tris[t]);

            if (pass == 2) break;

            // smooth interior nodes toward the average of their neighbors
            std::vector<Vec2> sum(pts.size(), Vec2{0, 0});
            std::vector<int> deg(pts.size(), 0);
            for (const auto& t : kept) {
                for (int i = 0; i < 3; ++i) {
                    int a = t[i], b = t[(i + 1) % 3];
                    sum[a] += pts[b];
                    ++deg[a];
                    sum[b] += pts[a];
                    ++deg[b];
                }
            }
            for (std::size_t i = nb; i < pts.size(); ++i) {
                if (deg[i] == 0) continue;
                Point2 cand = sum[i] / static_cast<double>(deg[i]);
                if (point_in_domain(d, cand) == geo::PointLocation::inside &&
                    geo::boundary_distance(d, cand) > 0.3 * h)
                    pts[i] = cand;
            }
        }

        if (!conforming) continue;  // refine the boundary sampling and retry

        // compact node numbering over used nodes
        std::vector<int> remap(pts.size(), -1);
        Mesh mesh;
        mesh.h = h;
        auto use = [&](int i) {
            if (remap[i] < 0) {
                remap[i] = static_cast<int>(mesh.nodes.size());
                mesh.nodes.push_back(pts[i]);
            }
            return remap[i];
        };
        for (int i = 0; i < nb; ++i) use(i);  // boundary nodes first, in chain order
        for (const auto& t : kept) {
            std::array<int, 3> tr{use(t[0]), use(t[1]), use(t[2])};
            if (tri_area(mesh.nodes[tr[0]], mesh.nodes[tr[1]], mesh.nodes[tr[2]]) <= 1e-14)
                throw MeshError("triangulate: degenerate element produced");
            mesh.triangles.push_back(tr);
        }
        for (int k = 0; k < nb; ++k)
            mesh.boundary_edges.push_back({remap[k], remap[(k + 1) % nb], bs.markers[k]});
        return mesh;
    }
    throw MeshError("triangulate: could not produce a conforming mesh at this h "
                    "(polygon too thin for the requested element size)");
}

void write_mesh(std::ostream& os, const Mesh& m) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu %zu %zu\n", m.nodes.size(), m.triangles.size(),
                  m.boundary_edges.size());
    os << buf;
    for (const auto& n : m.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", n.x, n.y);
        os << buf;
    }
    for (const auto& t : m.triangles) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", t[0], t[1], t[2]);
        os << buf;
    }
    for (const auto& e : m.boundary_edges) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", e.a, e.b, e.marker);
        os << buf;
    }
}

int nearest_node(const Mesh& m, Point2 p) {
    int best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        double dd = geo::norm2(m.nodes[i] - p);
        if (dd < bd) {
            bd = dd;
            best = static_cast<int>(i);
        }
    }
    return best;
}

MeshLocator::MeshLocator(const Mesh& m) : mesh_(m) {
    box_ = geo::BBox{m.nodes[0].x, m.nodes[0].y, m.nodes[0].x, m.nodes[0].y};
    for (const auto& n : m.nodes) {
        box_.xmin = std::min(box_.xmin, n.x);
        box_.xmax = std::max(box_.xmax, n.x);
        box_.ymin = std::min(box_.ymin, n.y);
        box_.ymax = std::max(box_.ymax, n.y);
    }
    int target = static_cast<int>(std::sqrt(static_cast<double>(m.triangles.size()))) + 1;
    nx_ = std::max(1, target);
    ny_ = std::max(1, target);
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    const double wx = std::max(box_.width(), 1e-300) / nx_;
    const double wy = std::max(box_.height(), 1e-300) / ny_;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tr = m.triangles[t];
        double x0 = std::min({m.nodes[tr[0]].x, m.nodes[tr[1]].x, m.nodes[tr[2]].x});
        double x1 = std::max({m.nodes[tr[0]].x, m.nodes[tr[1]].x, m.nodes[tr[2]].x});
        double y0 = std::min({m.nodes[tr[0]].y, m.nodes[tr[1]].y, m.nodes[tr[2]].y});
        double y1 = std::max({m.nodes[tr[0]].y, m.nodes[tr[1]].y, m.nodes[tr[2]].y});
        int ix0 = std::clamp(static_cast<int>((x0 - box_.xmin) / wx), 0, nx_ - 1);
        int ix1 = std::clamp(static_cast<int>((x1 - box_.xmin) / wx), 0, nx_ - 1);
        int iy0 = std::clamp(static_cast<int>((y0 - box_.ymin) / wy), 0, ny_ - 1);
        int iy1 = std::clamp(static_cast<int>((y1 - box_.ymin) / wy), 0, ny_ - 1);
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                cells_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(static_cast<int>(t));
    }
}

bool MeshLocator::locate(Point2 p, int& tri, std::array<double, 3>& bary) const {
    const double wx = std::max(box_.width(), 1e-300) / nx_;
    const double wy = std::max(box_.height(), 1e-300) / ny_;
    int ix = std::clamp(static_cast<int>((p.x - box_.xmin) / wx), 0, nx_ - 1);
    int iy = std::clamp(static_cast<int>((p.y - box_.ymin) / wy), 0, ny_ - 1);
    for (int t : cells_[static_cast<std::size_t>(iy) * nx_ + ix]) {
        const auto& tr = mesh_.triangles[static_cast<std::size_t>(t)];
        Point2 a = mesh_.nodes[tr[0]], b = mesh_.nodes[tr[1]], c = mesh_.nodes[tr[2]];
        double area = geo::cross(b - a, c - a);
        double l0 = geo::cross(b - p, c - p) / area;
        double l1 = geo::cross(c - p, a - p) / area;
        double l2 = geo::cross(a - p, b - p) / area;
        if (l0 >= -1e-12 && l1 >= -1e-12 && l2 >= -1e-12) {
            tri = t;
            bary = {l0, l1, l2};
            return true;
        }
    }
    return false;
}

double MeshLocator::interpolate(Point2 p, const std::vector<double>& nodal) const {
    int t;
    std::array<double, 3> l;
    if (!locate(p, t, l))
        throw GeometryError("MeshLocator: point outside the mesh");
    const auto& tr = mesh_.triangles[static_cast<std::size_t>(t)];
    return l[0] * nodal[tr[0]] + l[1] * nodal[tr[1]] + l[2] * nodal[tr[2]];
}

}  // namespace nodal::spectral
