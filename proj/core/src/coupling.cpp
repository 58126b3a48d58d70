#include "nodal/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nodal/rng.hpp"

namespace nodal::coupling {

namespace {

constexpr int kMaxBounces = 64;
constexpr double kVertexTol = 1e-12;
constexpr int kMaxRedraws = 128;

}  // namespace

IncrementPair mirror_increment(Vec2 dW, Point2 X, Point2 Y, double coupled_tol) {
    Vec2 sep = Y - X;
    double L = geo::norm(sep);
    if (L <= coupled_tol)
        throw GeometryError("mirror_increment: X and Y coincide (coupled state)");
    Vec2 m = sep / L;
    Vec2 dZ = dW - 2.0 * geo::dot(m, dW) * m;
    return {dW, dZ};
}

std::optional<Line2> MirrorState::mirror() const {
    if (coupled) return std::nullopt;
    return geo::perpendicular_bisector(X, Y);
}

std::optional<double> MirrorState::alpha() const {
    auto k = mirror();
    if (!k) return std::nullopt;
    return geo::line_angle_mod_pi(k->dir);
}

ReflectOutcome reflect_segment(const Domain& d, Point2 from, Point2 to,
                               std::vector<BoundaryEvent>& events, double t_event,
                               char which) {
    Point2 cur = from;
    Point2 dest = to;
    int bounces = 0;
    int last_edge = -1;
    const std::size_t n = d.edge_count();
    const double vscale = std::max(1.0, d.diameter());

    for (;;) {
        Vec2 dir = dest - cur;
        double len = geo::norm(dir);
        if (len < 1e-300) break;

        double best_t = std::numeric_limits<double>::infinity();
        int best_edge = -1;
        for (std::size_t j = 0; j < n; ++j) {
            auto [a, b] = d.edge(j);
            Vec2 e = b - a;
            double denom = geo::cross(dir, e);
            if (std::abs(denom) < 1e-14 * len * geo::norm(e)) continue;  // parallel
            Vec2 w = a - cur;
            double t = geo::cross(w, e) / denom;
            double s = geo::cross(w, dir) / denom;
            if (s < -1e-12 || s > 1.0 + 1e-12) continue;
            if (t > 1.0) continue;
            // outward crossings only; CCW polygon has the interior on the left
            Vec2 out_n{e.y, -e.x};
            if (geo::dot(dir, out_n) <= 0) continue;
            double t_min = (static_cast<int>(j) == last_edge) ? 1e-9 : -1e-12;
            if (t < t_min) continue;
            if (t < best_t) {
                best_t = t;
                best_edge = static_cast<int>(j);
            }
        }

        if (best_edge < 0) break;

        Point2 hit = cur + best_t * dir;
        for (const auto& v : d.vertices()) {
            if (geo::dist(hit, v) <= kVertexTol * vscale)
                return {dest, true, bounces};
        }

        Line2 jline = d.edge_line(static_cast<std::size_t>(best_edge));
        Point2 reflected = geo::reflect_point_across_line(dest, jline);
        double push = geo::dist(dest, reflected);
        events.push_back({t_event, which, best_edge, push});
        cur = hit;
        dest = reflected;
        last_edge = best_edge;
        if (++bounces > kMaxBounces)
            throw SolverError("reflect_segment: more than 64 bounces in one step "
                              "(time step too large for this domain)");
    }

    if (point_in_domain(d, dest) == geo::PointLocation::outside) {
        // grazing-corner roundoff can leave the point within ~1e-15 of the
        // boundary; snap back, anything larger is a logic error
        double bd = geo::boundary_distance(d, dest);
        if (bd > 1e-9)
            throw SolverError("reflect_segment: endpoint escaped the domain");
        double best = std::numeric_limits<double>::infinity();
        Point2 snapped = dest;
        for (std::size_t j = 0; j < n; ++j) {
            auto [a, b] = d.edge(j);
            Vec2 e = b - a;
            double t = std::clamp(geo::dot(dest - a, e) / geo::norm2(e), 0.0, 1.0);
            Point2 q = a + t * e;
            double dd = geo::dist(dest, q);
            if (dd < best) {
                best = dd;
                snapped = q;
            }
        }
        dest = snapped;
    }
    return {dest, false, bounces};
}

std::pair<Point2, std::vector<BoundaryEvent>> reflect_into_domain(const Domain& d,
                                                                  Point2 from, Point2 to) {
    if (point_in_domain(d, from) == geo::PointLocation::outside)
        throw GeometryError("reflect_into_domain: start point outside the domain");
    std::vector<BoundaryEvent> events;
    auto out = reflect_segment(d, from, to, events, 0.0, 'X');
    if (out.vertex_hit)
        throw SolverError("reflect_into_domain: segment passes through a vertex");
    return {out.end, std::move(events)};
}

Trajectory simulate_coupling(const Domain& d, Point2 x, Point2 y, const SimOptions& opts) {
    if (!(opts.dt > 0)) throw GeometryError("simulate_coupling: dt must be positive");
    if (opts.t_max < 0) throw GeometryError("simulate_coupling: t_max must be >= 0");
    if (point_in_domain(d, x) == geo::PointLocation::outside ||
        point_in_domain(d, y) == geo::PointLocation::outside)
        throw GeometryError("simulate_coupling: start point outside the domain");

    const double eps_couple = 2.0 * std::sqrt(opts.dt);
    const long steps = static_cast<long>(std::floor(opts.t_max / opts.dt + 1e-9));
    const int stride = std::max(1, opts.record_stride);

    Trajectory traj;
    traj.seed = opts.seed;
    traj.dt = opts.dt;
    traj.states.reserve(static_cast<std::size_t>(steps / stride) + 2);

    Point2 X = x, Y = y;
    bool coupled = geo::dist(x, y) <= eps_couple;
    if (coupled) {
        Y = X;
        traj.zeta = 0.0;
    }
    traj.states.push_back({0.0, X, Y, coupled});
    if (coupled && opts.stop_at_coupling) return traj;

    GaussianStream rng(opts.seed);
    double sd = std::sqrt(opts.dt);

    for (long i = 1; i <= steps; ++i) {
        double t = static_cast<double>(i) * opts.dt;
        bool just_coupled = false;

        int redraws = 0;
        for (;;) {
            Vec2 dW = rng.normal_vec2(sd);
            std::vector<BoundaryEvent> step_events;
            if (!coupled) {
                IncrementPair inc = mirror_increment(dW, X, Y);
                auto rx = reflect_segment(d, X, X + inc.dW, step_events, t, 'X');
                if (rx.vertex_hit) {
                    if (++redraws > kMaxRedraws)
                        throw SolverError("simulate_coupling: too many vertex-hit redraws");
                    continue;
                }
                auto ry = reflect_segment(d, Y, Y + inc.dZ, step_events, t, 'Y');
                if (ry.vertex_hit) {
                    if (++redraws > kMaxRedraws)
                        throw SolverError("simulate_coupling: too many vertex-hit redraws");
                    continue;
                }
                X = rx.end;
                Y = ry.end;
                if (geo::dist(X, Y) <= eps_couple) {
                    coupled = true;
                    just_coupled = true;
                    Y = X;
                    traj.zeta = t;
                }
            } else {
                auto rx = reflect_segment(d, X, X + dW, step_events, t, 'X');
                if (rx.vertex_hit) {
                    if (++redraws > kMaxRedraws)
                        throw SolverError("simulate_coupling: too many vertex-hit redraws");
                    continue;
                }
                X = rx.end;
                Y = X;
            }
            for (auto& e : step_events) traj.events.push_back(e);
            break;
        }

        if (i % stride == 0 || i == steps || just_coupled ||
            (coupled && opts.stop_at_coupling))
            traj.states.push_back({t, X, Y, coupled});
        if (coupled && opts.stop_at_coupling) break;
    }
    return traj;
}

Trajectory simulate_coupling(const Domain& d, Point2 x, Point2 y, double dt, double t_max,
                             std::uint64_t seed) {
    SimOptions opts;
    opts.dt = dt;
    opts.t_max = t_max;
    opts.seed = seed;
    return simulate_coupling(d, x, y, opts);
}

RuleMReport check_rule_M(const Trajectory& traj, const Domain& d) {
    RuleMReport report;
    const auto& st = traj.states;
    if (st.size() < 2) return report;
    const double clearance = 2.0 * std::sqrt(traj.dt);

    // edge sets per state interval (events are stamped with the end-state time)
    const std::size_t nint = st.size() - 1;
    std::vector<std::vector<int>> interval_edges(nint);
    {
        std::size_t k = 0;
        for (const auto& ev : traj.events) {
            while (k + 1 < st.size() && st[k + 1].t < ev.t - 1e-12) ++k;
            std::size_t idx = k;
            if (idx >= nint) idx = nint - 1;
            auto& edges = interval_edges[idx];
            if (std::find(edges.begin(), edges.end(), ev.edge) == edges.end())
                edges.push_back(ev.edge);
        }
    }

    auto flush_window = [&](std::size_t s_begin, std::size_t s_end, int edge, int nev) {
        // window over states [s_begin, s_end]
        RuleMWindow w;
        w.t_begin = st[s_begin].t;
        w.t_end = st[s_end].t;
        w.edge = edge;
        w.event_count = nev;
        if (edge >= 0) {
            Line2 jline = d.edge_line(static_cast<std::size_t>(edge));
            bool have_h0 = false;
            Point2 h0{};
            double prev_alpha = -1.0;
            w.qualified = nev > 0;
            for (std::size_t i = s_begin; i <= s_end; ++i) {
                auto k = st[i].mirror();
                if (!k) break;  // window truncated at coupling
                double si = geo::cross(k->dir, jline.dir);
                double alpha = geo::smaller_angle_between(k->dir, jline.dir);
                if (std::abs(si) < 1e-9) {
                    w.hinge_at_infinity = true;
                } else {
                    // hinge: K.origin + t K.dir on line J
                    double t = geo::cross(jline.origin - k->origin, jline.dir) / si;
                    Point2 h = k->at(t);
                    if (!have_h0) {
                        h0 = h;
                        have_h0 = true;
                    } else {
                        w.hinge_drift = std::max(w.hinge_drift, geo::dist(h, h0));
                    }
                }
                if (prev_alpha >= 0)
                    w.max_alpha_decrease = std::max(w.max_alpha_decrease, prev_alpha - alpha);
                prev_alpha = alpha;

                // qualification: both particles clear of all other edges
                if (w.qualified) {
                    for (std::size_t j = 0; j < d.edge_count(); ++j) {
                        if (static_cast<int>(j) == edge) continue;
                        auto [a, b] = d.edge(j);
                        if (geo::point_segment_distance(st[i].X, a, b) < clearance ||
                            geo::point_segment_distance(st[i].Y, a, b) < clearance) {
                            w.qualified = false;
                            break;
                        }
                    }
                }
            }
        } else {
            // no boundary events: the mirror is preserved by interior steps, so
            // report the total angular deviation from the first state
            std::optional<Vec2> dir0;
            for (std::size_t i = s_begin; i <= s_end; ++i) {
                auto k = st[i].mirror();
                if (!k) break;
                if (!dir0)
                    dir0 = k->dir;
                else
                    w.max_alpha_decrease = std::max(
                        w.max_alpha_decrease, geo::smaller_angle_between(*dir0, k->dir));
            }
        }
        report.windows.push_back(w);
        if (w.qualified) {
            report.max_qualified_hinge_drift =
                std::max(report.max_qualified_hinge_drift, w.hinge_drift);
            report.max_qualified_alpha_decrease =
                std::max(report.max_qualified_alpha_decrease, w.max_alpha_decrease);
        }
    };

    std::size_t win_start = 0;
    int win_edge = -1;
    int win_events = 0;
    for (std::size_t i = 0; i < nint; ++i) {
        const auto& edges = interval_edges[i];
        bool breaker = edges.size() > 1;
        int e = edges.size() == 1 ? edges[0] : -1;
        if (breaker) {
            if (i > win_start) flush_window(win_start, i, win_edge, win_events);
            win_start = i + 1;
            win_edge = -1;
            win_events = 0;
            continue;
        }
        if (e >= 0) {
            if (win_edge >= 0 && e != win_edge) {
                flush_window(win_start, i, win_edge, win_events);
                win_start = i;
                win_edge = e;
                win_events = 1;
            } else {
                win_edge = e;
                ++win_events;
            }
        }
    }
    if (win_start < nint) flush_window(win_start, nint, win_edge, win_events);
    return report;
}

ConfinementReport mirror_confinement(const Trajectory& traj, const Domain& d,
                                     const geo::Region& A) {
    ConfinementReport report;
    const double delta = 1e-3 * d.diameter();
    const double band = 1e-9;

    for (const auto& s : traj.states) {
        if (s.coupled) break;
        auto k = s.mirror();
        if (!k) break;
        ++report.states_checked;
        auto segs = geo::line_domain_clip(*k, d);
        for (const auto& [a, b] : segs) {
            double lb = A.segment_margin(a, b);
            if (lb >= -band) {
                report.min_margin = std::min(report.min_margin, lb);
                continue;  // every point of the segment is a member
            }
            double len = geo::dist(a, b);
            int nsamp = std::max(1, static_cast<int>(std::ceil(len / delta)));
            for (int i = 0; i <= nsamp; ++i) {
                Point2 p = a + (static_cast<double>(i) / nsamp) * (b - a);
                double mg = A.margin(p);
                report.min_margin = std::min(report.min_margin, mg);
                if (mg < -band) {
                    report.passed = false;
                    report.violation_time = s.t;
                    report.violation_point = p;
                    return report;
                }
            }
        }
    }
    return report;
}

Point2 example1_start_pair(const geo::TriangleMarkers& m, const Domain& d, Point2 x) {
    if (point_in_domain(d, x) != geo::PointLocation::inside)
        throw GeometryError("example1_start_pair: x must lie strictly inside D");
    double dx = geo::dist(x, m.c1);
    if (dx >= m.r1)
        throw GeometryError("example1_start_pair: x must satisfy d(x, C1) < r1 "
                            "(C1 side of the arc C4C5)");
    if (dx < 1e-12)
        throw GeometryError("example1_start_pair: x coincides with C1");
    Point2 y = m.c1 + (geo::dist(m.c1, m.c3) / dx) * (x - m.c1);
    if (point_in_domain(d, y) == geo::PointLocation::outside)
        throw GeometryError("example1_start_pair: constructed y falls outside the domain");
    return y;
}

Point2 example2_start_pair(const Domain& d, double a, double b, Point2 x) {
    double w = b + 1.0 / (4.0 * a);
    if (point_in_domain(d, x) != geo::PointLocation::inside)
        throw GeometryError("example2_start_pair: x must lie strictly inside D");
    if (!(x.x < -w))
        throw GeometryError("example2_start_pair: x must lie strictly left of the strip A");
    Point2 y{-x.x, x.y};
    if (x.x < -a && point_in_domain(d, y) == geo::PointLocation::outside)
        y = Point2{a, x.y};
    if (point_in_domain(d, y) == geo::PointLocation::outside)
        throw GeometryError("example2_start_pair: constructed y falls outside the domain");
    return y;
}

double OccupationHistogram::max_relative_deviation() const {
    double worst = 0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (expected[i] <= 0) continue;
        worst = std::max(worst, std::abs(static_cast<double>(counts[i]) - expected[i]) /
                                    expected[i]);
    }
    return worst;
}

OccupationHistogram occupation_histogram(std::span<const Trajectory> trajs, const Domain& d,
                                         int nx, int ny) {
    if (nx < 1 || ny < 1) throw GeometryError("occupation_histogram: grid must be >= 1x1");
    std::size_t nstates = 0;
    for (const auto& t : trajs) nstates += t.states.size();
    if (nstates == 0) throw GeometryError("occupation_histogram: no states");

    OccupationHistogram h;
    h.nx = nx;
    h.ny = ny;
    h.box = d.bbox();
    h.counts.assign(static_cast<std::size_t>(nx) * ny, 0);
    h.expected.assign(static_cast<std::size_t>(nx) * ny, 0.0);

    const double wx = h.box.width() / nx;
    const double wy = h.box.height() / ny;
    for (const auto& t : trajs) {
        for (const auto& s : t.states) {
            int ix = std::clamp(static_cast<int>((s.X.x - h.box.xmin) / wx), 0, nx - 1);
            int iy = std::clamp(static_cast<int>((s.X.y - h.box.ymin) / wy), 0, ny - 1);
            ++h.counts[static_cast<std::size_t>(iy) * nx + ix];
            ++h.total;
        }
    }

    const double inv_area = 1.0 / d.area();
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            geo::BBox cell{h.box.xmin + ix * wx, h.box.ymin + iy * wy,
                           h.box.xmin + (ix + 1) * wx, h.box.ymin + (iy + 1) * wy};
            double area = geo::polygon_box_intersection_area(d.vertices(), cell);
            h.expected[static_cast<std::size_t>(iy) * nx + ix] =
                static_cast<double>(h.total) * area * inv_area;
        }
    }
    return h;
}

}  // namespace nodal::coupling
