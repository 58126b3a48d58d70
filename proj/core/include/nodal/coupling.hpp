#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "nodal/geometry.hpp"

namespace nodal::coupling {

using geo::Domain;
using geo::Line2;
using geo::Point2;
using geo::Vec2;

// Increments of the two coupled Brownian motions: dZ is dW mirrored across the
// line of symmetry of X and Y, i.e. dZ = dW - 2 m (m . dW), m = (Y-X)/|Y-X|.
struct IncrementPair {
    Vec2 dW;
    Vec2 dZ;
};

IncrementPair mirror_increment(Vec2 dW, Point2 X, Point2 Y, double coupled_tol = 1e-14);

// One specular bounce off a boundary edge.
struct BoundaryEvent {
    double t = 0;
    char which = 'X';  // 'X' or 'Y'
    int edge = -1;     // domain edge index
    double push = 0;   // displacement applied by the bounce, > 0
};

struct MirrorState {
    double t = 0;
    Point2 X;
    Point2 Y;
    bool coupled = false;

    // The mirror is the perpendicular bisector of X and Y; absent once coupled.
    std::optional<Line2> mirror() const;
    // Angle of the mirror against the +x axis, in [0, pi); absent once coupled.
    std::optional<double> alpha() const;
};

struct Trajectory {
    std::vector<MirrorState> states;
    std::vector<BoundaryEvent> events;
    std::optional<double> zeta;  // coupling time
    std::uint64_t seed = 0;
    double dt = 0;
};

// Result of pushing one displacement segment back into the domain.
struct ReflectOutcome {
    Point2 end;
    bool vertex_hit = false;  // segment passed within 1e-12 of a vertex; redraw
    int bounces = 0;
};

// Specular (billiard) reflection of the segment from->to off the polygon
// boundary; events for each bounce are appended to `events` with time stamp
// `t_event`.  Throws SolverError after 64 bounces.
ReflectOutcome reflect_segment(const Domain& d, Point2 from, Point2 to,
                               std::vector<BoundaryEvent>& events, double t_event,
                               char which);

// Convenience wrapper matching the one-shot contract.
std::pair<Point2, std::vector<BoundaryEvent>> reflect_into_domain(const Domain& d,
                                                                  Point2 from, Point2 to);

struct SimOptions {
    double dt = 1e-4;
    double t_max = 20.0;
    std::uint64_t seed = 42;
    // Stop the trajectory at the coupling time.  When false the pair keeps
    // moving with Y == X until t_max (useful for occupation statistics).
    bool stop_at_coupling = true;
    // Record every k-th state (the first, the coupling state and the last are
    // always recorded).  Monitors that inspect every step need stride 1.
    int record_stride = 1;
};

// Euler-Maruyama mirror coupling with specular boundary reflection.  The pair
// is declared coupled once |X - Y| <= 2 sqrt(dt), after which Y is set to X.
Trajectory simulate_coupling(const Domain& d, Point2 x, Point2 y, const SimOptions& opts);
Trajectory simulate_coupling(const Domain& d, Point2 x, Point2 y, double dt, double t_max,
                             std::uint64_t seed);

// --- rule (M) monitor -------------------------------------------------------

struct RuleMWindow {
    double t_begin = 0;
    double t_end = 0;
    int edge = -1;             // -1: no boundary events in the window
    int event_count = 0;
    double hinge_drift = 0;    // max |H_t - H_first| over the window
    double max_alpha_decrease = 0;  // max single-step decrease of the K-vs-J angle
    bool hinge_at_infinity = false; // K parallel to J somewhere in the window
    // Both particles stayed >= 2 sqrt(dt) away from all non-active edges, so
    // the continuous-time statement applies to the window.
    bool qualified = false;
};

struct RuleMReport {
    std::vector<RuleMWindow> windows;
    double max_qualified_hinge_drift = 0;
    double max_qualified_alpha_decrease = 0;
};

RuleMReport check_rule_M(const Trajectory& traj, const Domain& d);

// --- mirror confinement ------------------------------------------------------

struct ConfinementReport {
    bool passed = true;
    std::optional<double> violation_time;
    std::optional<Point2> violation_point;
    std::size_t states_checked = 0;
    double min_margin = std::numeric_limits<double>::infinity();
};

// Verifies K_t intersected with D stays inside region A for every pre-coupling
// state: clipped mirror segments are tested at both endpoints and at sampling
// resolution 1e-3 * diameter(D).
ConfinementReport mirror_confinement(const Trajectory& traj, const Domain& d,
                                     const geo::Region& A);

// --- example-specific start pairs -------------------------------------------

// Example 1: y on the ray C1->x at distance d(C1,C3).  Requires x strictly
// inside D with d(x, C1) < r1.
Point2 example1_start_pair(const geo::TriangleMarkers& m, const Domain& d, Point2 x);

// Example 2: mirror x across the vertical axis; for cap points whose mirror
// image leaves D, clamp the first coordinate to a.  Requires x in D strictly
// left of the strip A.
Point2 example2_start_pair(const Domain& d, double a, double b, Point2 x);

// --- occupation statistics ----------------------------------------------------

struct OccupationHistogram {
    int nx = 0, ny = 0;
    geo::BBox box;
    std::vector<std::int64_t> counts;    // row-major, ny rows of nx
    std::vector<double> expected;        // same layout; proportional to area(cell & D)
    std::int64_t total = 0;

    // max over cells with positive expected count of |count-expected|/expected
    double max_relative_deviation() const;
};

OccupationHistogram occupation_histogram(std::span<const Trajectory> trajs, const Domain& d,
                                         int nx, int ny);

}  // namespace nodal::coupling
