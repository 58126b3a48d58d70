#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "nodal/geometry.hpp"

namespace nodal::spectral {

using geo::Domain;
using geo::Point2;

// Conforming triangulation of a polygon.  Boundary edges carry the index of
// the polygon edge they subdivide.
struct Mesh {
    struct BoundaryEdge {
        int a = 0, b = 0;   // node indices, ordered along the CCW boundary
        int marker = -1;    // polygon edge index
    };

    std::vector<Point2> nodes;
    std::vector<std::array<int, 3>> triangles;  // CCW
    std::vector<BoundaryEdge> boundary_edges;
    double h = 0;

    double triangle_area(std::size_t t) const;
    double total_area() const;
    double max_element_diameter() const;
    double min_angle() const;  // radians
};

// Delaunay-based mesher: boundary nodes at spacing <= h, interior nodes on a
// smoothed hexagonal lattice.  Max element diameter <= 1.5 h.  The 20-degree
// quality target cannot hold next to polygon corners sharper than 20 degrees
// (thin obtuse triangles, sector apexes); those corner elements are exempt.
Mesh triangulate(const Domain& d, double h);

// Plain text format: counts line, then nodes, then triangles, then boundary
// edges with markers.
void write_mesh(std::ostream& os, const Mesh& m);

// Nearest mesh node to p.
int nearest_node(const Mesh& m, Point2 p);

// Point location with linear interpolation of a nodal field; returns false if
// p lies outside the mesh.
class MeshLocator {
public:
    explicit MeshLocator(const Mesh& m);
    bool locate(Point2 p, int& tri, std::array<double, 3>& bary) const;
    // Linear interpolation of nodal values at p (throws if p outside).
    double interpolate(Point2 p, const std::vector<double>& nodal) const;

private:
    const Mesh& mesh_;
    geo::BBox box_;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> cells_;  // triangle candidates per grid cell
};

}  // namespace nodal::spectral
