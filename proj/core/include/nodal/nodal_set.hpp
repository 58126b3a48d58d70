#pragma once

#include <Eigen/Dense>

#include "nodal/fem.hpp"
#include "nodal/mesh.hpp"

namespace nodal::spectral {

// Zero set of a P1 nodal field: per-triangle polyline pieces plus sign labels.
struct NodalSet {
    std::vector<std::pair<Point2, Point2>> segments;
    std::vector<std::int8_t> tri_labels;  // +1 / -1 / 0 (straddling)
    int domain_count = 0;
};

NodalSet nodal_set(const Mesh& m, const Eigen::VectorXd& u);

// triangulate -> assemble -> solve -> extract, with the sign fixed so that the
// nodal domain nearest the anchor vertex is negative.  Throws NodalCountError
// when the extraction does not produce exactly two nodal domains.
struct SecondEigenfunction {
    Mesh mesh;
    EigenResult eigen;      // at least 4 pairs when the mesh allows it
    Eigen::VectorXd u;      // sign-fixed second eigenvector
    NodalSet nodal;
    double mu2 = 0;
};

SecondEigenfunction second_eigenfunction(const Domain& d, double h);

// First eigenvalue of the mixed problem on one nodal domain of u: mesh nodes
// adjacent to the zero set are relocated onto it and become the Dirichlet
// interface; side = -1 picks the negative domain, +1 the positive one.
double mixed_eigenvalue_on_nodal_domain(const Mesh& m, const Eigen::VectorXd& u, int side);

}  // namespace nodal::spectral
