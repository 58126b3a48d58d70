#pragma once

#include <set>
#include <vector>

#include <Eigen/Sparse>

#include "nodal/mesh.hpp"

namespace nodal::spectral {

using SparseMat = Eigen::SparseMatrix<double>;

// P1 stiffness and consistent mass matrices.  Neumann conditions are natural:
// no boundary terms, K annihilates constants, sum(M) equals the mesh area.
std::pair<SparseMat, SparseMat> assemble(const Mesh& m);

struct EigenResult {
    std::vector<double> eigenvalues;             // ascending
    std::vector<Eigen::VectorXd> eigenvectors;   // M-normalized
    std::vector<double> residuals;               // ||K u - mu M u|| / ||u||
};

// k smallest eigenpairs of K u = mu M u via shift-inverted subspace iteration
// with the constant mode pinned as the first basis vector.
EigenResult smallest_eigenpairs(const SparseMat& K, const SparseMat& M, int k);

// Smallest eigenvalue of the mixed problem: Dirichlet on the boundary edges
// whose marker is in `dirichlet_markers`, Neumann elsewhere.
double mixed_first_eigenvalue(const Mesh& m, const std::set<int>& dirichlet_markers);

// Same, with an explicit Dirichlet node set (used for nodal-line interfaces).
double mixed_first_eigenvalue_nodes(const Mesh& m, const std::vector<int>& dirichlet_nodes);

// 2 when mu3 is within gap_tol (relative to mu2) of mu2, else 1.  Clamps at 2;
// *clamped is set when mu4 also falls inside the gap.
int multiplicity_estimate(const EigenResult& ev, double gap_tol = 1e-2,
                          bool* clamped = nullptr);

}  // namespace nodal::spectral
