#include "nodal/fem.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "nodal/rng.hpp"

namespace nodal::spectral {

std::pair<SparseMat, SparseMat> assemble(const Mesh& m) {
    const int n = static_cast<int>(m.nodes.size());
    std::vector<Eigen::Triplet<double>> tk, tm;
    tk.reserve(m.triangles.size() * 9);
    tm.reserve(m.triangles.size() * 9);

    for (const auto& tr : m.triangles) {
        Point2 p0 = m.nodes[tr[0]], p1 = m.nodes[tr[1]], p2 = m.nodes[tr[2]];
        double area = 0.5 * geo::cross(p1 - p0, p2 - p0);
        if (area <= 1e-14) throw MeshError("assemble: degenerate triangle");
        // gradient coefficients: grad lambda_i = (b_i, c_i) / (2 area)
        double b[3] = {p1.y - p2.y, p2.y - p0.y, p0.y - p1.y};
        double c[3] = {p2.x - p1.x, p0.x - p2.x, p1.x - p0.x};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double kij = (b[i] * b[j] + c[i] * c[j]) / (4.0 * area);
                double mij = area / 12.0 * (i == j ? 2.0 : 1.0);
                tk.emplace_back(tr[i], tr[j], kij);
                tm.emplace_back(tr[i], tr[j], mij);
            }
        }
    }
    SparseMat K(n, n), M(n, n);
    K.setFromTriplets(tk.begin(), tk.end());
    M.setFromTriplets(tm.begin(), tm.end());
    return {std::move(K), std::move(M)};
}

namespace {

// M-orthonormalize the columns of V in place (modified Gram-Schmidt); the
// first column is left untouched apart from normalization.
void m_orthonormalize(Eigen::MatrixXd& V, const SparseMat& M) {
    const int m = static_cast<int>(V.cols());
    for (int j = 0; j < m; ++j) {
        Eigen::VectorXd mv = M * V.col(j);
        for (int i = 0; i < j; ++i) {
            double r = V.col(i).dot(mv);
            V.col(j) -= r * V.col(i);
            mv = M * V.col(j);
        }
        double nrm = std::sqrt(V.col(j).dot(mv));
        if (nrm < 1e-300) throw SolverError("eigensolver: basis collapsed");
        V.col(j) /= nrm;
    }
}

EigenResult subspace_smallest(const SparseMat& K, const SparseMat& M, int k, double sigma,
                              bool pin_constant) {
    const int n = static_cast<int>(K.rows());
    if (k < 1) throw SolverError("eigensolver: k must be >= 1");
    if (k >= n) throw SolverError("eigensolver: k must be below the matrix dimension");
    const int m = std::min(n, k + 8);

    SparseMat A = K + sigma * M;
    Eigen::SimplicialLDLT<SparseMat> ldlt;
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("eigensolver: factorization of the shifted operator failed");

    Eigen::MatrixXd V(n, m);
    GaussianStream rng(0x5eedULL);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) V(i, j) = rng.normal();
    if (pin_constant) V.col(0).setOnes();
    m_orthonormalize(V, M);

    const double tol = 1e-8;
    const int maxit = 200;
    EigenResult result;
    for (int it = 0; it < maxit; ++it) {
        Eigen::MatrixXd X = ldlt.solve(M * V);
        if (pin_constant) X.col(0).setOnes();
        m_orthonormalize(X, M);

        Eigen::MatrixXd Kr = X.transpose() * (K * X).eval();
        Kr = 0.5 * (Kr + Kr.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Kr);
        if (es.info() != Eigen::Success)
            throw SolverError("eigensolver: dense Ritz solve failed");
        V = X * es.eigenvectors();

        bool converged = true;
        result.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + k);
        result.eigenvectors.clear();
        result.residuals.clear();
        for (int j = 0; j < k; ++j) {
            Eigen::VectorXd v = V.col(j);
            double mu = result.eigenvalues[static_cast<std::size_t>(j)];
            double res = (K * v - mu * (M * v)).norm() / v.norm();
            result.residuals.push_back(res);
            result.eigenvectors.push_back(std::move(v));
            if (res > tol) converged = false;
        }
        if (converged) return result;
    }
    throw SolverError("eigensolver: subspace iteration did not converge");
}

}  // namespace

EigenResult smallest_eigenpairs(const SparseMat& K, const SparseMat& M, int k) {
    if (k < 2) throw SolverError("smallest_eigenpairs: k must be >= 2");
    double scale = K.diagonal().sum() / M.diagonal().sum();
    double sigma = 1e-3 * scale;
    return subspace_smallest(K, M, k, sigma, true);
}

namespace {

double mixed_smallest(const Mesh& m, const std::vector<char>& dirichlet) {
    const int n = static_cast<int>(m.nodes.size());
    std::vector<int> map(n, -1);
    int nf = 0;
    for (int i = 0; i < n; ++i)
        if (!dirichlet[i]) map[i] = nf++;
    if (nf == 0) throw SolverError("mixed problem: all nodes are Dirichlet");
    if (nf == n) throw GeometryError("mixed problem: Dirichlet set is empty");

    auto [K, M] = assemble(m);
    std::vector<Eigen::Triplet<double>> tk, tm;
    for (int c = 0; c < K.outerSize(); ++c) {
        for (SparseMat::InnerIterator it(K, c); it; ++it)
            if (map[it.row()] >= 0 && map[it.col()] >= 0)
                tk.emplace_back(map[it.row()], map[it.col()], it.value());
        for (SparseMat::InnerIterator it(M, c); it; ++it)
            if (map[it.row()] >= 0 && map[it.col()] >= 0)
                tm.emplace_back(map[it.row()], map[it.col()], it.value());
    }
    SparseMat Kf(nf, nf), Mf(nf, nf);
    Kf.setFromTriplets(tk.begin(), tk.end());
    Mf.setFromTriplets(tm.begin(), tm.end());

    int k = std::min(2, nf - 1);
    if (k < 1) throw SolverError("mixed problem: too few free nodes");
    auto ev = subspace_smallest(Kf, Mf, k, 0.0, false);
    double lambda = ev.eigenvalues[0];
    if (!(lambda > 0)) throw SolverError("mixed problem: first eigenvalue not positive");
    return lambda;
}

}  // namespace

double mixed_first_eigenvalue(const Mesh& m, const std::set<int>& dirichlet_markers) {
    if (dirichlet_markers.empty())
        throw GeometryError("mixed_first_eigenvalue: Dirichlet edge set is empty");
    std::vector<char> dirichlet(m.nodes.size(), 0);
    bool any = false;
    for (const auto& e : m.boundary_edges) {
        if (dirichlet_markers.count(e.marker)) {
            dirichlet[static_cast<std::size_t>(e.a)] = 1;
            dirichlet[static_cast<std::size_t>(e.b)] = 1;
            any = true;
        }
    }
    if (!any) throw GeometryError("mixed_first_eigenvalue: no boundary edge has the "
                                  "requested markers");
    return mixed_smallest(m, dirichlet);
}

double mixed_first_eigenvalue_nodes(const Mesh& m, const std::vector<int>& dirichlet_nodes) {
    if (dirichlet_nodes.empty())
        throw GeometryError("mixed_first_eigenvalue_nodes: node set is empty");
    std::vector<char> dirichlet(m.nodes.size(), 0);
    for (int i : dirichlet_nodes) dirichlet[static_cast<std::size_t>(i)] = 1;
    return mixed_smallest(m, dirichlet);
}

int multiplicity_estimate(const EigenResult& ev, double gap_tol, bool* clamped) {
    if (ev.eigenvalues.size() < 3)
        throw SolverError("multiplicity_estimate: need at least 3 eigenvalues");
    if (clamped) *clamped = false;
    double mu2 = ev.eigenvalues[1], mu3 = ev.eigenvalues[2];
    if (mu3 - mu2 > gap_tol * mu2) return 1;
    if (ev.eigenvalues.size() >= 4 && ev.eigenvalues[3] - mu2 <= gap_tol * mu2 && clamped)
        *clamped = true;
    return 2;
}

}  // namespace nodal::spectral
