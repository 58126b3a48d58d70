#include "nodal/nodal_set.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace nodal::spectral {

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

int sign_of(double v) { return v > 0 ? 1 : (v < 0 ? -1 : 0); }

}  // namespace

NodalSet nodal_set(const Mesh& m, const Eigen::VectorXd& u) {
    if (u.size() != static_cast<Eigen::Index>(m.nodes.size()))
        throw SolverError("nodal_set: field size does not match the mesh");
    if (u.lpNorm<Eigen::Infinity>() == 0.0)
        throw SolverError("nodal_set: field is identically zero");

    NodalSet ns;
    ns.tri_labels.resize(m.triangles.size());

    std::set<std::pair<int, int>> emitted_zero_edges;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tr = m.triangles[t];
        int s[3] = {sign_of(u[tr[0]]), sign_of(u[tr[1]]), sign_of(u[tr[2]])};
        int pos = 0, neg = 0;
        for (int i = 0; i < 3; ++i) {
            pos += s[i] > 0;
            neg += s[i] < 0;
        }
        ns.tri_labels[t] = (pos > 0 && neg > 0) ? 0 : (pos > 0 ? 1 : (neg > 0 ? -1 : 0));

        std::vector<Point2> zero_pts;
        std::vector<std::pair<int, int>> zero_edge;  // node-pair for whole zero edges
        for (int i = 0; i < 3; ++i) {
            int a = tr[i], b = tr[(i + 1) % 3];
            if (s[i] == 0 && s[(i + 1) % 3] == 0) {
                zero_edge.push_back({std::min(a, b), std::max(a, b)});
            } else if (u[a] * u[b] < 0) {
                double w = u[a] / (u[a] - u[b]);
                zero_pts.push_back(m.nodes[a] + w * (m.nodes[b] - m.nodes[a]));
            }
        }
        for (int i = 0; i < 3; ++i)
            if (s[i] == 0 && (s[(i + 1) % 3] != 0 || s[(i + 2) % 3] != 0))
                zero_pts.push_back(m.nodes[tr[i]]);

        for (const auto& e : zero_edge) {
            if (emitted_zero_edges.insert(e).second)
                ns.segments.emplace_back(m.nodes[e.first], m.nodes[e.second]);
        }
        if (zero_edge.empty() && zero_pts.size() >= 2)
            ns.segments.emplace_back(zero_pts[0], zero_pts[1]);
    }

    // count sign components over triangle-edge adjacency
    std::map<std::pair<int, int>, int> edge_owner;
    UnionFind uf(m.triangles.size());
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        if (ns.tri_labels[t] == 0) continue;
        const auto& tr = m.triangles[t];
        for (int i = 0; i < 3; ++i) {
            auto key = std::minmax(tr[i], tr[(i + 1) % 3]);
            auto [it, inserted] = edge_owner.try_emplace({key.first, key.second},
                                                         static_cast<int>(t));
            if (!inserted && ns.tri_labels[static_cast<std::size_t>(it->second)] ==
                                 ns.tri_labels[t])
                uf.unite(it->second, static_cast<int>(t));
        }
    }
    std::set<int> roots;
    for (std::size_t t = 0; t < m.triangles.size(); ++t)
        if (ns.tri_labels[t] != 0) roots.insert(uf.find(static_cast<int>(t)));
    ns.domain_count = static_cast<int>(roots.size());
    return ns;
}

SecondEigenfunction second_eigenfunction(const Domain& d, double h) {
    SecondEigenfunction out;
    out.mesh = triangulate(d, h);
    auto [K, M] = assemble(out.mesh);
    int k = std::min<int>(4, static_cast<int>(out.mesh.nodes.size()) - 1);
    if (k < 2) throw SolverError("second_eigenfunction: mesh has too few nodes");
    out.eigen = smallest_eigenpairs(K, M, k);
    out.u = out.eigen.eigenvectors[1];
    out.mu2 = out.eigen.eigenvalues[1];

    // deterministic sign: the nodal domain near the anchor is negative
    Point2 anchor = d.vertices()[0];
    if (d.kind() == DomainKind::lip && d.lip_params())
        anchor = Point2{-d.lip_params()->a - d.lip_params()->b, 0.5};
    int node = nearest_node(out.mesh, anchor);
    double uref = out.u[node];
    if (std::abs(uref) < 1e-9 * out.u.lpNorm<Eigen::Infinity>()) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < out.mesh.nodes.size(); ++i) {
            if (std::abs(out.u[static_cast<Eigen::Index>(i)]) <
                1e-6 * out.u.lpNorm<Eigen::Infinity>())
                continue;
            double dd = geo::norm2(out.mesh.nodes[i] - anchor);
            if (dd < best) {
                best = dd;
                uref = out.u[static_cast<Eigen::Index>(i)];
            }
        }
    }
    if (uref > 0) {
        out.u = -out.u;
        out.eigen.eigenvectors[1] = out.u;
    }

    out.nodal = nodal_set(out.mesh, out.u);
    if (out.nodal.domain_count != 2) throw NodalCountError(out.nodal.domain_count);
    return out;
}

double mixed_eigenvalue_on_nodal_domain(const Mesh& m, const Eigen::VectorXd& u, int side) {
    if (side != 1 && side != -1)
        throw GeometryError("mixed_eigenvalue_on_nodal_domain: side must be +1 or -1");

    Mesh sub = m;  // local copy; interface nodes get relocated onto the zero set
    std::vector<char> interface(m.nodes.size(), 0);
    std::vector<double> move_dist(m.nodes.size(), std::numeric_limits<double>::infinity());
    std::vector<Point2> target(m.nodes.size());

    for (const auto& tr : m.triangles) {
        for (int i = 0; i < 3; ++i) {
            int a = tr[i], b = tr[(i + 1) % 3];
            if (u[a] * u[b] < 0) {
                double w = u[a] / (u[a] - u[b]);
                Point2 p = m.nodes[a] + w * (m.nodes[b] - m.nodes[a]);
                int snap = std::abs(u[a]) <= std::abs(u[b]) ? a : b;
                double dd = geo::dist(m.nodes[snap], p);
                interface[static_cast<std::size_t>(snap)] = 1;
                if (dd < move_dist[static_cast<std::size_t>(snap)]) {
                    move_dist[static_cast<std::size_t>(snap)] = dd;
                    target[static_cast<std::size_t>(snap)] = p;
                }
            }
        }
    }
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (u[static_cast<Eigen::Index>(i)] == 0.0) interface[i] = 1;
        if (!interface[i] || !std::isfinite(move_dist[i])) continue;
        Point2 old = sub.nodes[i];
        sub.nodes[i] = target[i];
        // roll back relocations that would invert an incident element
        for (const auto& tr : m.triangles) {
            if (tr[0] != static_cast<int>(i) && tr[1] != static_cast<int>(i) &&
                tr[2] != static_cast<int>(i))
                continue;
            Point2 p0 = sub.nodes[tr[0]], p1 = sub.nodes[tr[1]], p2 = sub.nodes[tr[2]];
            if (geo::cross(p1 - p0, p2 - p0) <= 1e-14) {
                sub.nodes[i] = old;
                break;
            }
        }
    }

    // keep the side's triangles: every vertex on the interface or of the right
    // sign, at least one strict
    std::vector<std::array<int, 3>> kept;
    std::vector<char> used(m.nodes.size(), 0);
    for (const auto& tr : m.triangles) {
        bool ok = true, strict = false;
        for (int i = 0; i < 3; ++i) {
            if (interface[static_cast<std::size_t>(tr[i])]) continue;
            if (sign_of(u[tr[i]]) == side)
                strict = true;
            else
                ok = false;
        }
        if (ok && strict) {
            kept.push_back(tr);
            for (int i = 0; i < 3; ++i) used[static_cast<std::size_t>(tr[i])] = 1;
        }
    }
    if (kept.empty()) throw SolverError("mixed_eigenvalue_on_nodal_domain: empty side");

    std::vector<int> remap(m.nodes.size(), -1);
    Mesh final_mesh;
    final_mesh.h = m.h;
    std::vector<int> dirichlet;
    for (std::size_t i = 0; i < m.nodes.size(); ++i) {
        if (!used[i]) continue;
        remap[i] = static_cast<int>(final_mesh.nodes.size());
        final_mesh.nodes.push_back(sub.nodes[i]);
        if (interface[i]) dirichlet.push_back(remap[i]);
    }
    for (const auto& tr : kept)
        final_mesh.triangles.push_back({remap[tr[0]], remap[tr[1]], remap[tr[2]]});
    if (dirichlet.empty())
        throw GeometryError("mixed_eigenvalue_on_nodal_domain: no killing interface");
    return mixed_first_eigenvalue_nodes(final_mesh, dirichlet);
}

}  // namespace nodal::spectral
