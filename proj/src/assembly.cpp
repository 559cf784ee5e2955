#include "dgocp/assembly.hpp"

#include <Eigen/Dense>

namespace dgocp {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SparseMatrix from_triplets(Index rows, Index cols, const Triplets& t)
{
    SparseMatrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

void require_mesh(const Mesh& mesh, const SipgConfig& config)
{
    if (!config.a0.mesh || config.a0.mesh.get() != &mesh) {
        throw SpaceError("SIPG coefficient a0 must live on the assembled mesh");
    }
    if (!(config.sigma0 > 0.0)) {
        throw SpaceError("penalty sigma0 must be positive");
    }
}

}  // namespace

SipgConfig SipgConfig::constant(const MeshPtr& mesh, double sigma0, double a0)
{
    return {sigma0, DGFunction(mesh, Vector::Constant(3 * mesh->num_elements(), a0))};
}

SparseMatrix assemble_stiffness(const Mesh& mesh, const SipgConfig& config)
{
    require_mesh(mesh, config);
    const Index n = 3 * mesh.num_elements();
    Triplets t;
    t.reserve(static_cast<std::size_t>(9 * mesh.num_elements() + 36 * mesh.num_edges()));
    const auto& rule = triangle_rule();

    for (Index k = 0; k < mesh.num_elements(); ++k) {
        const auto& G = mesh.barycentric_gradients(k);
        Eigen::Matrix3d local = mesh.area(k) * G * G.transpose();
        for (int q = 0; q < rule.size; ++q) {
            const auto& l = rule.bary[q];
            local += mesh.area(k) * rule.weight[q] * config.a0.value(k, l) * l * l.transpose();
        }
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.emplace_back(dof(k, i), dof(k, j), local(i, j));
            }
        }
    }

    const auto& line = edge_rule();
    auto face = [&](Index e) {
        const Edge& edge = mesh.edge(e);
        const int sides = edge.is_boundary() ? 1 : 2;
        const double c = sides == 2 ? 0.5 : 1.0;
        const double penalty = config.sigma0 / edge.length;
        // dofs of both sides: value traces and normal derivatives (constant per element)
        Eigen::Matrix<double, 6, 1> dn = Eigen::Matrix<double, 6, 1>::Zero();
        std::array<Index, 6> ids{};
        for (int side = 0; side < sides; ++side) {
            const Index k = edge.elements[side];
            const Eigen::Vector3d g = mesh.barycentric_gradients(k) * edge.normal;
            for (int j = 0; j < 3; ++j) {
                ids[3 * side + j] = dof(k, j);
                dn[3 * side + j] = g[j];
            }
        }
        const int m = 3 * sides;
        Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
        for (int q = 0; q < line.size(); ++q) {
            Eigen::Matrix<double, 6, 1> jump = Eigen::Matrix<double, 6, 1>::Zero();  // [[phi]] . n
            Eigen::Matrix<double, 6, 1> avg = Eigen::Matrix<double, 6, 1>::Zero();   // {{grad phi}} . n
            for (int side = 0; side < sides; ++side) {
                const double sign = side == 0 ? 1.0 : -1.0;
                const Eigen::Vector3d l = mesh.edge_trace_barycentric(e, side, line.point[q]);
                for (int j = 0; j < 3; ++j) {
                    jump[3 * side + j] = sign * l[j];
                    avg[3 * side + j] = c * dn[3 * side + j];
                }
            }
            const double w = line.weight[q] * edge.length;
            local.noalias() += w * (penalty * jump * jump.transpose() - avg * jump.transpose() -
                                    jump * avg.transpose());
        }
        for (int a = 0; a < m; ++a) {
            for (int b = 0; b < m; ++b) {
                if (local(a, b) != 0.0) {
                    t.emplace_back(ids[a], ids[b], local(a, b));
                }
            }
        }
    };
    for (Index e : mesh.interior_edges()) {
        face(e);
    }
    for (Index e : mesh.dirichlet_edges()) {
        face(e);
    }
    return from_triplets(n, n, t);
}

SparseMatrix assemble_mass(const Mesh& mesh)
{
    const Index n = 3 * mesh.num_elements();
    Triplets t;
    t.reserve(static_cast<std::size_t>(9 * mesh.num_elements()));
    for (Index k = 0; k < mesh.num_elements(); ++k) {
        const double a = mesh.area(k) / 12.0;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                t.emplace_back(dof(k, i), dof(k, j), i == j ? 2.0 * a : a);
            }
        }
    }
    return from_triplets(n, n, t);
}

namespace {

/// Local vertex index in elements[0] of each edge endpoint.
std::array<int, 2> endpoint_locals(const Mesh& mesh, Index e)
{
    const Edge& edge = mesh.edge(e);
    const Element& el = mesh.element(edge.elements[0]);
    std::array<int, 2> out{-1, -1};
    for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 2; ++l) {
            if (el.vertices[j] == edge.vertices[l]) {
                out[l] = j;
            }
        }
    }
    return out;
}

}  // namespace

SparseMatrix assemble_control_coupling(const Mesh& mesh, const std::vector<Index>& edges)
{
    const Index n = 3 * mesh.num_elements();
    Triplets t;
    t.reserve(edges.size() * 4);
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const Edge& edge = mesh.edge(edges[j]);
        if (!edge.is_boundary()) {
            throw SpaceError("control coupling requested on an interior edge");
        }
        const auto loc = endpoint_locals(mesh, edges[j]);
        const Index k = edge.elements[0];
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                const double v = edge.length * (a == b ? 1.0 / 3.0 : 1.0 / 6.0);
                t.emplace_back(dof(k, loc[a]), static_cast<Index>(2 * j + b), v);
            }
        }
    }
    return from_triplets(n, 2 * static_cast<Index>(edges.size()), t);
}

SparseMatrix assemble_control_coupling(const Mesh& mesh)
{
    return assemble_control_coupling(mesh, mesh.control_edges());
}

namespace {

SparseMatrix assemble_dirichlet_coupling(const Mesh& mesh, double sigma0)
{
    const Index n = 3 * mesh.num_elements();
    const auto& edges = mesh.dirichlet_edges();
    const auto& line = edge_rule();
    Triplets t;
    t.reserve(edges.size() * 6);
    for (std::size_t j = 0; j < edges.size(); ++j) {
        const Index e = edges[j];
        const Edge& edge = mesh.edge(e);
        const Index k = edge.elements[0];
        const Eigen::Vector3d dn = mesh.barycentric_gradients(k) * edge.normal;
        Eigen::Matrix<double, 3, 2> local = Eigen::Matrix<double, 3, 2>::Zero();
        for (int q = 0; q < line.size(); ++q) {
            const double s = line.point[q];
            const Eigen::Vector3d l = mesh.edge_trace_barycentric(e, 0, s);
            const Eigen::Vector2d psi(1.0 - s, s);
            local.noalias() +=
                line.weight[q] * edge.length * (sigma0 / edge.length * l - dn) * psi.transpose();
        }
        for (int i = 0; i < 3; ++i) {
            for (int b = 0; b < 2; ++b) {
                t.emplace_back(dof(k, i), static_cast<Index>(2 * j + b), local(i, b));
            }
        }
    }
    return from_triplets(n, 2 * static_cast<Index>(edges.size()), t);
}

}  // namespace

Vector assemble_load(const Mesh& mesh, const SipgConfig& config, const DGFunction& f,
                     const TraceFunction& gD, const TraceFunction& gN)
{
    require_mesh(mesh, config);
    if (f.mesh.get() != &mesh) {
        throw SpaceError("load data lives on a different mesh");
    }
    if (gD.edges != mesh.dirichlet_edges() || gN.edges != mesh.neumann_edges()) {
        throw SpaceError("boundary data must be given on the Dirichlet and Neumann edge lists");
    }
    Vector out = assemble_mass(mesh) * f.coeffs;
    if (gD.size() > 0) {
        out += assemble_dirichlet_coupling(mesh, config.sigma0) * gD.coeffs;
    }
    if (gN.size() > 0) {
        out += assemble_control_coupling(mesh, mesh.neumann_edges()) * gN.coeffs;
    }
    return out;
}

SpaceOperators assemble_operators(const Mesh& mesh, const SipgConfig& config)
{
    SpaceOperators ops;
    ops.A = assemble_stiffness(mesh, config);
    ops.M = assemble_mass(mesh);
    ops.B = assemble_control_coupling(mesh);
    ops.Nn = assemble_control_coupling(mesh, mesh.neumann_edges());
    ops.D = assemble_dirichlet_coupling(mesh, config.sigma0);
    return ops;
}

}  // namespace dgocp
