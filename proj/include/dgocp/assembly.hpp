#ifndef DGOCP_ASSEMBLY_HPP
#define DGOCP_ASSEMBLY_HPP

#include "dgocp/dg_space.hpp"

#include <Eigen/SparseCore>

namespace dgocp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct SipgConfig {
    double sigma0 = 10.0;
    DGFunction a0;

    static SipgConfig constant(const MeshPtr& mesh, double sigma0, double a0);
};

/// a_h(phi_j, phi_i) over the element-major DG basis.
SparseMatrix assemble_stiffness(const Mesh& mesh, const SipgConfig& config);
/// Block-diagonal P1 mass matrix.
SparseMatrix assemble_mass(const Mesh& mesh);
/// b(q, phi_i) for edge-wise P1 q on the given boundary edges (2 columns per edge).
SparseMatrix assemble_control_coupling(const Mesh& mesh, const std::vector<Index>& edges);
/// Control coupling on the controlled Neumann edges.
SparseMatrix assemble_control_coupling(const Mesh& mesh);

/// l_h(phi_i) with f_h a DG field, gD on the Dirichlet edges and gN on the Neumann edges.
Vector assemble_load(const Mesh& mesh, const SipgConfig& config, const DGFunction& f,
                     const TraceFunction& gD, const TraceFunction& gN);

/// The per-mesh operators used by the time stepping.
struct SpaceOperators {
    SparseMatrix A;   // SIPG stiffness
    SparseMatrix M;   // mass
    SparseMatrix B;   // control edges -> DG
    SparseMatrix Nn;  // all Neumann edges -> DG
    SparseMatrix D;   // Dirichlet data -> DG (penalty and consistency terms)
};

SpaceOperators assemble_operators(const Mesh& mesh, const SipgConfig& config);

}  // namespace dgocp

#endif  // DGOCP_ASSEMBLY_HPP
