#ifndef DGOCP_DG_SPACE_HPP
#define DGOCP_DG_SPACE_HPP

#include "dgocp/mesh.hpp"
#include "dgocp/quadrature.hpp"

#include <Eigen/Core>

#include <functional>
#include <utility>

namespace dgocp {

using Vector = Eigen::VectorXd;
using ScalarField = std::function<double(const Point&)>;
using SpaceTimeField = std::function<double(const Point&, double)>;

class SpaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Index dof(Index element, int local) { return 3 * element + local; }

/// Element-wise P1 field, discontinuous across edges. coeffs[3K + j] is the value at vertex j of K.
struct DGFunction {
    MeshPtr mesh;
    Vector coeffs;

    DGFunction() = default;
    DGFunction(MeshPtr m, Vector c);
    static DGFunction zero(const MeshPtr& m);

    [[nodiscard]] Eigen::Vector3d local(Index k) const { return coeffs.segment<3>(3 * k); }
    [[nodiscard]] double value(Index k, const Eigen::Vector3d& bary) const { return local(k).dot(bary); }
    [[nodiscard]] Point gradient(Index k) const;
    /// Point evaluation; on shared edges the first containing element wins.
    [[nodiscard]] double operator()(const Point& x) const;
    /// Trace on edge e from elements[side] at parameter s.
    [[nodiscard]] double trace(Index e, int side, double s) const;
};

DGFunction operator+(const DGFunction& a, const DGFunction& b);
DGFunction operator-(const DGFunction& a, const DGFunction& b);
DGFunction operator*(double s, const DGFunction& a);

/// P1 field on each edge of a fixed edge list, discontinuous between edges.
/// coeffs[2j + l] is the value at edges[j].vertices[l].
struct TraceFunction {
    MeshPtr mesh;
    std::vector<Index> edges;
    Vector coeffs;

    static TraceFunction zero(const MeshPtr& m, std::vector<Index> edges);

    [[nodiscard]] Index size() const { return static_cast<Index>(edges.size()); }
    [[nodiscard]] double value(Index slot, double s) const
    {
        return (1.0 - s) * coeffs[2 * slot] + s * coeffs[2 * slot + 1];
    }
    /// Derivative along the edge with respect to arc length.
    [[nodiscard]] double tangential_derivative(Index slot) const;
};

/// Quadrature nodes on an edge in physical space. Weights sum to the edge length.
struct EdgeQuadrature {
    std::vector<double> s;
    std::vector<Point> x;
    std::vector<double> weight;
};

EdgeQuadrature edge_quadrature(const Mesh& mesh, Index e);

/// [[f]] = f_0 n_0 + f_1 n_1; on boundary edges f n.
Point jump_scalar(const DGFunction& f, Index e, double s);
/// {{grad f}}: mean of the two element gradients, or the one-sided gradient on the boundary.
Point average_grad(const DGFunction& f, Index e);
/// [[grad f]] = grad f_0 . n_0 + grad f_1 . n_1; on boundary edges grad f . n.
double jump_grad(const DGFunction& f, Index e);

DGFunction project_data(const ScalarField& g, const MeshPtr& mesh);
DGFunction interpolate(const ScalarField& g, const MeshPtr& mesh);
/// Edge-wise L2 projection onto P1.
TraceFunction project_trace(const ScalarField& g, const MeshPtr& mesh, const std::vector<Index>& edges);

/// Exact re-expansion of f on a mesh obtained from f.mesh by refinement.
DGFunction transfer(const DGFunction& f, const MeshPtr& target);

struct EnergyParts {
    double volume = 0.0;  // sum_K |grad|^2 + a0 |.|^2
    double edges = 0.0;   // interior and Dirichlet edge terms
    [[nodiscard]] double total() const { return volume + edges; }
};

/// Squared energy norm of a broken field. `field(k, bary)` returns (value, gradient) on element k,
/// `a0(k, bary)` the reaction coefficient.
template <typename Field, typename Coefficient>
EnergyParts energy_norm_sq(const Mesh& mesh, Field&& field, Coefficient&& a0, double sigma0)
{
    EnergyParts out;
    const auto& rule = triangle_rule();
    for (Index k = 0; k < mesh.num_elements(); ++k) {
        double local = 0.0;
        for (int q = 0; q < rule.size; ++q) {
            const auto [v, g] = field(k, rule.bary[q]);
            local += rule.weight[q] * (g.squaredNorm() + a0(k, rule.bary[q]) * v * v);
        }
        out.volume += local * mesh.area(k);
    }
    const auto& line = edge_rule();
    auto edge_term = [&](Index e) {
        const Edge& edge = mesh.edge(e);
        double sum = 0.0;
        for (int q = 0; q < line.size(); ++q) {
            const double s = line.point[q];
            const auto [v0, g0] = field(edge.elements[0], mesh.edge_trace_barycentric(e, 0, s));
            Point avg = g0;
            double jump = v0;
            if (!edge.is_boundary()) {
                const auto [v1, g1] = field(edge.elements[1], mesh.edge_trace_barycentric(e, 1, s));
                avg = 0.5 * (g0 + g1);
                jump = v0 - v1;
            }
            sum += line.weight[q] * (edge.length * avg.squaredNorm() + sigma0 / edge.length * jump * jump);
        }
        out.edges += sum * edge.length;
    };
    for (Index e : mesh.interior_edges()) {
        edge_term(e);
    }
    for (Index e : mesh.dirichlet_edges()) {
        edge_term(e);
    }
    return out;
}

EnergyParts energy_norm_sq(const DGFunction& f, const DGFunction& a0, double sigma0);
double energy_norm(const DGFunction& f, const DGFunction& a0, double sigma0);

/// Squared L2 norm over the domain.
double l2_norm_sq(const DGFunction& f);

}  // namespace dgocp

#endif  // DGOCP_DG_SPACE_HPP
