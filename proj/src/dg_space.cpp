#include "dgocp/dg_space.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace dgocp {

LineRule gauss_rule(int n)
{
    LineRule r;
    switch (n) {
    case 1:
        r.point = {0.5};
        r.weight = {1.0};
        break;
    case 2: {
        const double d = 0.5 / std::sqrt(3.0);
        r.point = {0.5 - d, 0.5 + d};
        r.weight = {0.5, 0.5};
        break;
    }
    case 3: {
        const double d = 0.5 * std::sqrt(0.6);
        r.point = {0.5 - d, 0.5, 0.5 + d};
        r.weight = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
        break;
    }
    default:
        throw std::invalid_argument("gauss_rule supports 1 to 3 points");
    }
    return r;
}

DGFunction::DGFunction(MeshPtr m, Vector c) : mesh(std::move(m)), coeffs(std::move(c))
{
    if (coeffs.size() != 3 * mesh->num_elements()) {
        throw SpaceError("DG coefficient vector does not match the mesh");
    }
}

DGFunction DGFunction::zero(const MeshPtr& m)
{
    return {m, Vector::Zero(3 * m->num_elements())};
}

Point DGFunction::gradient(Index k) const
{
    return mesh->barycentric_gradients(k).transpose() * local(k);
}

double DGFunction::operator()(const Point& x) const
{
    const Index k = mesh->locate(x, 1e-12);
    if (k < 0) {
        throw SpaceError("evaluation point outside the mesh");
    }
    return value(k, mesh->barycentric(k, x));
}

double DGFunction::trace(Index e, int side, double s) const
{
    const Index k = mesh->edge(e).elements[side];
    return value(k, mesh->edge_trace_barycentric(e, side, s));
}

namespace {

void require_same_mesh(const DGFunction& a, const DGFunction& b)
{
    if (a.mesh != b.mesh) {
        throw SpaceError("DG functions live on different meshes");
    }
}

}  // namespace

DGFunction operator+(const DGFunction& a, const DGFunction& b)
{
    require_same_mesh(a, b);
    return {a.mesh, a.coeffs + b.coeffs};
}

DGFunction operator-(const DGFunction& a, const DGFunction& b)
{
    require_same_mesh(a, b);
    return {a.mesh, a.coeffs - b.coeffs};
}

DGFunction operator*(double s, const DGFunction& a)
{
    return {a.mesh, s * a.coeffs};
}

TraceFunction TraceFunction::zero(const MeshPtr& m, std::vector<Index> edges)
{
    TraceFunction t;
    t.mesh = m;
    t.coeffs = Vector::Zero(2 * static_cast<Index>(edges.size()));
    t.edges = std::move(edges);
    return t;
}

double TraceFunction::tangential_derivative(Index slot) const
{
    return (coeffs[2 * slot + 1] - coeffs[2 * slot]) / mesh->edge(edges[slot]).length;
}

EdgeQuadrature edge_quadrature(const Mesh& mesh, Index e)
{
    const auto& rule = edge_rule();
    EdgeQuadrature q;
    const double h = mesh.edge(e).length;
    for (int i = 0; i < rule.size(); ++i) {
        q.s.push_back(rule.point[i]);
        q.x.push_back(mesh.edge_point(e, rule.point[i]));
        q.weight.push_back(rule.weight[i] * h);
    }
    return q;
}

Point jump_scalar(const DGFunction& f, Index e, double s)
{
    const Edge& edge = f.mesh->edge(e);
    const double v0 = f.trace(e, 0, s);
    if (edge.is_boundary()) {
        return v0 * edge.normal;
    }
    return (v0 - f.trace(e, 1, s)) * edge.normal;
}

Point average_grad(const DGFunction& f, Index e)
{
    const Edge& edge = f.mesh->edge(e);
    const Point g0 = f.gradient(edge.elements[0]);
    if (edge.is_boundary()) {
        return g0;
    }
    return 0.5 * (g0 + f.gradient(edge.elements[1]));
}

double jump_grad(const DGFunction& f, Index e)
{
    const Edge& edge = f.mesh->edge(e);
    const double g0 = f.gradient(edge.elements[0]).dot(edge.normal);
    if (edge.is_boundary()) {
        return g0;
    }
    return g0 - f.gradient(edge.elements[1]).dot(edge.normal);
}

DGFunction project_data(const ScalarField& g, const MeshPtr& mesh)
{
    const auto& rule = triangle_rule();
    Eigen::Matrix3d ref_mass;
    ref_mass << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    ref_mass /= 12.0;
    const Eigen::Matrix3d ref_inverse = ref_mass.inverse();
    DGFunction out = DGFunction::zero(mesh);
    for (Index k = 0; k < mesh->num_elements(); ++k) {
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (int q = 0; q < rule.size; ++q) {
            rhs += rule.weight[q] * g(mesh->map_to_physical(k, rule.bary[q])) * rule.bary[q];
        }
        // both sides carry the element area, which cancels
        out.coeffs.segment<3>(3 * k) = ref_inverse * rhs;
    }
    return out;
}

DGFunction interpolate(const ScalarField& g, const MeshPtr& mesh)
{
    DGFunction out = DGFunction::zero(mesh);
    for (Index k = 0; k < mesh->num_elements(); ++k) {
        for (int j = 0; j < 3; ++j) {
            out.coeffs[dof(k, j)] = g(mesh->point(mesh->element(k).vertices[j]));
        }
    }
    return out;
}

TraceFunction project_trace(const ScalarField& g, const MeshPtr& mesh, const std::vector<Index>& edges)
{
    const auto& rule = edge_rule();
    Eigen::Matrix2d inverse;
    inverse << 4, -2, -2, 4;  // inverse of [[1/3, 1/6], [1/6, 1/3]]
    TraceFunction out = TraceFunction::zero(mesh, edges);
    for (Index j = 0; j < out.size(); ++j) {
        Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
        for (int q = 0; q < rule.size(); ++q) {
            const double s = rule.point[q];
            const double v = g(mesh->edge_point(edges[j], s));
            rhs += rule.weight[q] * v * Eigen::Vector2d(1.0 - s, s);
        }
        out.coeffs.segment<2>(2 * j) = inverse * rhs;
    }
    return out;
}

DGFunction transfer(const DGFunction& f, const MeshPtr& target)
{
    if (target == f.mesh) {
        return f;
    }
    const Mesh& source = *f.mesh;
    if (!target->descends_from(source)) {
        throw SpaceError("transfer target is not a refinement of the source mesh");
    }
    DGFunction out = DGFunction::zero(target);
    for (Index k = 0; k < target->num_elements(); ++k) {
        const Index parent = target->ancestor_element(k, source);
        for (int j = 0; j < 3; ++j) {
            const Point& x = target->point(target->element(k).vertices[j]);
            out.coeffs[dof(k, j)] = f.value(parent, source.barycentric(parent, x));
        }
    }
    return out;
}

EnergyParts energy_norm_sq(const DGFunction& f, const DGFunction& a0, double sigma0)
{
    if (a0.mesh != f.mesh) {
        throw SpaceError("energy norm coefficient lives on a different mesh");
    }
    return energy_norm_sq(
        *f.mesh,
        [&f](Index k, const Eigen::Vector3d& l) { return std::pair<double, Point>(f.value(k, l), f.gradient(k)); },
        [&a0](Index k, const Eigen::Vector3d& l) { return a0.value(k, l); }, sigma0);
}

double energy_norm(const DGFunction& f, const DGFunction& a0, double sigma0)
{
    return std::sqrt(energy_norm_sq(f, a0, sigma0).total());
}

double l2_norm_sq(const DGFunction& f)
{
    double sum = 0.0;
    for (Index k = 0; k < f.mesh->num_elements(); ++k) {
        const Eigen::Vector3d c = f.local(k);
        // exact P1 mass: area/12 * (sum c^2 + (sum c)^2)
        sum += f.mesh->area(k) / 12.0 * (c.squaredNorm() + c.sum() * c.sum());
    }
    return sum;
}

}  // namespace dgocp
