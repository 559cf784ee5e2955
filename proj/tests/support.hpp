#ifndef DGOCP_TEST_SUPPORT_HPP
#define DGOCP_TEST_SUPPORT_HPP

#include "dgocp/assembly.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace dgocp::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Index uniform_index(Rng& rng, Index lo, Index hi)
{
    return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

/// Boundary split at random: each side of the unit square is Dirichlet or Neumann, Neumann sides controlled.
inline BoundarySpec random_boundary(Rng& rng)
{
    std::array<bool, 4> dirichlet{};
    for (bool& d : dirichlet) {
        d = uniform(rng, 0.0, 1.0) < 0.5;
    }
    auto side = [](const Point& x) {
        if (x.y() <= 1e-12) return 0;
        if (x.x() >= 1.0 - 1e-12) return 1;
        if (x.y() >= 1.0 - 1e-12) return 2;
        return 3;
    };
    BoundarySpec b;
    b.kind = [=](const Point& x) { return dirichlet[side(x)] ? EdgeKind::Dirichlet : EdgeKind::Neumann; };
    b.controlled = [](const Point&) { return true; };
    return b;
}

/// Random locally refined triangulation of the unit square with at most max_elements elements.
inline MeshPtr random_mesh(Rng& rng, Index max_elements = 512)
{
    const Index nx = uniform_index(rng, 1, 4);
    const Index ny = uniform_index(rng, 1, 4);
    MeshPtr mesh = build_rect_mesh({0.0, 1.0}, {0.0, 1.0}, nx, ny, random_boundary(rng));
    const int rounds = static_cast<int>(uniform_index(rng, 0, 6));
    for (int r = 0; r < rounds; ++r) {
        std::vector<Index> marks;
        for (Index k = 0; k < mesh->num_elements(); ++k) {
            if (uniform(rng, 0.0, 1.0) < 0.25) {
                marks.push_back(k);
            }
        }
        MeshPtr next = refine(mesh, marks);
        if (next->num_elements() > max_elements) {
            break;
        }
        mesh = next;
    }
    return mesh;
}

inline DGFunction random_field(Rng& rng, const MeshPtr& mesh)
{
    Vector c(3 * mesh->num_elements());
    for (Index i = 0; i < c.size(); ++i) {
        c[i] = uniform(rng, -1.0, 1.0);
    }
    return {mesh, c};
}

/// Random point inside the triangle of element k.
inline Point random_point_in(Rng& rng, const Mesh& mesh, Index k)
{
    double a = uniform(rng, 0.0, 1.0), b = uniform(rng, 0.0, 1.0);
    if (a + b > 1.0) {
        a = 1.0 - a;
        b = 1.0 - b;
    }
    return mesh.map_to_physical(k, Eigen::Vector3d(1.0 - a - b, a, b));
}

/// Single triangle with vertices (0,0), (1,0), (0,1).
inline double max_asymmetry(const SparseMatrix& A)
{
    const SparseMatrix d = A - SparseMatrix(A.transpose());
    double worst = 0.0;
    for (Index k = 0; k < d.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(d, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

inline MeshPtr reference_triangle(const BoundarySpec& boundary = BoundarySpec::all_neumann())
{
    std::vector<Vertex> v{{Point(0, 0), 0}, {Point(1, 0), 1}, {Point(0, 1), 2}};
    Element e;
    e.vertices = {0, 1, 2};
    return std::make_shared<const Mesh>(std::move(v), std::vector<Element>{e}, boundary);
}

/// Exact integral of x^a y^b over the reference triangle.
inline double monomial_integral(int a, int b)
{
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    return fact(a) * fact(b) / fact(a + b + 2);
}

}  // namespace dgocp::testing

#endif  // DGOCP_TEST_SUPPORT_HPP
