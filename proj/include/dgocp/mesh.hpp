#ifndef DGOCP_MESH_HPP
#define DGOCP_MESH_HPP

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

namespace dgocp {

using Index = std::int64_t;
using Point = Eigen::Vector2d;

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class EdgeKind : std::uint8_t { Interior, Dirichlet, Neumann };

struct Vertex {
    Point x;
    Index id = 0;
};

/// Triangle with counterclockwise vertices. Local edge j is opposite local vertex j.
struct Element {
    std::array<Index, 3> vertices{};
    std::array<Index, 3> edges{};
    double diameter = 0.0;  // h_K, the longest side
    int level = 0;
    int refinement_edge = 0;  // local edge index bisected next
};

struct Edge {
    std::array<Index, 2> vertices{};
    /// elements[1] == -1 on the boundary.
    std::array<Index, 2> elements{-1, -1};
    /// Local edge index of this edge inside elements[side].
    std::array<int, 2> local_index{-1, -1};
    EdgeKind kind = EdgeKind::Interior;
    bool controlled = false;  // Neumann edge carrying control DOFs
    double length = 0.0;
    /// Unit normal pointing out of elements[0]; the outward normal of the domain on boundary edges.
    Point normal = Point::Zero();

    [[nodiscard]] bool is_boundary() const { return elements[1] < 0; }
};

/// Geometric classification of the boundary. Both predicates are evaluated at edge midpoints.
struct BoundarySpec {
    std::function<EdgeKind(const Point&)> kind;
    std::function<bool(const Point&)> controlled;

    static BoundarySpec all_dirichlet();
    static BoundarySpec all_neumann();
};

class Mesh;
using MeshPtr = std::shared_ptr<const Mesh>;

/// Conforming triangulation. Immutable once built; refine() returns a new mesh that keeps
/// a link to its parent for exact inter-mesh transfer.
class Mesh {
public:
    Mesh(std::vector<Vertex> vertices, std::vector<Element> elements, BoundarySpec boundary,
         MeshPtr parent = nullptr, std::vector<Index> parent_element = {});

    [[nodiscard]] Index num_vertices() const { return static_cast<Index>(vertices_.size()); }
    [[nodiscard]] Index num_elements() const { return static_cast<Index>(elements_.size()); }
    [[nodiscard]] Index num_edges() const { return static_cast<Index>(edges_.size()); }

    [[nodiscard]] const std::vector<Vertex>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<Element>& elements() const { return elements_; }
    [[nodiscard]] const std::vector<Edge>& edges() const { return edges_; }
    [[nodiscard]] const Vertex& vertex(Index i) const { return vertices_[i]; }
    [[nodiscard]] const Element& element(Index i) const { return elements_[i]; }
    [[nodiscard]] const Edge& edge(Index i) const { return edges_[i]; }
    [[nodiscard]] const Point& point(Index v) const { return vertices_[v].x; }

    [[nodiscard]] double area(Index k) const { return areas_[k]; }
    [[nodiscard]] double total_area() const;
    [[nodiscard]] Point centroid(Index k) const;
    /// Constant gradients of the three barycentric coordinates (row j = grad lambda_j).
    [[nodiscard]] const Eigen::Matrix<double, 3, 2>& barycentric_gradients(Index k) const
    {
        return grads_[k];
    }
    /// Physical point of barycentric coordinates inside element k.
    [[nodiscard]] Point map_to_physical(Index k, const Eigen::Vector3d& bary) const;
    [[nodiscard]] Eigen::Vector3d barycentric(Index k, const Point& x) const;
    [[nodiscard]] Point edge_point(Index e, double s) const;
    [[nodiscard]] Point edge_midpoint(Index e) const { return edge_point(e, 0.5); }
    /// Barycentric coordinates in elements[side] of the point at parameter s along edge e
    /// (s = 0 at edge.vertices[0]).
    [[nodiscard]] Eigen::Vector3d edge_trace_barycentric(Index e, int side, double s) const;

    [[nodiscard]] const std::vector<Index>& interior_edges() const { return interior_edges_; }
    [[nodiscard]] const std::vector<Index>& dirichlet_edges() const { return dirichlet_edges_; }
    [[nodiscard]] const std::vector<Index>& neumann_edges() const { return neumann_edges_; }
    [[nodiscard]] const std::vector<Index>& control_edges() const { return control_edges_; }

    [[nodiscard]] const BoundarySpec& boundary() const { return boundary_; }
    [[nodiscard]] std::uint64_t id() const { return id_; }
    [[nodiscard]] const MeshPtr& parent() const { return parent_; }
    /// Element of parent() this element was cut from.
    [[nodiscard]] Index parent_element(Index k) const { return parent_element_[k]; }
    /// Ancestor of element k in mesh `ancestor`, or -1 when `ancestor` is not in the parent chain.
    [[nodiscard]] Index ancestor_element(Index k, const Mesh& ancestor) const;
    [[nodiscard]] bool descends_from(const Mesh& ancestor) const;
    /// Element containing x (brute force; boundary points resolve to the first hit).
    [[nodiscard]] Index locate(const Point& x, double tol = 1e-12) const;

private:
    void build_edges();

    std::vector<Vertex> vertices_;
    std::vector<Element> elements_;
    std::vector<Edge> edges_;
    std::vector<double> areas_;
    std::vector<Eigen::Matrix<double, 3, 2>> grads_;
    std::vector<Index> interior_edges_, dirichlet_edges_, neumann_edges_, control_edges_;
    BoundarySpec boundary_;
    MeshPtr parent_;
    std::vector<Index> parent_element_;
    std::uint64_t id_;
};

MeshPtr build_rect_mesh(const std::array<double, 2>& x_range, const std::array<double, 2>& y_range,
                        Index nx, Index ny, BoundarySpec boundary);

/// Newest-vertex bisection of the marked elements (and of the elements adjacent to marked
/// edges) followed by conformity closure.
MeshPtr refine(const MeshPtr& mesh, const std::vector<Index>& marked_elements,
               const std::vector<Index>& marked_edges = {});

MeshPtr refine_uniform(const MeshPtr& mesh, int times = 1);

/// Coarsest common refinement of `base` containing every given vertex position that some
/// bisection of `base` can produce. Used to merge per-time-level meshes.
MeshPtr overlay(const MeshPtr& base, const std::vector<Point>& vertex_positions);

struct ShapeRegularity {
    double max_radius_ratio = 0.0;     // circumradius / inradius
    double max_edge_to_diameter = 0.0;  // h_E / h_K
};

ShapeRegularity shape_regularity(const Mesh& mesh);

/// Throws MeshError describing the first violated invariant.
void check_mesh(const Mesh& mesh);

}  // namespace dgocp

#endif  // DGOCP_MESH_HPP
