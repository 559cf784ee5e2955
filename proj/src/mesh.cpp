#include "dgocp/mesh.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dgocp {

namespace {

std::atomic<std::uint64_t> next_mesh_id{1};

Point midpoint(const Point& a, const Point& b) { return 0.5 * (a + b); }

double signed_area(const Point& a, const Point& b, const Point& c)
{
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

std::uint64_t pair_key(Index a, Index b)
{
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32U) | lo;
}

struct PointHash {
    std::size_t operator()(const std::pair<double, double>& p) const
    {
        const std::size_t h1 = std::hash<double>{}(p.first);
        const std::size_t h2 = std::hash<double>{}(p.second);
        return h1 ^ (h2 + 0x9e3779b97f4a7c15ULL + (h1 << 6U) + (h1 >> 2U));
    }
};

using PointSet = std::unordered_set<std::pair<double, double>, PointHash>;

double longest_side(const Point& a, const Point& b, const Point& c)
{
    return std::max({(b - a).norm(), (c - b).norm(), (a - c).norm()});
}

}  // namespace

BoundarySpec BoundarySpec::all_dirichlet()
{
    return {[](const Point&) { return EdgeKind::Dirichlet; }, [](const Point&) { return false; }};
}

BoundarySpec BoundarySpec::all_neumann()
{
    return {[](const Point&) { return EdgeKind::Neumann; }, [](const Point&) { return true; }};
}

Mesh::Mesh(std::vector<Vertex> vertices, std::vector<Element> elements, BoundarySpec boundary,
           MeshPtr parent, std::vector<Index> parent_element)
    : vertices_(std::move(vertices)),
      elements_(std::move(elements)),
      boundary_(std::move(boundary)),
      parent_(std::move(parent)),
      parent_element_(std::move(parent_element)),
      id_(next_mesh_id++)
{
    if (!boundary_.kind) {
        throw MeshError("boundary description needs a kind predicate");
    }
    if (!boundary_.controlled) {
        boundary_.controlled = [](const Point&) { return true; };
    }
    if (parent_ && parent_element_.size() != elements_.size()) {
        throw MeshError("parent element map does not match element count");
    }
    if (!parent_) {
        parent_element_.assign(elements_.size(), -1);
    }
    for (Index i = 0; i < num_vertices(); ++i) {
        vertices_[i].id = i;
    }

    areas_.resize(elements_.size());
    grads_.resize(elements_.size());
    for (std::size_t k = 0; k < elements_.size(); ++k) {
        const auto& v = elements_[k].vertices;
        const Point& a = vertices_[v[0]].x;
        const Point& b = vertices_[v[1]].x;
        const Point& c = vertices_[v[2]].x;
        const double area = signed_area(a, b, c);
        if (!(area > 0.0)) {
            std::ostringstream msg;
            msg << "element " << k << " has non-positive signed area " << area;
            throw MeshError(msg.str());
        }
        areas_[k] = area;
        elements_[k].diameter = longest_side(a, b, c);
        // grad lambda_j = rot90(opposite edge) / (2 area), pointing toward vertex j
        const std::array<Point, 3> p{a, b, c};
        for (int j = 0; j < 3; ++j) {
            const Point& p1 = p[(j + 1) % 3];
            const Point& p2 = p[(j + 2) % 3];
            grads_[k](j, 0) = (p1.y() - p2.y()) / (2.0 * area);
            grads_[k](j, 1) = (p2.x() - p1.x()) / (2.0 * area);
        }
    }
    build_edges();
}

void Mesh::build_edges()
{
    std::unordered_map<std::uint64_t, Index> lookup;
    lookup.reserve(elements_.size() * 2);
    edges_.clear();
    for (Index k = 0; k < num_elements(); ++k) {
        auto& el = elements_[k];
        for (int j = 0; j < 3; ++j) {
            const Index a = el.vertices[(j + 1) % 3];
            const Index b = el.vertices[(j + 2) % 3];
            const auto key = pair_key(a, b);
            auto it = lookup.find(key);
            if (it == lookup.end()) {
                Edge e;
                e.vertices = {a, b};
                e.elements = {k, -1};
                e.local_index = {j, -1};
                const Point t = point(b) - point(a);
                e.length = t.norm();
                e.normal = Point(t.y(), -t.x()) / e.length;
                const Point& opposite = point(el.vertices[j]);
                if ((opposite - point(a)).dot(e.normal) > 0.0) {
                    e.normal = -e.normal;
                }
                lookup.emplace(key, static_cast<Index>(edges_.size()));
                el.edges[j] = static_cast<Index>(edges_.size());
                edges_.push_back(e);
            } else {
                Edge& e = edges_[it->second];
                if (e.elements[1] >= 0) {
                    std::ostringstream msg;
                    msg << "edge (" << a << "," << b << ") shared by more than two elements";
                    throw MeshError(msg.str());
                }
                e.elements[1] = k;
                e.local_index[1] = j;
                el.edges[j] = it->second;
            }
        }
    }

    for (Index e = 0; e < num_edges(); ++e) {
        Edge& edge = edges_[e];
        if (!edge.is_boundary()) {
            edge.kind = EdgeKind::Interior;
            interior_edges_.push_back(e);
            continue;
        }
        const Point mid = edge_midpoint(e);
        edge.kind = boundary_.kind(mid);
        if (edge.kind == EdgeKind::Interior) {
            throw MeshError("boundary description classified a boundary edge as interior");
        }
        if (edge.kind == EdgeKind::Dirichlet) {
            dirichlet_edges_.push_back(e);
        } else {
            neumann_edges_.push_back(e);
            edge.controlled = boundary_.controlled(mid);
            if (edge.controlled) {
                control_edges_.push_back(e);
            }
        }
    }
}

double Mesh::total_area() const
{
    double sum = 0.0;
    for (double a : areas_) {
        sum += a;
    }
    return sum;
}

Point Mesh::centroid(Index k) const
{
    const auto& v = elements_[k].vertices;
    return (point(v[0]) + point(v[1]) + point(v[2])) / 3.0;
}

Point Mesh::map_to_physical(Index k, const Eigen::Vector3d& bary) const
{
    const auto& v = elements_[k].vertices;
    return bary[0] * point(v[0]) + bary[1] * point(v[1]) + bary[2] * point(v[2]);
}

Eigen::Vector3d Mesh::barycentric(Index k, const Point& x) const
{
    const auto& v = elements_[k].vertices;
    const Point& a = point(v[0]);
    const Point& b = point(v[1]);
    const Point& c = point(v[2]);
    const double area = areas_[k];
    Eigen::Vector3d l;
    l[0] = signed_area(x, b, c) / area;
    l[1] = signed_area(a, x, c) / area;
    l[2] = 1.0 - l[0] - l[1];
    return l;
}

Point Mesh::edge_point(Index e, double s) const
{
    const Edge& edge = edges_[e];
    return (1.0 - s) * point(edge.vertices[0]) + s * point(edge.vertices[1]);
}

Eigen::Vector3d Mesh::edge_trace_barycentric(Index e, int side, double s) const
{
    const Edge& edge = edges_[e];
    const Element& el = elements_[edge.elements[side]];
    Eigen::Vector3d l = Eigen::Vector3d::Zero();
    for (int j = 0; j < 3; ++j) {
        if (el.vertices[j] == edge.vertices[0]) {
            l[j] = 1.0 - s;
        } else if (el.vertices[j] == edge.vertices[1]) {
            l[j] = s;
        }
    }
    return l;
}

Index Mesh::ancestor_element(Index k, const Mesh& ancestor) const
{
    const Mesh* current = this;
    Index idx = k;
    while (current->id_ != ancestor.id_) {
        if (!current->parent_) {
            return -1;
        }
        idx = current->parent_element_[idx];
        current = current->parent_.get();
    }
    return idx;
}

bool Mesh::descends_from(const Mesh& ancestor) const
{
    for (const Mesh* m = this; m != nullptr; m = m->parent_.get()) {
        if (m->id_ == ancestor.id_) {
            return true;
        }
    }
    return false;
}

Index Mesh::locate(const Point& x, double tol) const
{
    for (Index k = 0; k < num_elements(); ++k) {
        const Eigen::Vector3d l = barycentric(k, x);
        if (l.minCoeff() >= -tol) {
            return k;
        }
    }
    return -1;
}

MeshPtr build_rect_mesh(const std::array<double, 2>& x_range, const std::array<double, 2>& y_range,
                        Index nx, Index ny, BoundarySpec boundary)
{
    if (nx < 1 || ny < 1) {
        throw MeshError("rectangle mesh needs nx, ny >= 1");
    }
    const double width = x_range[1] - x_range[0];
    const double height = y_range[1] - y_range[0];
    if (!(width > 0.0) || !(height > 0.0)) {
        throw MeshError("degenerate rectangle: zero width or height");
    }

    std::vector<Vertex> vertices;
    vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (Index j = 0; j <= ny; ++j) {
        for (Index i = 0; i <= nx; ++i) {
            // exact end coordinates so boundary predicates can compare with ==
            const double x = i == nx ? x_range[1] : x_range[0] + width * static_cast<double>(i) / nx;
            const double y = j == ny ? y_range[1] : y_range[0] + height * static_cast<double>(j) / ny;
            vertices.push_back({Point(x, y), j * (nx + 1) + i});
        }
    }

    std::vector<Element> elements;
    elements.reserve(static_cast<std::size_t>(2 * nx * ny));
    auto id = [nx](Index i, Index j) { return j * (nx + 1) + i; };
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            // both triangles share the diagonal p00-p11 as their longest (refinement) edge,
            // which is local edge 1 in the orderings below
            Element lower;
            lower.vertices = {id(i, j), id(i + 1, j), id(i + 1, j + 1)};
            lower.refinement_edge = 1;
            Element upper;
            upper.vertices = {id(i, j), id(i + 1, j + 1), id(i, j + 1)};
            upper.refinement_edge = 2;
            elements.push_back(lower);
            elements.push_back(upper);
        }
    }
    return std::make_shared<const Mesh>(std::move(vertices), std::move(elements), std::move(boundary));
}

MeshPtr refine(const MeshPtr& mesh_ptr, const std::vector<Index>& marked_elements,
               const std::vector<Index>& marked_edges)
{
    const Mesh& mesh = *mesh_ptr;
    if (marked_elements.empty() && marked_edges.empty()) {
        return mesh_ptr;
    }

    const Index n_edges = mesh.num_edges();
    std::vector<char> cut(static_cast<std::size_t>(n_edges), 0);
    std::vector<Index> work;
    auto refinement_edge_of = [&](Index k) {
        const Element& el = mesh.element(k);
        return el.edges[el.refinement_edge];
    };
    auto cut_edge = [&](Index e) {
        if (!cut[e]) {
            cut[e] = 1;
            work.push_back(e);
        }
    };
    for (Index k : marked_elements) {
        if (k < 0 || k >= mesh.num_elements()) {
            throw MeshError("marked element out of range");
        }
        cut_edge(refinement_edge_of(k));
    }
    for (Index e : marked_edges) {
        if (e < 0 || e >= n_edges) {
            throw MeshError("marked edge out of range");
        }
        for (Index k : mesh.edge(e).elements) {
            if (k >= 0) {
                cut_edge(refinement_edge_of(k));
            }
        }
    }
    // closure: an element with any cut edge must also bisect its refinement edge
    while (!work.empty()) {
        const Index e = work.back();
        work.pop_back();
        for (Index k : mesh.edge(e).elements) {
            if (k >= 0) {
                cut_edge(refinement_edge_of(k));
            }
        }
    }

    std::vector<Vertex> vertices = mesh.vertices();
    std::vector<Index> mid(static_cast<std::size_t>(n_edges), -1);
    std::unordered_map<std::uint64_t, Index> old_edge;
    old_edge.reserve(static_cast<std::size_t>(n_edges));
    for (Index e = 0; e < n_edges; ++e) {
        const Edge& edge = mesh.edge(e);
        old_edge.emplace(pair_key(edge.vertices[0], edge.vertices[1]), e);
        if (cut[e]) {
            mid[e] = static_cast<Index>(vertices.size());
            vertices.push_back({midpoint(mesh.point(edge.vertices[0]), mesh.point(edge.vertices[1])),
                                static_cast<Index>(vertices.size())});
        }
    }

    std::vector<Element> elements;
    std::vector<Index> parents;
    elements.reserve(mesh.elements().size() * 2);
    parents.reserve(mesh.elements().size() * 2);

    // Triangle stored as (v0, v1, v2) with refinement edge local index r.
    std::function<void(const std::array<Index, 3>&, int, int, Index)> emit =
        [&](const std::array<Index, 3>& v, int r, int level, Index parent) {
            const Index a = v[(r + 1) % 3];
            const Index b = v[(r + 2) % 3];
            const Index c = v[r];
            const auto it = old_edge.find(pair_key(a, b));
            if (it == old_edge.end() || !cut[it->second]) {
                Element el;
                el.vertices = v;
                el.refinement_edge = r;
                el.level = level;
                elements.push_back(el);
                parents.push_back(parent);
                return;
            }
            const Index m = mid[it->second];
            // children keep orientation; the new vertex m is the newest vertex of both
            emit({c, a, m}, 2, level + 1, parent);
            emit({b, c, m}, 2, level + 1, parent);
        };

    for (Index k = 0; k < mesh.num_elements(); ++k) {
        const Element& el = mesh.element(k);
        emit(el.vertices, el.refinement_edge, el.level, k);
    }

    return std::make_shared<const Mesh>(std::move(vertices), std::move(elements), mesh.boundary(),
                                        mesh_ptr, std::move(parents));
}

MeshPtr refine_uniform(const MeshPtr& mesh, int times)
{
    MeshPtr current = mesh;
    for (int t = 0; t < times; ++t) {
        std::vector<Index> all(static_cast<std::size_t>(current->num_elements()));
        for (Index k = 0; k < current->num_elements(); ++k) {
            all[k] = k;
        }
        current = refine(current, all);
    }
    return current;
}

MeshPtr overlay(const MeshPtr& base, const std::vector<Point>& vertex_positions)
{
    PointSet wanted;
    wanted.reserve(vertex_positions.size());
    for (const Point& p : vertex_positions) {
        wanted.emplace(p.x(), p.y());
    }
    MeshPtr current = base;
    for (;;) {
        std::vector<Index> marks;
        for (Index k = 0; k < current->num_elements(); ++k) {
            const Element& el = current->element(k);
            const Edge& e = current->edge(el.edges[el.refinement_edge]);
            const Point m = midpoint(current->point(e.vertices[0]), current->point(e.vertices[1]));
            if (wanted.count({m.x(), m.y()}) != 0) {
                marks.push_back(k);
            }
        }
        if (marks.empty()) {
            return current;
        }
        current = refine(current, marks);
    }
}

ShapeRegularity shape_regularity(const Mesh& mesh)
{
    ShapeRegularity out;
    for (Index k = 0; k < mesh.num_elements(); ++k) {
        const Element& el = mesh.element(k);
        const Point& a = mesh.point(el.vertices[0]);
        const Point& b = mesh.point(el.vertices[1]);
        const Point& c = mesh.point(el.vertices[2]);
        const double la = (b - c).norm();
        const double lb = (c - a).norm();
        const double lc = (a - b).norm();
        const double area = mesh.area(k);
        const double circumradius = la * lb * lc / (4.0 * area);
        const double inradius = area / (0.5 * (la + lb + lc));
        out.max_radius_ratio = std::max(out.max_radius_ratio, circumradius / inradius);
        for (Index e : el.edges) {
            out.max_edge_to_diameter = std::max(out.max_edge_to_diameter, mesh.edge(e).length / el.diameter);
        }
    }
    return out;
}

void check_mesh(const Mesh& mesh)
{
    auto fail = [](const std::string& what) { throw MeshError("mesh invariant violated: " + what); };
    for (Index k = 0; k < mesh.num_elements(); ++k) {
        const Element& el = mesh.element(k);
        if (!(mesh.area(k) > 0.0)) {
            fail("non-positive element area");
        }
        if (el.level < 0) {
            fail("negative refinement level");
        }
        for (int j = 0; j < 3; ++j) {
            const Edge& e = mesh.edge(el.edges[j]);
            const bool listed = (e.elements[0] == k && e.local_index[0] == j) ||
                                (e.elements[1] == k && e.local_index[1] == j);
            if (!listed) {
                fail("element edge does not list the element");
            }
            if (e.length > el.diameter * (1.0 + 1e-14)) {
                fail("edge longer than element diameter");
            }
        }
    }
    for (Index i = 0; i < mesh.num_edges(); ++i) {
        const Edge& e = mesh.edge(i);
        if (!(e.length > 0.0)) {
            fail("zero-length edge");
        }
        if (e.is_boundary() == (e.kind == EdgeKind::Interior)) {
            fail("edge kind does not match adjacency");
        }
        if (e.controlled && e.kind != EdgeKind::Neumann) {
            fail("control on a non-Neumann edge");
        }
    }
    // hanging nodes: no vertex may sit strictly inside an edge
    for (Index i = 0; i < mesh.num_edges(); ++i) {
        const Edge& e = mesh.edge(i);
        const Point& a = mesh.point(e.vertices[0]);
        const Point& b = mesh.point(e.vertices[1]);
        const Eigen::AlignedBox2d box(a.cwiseMin(b), a.cwiseMax(b));
        const double tol = 1e-12 * e.length;
        for (Index v = 0; v < mesh.num_vertices(); ++v) {
            if (v == e.vertices[0] || v == e.vertices[1]) {
                continue;
            }
            const Point& p = mesh.point(v);
            if (p.x() < box.min().x() - tol || p.x() > box.max().x() + tol || p.y() < box.min().y() - tol ||
                p.y() > box.max().y() + tol) {
                continue;
            }
            if (std::abs(signed_area(a, b, p)) <= tol * e.length) {
                fail("hanging node on an edge");
            }
        }
    }
}

}  // namespace dgocp
