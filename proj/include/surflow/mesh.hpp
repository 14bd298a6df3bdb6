#pragma once

#include <surflow/types.hpp>

#include <array>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

namespace surflow {

enum class MetricMode { embedded, intrinsic };

using Triangle = std::array<Index, 3>;

/// Oriented edge with canonical orientation lo -> hi (lo < hi).
struct Edge {
    Index lo;
    Index hi;
};

/// Flat periodic chart of an intrinsic torus: vertex coordinates in
/// [0, Lx) x [0, Ly) plus the periods used to unwrap edge displacements.
struct FlatChart {
    double Lx = 1.0;
    double Ly = 1.0;
    std::vector<Vector2> coords;

    /// Shortest periodic displacement from vertex u to vertex v.
    Vector2 displacement(Index u, Index v) const;
};

/// Closed, connected-or-not, consistently oriented triangle mesh. Immutable once built.
///
/// Every downstream operator consumes only `edge_lengths()` and the triangle
/// orientations, so embedded and intrinsic meshes share one assembly path.
class SurfaceMesh {
public:
    /// Builds an embedded mesh; edge lengths come from the vertex positions.
    static SurfaceMesh from_embedded(std::vector<Vector3> positions, std::vector<Triangle> triangles);

    /// Builds an intrinsic mesh; `length(u, v)` returns the metric length of edge {u, v}.
    static SurfaceMesh from_intrinsic(Index num_vertices,
                                      std::vector<Triangle> triangles,
                                      const std::function<double(Index, Index)>& length,
                                      std::optional<FlatChart> chart = std::nullopt);

    Index num_vertices() const { return num_vertices_; }
    Index num_edges() const { return static_cast<Index>(edges_.size()); }
    Index num_triangles() const { return static_cast<Index>(triangles_.size()); }

    const std::vector<Triangle>& triangles() const { return triangles_; }
    const std::vector<Edge>& edges() const { return edges_; }
    /// Global edge ids of the local edges (v0,v1), (v1,v2), (v2,v0) of each triangle.
    const std::vector<std::array<Index, 3>>& triangle_edges() const { return triangle_edges_; }
    const Vector& edge_lengths() const { return edge_lengths_; }

    MetricMode metric_mode() const { return mode_; }
    const std::vector<Vector3>& positions() const { return positions_; }
    const std::optional<FlatChart>& chart() const { return chart_; }

    bool connected() const { return components_ == 1; }
    Index num_components() const { return components_; }

    /// Edge id of {a, b}; throws ContractError if the edge does not exist.
    Index edge_index(Index a, Index b) const;

private:
    SurfaceMesh() = default;
    void build_connectivity();
    void compute_lengths(const std::function<double(Index, Index)>& length);

    MetricMode mode_ = MetricMode::embedded;
    Index num_vertices_ = 0;
    std::vector<Vector3> positions_;
    std::optional<FlatChart> chart_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<Index, 3>> triangle_edges_;
    std::unordered_map<std::uint64_t, Index> edge_lookup_;
    Vector edge_lengths_;
    Index components_ = 1;
};

struct TopologyReport {
    Index V = 0;
    Index E = 0;
    Index F = 0;
    Index euler_characteristic = 0;
    Index genus = 0;
    bool connected = true;
    bool closed = true;
    bool orientable = true;
};

TopologyReport topology(const SurfaceMesh& mesh);

} // namespace surflow
