#include <surflow/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <string>

namespace surflow {

namespace {

std::uint64_t edge_key(Index a, Index b, Index n)
{
    if (a > b) std::swap(a, b);
    return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(b);
}

double wrap(double x, double period)
{
    x = std::fmod(x, period);
    if (x > 0.5 * period) x -= period;
    if (x <= -0.5 * period) x += period;
    return x;
}

struct Incidence {
    Index triangle;
    Index from;
    Index to;
};

} // namespace

Vector2 FlatChart::displacement(Index u, Index v) const
{
    const Vector2 raw = coords[static_cast<size_t>(v)] - coords[static_cast<size_t>(u)];
    return {wrap(raw.x(), Lx), wrap(raw.y(), Ly)};
}

SurfaceMesh SurfaceMesh::from_embedded(std::vector<Vector3> positions, std::vector<Triangle> triangles)
{
    SurfaceMesh mesh;
    mesh.mode_ = MetricMode::embedded;
    mesh.num_vertices_ = static_cast<Index>(positions.size());
    for (const auto& p : positions) {
        if (!p.allFinite()) throw ContractError("non-finite vertex position");
    }
    mesh.positions_ = std::move(positions);
    mesh.triangles_ = std::move(triangles);
    mesh.build_connectivity();
    const auto& pos = mesh.positions_;
    mesh.compute_lengths([&pos](Index u, Index v) {
        return (pos[static_cast<size_t>(u)] - pos[static_cast<size_t>(v)]).norm();
    });
    return mesh;
}

SurfaceMesh SurfaceMesh::from_intrinsic(Index num_vertices,
                                        std::vector<Triangle> triangles,
                                        const std::function<double(Index, Index)>& length,
                                        std::optional<FlatChart> chart)
{
    SurfaceMesh mesh;
    mesh.mode_ = MetricMode::intrinsic;
    mesh.num_vertices_ = num_vertices;
    mesh.triangles_ = std::move(triangles);
    mesh.chart_ = std::move(chart);
    if (mesh.chart_ && static_cast<Index>(mesh.chart_->coords.size()) != num_vertices) {
        throw ContractError("chart size does not match vertex count");
    }
    mesh.build_connectivity();
    mesh.compute_lengths(length);
    return mesh;
}

Index SurfaceMesh::edge_index(Index a, Index b) const
{
    auto it = edge_lookup_.find(edge_key(a, b, num_vertices_));
    if (it == edge_lookup_.end()) {
        throw ContractError("no edge between vertices " + std::to_string(a) + " and " + std::to_string(b));
    }
    return it->second;
}

void SurfaceMesh::build_connectivity()
{
    const Index n = num_vertices_;
    const Index nt = num_triangles();
    if (nt == 0) throw ContractError("mesh has no triangles");

    std::vector<bool> used(static_cast<size_t>(n), false);
    for (const auto& t : triangles_) {
        for (Index v : t) {
            if (v < 0 || v >= n) throw ContractError("triangle references vertex out of range");
            used[static_cast<size_t>(v)] = true;
        }
        if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0]) throw ContractError("degenerate triangle (repeated vertex)");
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
        throw ContractError("unreferenced vertex");
    }

    std::unordered_map<std::uint64_t, std::vector<Incidence>> incidences;
    incidences.reserve(static_cast<size_t>(3 * nt));
    for (Index ti = 0; ti < nt; ++ti) {
        const auto& t = triangles_[static_cast<size_t>(ti)];
        for (int k = 0; k < 3; ++k) {
            const Index a = t[static_cast<size_t>(k)];
            const Index b = t[static_cast<size_t>((k + 1) % 3)];
            incidences[edge_key(a, b, n)].push_back({ti, a, b});
        }
    }
    for (const auto& [key, list] : incidences) {
        if (list.size() == 1) throw ContractError("open surface (boundary edge found)");
        if (list.size() > 2) throw ContractError("non-manifold edge");
    }

    // Propagate a consistent orientation across each component.
    std::vector<int> flip(static_cast<size_t>(nt), -1);
    Index components = 0;
    for (Index seed = 0; seed < nt; ++seed) {
        if (flip[static_cast<size_t>(seed)] >= 0) continue;
        ++components;
        flip[static_cast<size_t>(seed)] = 0;
        std::queue<Index> queue;
        queue.push(seed);
        while (!queue.empty()) {
            const Index ti = queue.front();
            queue.pop();
            const auto& t = triangles_[static_cast<size_t>(ti)];
            for (int k = 0; k < 3; ++k) {
                const Index a = t[static_cast<size_t>(k)];
                const Index b = t[static_cast<size_t>((k + 1) % 3)];
                for (const auto& inc : incidences[edge_key(a, b, n)]) {
                    if (inc.triangle == ti) continue;
                    // Same traversal direction means the neighbour disagrees with ti as stored.
                    const int same = (inc.from == a) ? 1 : 0;
                    const int wanted = flip[static_cast<size_t>(ti)] ^ same;
                    int& f = flip[static_cast<size_t>(inc.triangle)];
                    if (f < 0) {
                        f = wanted;
                        queue.push(inc.triangle);
                    } else if (f != wanted) {
                        throw ContractError("non-orientable gluing");
                    }
                }
            }
        }
    }
    for (Index ti = 0; ti < nt; ++ti) {
        if (flip[static_cast<size_t>(ti)] == 1) std::swap(triangles_[static_cast<size_t>(ti)][1], triangles_[static_cast<size_t>(ti)][2]);
    }
    components_ = components;

    std::vector<std::uint64_t> keys;
    keys.reserve(incidences.size());
    for (const auto& entry : incidences) keys.push_back(entry.first);
    std::sort(keys.begin(), keys.end());
    edges_.clear();
    edges_.reserve(keys.size());
    edge_lookup_.clear();
    edge_lookup_.reserve(keys.size());
    for (std::uint64_t key : keys) {
        const Index lo = static_cast<Index>(key / static_cast<std::uint64_t>(n));
        const Index hi = static_cast<Index>(key % static_cast<std::uint64_t>(n));
        edge_lookup_.emplace(key, static_cast<Index>(edges_.size()));
        edges_.push_back({lo, hi});
    }
    triangle_edges_.resize(static_cast<size_t>(nt));
    for (Index ti = 0; ti < nt; ++ti) {
        const auto& t = triangles_[static_cast<size_t>(ti)];
        for (int k = 0; k < 3; ++k) {
            triangle_edges_[static_cast<size_t>(ti)][static_cast<size_t>(k)] =
                edge_lookup_.at(edge_key(t[static_cast<size_t>(k)], t[static_cast<size_t>((k + 1) % 3)], n));
        }
    }
}

void SurfaceMesh::compute_lengths(const std::function<double(Index, Index)>& length)
{
    edge_lengths_.resize(num_edges());
    for (Index e = 0; e < num_edges(); ++e) {
        const double l = length(edges_[static_cast<size_t>(e)].lo, edges_[static_cast<size_t>(e)].hi);
        if (!std::isfinite(l) || l <= 0.0) throw ContractError("non-positive or non-finite edge length");
        edge_lengths_[e] = l;
    }
    for (const auto& te : triangle_edges_) {
        const double a = edge_lengths_[te[0]];
        const double b = edge_lengths_[te[1]];
        const double c = edge_lengths_[te[2]];
        if (!(a < b + c && b < c + a && c < a + b)) throw ContractError("triangle inequality violated");
    }
}

TopologyReport topology(const SurfaceMesh& mesh)
{
    TopologyReport report;
    report.V = mesh.num_vertices();
    report.E = mesh.num_edges();
    report.F = mesh.num_triangles();
    report.euler_characteristic = report.V - report.E + report.F;
    report.connected = mesh.connected();
    // Closedness and orientability are enforced when the mesh is built.
    report.closed = true;
    report.orientable = true;
    // Summed genus over components: chi = sum(2 - 2 g_i).
    report.genus = (2 * mesh.num_components() - report.euler_characteristic) / 2;
    return report;
}

} // namespace surflow
