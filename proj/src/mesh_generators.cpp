#include <surflow/mesh_generators.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace surflow {

SurfaceMesh generate_flat_torus(Index nx, Index ny, double Lx, double Ly)
{
    if (nx < 3 || ny < 3) throw ContractError("flat torus needs nx, ny >= 3");
    if (!(Lx > 0.0) || !(Ly > 0.0)) throw ContractError("flat torus needs Lx, Ly > 0");

    FlatChart chart;
    chart.Lx = Lx;
    chart.Ly = Ly;
    chart.coords.reserve(static_cast<size_t>(nx * ny));
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            chart.coords.emplace_back(Lx * static_cast<double>(i) / static_cast<double>(nx),
                                      Ly * static_cast<double>(j) / static_cast<double>(ny));
        }
    }
    auto id = [nx, ny](Index i, Index j) { return ((i % nx) + nx) % nx + nx * (((j % ny) + ny) % ny); };

    std::vector<Triangle> triangles;
    triangles.reserve(static_cast<size_t>(2 * nx * ny));
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            triangles.push_back({a, b, c});
            triangles.push_back({a, c, d});
        }
    }
    const FlatChart& ref = chart;
    auto length = [&ref](Index u, Index v) { return ref.displacement(u, v).norm(); };
    return SurfaceMesh::from_intrinsic(nx * ny, std::move(triangles), length, chart);
}

namespace {

struct RawMesh {
    std::vector<Vector3> positions;
    std::vector<Triangle> triangles;
};

// Torus grid with the 2x2 cell patch around grid vertex (0,0) removed. The
// eight vertices surrounding the removed centre are returned in cyclic order
// as offsets (di, dj).
RawMesh holed_torus(Index nu, Index nv, double R, double r, std::vector<Index>& ring)
{
    const double two_pi = 2.0 * std::numbers::pi;
    auto grid = [nu, nv](Index i, Index j) { return ((i % nu) + nu) % nu + nu * (((j % nv) + nv) % nv); };

    std::vector<Vector3> grid_pos(static_cast<size_t>(nu * nv));
    for (Index j = 0; j < nv; ++j) {
        for (Index i = 0; i < nu; ++i) {
            const double u = two_pi * static_cast<double>(i) / static_cast<double>(nu);
            const double v = two_pi * static_cast<double>(j) / static_cast<double>(nv);
            grid_pos[static_cast<size_t>(grid(i, j))] =
                Vector3((R + r * std::cos(v)) * std::cos(u), (R + r * std::cos(v)) * std::sin(u), r * std::sin(v));
        }
    }
    // Drop grid vertex 0 (the patch centre); every other id shifts down by one.
    auto remap = [](Index g) { return g - 1; };

    RawMesh mesh;
    mesh.positions.assign(grid_pos.begin() + 1, grid_pos.end());
    for (Index j = 0; j < nv; ++j) {
        for (Index i = 0; i < nu; ++i) {
            const bool in_patch = (i == 0 || i == nu - 1) && (j == 0 || j == nv - 1);
            if (in_patch) continue;
            const Index a = grid(i, j), b = grid(i + 1, j), c = grid(i + 1, j + 1), d = grid(i, j + 1);
            mesh.triangles.push_back({remap(a), remap(b), remap(c)});
            mesh.triangles.push_back({remap(a), remap(c), remap(d)});
        }
    }
    const std::array<std::array<Index, 2>, 8> offsets = {
        {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};
    ring.clear();
    for (const auto& o : offsets) ring.push_back(remap(grid(o[0], o[1])));
    return mesh;
}

} // namespace

SurfaceMesh generate_genus2(int subdivision)
{
    if (subdivision < 0) throw ContractError("subdivision must be >= 0");
    constexpr Index nu = 24;
    constexpr Index nv = 12;
    constexpr double R = 2.0;
    constexpr double r = 0.8;
    constexpr double gap = 0.5;
    const double shift = 2.0 * (R + r) + gap;

    std::vector<Index> ring;
    RawMesh first = holed_torus(nu, nv, R, r, ring);
    const Index offset = static_cast<Index>(first.positions.size());

    // Second copy: rotate by pi about z (orientation preserving) and translate,
    // so its hole faces the first torus.
    std::vector<Vector3> positions = first.positions;
    for (const auto& p : first.positions) positions.emplace_back(shift - p.x(), -p.y(), p.z());
    std::vector<Triangle> triangles = first.triangles;
    for (const auto& t : first.triangles) triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});

    // Ring vertex with offset (di, dj) on the first torus faces offset (-di, dj)
    // on the second: ring index k maps to (12 - k) mod 8.
    const size_t m = ring.size();
    for (size_t k = 0; k < m; ++k) {
        const size_t k1 = (k + 1) % m;
        const Index a0 = ring[k], a1 = ring[k1];
        const Index b0 = ring[(12 - k) % m] + offset, b1 = ring[(12 - k1) % m] + offset;
        triangles.push_back({a0, a1, b1});
        triangles.push_back({a0, b1, b0});
    }

    SurfaceMesh mesh = SurfaceMesh::from_embedded(std::move(positions), std::move(triangles));
    for (int s = 0; s < subdivision; ++s) mesh = loop_subdivide(mesh);
    return mesh;
}

SurfaceMesh loop_subdivide(const SurfaceMesh& mesh)
{
    if (mesh.metric_mode() != MetricMode::embedded) throw ContractError("Loop subdivision needs an embedded mesh");
    const Index nv = mesh.num_vertices();
    const Index ne = mesh.num_edges();
    const auto& pos = mesh.positions();
    const auto& tris = mesh.triangles();
    const auto& tedges = mesh.triangle_edges();

    std::vector<Vector3> opposite_sum(static_cast<size_t>(ne), Vector3::Zero());
    for (size_t t = 0; t < tris.size(); ++t) {
        for (size_t k = 0; k < 3; ++k) opposite_sum[static_cast<size_t>(tedges[t][k])] += pos[static_cast<size_t>(tris[t][(k + 2) % 3])];
    }
    std::vector<Vector3> neighbour_sum(static_cast<size_t>(nv), Vector3::Zero());
    std::vector<int> valence(static_cast<size_t>(nv), 0);
    for (const auto& e : mesh.edges()) {
        neighbour_sum[static_cast<size_t>(e.lo)] += pos[static_cast<size_t>(e.hi)];
        neighbour_sum[static_cast<size_t>(e.hi)] += pos[static_cast<size_t>(e.lo)];
        ++valence[static_cast<size_t>(e.lo)];
        ++valence[static_cast<size_t>(e.hi)];
    }

    std::vector<Vector3> out(static_cast<size_t>(nv + ne));
    for (Index v = 0; v < nv; ++v) {
        const double n = valence[static_cast<size_t>(v)];
        const double c = 3.0 / 8.0 + 0.25 * std::cos(2.0 * std::numbers::pi / n);
        const double beta = (5.0 / 8.0 - c * c) / n;
        out[static_cast<size_t>(v)] = (1.0 - n * beta) * pos[static_cast<size_t>(v)] + beta * neighbour_sum[static_cast<size_t>(v)];
    }
    for (Index e = 0; e < ne; ++e) {
        const auto& edge = mesh.edges()[static_cast<size_t>(e)];
        out[static_cast<size_t>(nv + e)] = 0.375 * (pos[static_cast<size_t>(edge.lo)] + pos[static_cast<size_t>(edge.hi)]) +
                                           0.125 * opposite_sum[static_cast<size_t>(e)];
    }

    std::vector<Triangle> refined;
    refined.reserve(4 * tris.size());
    for (size_t t = 0; t < tris.size(); ++t) {
        const Index a = tris[t][0], b = tris[t][1], c = tris[t][2];
        const Index ab = nv + tedges[t][0], bc = nv + tedges[t][1], ca = nv + tedges[t][2];
        refined.push_back({a, ab, ca});
        refined.push_back({ab, b, bc});
        refined.push_back({ca, bc, c});
        refined.push_back({ab, bc, ca});
    }
    return SurfaceMesh::from_embedded(std::move(out), std::move(refined));
}

SurfaceMesh generate_tetrahedron()
{
    std::vector<Vector3> p = {{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}};
    std::vector<Triangle> t = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
    return SurfaceMesh::from_embedded(std::move(p), std::move(t));
}

SurfaceMesh generate_sphere(int subdivision)
{
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Vector3> p = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                              {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<Triangle> t = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                               {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                               {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
    SurfaceMesh mesh = SurfaceMesh::from_embedded(std::move(p), std::move(t));
    for (int s = 0; s < subdivision; ++s) {
        SurfaceMesh refined = loop_subdivide(mesh);
        std::vector<Vector3> q = refined.positions();
        for (auto& x : q) x.normalize();
        mesh = SurfaceMesh::from_embedded(std::move(q), refined.triangles());
    }
    return mesh;
}

} // namespace surflow
