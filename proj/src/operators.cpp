#include <surflow/operators.hpp>
#include <surflow/whitney.hpp>

#include <Eigen/SparseCholesky>

#include <cmath>
#include <string>

namespace surflow {

struct OperatorFactorizations {
    Eigen::SimplicialLDLT<SparseMatrix> mass0;
    Eigen::SimplicialLDLT<SparseMatrix> mass1;
    Eigen::SimplicialLDLT<SparseMatrix> stiffness_pinned; ///< K without vertex 0
};

namespace {

using Quad = TriangleQuadrature<double>;

Vector2 interpolate(const TriangleGeometry& g, int q, const Vector& a)
{
    return a[g.edges[0]] * g.whitney[static_cast<size_t>(q)][0] + a[g.edges[1]] * g.whitney[static_cast<size_t>(q)][1] +
           a[g.edges[2]] * g.whitney[static_cast<size_t>(q)][2];
}

double interpolate0(const TriangleGeometry& g, int q, const Vector& f)
{
    const auto& l = Quad::barycentric[static_cast<size_t>(q)];
    return l[0] * f[g.vertices[0]] + l[1] * f[g.vertices[1]] + l[2] * f[g.vertices[2]];
}

template <typename Solver>
void factorize(Solver& solver, const SparseMatrix& m, const char* what)
{
    solver.compute(m);
    if (solver.info() != Eigen::Success) throw NumericalError(std::string("factorization failed: ") + what);
}

void require(const Cochain& c, int degree, Index size, const char* op)
{
    if (c.degree() != degree) {
        throw ContractError(std::string(op) + ": expected a " + std::to_string(degree) + "-cochain, got degree " +
                            std::to_string(c.degree()));
    }
    if (c.size() != size) throw ContractError(std::string(op) + ": cochain size does not match mesh");
}

Index cell_count(const OperatorSet& ops, int degree)
{
    return degree == 0 ? ops.num_vertices : degree == 1 ? ops.num_edges : ops.num_triangles;
}

} // namespace

OperatorSet assemble(const SurfaceMesh& mesh, OperatorOptions options)
{
    OperatorSet ops;
    ops.options = options;
    const Index nv = mesh.num_vertices(), ne = mesh.num_edges(), nt = mesh.num_triangles();
    ops.num_vertices = nv;
    ops.num_edges = ne;
    ops.num_triangles = nt;

    const auto& lengths = mesh.edge_lengths();
    ops.edge_lengths = lengths;
    ops.geometry.resize(static_cast<size_t>(nt));
    ops.areas.resize(nt);
    for (Index t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangles()[static_cast<size_t>(t)];
        const auto& te = mesh.triangle_edges()[static_cast<size_t>(t)];
        const auto layout = layout_triangle(lengths[te[0]], lengths[te[1]], lengths[te[2]]);
        TriangleGeometry& g = ops.geometry[static_cast<size_t>(t)];
        g.area = layout.area;
        g.vertices = tri;
        g.edges = te;
        for (int k = 0; k < 3; ++k) {
            g.sign[static_cast<size_t>(k)] = tri[static_cast<size_t>(k)] < tri[static_cast<size_t>((k + 1) % 3)] ? 1.0 : -1.0;
            g.grad[static_cast<size_t>(k)] = layout.grad[static_cast<size_t>(k)];
        }
        for (int q = 0; q < Quad::size; ++q) {
            for (int k = 0; k < 3; ++k) {
                g.whitney[static_cast<size_t>(q)][static_cast<size_t>(k)] =
                    g.sign[static_cast<size_t>(k)] * whitney_edge(layout, k, Quad::barycentric[static_cast<size_t>(q)]);
            }
        }
        ops.areas[t] = layout.area;
    }
    ops.total_area = ops.areas.sum();
    const double mean_area = ops.total_area / static_cast<double>(nt);
    for (Index t = 0; t < nt; ++t) {
        if (!(ops.areas[t] > 1e-14 * mean_area)) {
            throw ContractError("degenerate triangle " + std::to_string(t) + " (area below 1e-14 x mean area)");
        }
    }

    std::vector<Triplet> d0, d1, m0, m1, w1, m2, tv;
    d0.reserve(static_cast<size_t>(2 * ne));
    for (Index e = 0; e < ne; ++e) {
        d0.emplace_back(e, mesh.edges()[static_cast<size_t>(e)].lo, -1.0);
        d0.emplace_back(e, mesh.edges()[static_cast<size_t>(e)].hi, 1.0);
    }
    for (Index t = 0; t < nt; ++t) {
        const TriangleGeometry& g = ops.geometry[static_cast<size_t>(t)];
        const double A = g.area;
        m2.emplace_back(t, t, 1.0 / A);
        for (size_t i = 0; i < 3; ++i) {
            d1.emplace_back(t, g.edges[i], g.sign[i]);
            tv.emplace_back(g.vertices[i], t, 1.0 / 3.0);
            for (size_t j = 0; j < 3; ++j) {
                m0.emplace_back(g.vertices[i], g.vertices[j], A / 12.0 * (i == j ? 2.0 : 1.0));
                double mass = 0.0, rot = 0.0;
                for (size_t q = 0; q < 3; ++q) {
                    mass += g.whitney[q][i].dot(g.whitney[q][j]);
                    rot += cross2(g.whitney[q][j], g.whitney[q][i]);
                }
                m1.emplace_back(g.edges[i], g.edges[j], A * Quad::weight * mass);
                if (j > i) {
                    // Insert both halves with exactly opposite values so W1 + W1^T vanishes bitwise.
                    const double value = A * Quad::weight * rot;
                    w1.emplace_back(g.edges[i], g.edges[j], value);
                    w1.emplace_back(g.edges[j], g.edges[i], -value);
                }
            }
        }
    }
    auto build = [](Index rows, Index cols, const std::vector<Triplet>& trips) {
        SparseMatrix m(rows, cols);
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        return m;
    };
    ops.d0 = build(ne, nv, d0);
    ops.d1 = build(nt, ne, d1);
    ops.M0 = build(nv, nv, m0);
    ops.M1 = build(ne, ne, m1);
    ops.M2 = build(nt, nt, m2);
    ops.W1 = build(ne, ne, w1);
    ops.to_vertices = build(nv, nt, tv);
    ops.K = SparseMatrix(ops.d0.transpose() * ops.M1 * ops.d0);
    ops.K.makeCompressed();
    ops.lumped_mass = ops.M0 * Vector::Ones(nv);

    auto fact = std::make_shared<OperatorFactorizations>();
    factorize(fact->mass0, ops.M0, "M0");
    factorize(fact->mass1, ops.M1, "M1");
    std::vector<Triplet> kp;
    kp.reserve(static_cast<size_t>(ops.K.nonZeros()));
    for (Index col = 0; col < ops.K.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(ops.K, col); it; ++it) {
            if (it.row() > 0 && it.col() > 0) kp.emplace_back(it.row() - 1, it.col() - 1, it.value());
        }
    }
    factorize(fact->stiffness_pinned, build(nv - 1, nv - 1, kp), "pinned stiffness");
    ops.factorizations = std::move(fact);
    return ops;
}

Vector OperatorSet::solve_mass0(const Vector& rhs) const
{
    return factorizations->mass0.solve(rhs);
}

Vector OperatorSet::solve_mass1(const Vector& rhs) const
{
    return factorizations->mass1.solve(rhs);
}

Vector OperatorSet::solve_stiffness(const Vector& rhs) const
{
    Vector x = Vector::Zero(num_vertices);
    x.tail(num_vertices - 1) = factorizations->stiffness_pinned.solve(rhs.tail(num_vertices - 1));
    x.array() -= mean0(x);
    return x;
}

Vector apply_star1(const OperatorSet& ops, const Vector& a)
{
    return ops.solve_mass1(ops.W1 * a);
}

Vector apply_star2(const OperatorSet& ops, const Vector& eta)
{
    return ops.solve_mass0(ops.to_vertices * eta);
}

Vector apply_star0(const OperatorSet& ops, const Vector& f)
{
    return ops.areas.cwiseProduct(ops.to_vertices.transpose() * f);
}

Vector apply_wedge01(const OperatorSet& ops, const Vector& f, const Vector& a, WedgeRule rule)
{
    if (rule == WedgeRule::midpoint) {
        // |d0| rows pick (f_lo + f_hi).
        const Vector avg = 0.5 * (ops.d0.cwiseAbs() * f);
        return avg.cwiseProduct(a);
    }
    Vector load = Vector::Zero(ops.num_edges);
    for (const auto& g : ops.geometry) {
        for (int q = 0; q < Quad::size; ++q) {
            const double weight = g.area * Quad::weight * interpolate0(g, q, f);
            const Vector2 av = interpolate(g, q, a);
            for (size_t k = 0; k < 3; ++k) load[g.edges[k]] += weight * g.whitney[static_cast<size_t>(q)][k].dot(av);
        }
    }
    return ops.solve_mass1(load);
}

Vector apply_pointwise_inner(const OperatorSet& ops, const Vector& a, const Vector& b)
{
    Vector weighted = Vector::Zero(ops.num_vertices);
    Vector star_area = Vector::Zero(ops.num_vertices);
    for (const auto& g : ops.geometry) {
        double mean = 0.0;
        for (int q = 0; q < Quad::size; ++q) mean += Quad::weight * interpolate(g, q, a).dot(interpolate(g, q, b));
        for (Index v : g.vertices) {
            weighted[v] += g.area * mean;
            star_area[v] += g.area;
        }
    }
    return weighted.cwiseQuotient(star_area);
}

namespace {

double oriented_triple(const OperatorSet& ops, const Vector& f, const Vector& a, const Vector& b)
{
    double total = 0.0;
    for (const auto& g : ops.geometry) {
        double local = 0.0;
        for (int q = 0; q < Quad::size; ++q) {
            local += Quad::weight * interpolate0(g, q, f) * cross2(interpolate(g, q, a), interpolate(g, q, b));
        }
        total += g.area * local;
    }
    return total;
}

} // namespace

double triple_product(const OperatorSet& ops, const Vector& f, const Vector& a, const Vector& b)
{
    return 0.5 * (oriented_triple(ops, f, a, b) - oriented_triple(ops, f, b, a));
}

Vector apply_transport(const OperatorSet& ops, const Vector& s, const Vector& w)
{
    Vector out = Vector::Zero(ops.num_vertices);
    for (const auto& g : ops.geometry) {
        // c[q][j] = dl_j ^ s at quadrature point q.
        std::array<std::array<double, 3>, 3> c{};
        for (int q = 0; q < Quad::size; ++q) {
            const Vector2 sq = interpolate(g, q, s);
            for (size_t j = 0; j < 3; ++j) c[static_cast<size_t>(q)][j] = cross2(g.grad[j], sq);
        }
        const double scale = 0.5 * g.area * Quad::weight;
        for (size_t i = 0; i < 3; ++i) {
            double acc = 0.0;
            for (size_t j = 0; j < 3; ++j) {
                if (i == j) continue;
                double nij = 0.0;
                for (size_t q = 0; q < 3; ++q) {
                    const auto& l = Quad::barycentric[q];
                    nij += l[i] * c[q][j] - l[j] * c[q][i];
                }
                acc += nij * w[g.vertices[j]];
            }
            out[g.vertices[i]] += scale * acc;
        }
    }
    return out;
}

const SparseMatrix& mass(const OperatorSet& ops, int degree)
{
    switch (degree) {
    case 0: return ops.M0;
    case 1: return ops.M1;
    case 2: return ops.M2;
    default: throw ContractError("mass: degree must be 0, 1 or 2");
    }
}

Cochain d(const OperatorSet& ops, const Cochain& c)
{
    if (c.degree() == 0) {
        require(c, 0, ops.num_vertices, "d");
        return {1, ops.d0 * c.values()};
    }
    if (c.degree() == 1) {
        require(c, 1, ops.num_edges, "d");
        return {2, ops.d1 * c.values()};
    }
    throw ContractError("d: exterior derivative of a 2-cochain is not defined on a surface");
}

Cochain delta(const OperatorSet& ops, const Cochain& c)
{
    if (c.degree() == 1) {
        require(c, 1, ops.num_edges, "delta");
        return {0, ops.solve_mass0(ops.d0.transpose() * (ops.M1 * c.values()))};
    }
    if (c.degree() == 2) {
        require(c, 2, ops.num_triangles, "delta");
        return {1, ops.solve_mass1(ops.d1.transpose() * (ops.M2 * c.values()))};
    }
    throw ContractError("delta: codifferential of a 0-cochain is not defined");
}

double inner(const OperatorSet& ops, const Cochain& a, const Cochain& b)
{
    if (a.degree() != b.degree()) throw ContractError("inner: degree mismatch");
    require(a, a.degree(), cell_count(ops, a.degree()), "inner");
    require(b, b.degree(), cell_count(ops, b.degree()), "inner");
    return a.values().dot(mass(ops, a.degree()) * b.values());
}

double norm(const OperatorSet& ops, const Cochain& a)
{
    return std::sqrt(inner(ops, a, a));
}

Cochain star1(const OperatorSet& ops, const Cochain& a)
{
    require(a, 1, ops.num_edges, "star1");
    return {1, apply_star1(ops, a.values())};
}

Cochain star(const OperatorSet& ops, const Cochain& c)
{
    if (c.degree() == 0) {
        require(c, 0, ops.num_vertices, "star");
        return {2, apply_star0(ops, c.values())};
    }
    if (c.degree() == 2) {
        require(c, 2, ops.num_triangles, "star");
        return {0, apply_star2(ops, c.values())};
    }
    return star1(ops, c);
}

Cochain wedge01(const OperatorSet& ops, const Cochain& f, const Cochain& a)
{
    return wedge01(ops, f, a, ops.options.wedge_rule);
}

Cochain wedge01(const OperatorSet& ops, const Cochain& f, const Cochain& a, WedgeRule rule)
{
    require(f, 0, ops.num_vertices, "wedge01");
    require(a, 1, ops.num_edges, "wedge01");
    return {1, apply_wedge01(ops, f.values(), a.values(), rule)};
}

double triple(const OperatorSet& ops, const Cochain& f, const Cochain& a, const Cochain& b)
{
    require(f, 0, ops.num_vertices, "triple");
    require(a, 1, ops.num_edges, "triple");
    require(b, 1, ops.num_edges, "triple");
    return triple_product(ops, f.values(), a.values(), b.values());
}

Cochain pointwise_inner(const OperatorSet& ops, const Cochain& a, const Cochain& b)
{
    require(a, 1, ops.num_edges, "pointwise_inner");
    require(b, 1, ops.num_edges, "pointwise_inner");
    return {0, apply_pointwise_inner(ops, a.values(), b.values())};
}

} // namespace surflow
