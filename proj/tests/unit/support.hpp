#pragma once

#include <surflow/fields.hpp>
#include <surflow/eigen_solver.hpp>
#include <surflow/hodge.hpp>
#include <surflow/mesh_generators.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <tuple>

namespace test {

using namespace surflow;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

struct Setup {
    SurfaceMesh mesh;
    OperatorSet ops;
    HarmonicBasis basis;

    FieldContext fields() const { return {mesh, ops, basis.dimension() > 0 ? &basis : nullptr, 7}; }
    Vector field0(const std::string& spec, bool zero_mean = true) const
    {
        return parse_field_spec(spec, 0, fields(), zero_mean).values();
    }
    Vector field1(const std::string& spec) const { return parse_field_spec(spec, 1, fields(), false).values(); }
};

inline std::unique_ptr<Setup> make_setup(SurfaceMesh mesh, Index genus)
{
    auto ops = assemble(mesh);
    HarmonicBasis basis;
    if (genus > 0) basis = harmonic_basis(ops, genus);
    return std::make_unique<Setup>(Setup{std::move(mesh), std::move(ops), std::move(basis)});
}

/// Cached flat torus with n x n cells and side L (default 2 pi).
inline const Setup& torus(Index n, double L = two_pi)
{
    static std::map<std::pair<Index, double>, std::unique_ptr<Setup>> cache;
    auto& slot = cache[{n, L}];
    if (!slot) slot = make_setup(generate_flat_torus(n, n, L, L), 1);
    return *slot;
}

inline const Setup& genus2(int level)
{
    static std::map<int, std::unique_ptr<Setup>> cache;
    auto& slot = cache[level];
    if (!slot) slot = make_setup(generate_genus2(level), 2);
    return *slot;
}

inline double m_norm(const SparseMatrix& M, const Vector& x)
{
    return std::sqrt(x.dot(M * x));
}

inline double rel_error(const SparseMatrix& M, const Vector& x, const Vector& ref)
{
    return m_norm(M, x - ref) / m_norm(M, ref);
}

inline Vector random_vector(Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = normal(rng);
    return v;
}

} // namespace test
