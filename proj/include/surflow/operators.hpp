#pragma once

#include <surflow/cochain.hpp>
#include <surflow/mesh.hpp>

#include <array>
#include <memory>
#include <vector>

namespace surflow {

enum class WedgeRule {
    midpoint, ///< edge value ((f_u + f_v) / 2) * a_e
    galerkin, ///< M1-projection of the interpolated product
};

struct OperatorOptions {
    WedgeRule wedge_rule = WedgeRule::midpoint;
    double linear_tol = 1e-10;
    double eigen_tol = 1e-8;
    double harmonic_tol = 1e-8;
    int max_eigen_iterations = 500;
};

/// Per-triangle data in the intrinsic local frame.
struct TriangleGeometry {
    double area = 0.0;
    std::array<Index, 3> vertices{};
    std::array<Index, 3> edges{};  ///< global ids of local edges (v0,v1), (v1,v2), (v2,v0)
    std::array<double, 3> sign{};  ///< +1 when the local edge runs along the canonical orientation
    std::array<Vector2, 3> grad{}; ///< barycentric gradients
    /// Signed global Whitney forms of the three local edges at the three quadrature points: [q][k].
    std::array<std::array<Vector2, 3>, 3> whitney{};
};

struct OperatorFactorizations;

/// Sparse operators of one mesh. Immutable after `assemble`; all member
/// functions are reentrant.
struct OperatorSet {
    Index num_vertices = 0;
    Index num_edges = 0;
    Index num_triangles = 0;

    SparseMatrix d0;      ///< E x V signed incidence
    SparseMatrix d1;      ///< F x E signed incidence
    SparseMatrix M0;      ///< P1 mass matrix
    SparseMatrix M1;      ///< Whitney 1-form mass matrix
    SparseMatrix M2;      ///< diagonal 1 / area
    SparseMatrix W1;      ///< W1(i, j) = integral of phi_j ^ phi_i; skew
    SparseMatrix K;       ///< d0^T M1 d0
    SparseMatrix to_vertices; ///< V x F, entries 1/3: M0 (*eta) = to_vertices * eta
    Vector areas;
    Vector edge_lengths;
    Vector lumped_mass;   ///< row sums of M0
    double total_area = 0.0;

    std::vector<TriangleGeometry> geometry;
    OperatorOptions options;

    std::shared_ptr<const OperatorFactorizations> factorizations;

    Vector solve_mass0(const Vector& rhs) const;
    Vector solve_mass1(const Vector& rhs) const;
    /// Mean-zero x with K x = rhs; rhs must be compatible (sums to zero).
    Vector solve_stiffness(const Vector& rhs) const;

    /// M0-weighted mean of a 0-cochain.
    double mean0(const Vector& f) const { return (M0 * f).sum() / total_area; }
};

OperatorSet assemble(const SurfaceMesh& mesh, OperatorOptions options = {});

// Vector-level kernels. Inputs are raw cochain arrays of the implied degree.

Vector apply_star1(const OperatorSet& ops, const Vector& a);
/// 0-cochain ⋆eta of a 2-cochain eta (M2-weighted transfer).
Vector apply_star2(const OperatorSet& ops, const Vector& eta);
/// 2-cochain ⋆f of a 0-cochain f (cell integrals of the P1 interpolant).
Vector apply_star0(const OperatorSet& ops, const Vector& f);
Vector apply_wedge01(const OperatorSet& ops, const Vector& f, const Vector& a, WedgeRule rule);
/// Vertex values of the pointwise inner product of two Whitney interpolants.
Vector apply_pointwise_inner(const OperatorSet& ops, const Vector& a, const Vector& b);
/// Integral of f * (a ^ b), antisymmetrized in (a, b).
double triple_product(const OperatorSet& ops, const Vector& f, const Vector& a, const Vector& b);

/// Skew-symmetric Galerkin advection: returns N w with
/// N(i, j) = 1/2 * integral of (l_i dl_j - l_j dl_i) ^ s,
/// so that M0^{-1} N w approximates ⋆(dw ^ s). For closed s this equals
/// the Galerkin form of ⋆(dw ^ s) exactly.
Vector apply_transport(const OperatorSet& ops, const Vector& s, const Vector& w);

// Cochain-level operations with degree checks.

Cochain d(const OperatorSet& ops, const Cochain& c);
Cochain delta(const OperatorSet& ops, const Cochain& c);
double inner(const OperatorSet& ops, const Cochain& a, const Cochain& b);
double norm(const OperatorSet& ops, const Cochain& a);
Cochain star1(const OperatorSet& ops, const Cochain& a);
/// ⋆ between 0- and 2-cochains.
Cochain star(const OperatorSet& ops, const Cochain& c);
Cochain wedge01(const OperatorSet& ops, const Cochain& f, const Cochain& a);
Cochain wedge01(const OperatorSet& ops, const Cochain& f, const Cochain& a, WedgeRule rule);
double triple(const OperatorSet& ops, const Cochain& f, const Cochain& a, const Cochain& b);
Cochain pointwise_inner(const OperatorSet& ops, const Cochain& a, const Cochain& b);

/// The mass matrix of the given degree.
const SparseMatrix& mass(const OperatorSet& ops, int degree);

} // namespace surflow
