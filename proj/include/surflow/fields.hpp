#pragma once

#include <surflow/hodge.hpp>
#include <surflow/mesh.hpp>

#include <cstdint>
#include <functional>
#include <string>

namespace surflow {

/// Vertex samples of f at the flat-chart coordinates (intrinsic tori).
Vector sample_on_chart(const SurfaceMesh& mesh, const std::function<double(const Vector2&)>& f);
/// Vertex samples of f at the embedded positions.
Vector sample_on_positions(const SurfaceMesh& mesh, const std::function<double(const Vector3&)>& f);

/// Line integrals of the chart 1-form (a, b) -> a dx + b dy along each edge
/// (4-point Gauss-Legendre; exact for polynomial densities up to degree 7).
Vector integrate_one_form(const SurfaceMesh& mesh, const std::function<Vector2(const Vector2&)>& form);
/// Exact cochain of the constant form a dx + b dy on a flat chart.
Vector constant_one_form(const SurfaceMesh& mesh, double a, double b);

/// Subtracts the M0-weighted mean.
Vector remove_mean(const OperatorSet& ops, Vector f);

/// Smooth pseudo-random function built from low Fourier modes (chart) or
/// plane waves (embedded). Deterministic in `seed`.
Vector random_smooth_function(const SurfaceMesh& mesh, std::uint64_t seed);
/// d f1 + star1(d f2) + sum_i c_i h_i with smooth random f1, f2 and normal c.
Vector random_smooth_one_form(const SurfaceMesh& mesh, const OperatorSet& ops, const HarmonicBasis* basis,
                              std::uint64_t seed);

struct FieldContext {
    const SurfaceMesh& mesh;
    const OperatorSet& ops;
    const HarmonicBasis* basis = nullptr;
    std::uint64_t default_seed = 0;
};

/// Builds a cochain from a field spec:
///   0-forms: zero, cos_x, sin_x, cos_y, sin_y, cos_x_cos_y, random[:seed], handle:<1|2>
///   1-forms: zero, dx, dy, harmonic:<i> (1-based), random[:seed]
///   either:  <scale>*<spec>, or a path to a .bin cochain file
/// Analytic x, y are chart coordinates scaled to period 2 pi on tori and
/// raw positions on embedded meshes. 0-forms are mean-centred when `zero_mean`.
Cochain parse_field_spec(const std::string& spec, int degree, const FieldContext& context, bool zero_mean);

} // namespace surflow
