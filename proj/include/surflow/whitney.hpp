#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>

namespace surflow {

/// Intrinsic layout of one triangle: vertex 0 at the origin, vertex 1 on the
/// positive x axis, vertex 2 in the upper half plane, so the local frame is
/// oriented like the triangle's vertex order.
template <typename Scalar>
struct TriangleLayout {
    using Point = Eigen::Matrix<Scalar, 2, 1>;
    std::array<Point, 3> corner;
    std::array<Point, 3> grad; ///< gradients of the barycentric coordinates
    Scalar area;
};

/// Lengths are those of the local edges (v0,v1), (v1,v2), (v2,v0).
template <typename Scalar>
TriangleLayout<Scalar> layout_triangle(Scalar l01, Scalar l12, Scalar l20)
{
    using Point = typename TriangleLayout<Scalar>::Point;
    TriangleLayout<Scalar> t;
    const Scalar x = (l01 * l01 + l20 * l20 - l12 * l12) / (Scalar(2) * l01);
    const Scalar y2 = l20 * l20 - x * x;
    const Scalar y = y2 > Scalar(0) ? std::sqrt(y2) : Scalar(0);
    t.corner = {Point(Scalar(0), Scalar(0)), Point(l01, Scalar(0)), Point(x, y)};
    t.area = Scalar(0.5) * l01 * y;
    for (int i = 0; i < 3; ++i) {
        const Point e = t.corner[(i + 2) % 3] - t.corner[(i + 1) % 3];
        t.grad[i] = Point(-e.y(), e.x()) / (Scalar(2) * t.area);
    }
    return t;
}

/// Symmetric 3-point rule, exact for quadratics; weights sum to one (multiply by area).
template <typename Scalar>
struct TriangleQuadrature {
    static constexpr int size = 3;
    static constexpr Scalar weight = Scalar(1) / Scalar(3);
    static constexpr std::array<std::array<Scalar, 3>, 3> barycentric = {{
        {Scalar(2) / Scalar(3), Scalar(1) / Scalar(6), Scalar(1) / Scalar(6)},
        {Scalar(1) / Scalar(6), Scalar(2) / Scalar(3), Scalar(1) / Scalar(6)},
        {Scalar(1) / Scalar(6), Scalar(1) / Scalar(6), Scalar(2) / Scalar(3)},
    }};
};

/// Whitney 1-form of the local edge k -> k+1 evaluated at barycentric point `lambda`.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> whitney_edge(const TriangleLayout<Scalar>& t, int k, const std::array<Scalar, 3>& lambda)
{
    const int k1 = (k + 1) % 3;
    return lambda[k] * t.grad[k1] - lambda[k1] * t.grad[k];
}

/// Scalar 2D cross product; a ^ b as a multiple of the area form.
template <typename Derived1, typename Derived2>
auto cross2(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b)
{
    return a.x() * b.y() - a.y() * b.x();
}

} // namespace surflow
