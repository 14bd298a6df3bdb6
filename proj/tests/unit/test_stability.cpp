#include "support.hpp"

#include <surflow/stability.hpp>

#include <doctest.h>

using namespace test;

namespace {

// gamma0 = a * dx / |dx| on the 2 pi torus: velocity (a / (2 pi), 0).
Vector gamma_along_x(const Setup& s, double a)
{
    return s.basis.combine(s.basis.project(a / two_pi * constant_one_form(s.mesh, 1.0, 0.0)));
}

Thm1Options options(double T, double dt, int every = 10)
{
    Thm1Options opt;
    opt.T = T;
    opt.dt = dt;
    opt.sample_every = every;
    return opt;
}

Matrix random_skew(Index n, std::mt19937_64& rng)
{
    Matrix A = Matrix::Zero(n, n);
    std::normal_distribution<double> normal;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i + 1; j < n; ++j) {
            A(i, j) = normal(rng);
            A(j, i) = -A(i, j);
        }
    }
    return A;
}

} // namespace

TEST_SUITE("stability")
{
    TEST_CASE("zero perturbation gives zero series and passes every check")
    {
        const auto& s = torus(16);
        const auto spectrum = lambda_min(s.ops);
        const auto r = linearize_thm1(s.ops, s.basis, s.basis.forms.col(0), Vector::Zero(s.mesh.num_vertices()),
                                      options(0.5, 0.01), spectrum);
        CHECK(r.enstrophy.isZero(0.0));
        CHECK(r.stream_norm2.isZero(0.0));
        CHECK(r.stream_bound.isZero(0.0));
        CHECK(r.coefficients.isZero(0.0));
        CHECK(enstrophy_conservation_check(r, 1e-12));
        CHECK(linear_growth_check(r, 0.0));
        CHECK(stream_bound_check(r, spectrum, 0.0));
    }

    TEST_CASE("x-independent perturbation is unchanged by transport along x")
    {
        const auto& s = torus(32);
        const Vector w0 = s.field0("cos_y");
        const auto r = linearize_thm1(s.ops, s.basis, gamma_along_x(s, 2.0), w0, options(1.0, 0.01));
        for (const auto& w : r.omega_samples) CHECK(rel_error(s.ops.M0, w, w0) <= 1e-10);
        CHECK(enstrophy_conservation_check(r, 1e-10));
    }

    TEST_CASE("cos x is transported along the characteristics")
    {
        const auto& s = torus(32);
        const double a = two_pi; // unit speed
        const auto r = linearize_thm1(s.ops, s.basis, gamma_along_x(s, a), s.field0("cos_x"), options(1.0, 1e-2));
        const Vector oracle = sample_on_chart(s.mesh, [](const Vector2& p) { return std::cos(p.x() - 1.0); });
        CHECK(rel_error(s.ops.M0, r.omega_samples.back(), oracle) <= 0.03);
        CHECK(r.coefficients.cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(enstrophy_conservation_check(r, 1e-3));
        CHECK(linear_growth_check(r, 0.05));
        for (Index k = 0; k < 2; ++k) CHECK(r.constancy_cv[k] <= 0.02);
    }

    TEST_CASE("enstrophy check negative control")
    {
        const auto& s = torus(16);
        auto r = linearize_thm1(s.ops, s.basis, gamma_along_x(s, 1.0), s.field0("cos_x"), options(0.2, 0.01));
        REQUIRE(enstrophy_conservation_check(r, 1e-3));
        const Index n = r.enstrophy.size();
        r.enstrophy.tail(n / 2) *= 2.0;
        CHECK_FALSE(enstrophy_conservation_check(r, 1e-3));
    }

    TEST_CASE("growth bound on genus 2")
    {
        const auto& s = genus2(0);
        const auto r = linearize_thm1(s.ops, s.basis, s.basis.forms.col(0), s.field0("random:17"), options(1.0, 0.01));
        CHECK(linear_growth_check(r, 0.05));
        CHECK(enstrophy_conservation_check(r, 1e-3));
        CHECK(r.coefficients.cols() == 4);
        CHECK(r.constancy_cv.size() == 4);
        // Corrupt a coefficient beyond the bound.
        auto bad = r;
        bad.coefficients(bad.coefficients.rows() - 1, 0) += 10.0 * bad.bound_slope[0] * bad.times[bad.times.size() - 1] + 1.0;
        CHECK_FALSE(linear_growth_check(bad, 0.05));
    }

    TEST_CASE("stream bound saturates on the lambda_min eigenfunction")
    {
        const auto& s = genus2(0);
        const auto spectrum = lambda_min(s.ops);
        const auto r = linearize_thm1(s.ops, s.basis, s.basis.forms.col(1), spectrum.eigenvector, options(0.05, 0.01, 1), spectrum);
        CHECK(stream_bound_check(r, spectrum, 1e-8));
        CHECK(r.stream_norm2[0] >= 0.98 * r.stream_bound[0]);
        auto doubled = r;
        doubled.stream_norm2 *= 4.0; // psi -> 2 psi
        CHECK_FALSE(stream_bound_check(doubled, spectrum, 1e-8));
    }

    TEST_CASE("stream bound for random perturbations")
    {
        const auto& s = torus(32);
        const auto spectrum = lambda_min(s.ops);
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            const auto r = linearize_thm1(s.ops, s.basis, s.basis.forms.col(0), s.field0("random:" + std::to_string(seed)),
                                          options(0.2, 0.02, 1), spectrum);
            CHECK(stream_bound_check(r, spectrum, 1e-8));
        }
    }

    TEST_CASE("linearize_thm1 contracts")
    {
        const auto& s = torus(16);
        const Vector w = s.field0("cos_x");
        CHECK_THROWS_AS(linearize_thm1(s.ops, s.basis, s.field1("random:3"), w, options(0.1, 0.01)), ContractError);
        CHECK_THROWS_AS(linearize_thm1(s.ops, s.basis, s.basis.forms.col(0), Vector(w.array() + 1.0), options(0.1, 0.01)),
                        ContractError);
        CHECK_THROWS_AS(linearize_thm1(s.ops, s.basis, s.basis.forms.col(0), w, options(0.1, -0.01)), ContractError);
    }

    TEST_CASE("harmonic perturbation matrix")
    {
        const auto& t = torus(32);
        CHECK(harmonic_perturbation_matrix(t.ops, Vector::Zero(t.mesh.num_vertices()), t.basis).isZero(0.0));
        for (std::uint64_t seed : {1u, 2u}) {
            const Matrix A = harmonic_perturbation_matrix(t.ops, t.field0("random:" + std::to_string(seed)), t.basis);
            CHECK(A.cwiseAbs().maxCoeff() <= 1e-8);
        }
        const auto& g = genus2(0);
        const Matrix A = harmonic_perturbation_matrix(g.ops, g.field0("handle:1"), g.basis);
        CHECK(A.rows() == 4);
        CHECK(skew_defect(A) == 0.0);
        CHECK(A.cwiseAbs().maxCoeff() > 1e-3);
        std::mt19937_64 rng(1);
        for (int trial = 0; trial < 10; ++trial) {
            const Vector c = random_vector(4, rng);
            CHECK(std::abs(c.dot(A * c)) <= 1e-14 * A.cwiseAbs().maxCoeff() * c.squaredNorm());
        }
        CHECK_THROWS_AS(harmonic_perturbation_matrix(g.ops, Vector::Ones(g.mesh.num_vertices()), g.basis), ContractError);
    }

    TEST_CASE("Cayley evolution")
    {
        const Vector c0 = Vector::Unit(2, 0);
        const Matrix zero = Matrix::Zero(2, 2);
        const Matrix still = evolve_harmonic_perturbation(zero, c0, 3.0, 10);
        for (Index m = 0; m < still.rows(); ++m) CHECK(still.row(m) == c0.transpose());

        const double a = 1.3;
        Matrix A(2, 2);
        A << 0, a, -a, 0;
        const int n = 100000;
        const Matrix path = evolve_harmonic_perturbation(A, c0, 1.0, n);
        REQUIRE(path.rows() == n + 1);
        double worst = 0.0;
        for (int m = 0; m <= n; m += 997) {
            const double t = static_cast<double>(m) / n;
            worst = std::max(worst, std::abs(path(m, 0) - std::cos(a * t)));
            worst = std::max(worst, std::abs(path(m, 1) + std::sin(a * t)));
        }
        CHECK(worst <= 1e-10);

        std::mt19937_64 rng(4);
        for (Index dim : {2, 4, 6}) {
            const Matrix S = random_skew(dim, rng);
            const Vector c = random_vector(dim, rng);
            const Matrix series = evolve_harmonic_perturbation(S, c, 100.0, 10000);
            const double drift = ((series.rowwise().norm().array() - c.norm()).abs() / c.norm()).maxCoeff();
            CHECK(drift <= 1e-12);
        }

        Matrix not_skew = A;
        not_skew(0, 0) = 1e-6;
        CHECK_THROWS_AS(evolve_harmonic_perturbation(not_skew, c0, 1.0, 10), ContractError);
        CHECK_THROWS_AS(evolve_harmonic_perturbation(A, c0, 1.0, 0), ContractError);
    }

    TEST_CASE("harmonic perturbation run on genus 2")
    {
        const auto& g = genus2(0);
        const Vector c0 = Vector::LinSpaced(4, 1.0, -1.0);
        const auto r = run_thm2(g.ops, g.basis, g.field0("random:5"), c0, 100.0, 10000);
        CHECK(r.skew_defect <= 1e-12);
        CHECK(r.norm_drift <= 1e-12);
        CHECK(r.times.size() == 10001);
        CHECK(r.times[r.times.size() - 1] == doctest::Approx(100.0));
    }
}
