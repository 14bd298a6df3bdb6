#pragma once

#include <surflow/hodge.hpp>

#include <optional>

namespace surflow {

/// Linearized dynamics around a harmonic flow gamma0, sampled in time.
struct Thm1Report {
    Vector times;
    Vector enstrophy;      ///< <w, w>(t) for the vorticity perturbation w
    Vector stream_norm2;   ///< <psi, psi>(t), psi = poisson_solve(w)
    Vector stream_bound;   ///< <w, w>(t) / lambda_min^2; empty when lambda_min was not supplied
    Matrix coefficients;   ///< samples x 2g, harmonic perturbation c_k(t)
    Vector bound_slope;    ///< B_k = <w0, w0>^1/2 * |(⋆gamma0, h_k)|_{L2}
    Vector constancy_cv;   ///< coefficient of variation of (⋆gamma0, h_k) over the surface
    Vector gamma0_coefficients;
    double gamma0_residual = 0.0;
    double lambda_min = 0.0;
    std::vector<Vector> omega_samples;
};

struct Thm1Options {
    double T = 1.0;
    double dt = 1e-3;
    int sample_every = 10;
    bool keep_omega = true;
};

/// Evolves w_t = -⋆(dw ^ ⋆gamma0) by RK4 and integrates
/// dc_k/dt = -integral of w (⋆gamma0, h_k) by the trapezoid rule.
Thm1Report linearize_thm1(const OperatorSet& ops,
                          const HarmonicBasis& basis,
                          const Vector& gamma0,
                          const Vector& omega0,
                          const Thm1Options& options,
                          std::optional<SpectralReport> spectrum = std::nullopt);

/// max_t |<w,w>(t) - <w,w>(0)| <= tol * <w,w>(0).
bool enstrophy_conservation_check(const Thm1Report& report, double tol);
/// |c_k(t) - c_k(0)| <= (1 + tol) * B_k * t for all k and samples.
bool linear_growth_check(const Thm1Report& report, double tol);
/// <psi,psi>(t) <= (1 + tol) * <w,w>(t) / lambda_min^2 at every sample.
bool stream_bound_check(const Thm1Report& report, const SpectralReport& spectrum, double tol);

/// A(i, j) = integral of omega0 h_i ^ h_j; exactly skew. omega0 must have zero mean.
Matrix harmonic_perturbation_matrix(const OperatorSet& ops, const Vector& omega0, const HarmonicBasis& basis);

/// Skew-symmetry defect max |A + A^T|.
double skew_defect(const Matrix& A);

/// c(t_m), m = 0..n_steps, for dc/dt = A c by Cayley steps
/// (I - dt/2 A)^{-1} (I + dt/2 A). Rows are samples.
Matrix evolve_harmonic_perturbation(const Matrix& A, const Vector& c0, double T, int n_steps);

struct Thm2Report {
    Matrix A;
    double skew_defect = 0.0;
    Vector times;
    Matrix coefficients; ///< samples x 2g
    Vector norms;        ///< |c(t)|
    double norm_drift = 0.0; ///< max_t ||c(t)| - |c0|| / |c0|
};

Thm2Report run_thm2(const OperatorSet& ops,
                    const HarmonicBasis& basis,
                    const Vector& omega0,
                    const Vector& c0,
                    double T,
                    int n_steps);

} // namespace surflow
