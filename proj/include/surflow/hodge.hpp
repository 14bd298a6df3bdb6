#pragma once

#include <surflow/operators.hpp>

namespace surflow {

/// Hodge-orthonormal basis of discrete harmonic 1-forms, one per column.
struct HarmonicBasis {
    Matrix forms;            ///< E x 2g
    Matrix mass_forms;       ///< M1 * forms, cached for projections
    Matrix rotation;         ///< J(i, j) = <h_i, star1 h_j>; skew, approximates ⋆ on the harmonic space
    Vector eigenvalues;      ///< retained eigenvalues of the 1-form Laplacian surrogate
    double first_discarded = 0.0;
    double spectral_gap = 0.0;
    double gram_defect = 0.0;  ///< max |<h_i, h_j> - delta_ij|
    double residual = 0.0;     ///< max_i |(d delta + delta d) h_i|_M1 / |h_i|_M1
    int iterations = 0;

    Index dimension() const { return forms.cols(); }
    /// Harmonic 1-cochain sum_i c_i h_i.
    Vector combine(const Vector& c) const { return forms * c; }
    /// Coefficients of the M1-orthogonal projection of a 1-cochain.
    Vector project(const Vector& a) const { return mass_forms.transpose() * a; }
};

struct SpectralReport {
    double lambda_min = 0.0;   ///< smallest positive eigenvalue of delta d on 0-cochains
    double spectral_gap = 0.0; ///< lambda_min over the constant mode's Rayleigh quotient
    Vector eigenvector;        ///< M0-normalized eigenfunction
    int iterations = 0;
};

/// The 2g lowest modes of the 1-form Hodge Laplacian, certified by a spectral gap.
/// Throws ContractError for genus 0 and NumericalError when the gap is <= 10.
HarmonicBasis harmonic_basis(const OperatorSet& ops, Index genus, double tol);
HarmonicBasis harmonic_basis(const OperatorSet& ops, Index genus);

SpectralReport lambda_min(const OperatorSet& ops);

/// Mean-zero psi with -delta d psi = omega. omega must have zero mean.
Vector poisson_solve(const OperatorSet& ops, const Vector& omega);
Cochain poisson_solve(const OperatorSet& ops, const Cochain& omega);

struct HodgeParts {
    Cochain psi;      ///< mean-zero stream function
    Cochain coexact;  ///< star1(d psi)
    Cochain gamma;    ///< harmonic part
    Cochain exact;    ///< remainder v - coexact - gamma (zero for incompressible v)
    Vector coefficients; ///< gamma = sum_i coefficients_i h_i
    int iterations = 0;
};

/// L2-orthogonal split v = star1(d psi) + gamma + exact. psi minimizes
/// |v - star1(d psi)| in the M1 norm (preconditioned CG, stiffness-matrix
/// preconditioner); gamma is the projection of the rest onto the basis.
HodgeParts hodge_decompose(const OperatorSet& ops, const HarmonicBasis& basis, const Cochain& v);

} // namespace surflow
