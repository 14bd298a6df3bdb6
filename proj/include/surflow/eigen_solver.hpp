#pragma once

#include <surflow/types.hpp>

#include <cstdint>

namespace surflow {

struct EigenSolveOptions {
    int nev = 1;              ///< eigenpairs that must converge
    int block = 8;            ///< subspace size, >= nev
    double shift = 0.0;       ///< factorize A + shift * B; must make it positive definite
    double tol = 1e-8;        ///< relative residual |A x - theta B x| / (|A|_inf |x|)
    int max_iterations = 500;
    std::uint64_t seed = 0x5eed;
};

struct EigenSolveResult {
    Vector values;    ///< ascending, size block
    Matrix vectors;   ///< B-orthonormal columns
    Vector residuals;
    int iterations = 0;
};

/// Smallest eigenpairs of the pencil (A, B), A symmetric positive semi-definite,
/// B symmetric positive definite, by shift-invert block subspace iteration
/// with Rayleigh-Ritz. Columns of `deflation` (B-orthonormal) are projected out.
/// Throws NumericalError when `nev` pairs do not converge in `max_iterations`.
EigenSolveResult smallest_eigenpairs(const SparseMatrix& A,
                                     const SparseMatrix& B,
                                     const EigenSolveOptions& options,
                                     const Matrix& deflation = Matrix());

/// Modified Gram-Schmidt (two passes) in the B inner product.
void b_orthonormalize(Matrix& X, const SparseMatrix& B);

} // namespace surflow
