#include <surflow/eigen_solver.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <random>
#include <string>

namespace surflow {

void b_orthonormalize(Matrix& X, const SparseMatrix& B)
{
    for (int pass = 0; pass < 2; ++pass) {
        for (Index j = 0; j < X.cols(); ++j) {
            for (Index i = 0; i < j; ++i) {
                X.col(j) -= X.col(i).dot(B * X.col(j)) * X.col(i);
            }
            const double n = std::sqrt(X.col(j).dot(B * X.col(j)));
            if (!(n > 0.0)) throw NumericalError("eigen solver: subspace collapsed");
            X.col(j) /= n;
        }
    }
}

namespace {

void deflate(Matrix& X, const Matrix& Y, const SparseMatrix& B)
{
    if (Y.cols() == 0) return;
    X -= Y * (Y.transpose() * (B * X));
}

double inf_norm(const SparseMatrix& A)
{
    Vector rows = Vector::Zero(A.rows());
    for (Index k = 0; k < A.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(A, k); it; ++it) rows[it.row()] += std::abs(it.value());
    }
    return rows.maxCoeff();
}

} // namespace

EigenSolveResult smallest_eigenpairs(const SparseMatrix& A,
                                     const SparseMatrix& B,
                                     const EigenSolveOptions& options,
                                     const Matrix& deflation)
{
    const Index n = A.rows();
    const int p = std::max(options.block, options.nev);
    if (p > n - deflation.cols()) throw ContractError("eigen solver: block larger than problem");

    Eigen::SimplicialLDLT<SparseMatrix> solver(SparseMatrix(A + options.shift * B));
    if (solver.info() != Eigen::Success) throw NumericalError("eigen solver: shifted factorization failed");

    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal;
    Matrix X(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) X(i, j) = normal(rng);
    }
    deflate(X, deflation, B);
    b_orthonormalize(X, B);

    const double a_norm = std::max(inf_norm(A), 1e-300);
    EigenSolveResult result;
    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        Matrix Z = solver.solve(B * X);
        deflate(Z, deflation, B);
        b_orthonormalize(Z, B);

        const Matrix AZ = A * Z;
        Matrix reduced = Z.transpose() * AZ;
        reduced = 0.5 * (reduced + reduced.transpose()).eval();
        Eigen::SelfAdjointEigenSolver<Matrix> ritz(reduced);
        X = Z * ritz.eigenvectors();
        const Matrix AX = AZ * ritz.eigenvectors();
        const Matrix BX = B * X;

        result.values = ritz.eigenvalues();
        result.residuals.resize(p);
        bool converged = true;
        for (Index j = 0; j < p; ++j) {
            result.residuals[j] = (AX.col(j) - result.values[j] * BX.col(j)).norm() / (a_norm * X.col(j).norm());
            if (j < options.nev && !(result.residuals[j] <= options.tol)) converged = false;
        }
        result.iterations = iter;
        if (converged) {
            result.vectors = std::move(X);
            return result;
        }
    }
    throw NumericalError("eigen iteration did not converge after " + std::to_string(options.max_iterations) +
                         " iterations");
}

} // namespace surflow
