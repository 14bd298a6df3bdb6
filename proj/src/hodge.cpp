#include <surflow/eigen_solver.hpp>
#include <surflow/hodge.hpp>

#include <cmath>

namespace surflow {

namespace {

double trace_ratio(const SparseMatrix& A, const SparseMatrix& B)
{
    return A.diagonal().sum() / B.diagonal().sum();
}

// Hodge Laplacian (d delta + delta d) applied to a 1-cochain.
Vector hodge_laplacian1(const OperatorSet& ops, const Vector& a)
{
    const Vector m1a = ops.M1 * a;
    const Vector exact = ops.d0 * ops.solve_mass0(ops.d0.transpose() * m1a);
    const Vector coexact = ops.solve_mass1(ops.d1.transpose() * (ops.M2 * (ops.d1 * a)));
    return exact + coexact;
}

} // namespace

HarmonicBasis harmonic_basis(const OperatorSet& ops, Index genus)
{
    return harmonic_basis(ops, genus, ops.options.harmonic_tol);
}

HarmonicBasis harmonic_basis(const OperatorSet& ops, Index genus, double tol)
{
    if (genus < 1) throw ContractError("no harmonic forms exist (genus 0)");
    if (!(tol > 0.0)) throw ContractError("harmonic tolerance must be positive");
    const int dim = static_cast<int>(2 * genus);

    // Same kernel as the Hodge Laplacian, but with the lumped M0 so the
    // stiffness stays sparse: S = M1 d0 D^-1 d0^T M1 + d1^T M2 d1.
    const SparseMatrix m1d0 = ops.M1 * ops.d0;
    const Vector inv_lumped = ops.lumped_mass.cwiseInverse();
    SparseMatrix S = m1d0 * inv_lumped.asDiagonal() * m1d0.transpose();
    S += ops.d1.transpose() * ops.M2 * ops.d1;
    S = 0.5 * (S + SparseMatrix(S.transpose()));

    EigenSolveOptions opt;
    opt.nev = dim + 1;
    opt.block = dim + 8;
    opt.shift = 1e-6 * trace_ratio(S, ops.M1);
    opt.tol = ops.options.eigen_tol;
    opt.max_iterations = ops.options.max_eigen_iterations;
    auto eig = smallest_eigenpairs(S, ops.M1, opt);

    HarmonicBasis basis;
    basis.iterations = eig.iterations;
    basis.eigenvalues = eig.values.head(dim);
    basis.first_discarded = eig.values[dim];
    const double largest_zero = std::max(basis.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
    basis.spectral_gap = basis.first_discarded / largest_zero;
    if (!(basis.spectral_gap > 10.0) || !(largest_zero <= tol * basis.first_discarded)) {
        throw NumericalError("harmonic space not resolved - refine mesh or loosen tol");
    }

    basis.forms = eig.vectors.leftCols(dim);
    b_orthonormalize(basis.forms, ops.M1);
    basis.mass_forms = ops.M1 * basis.forms;
    const Matrix gram = basis.forms.transpose() * basis.mass_forms;
    basis.gram_defect = (gram - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
    for (int i = 0; i < dim; ++i) {
        const Vector lh = hodge_laplacian1(ops, basis.forms.col(i));
        basis.residual = std::max(basis.residual, std::sqrt(lh.dot(ops.M1 * lh)));
    }
    const Matrix rot = basis.forms.transpose() * (ops.W1 * basis.forms);
    basis.rotation = 0.5 * (rot - rot.transpose());
    return basis;
}

SpectralReport lambda_min(const OperatorSet& ops)
{
    Matrix constant = Matrix::Constant(ops.num_vertices, 1, 1.0 / std::sqrt(ops.total_area));
    EigenSolveOptions opt;
    opt.nev = 1;
    opt.block = std::min<int>(10, static_cast<int>(ops.num_vertices) - 1);
    opt.shift = 1e-6 * trace_ratio(ops.K, ops.M0);
    opt.tol = ops.options.eigen_tol;
    opt.max_iterations = ops.options.max_eigen_iterations;
    auto eig = smallest_eigenpairs(ops.K, ops.M0, opt, constant);

    SpectralReport report;
    report.lambda_min = eig.values[0];
    report.eigenvector = eig.vectors.col(0);
    report.iterations = eig.iterations;
    const double constant_rq = std::abs(constant.col(0).dot(ops.K * constant.col(0)));
    report.spectral_gap = report.lambda_min / std::max(constant_rq, 1e-300);
    if (!(report.lambda_min > 0.0)) throw NumericalError("lambda_min is not positive");
    return report;
}

Vector poisson_solve(const OperatorSet& ops, const Vector& omega)
{
    if (omega.size() != ops.num_vertices) throw ContractError("poisson_solve: size mismatch");
    const Vector m0w = ops.M0 * omega;
    const double total = m0w.sum();
    const double scale = std::sqrt(omega.dot(m0w)) * std::sqrt(ops.total_area);
    if (!std::isfinite(scale)) throw NumericalError("blow-up detected");
    if (std::abs(total) > 1e-10 * scale) {
        throw ContractError("incompatible right-hand side (nonzero mean)");
    }
    if (scale == 0.0) return Vector::Zero(ops.num_vertices);
    Vector rhs = -m0w;
    rhs.array() -= rhs.mean();
    Vector psi = ops.solve_stiffness(rhs);
    const double residual = (ops.K * psi - rhs).norm() / rhs.norm();
    if (!(residual <= ops.options.linear_tol)) throw NumericalError("poisson_solve: solver breakdown");
    return psi;
}

Cochain poisson_solve(const OperatorSet& ops, const Cochain& omega)
{
    if (omega.degree() != 0) throw ContractError("poisson_solve: expected a 0-cochain");
    return {0, poisson_solve(ops, omega.values())};
}

HodgeParts hodge_decompose(const OperatorSet& ops, const HarmonicBasis& basis, const Cochain& v)
{
    if (v.degree() != 1 || v.size() != ops.num_edges) throw ContractError("hodge_decompose: expected a 1-cochain");
    const SparseMatrix wd0 = ops.W1 * ops.d0;
    // G x = (W d0)^T M1^{-1} (W d0) x, the normal operator of the coexact map star1 o d0.
    auto apply_g = [&](const Vector& x) { return Vector(wd0.transpose() * ops.solve_mass1(wd0 * x)); };
    auto precondition = [&](const Vector& r) {
        Vector rc = r;
        rc.array() -= rc.mean();
        return ops.solve_stiffness(rc);
    };

    Vector b = wd0.transpose() * v.values();
    b.array() -= b.mean();
    Vector psi = Vector::Zero(ops.num_vertices);
    HodgeParts parts;
    const double b_norm = b.norm();
    if (b_norm > 0.0) {
        // Preconditioned conjugate gradients on the mean-zero subspace.
        Vector r = b;
        Vector z = precondition(r);
        Vector p = z;
        double rz = r.dot(z);
        const double target = 1e-2 * ops.options.linear_tol * b_norm;
        int it = 0;
        for (; it < 1000 && r.norm() > target; ++it) {
            const Vector gp = apply_g(p);
            const double alpha = rz / p.dot(gp);
            psi += alpha * p;
            r -= alpha * gp;
            z = precondition(r);
            const double rz_next = r.dot(z);
            p = z + (rz_next / rz) * p;
            rz = rz_next;
        }
        if (r.norm() > ops.options.linear_tol * b_norm) throw NumericalError("hodge_decompose: CG did not converge");
        parts.iterations = it;
        psi.array() -= ops.mean0(psi);
    }

    parts.psi = Cochain(0, psi);
    parts.coexact = Cochain(1, apply_star1(ops, ops.d0 * psi));
    const Vector rest = v.values() - parts.coexact.values();
    parts.coefficients = basis.project(rest);
    parts.gamma = Cochain(1, basis.combine(parts.coefficients));
    parts.exact = Cochain(1, rest - parts.gamma.values());
    return parts;
}

} // namespace surflow
