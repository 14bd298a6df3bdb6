#include <surflow/stability.hpp>

#include <Eigen/LU>

#include <cmath>

namespace surflow {

namespace {

double m0_norm2(const OperatorSet& ops, const Vector& f)
{
    return f.dot(ops.M0 * f);
}

void require_zero_mean(const OperatorSet& ops, const Vector& f, const char* what)
{
    const double scale = std::sqrt(m0_norm2(ops, f) * ops.total_area);
    if (std::abs((ops.M0 * f).sum()) > 1e-10 * scale) {
        throw ContractError(std::string(what) + " must have zero mean");
    }
}

} // namespace

Thm1Report linearize_thm1(const OperatorSet& ops,
                          const HarmonicBasis& basis,
                          const Vector& gamma0,
                          const Vector& omega0,
                          const Thm1Options& options,
                          std::optional<SpectralReport> spectrum)
{
    if (gamma0.size() != ops.num_edges || omega0.size() != ops.num_vertices) {
        throw ContractError("linearize_thm1: cochain sizes do not match the mesh");
    }
    if (!(options.T > 0.0) || !(options.dt > 0.0) || options.sample_every < 1) {
        throw ContractError("linearize_thm1: need T > 0, dt > 0, sample_every >= 1");
    }
    require_zero_mean(ops, omega0, "omega0");

    Thm1Report report;
    report.gamma0_coefficients = basis.project(gamma0);
    const Vector gamma_h = basis.combine(report.gamma0_coefficients);
    const Vector diff = gamma0 - gamma_h;
    const double gamma_norm = std::sqrt(gamma0.dot(ops.M1 * gamma0));
    report.gamma0_residual = gamma_norm > 0.0 ? std::sqrt(diff.dot(ops.M1 * diff)) / gamma_norm : 0.0;
    if (report.gamma0_residual > 1e-6) throw ContractError("gamma0 is not harmonic (residual above 1e-6)");

    const Index dim = basis.dimension();
    const Vector s0 = basis.combine(basis.rotation * report.gamma0_coefficients);

    // Weights (⋆gamma0, h_k) as vertex fields.
    Matrix weights(ops.num_vertices, dim);
    report.bound_slope.resize(dim);
    report.constancy_cv.resize(dim);
    const double w0_norm = std::sqrt(m0_norm2(ops, omega0));
    for (Index k = 0; k < dim; ++k) {
        weights.col(k) = apply_pointwise_inner(ops, s0, basis.forms.col(k));
        const Vector wk = weights.col(k);
        const double norm2 = m0_norm2(ops, wk);
        report.bound_slope[k] = w0_norm * std::sqrt(norm2);
        const double mean = ops.mean0(wk);
        const Vector centred = wk.array() - mean;
        const double std_dev = std::sqrt(m0_norm2(ops, centred) / ops.total_area);
        const double rms = std::sqrt(norm2 / ops.total_area);
        report.constancy_cv[k] = std_dev <= 1e-12 * rms ? 0.0 : std_dev / std::abs(mean);
    }
    const Matrix weights_m0 = ops.M0 * weights;

    if (spectrum) report.lambda_min = spectrum->lambda_min;
    auto advect = [&](const Vector& w) -> Vector { return -ops.solve_mass0(apply_transport(ops, s0, w)); };
    auto c_rate = [&](const Vector& w) -> Vector { return -(weights_m0.transpose() * w); };

    const auto steps = static_cast<long long>(std::ceil(options.T / options.dt - 1e-9));
    const double h = options.T / static_cast<double>(steps);
    const Index samples = static_cast<Index>((steps + options.sample_every - 1) / options.sample_every) + 1;
    report.times.resize(samples);
    report.enstrophy.resize(samples);
    report.stream_norm2.resize(samples);
    report.coefficients.resize(samples, dim);

    Index row = 0;
    Vector w = omega0;
    Vector c = Vector::Zero(dim);
    auto record = [&](double t) {
        report.times[row] = t;
        report.enstrophy[row] = m0_norm2(ops, w);
        const Vector psi = poisson_solve(ops, w);
        report.stream_norm2[row] = m0_norm2(ops, psi);
        report.coefficients.row(row) = c.transpose();
        if (options.keep_omega) report.omega_samples.push_back(w);
        ++row;
    };
    record(0.0);
    Vector rate = c_rate(w);
    for (long long n = 1; n <= steps; ++n) {
        const Vector k1 = advect(w);
        const Vector k2 = advect(w + 0.5 * h * k1);
        const Vector k3 = advect(w + 0.5 * h * k2);
        const Vector k4 = advect(w + h * k3);
        w += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        w.array() -= ops.mean0(w);
        if (!w.allFinite()) throw NumericalError("blow-up detected");
        const Vector next_rate = c_rate(w);
        c += 0.5 * h * (rate + next_rate);
        rate = next_rate;
        if (n % options.sample_every == 0 || n == steps) record(static_cast<double>(n) * h);
    }
    report.times.conservativeResize(row);
    report.enstrophy.conservativeResize(row);
    report.stream_norm2.conservativeResize(row);
    report.coefficients.conservativeResize(row, dim);
    if (spectrum) report.stream_bound = report.enstrophy / (report.lambda_min * report.lambda_min);
    return report;
}

bool enstrophy_conservation_check(const Thm1Report& report, double tol)
{
    const double e0 = report.enstrophy[0];
    const double drift = (report.enstrophy.array() - e0).abs().maxCoeff();
    return drift <= tol * e0;
}

bool linear_growth_check(const Thm1Report& report, double tol)
{
    for (Index r = 0; r < report.coefficients.rows(); ++r) {
        for (Index k = 0; k < report.coefficients.cols(); ++k) {
            const double growth = std::abs(report.coefficients(r, k) - report.coefficients(0, k));
            if (growth > (1.0 + tol) * report.bound_slope[k] * report.times[r]) return false;
        }
    }
    return true;
}

bool stream_bound_check(const Thm1Report& report, const SpectralReport& spectrum, double tol)
{
    const double inv = 1.0 / (spectrum.lambda_min * spectrum.lambda_min);
    for (Index r = 0; r < report.enstrophy.size(); ++r) {
        if (report.stream_norm2[r] > (1.0 + tol) * inv * report.enstrophy[r]) return false;
    }
    return true;
}

Matrix harmonic_perturbation_matrix(const OperatorSet& ops, const Vector& omega0, const HarmonicBasis& basis)
{
    if (omega0.size() != ops.num_vertices) throw ContractError("omega0 size does not match the mesh");
    require_zero_mean(ops, omega0, "omega0");
    const Index dim = basis.dimension();
    Matrix A = Matrix::Zero(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        for (Index j = i + 1; j < dim; ++j) {
            A(i, j) = triple_product(ops, omega0, basis.forms.col(i), basis.forms.col(j));
            A(j, i) = -A(i, j);
        }
    }
    return A;
}

double skew_defect(const Matrix& A)
{
    return A.size() == 0 ? 0.0 : (A + A.transpose()).cwiseAbs().maxCoeff();
}

Matrix evolve_harmonic_perturbation(const Matrix& A, const Vector& c0, double T, int n_steps)
{
    if (A.rows() != A.cols() || A.rows() != c0.size()) throw ContractError("evolve: dimension mismatch");
    if (n_steps < 1) throw ContractError("evolve: n_steps must be >= 1");
    const double scale = std::max(1.0, A.size() ? A.cwiseAbs().maxCoeff() : 0.0);
    if (skew_defect(A) > 1e-12 * scale) throw ContractError("evolve: matrix is not skew-symmetric");

    // Extended precision keeps the accumulated norm error of many steps
    // well below double round-off.
    using Wide = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using WideVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const Index n = A.rows();
    const long double h = static_cast<long double>(T) / n_steps;
    const Wide I = Wide::Identity(n, n);
    const Wide Aw = A.cast<long double>();
    Wide Q = (I - 0.5L * h * Aw).partialPivLu().solve(I + 0.5L * h * Aw);
    // Cayley of a skew matrix is orthogonal; one Newton-Schulz sweep removes the solve's round-off.
    Q = 0.5L * Q * (3.0L * I - Q.transpose() * Q);

    Matrix out(n_steps + 1, n);
    WideVector c = c0.cast<long double>();
    out.row(0) = c0.transpose();
    for (int m = 1; m <= n_steps; ++m) {
        c = Q * c;
        out.row(m) = c.cast<double>().transpose();
    }
    return out;
}

Thm2Report run_thm2(const OperatorSet& ops,
                    const HarmonicBasis& basis,
                    const Vector& omega0,
                    const Vector& c0,
                    double T,
                    int n_steps)
{
    Thm2Report report;
    report.A = harmonic_perturbation_matrix(ops, omega0, basis);
    report.skew_defect = skew_defect(report.A);
    report.coefficients = evolve_harmonic_perturbation(report.A, c0, T, n_steps);
    report.times = Vector::LinSpaced(n_steps + 1, 0.0, T);
    report.norms = report.coefficients.rowwise().norm();
    const double n0 = c0.norm();
    report.norm_drift = n0 > 0.0 ? (report.norms.array() - n0).abs().maxCoeff() / n0 : 0.0;
    return report;
}

} // namespace surflow
