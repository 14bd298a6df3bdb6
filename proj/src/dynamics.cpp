#include <surflow/dynamics.hpp>

#include <cmath>

namespace surflow {

EulerFlow::EulerFlow(const OperatorSet& ops, const HarmonicBasis& basis, std::optional<Vector> forcing)
    : ops_(&ops), basis_(&basis), forcing_(std::move(forcing))
{
    const Index dim = basis.dimension();
    forcing_vorticity_ = Vector::Zero(ops.num_vertices);
    forcing_harmonic_ = Vector::Zero(dim);
    if (forcing_) {
        if (forcing_->size() != ops.num_edges) throw ContractError("forcing must be a 1-cochain on the mesh");
        forcing_vorticity_ = apply_star2(ops, ops.d1 * *forcing_);
        forcing_vorticity_.array() -= ops.mean0(forcing_vorticity_);
        forcing_harmonic_ = basis.project(*forcing_);
    }
}

FlowState EulerFlow::make_state(Vector omega, Vector c, double t) const
{
    if (omega.size() != ops_->num_vertices) throw ContractError("state vorticity size mismatch");
    if (c.size() != basis_->dimension()) throw ContractError("state needs 2g harmonic coefficients");
    const double scale = std::sqrt(omega.dot(ops_->M0 * omega) * ops_->total_area);
    if (std::abs((ops_->M0 * omega).sum()) > 1e-10 * scale) throw ContractError("state vorticity must have zero mean");
    FlowState s;
    s.t = t;
    s.omega = std::move(omega);
    s.c = std::move(c);
    return s;
}

Vector EulerFlow::stream_function(const FlowState& state) const
{
    return poisson_solve(*ops_, state.omega);
}

Vector EulerFlow::reconstruct_velocity(const FlowState& state) const
{
    const Vector psi = stream_function(state);
    return apply_star1(*ops_, ops_->d0 * psi) + basis_->combine(state.c);
}

Vector EulerFlow::rotated_velocity(const Vector& psi, const Vector& c) const
{
    return -(ops_->d0 * psi) + basis_->combine(basis_->rotation * c);
}

FlowRates EulerFlow::rhs(const FlowState& state) const
{
    if (!state.omega.allFinite() || !state.c.allFinite()) throw NumericalError("blow-up detected");
    const Vector psi = stream_function(state);
    const Vector s = rotated_velocity(psi, state.c);
    FlowRates rates;
    rates.omega_dot = -ops_->solve_mass0(apply_transport(*ops_, s, state.omega)) + forcing_vorticity_;
    const Vector flux = apply_wedge01(*ops_, state.omega, s, ops_->options.wedge_rule);
    rates.c_dot = -basis_->project(flux) + forcing_harmonic_;
    return rates;
}

FlowState EulerFlow::step_rk4(const FlowState& state, double dt) const
{
    auto shifted = [&](const FlowRates& k, double h) {
        FlowState s;
        s.t = state.t + h;
        s.omega = state.omega + h * k.omega_dot;
        s.c = state.c + h * k.c_dot;
        return s;
    };
    const FlowRates k1 = rhs(state);
    const FlowRates k2 = rhs(shifted(k1, 0.5 * dt));
    const FlowRates k3 = rhs(shifted(k2, 0.5 * dt));
    const FlowRates k4 = rhs(shifted(k3, dt));

    FlowState next;
    next.t = state.t + dt;
    next.omega = state.omega + (dt / 6.0) * (k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot);
    next.c = state.c + (dt / 6.0) * (k1.c_dot + 2.0 * k2.c_dot + 2.0 * k3.c_dot + k4.c_dot);
    next.omega.array() -= ops_->mean0(next.omega);
    if (!next.omega.allFinite() || !next.c.allFinite()) throw NumericalError("blow-up detected");
    return next;
}

Trajectory EulerFlow::integrate(const FlowState& initial, double T, double dt, int sample_every) const
{
    if (!(T > 0.0) || !(dt > 0.0)) throw ContractError("integrate needs T > 0 and dt > 0");
    if (sample_every < 1) throw ContractError("sample_every must be >= 1");
    const auto steps = static_cast<long long>(std::ceil(T / dt - 1e-9));
    const double h = T / static_cast<double>(steps);

    Trajectory traj;
    FlowState state = initial;
    traj.samples.push_back(state);
    traj.diagnostics.push_back(diagnostics(state));
    for (long long n = 1; n <= steps; ++n) {
        state = step_rk4(state, h);
        state.t = initial.t + static_cast<double>(n) * h;
        if (n % sample_every == 0 || n == steps) {
            traj.samples.push_back(state);
            traj.diagnostics.push_back(diagnostics(state));
        }
    }
    return traj;
}

Vector EulerFlow::recover_pressure(const FlowState& state) const
{
    const Vector psi = stream_function(state);
    const Vector s = rotated_velocity(psi, state.c);
    Vector load = -apply_wedge01(*ops_, state.omega, s, ops_->options.wedge_rule);
    if (forcing_) load += *forcing_;
    Vector rhs = ops_->d0.transpose() * (ops_->M1 * load);
    rhs.array() -= rhs.mean();
    if (rhs.norm() == 0.0) return Vector::Zero(ops_->num_vertices);
    return ops_->solve_stiffness(rhs);
}

FlowDiagnostics EulerFlow::diagnostics(const FlowState& state) const
{
    FlowDiagnostics d;
    d.t = state.t;
    const Vector v = reconstruct_velocity(state);
    const Vector m0w = ops_->M0 * state.omega;
    d.energy = 0.5 * v.dot(ops_->M1 * v);
    d.enstrophy = 0.5 * state.omega.dot(m0w);
    d.total_vorticity = m0w.sum();
    d.c = state.c;
    d.c_norm = state.c.norm();
    return d;
}

double EulerFlow::cfl_number(const FlowState& state, double dt) const
{
    // Edge values are line integrals, so |v_e| / l_e is the tangential speed.
    const Vector v = reconstruct_velocity(state);
    const double speed = v.cwiseAbs().cwiseQuotient(ops_->edge_lengths).maxCoeff();
    return dt * speed / ops_->edge_lengths.minCoeff();
}

} // namespace surflow
