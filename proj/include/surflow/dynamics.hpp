#pragma once

#include <surflow/hodge.hpp>

#include <optional>
#include <vector>

namespace surflow {

/// Flow in Hodge-Helmholtz variables: vorticity 0-cochain and harmonic coefficients.
struct FlowState {
    double t = 0.0;
    Vector omega; ///< zero mean
    Vector c;     ///< gamma = sum_i c_i h_i
};

struct FlowRates {
    Vector omega_dot;
    Vector c_dot;
};

struct FlowDiagnostics {
    double t = 0.0;
    double energy = 0.0;          ///< 1/2 <v, v>
    double enstrophy = 0.0;       ///< 1/2 <omega, omega>
    double total_vorticity = 0.0; ///< <omega, 1>
    Vector c;
    double c_norm = 0.0;
};

struct Trajectory {
    std::vector<FlowState> samples;
    std::vector<FlowDiagnostics> diagnostics;
};

/// Surface Euler equations in the state (omega, c).
///
/// The rotated velocity ⋆v entering the nonlinear terms is formed as
/// -d psi + sum_ij J_ij c_j h_i, which is exactly closed; with it the
/// skew-symmetric advection conserves enstrophy and total vorticity.
class EulerFlow {
public:
    /// `forcing` is a constant-in-time 1-cochain, or absent.
    EulerFlow(const OperatorSet& ops, const HarmonicBasis& basis, std::optional<Vector> forcing = std::nullopt);

    const OperatorSet& operators() const { return *ops_; }
    const HarmonicBasis& basis() const { return *basis_; }

    FlowState make_state(Vector omega, Vector c, double t = 0.0) const;

    Vector stream_function(const FlowState& state) const;
    /// v = star1(d psi) + sum_i c_i h_i.
    Vector reconstruct_velocity(const FlowState& state) const;
    /// Closed 1-cochain standing in for ⋆v.
    Vector rotated_velocity(const Vector& psi, const Vector& c) const;

    FlowRates rhs(const FlowState& state) const;
    FlowState step_rk4(const FlowState& state, double dt) const;
    Trajectory integrate(const FlowState& initial, double T, double dt, int sample_every) const;

    /// Mean-zero Bernoulli pressure from delta d p = delta(F - omega ⋆v).
    Vector recover_pressure(const FlowState& state) const;

    FlowDiagnostics diagnostics(const FlowState& state) const;

    /// dt * max edge speed / min edge length; reported, never enforced.
    double cfl_number(const FlowState& state, double dt) const;

private:
    const OperatorSet* ops_;
    const HarmonicBasis* basis_;
    std::optional<Vector> forcing_;
    Vector forcing_vorticity_; ///< ⋆dF
    Vector forcing_harmonic_;  ///< <F, h_k>
};

} // namespace surflow
