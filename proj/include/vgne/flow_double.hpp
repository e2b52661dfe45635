#pragma once

#include "vgne/flow_single.hpp"

namespace vgne {

/// Controller state for double-integrator agents. The own block of every
/// zetahat^i is the prediction zeta_i = x_i + h_i v_i and is kept consistent
/// with (x, v) rather than evolved on its own.
struct DoubleState {
    Vector x;        // n
    Vector v;        // n
    Vector zetahat;  // N*n
    Vector z;        // N*m
    Vector lambda;   // N*m

    Vector stacked() const;
    static DoubleState unpack(const Game& game, const VectorRef& stacked);
};

/// Per-agent prediction horizons h_i > 0.
class GainsH {
public:
    explicit GainsH(Vector per_agent);
    static GainsH uniform(Index num_agents, double h) { return GainsH(Vector::Constant(num_agents, h)); }

    const Vector& per_agent() const { return h_; }
    /// diag(h_i I_{n_i}) as an n-vector.
    Vector diagonal(const Game& game) const;

private:
    Vector h_;
};

/// zeta = x + H v
Vector to_zeta(const VectorRef& x, const VectorRef& v, const VectorRef& h_diag);
/// x = zeta - H v
Vector from_zeta(const VectorRef& zeta, const VectorRef& v, const VectorRef& h_diag);

/// Builds a consistent state from positions and velocities; other agents'
/// prediction estimates, z and lambda start at zero.
DoubleState initial_double_state(const Game& game, const GainsH& gains, const VectorRef& positions,
                                 const VectorRef& velocities);

/// (zetahat, z, lambda) part of the state, which evolves exactly like the
/// single-integrator controller.
SingleState prediction_subsystem(const DoubleState& s);

/// Time derivative of every field of the state. The own blocks of the
/// zetahat derivative equal x_dot + H v_dot.
DoubleState vector_field_double(const Game& game, const CommGraph& graph, double c, const GainsH& gains,
                                const DoubleState& s);

DoubleState step_double(const Game& game, const CommGraph& graph, const FlowParams& params, const GainsH& gains,
                        const DoubleState& s);

/// Requires every Omega_i to be the full space (dualize bounded sets first).
Trajectory simulate_double(const Game& game, const CommGraph& graph, const FlowParams& params, const GainsH& gains,
                           const DoubleState& initial, const StepObserver& observer = {});

}  // namespace vgne
