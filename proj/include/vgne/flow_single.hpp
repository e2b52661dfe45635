#pragma once

#include "vgne/game.hpp"
#include "vgne/network.hpp"
#include "vgne/trajectory.hpp"

namespace vgne {

/// Controller state for single-integrator agents: stacked estimate vectors
/// (own block of xhat^i is agent i's true action), auxiliary consensus
/// variables z and multiplier estimates lambda.
struct SingleState {
    Vector xhat;    // N*n
    Vector z;       // N*m
    Vector lambda;  // N*m

    Vector stacked() const;
    static SingleState unpack(const Game& game, const VectorRef& stacked);
};

struct FlowParams {
    double c = 1.0;            // consensus gain
    double step = 1e-3;        // integration step h
    double t_max = 200.0;
    double stop_tol = 1e-8;    // stop when |s_{k+1} - s_k| / h <= stop_tol
    Index record_stride = 1;
};

/// min(0.1 / (theta0 + c lambda_max(L) + lambda_max(L) + 1), 1e-2)
double default_step(double theta0, double c, const CommGraph& graph);

/// Own actions projected onto Omega_i, every other estimate, z and lambda zero.
SingleState initial_single_state(const Game& game, const VectorRef& positions);

/// Throws DimensionError / std::domain_error when s violates its invariants.
void validate_state(const Game& game, const CommGraph& graph, const SingleState& s);

/// Right-hand side before any projection:
/// xhat: -R^T(F(xhat) + Lambda^T lambda) - c L_x xhat,
/// z: L_lambda lambda, lambda: Lambda R xhat - b - L_lambda lambda - L_lambda z.
SingleState unprojected_drift(const Game& game, const CommGraph& graph, double c, const SingleState& s);

/// Closed-loop vector field: the drift with own-action blocks projected on the
/// tangent cone of Omega_i and multipliers on the tangent cone of the orthant.
SingleState vector_field_single(const Game& game, const CommGraph& graph, double c, const SingleState& s);

/// s + step * drift, then own actions projected onto Omega_i and multipliers
/// onto the orthant.
SingleState projected_euler_update(const Game& game, double step, const SingleState& s, const SingleState& drift);

/// Projected forward Euler step.
SingleState step_single(const Game& game, const CommGraph& graph, const FlowParams& params, const SingleState& s);

/// Iterates step_single until the step residual drops below params.stop_tol
/// or t_max is reached. Throws DivergenceError on non-finite values.
Trajectory simulate_single(const Game& game, const CommGraph& graph, const FlowParams& params,
                           const SingleState& initial, const StepObserver& observer = {});

/// Linear skew part of the closed loop written as
/// omega_dot = Pi_Xi(omega, -B(omega) - Phi omega).
SingleState skew_coupling_apply(const Game& game, const CommGraph& graph, const SingleState& s);
/// B(omega) = (R^T F(xhat) + c L_x xhat, 0, L_lambda lambda + b).
SingleState monotone_part(const Game& game, const CommGraph& graph, double c, const SingleState& s);
/// Pi_Xi(s, direction).
SingleState tangent_project_state(const Game& game, const SingleState& s, const SingleState& direction);

/// Stacked Lambda^T lambda = col(A_i^T lambda_i).
Vector multiplier_force(const Game& game, const VectorRef& lambda);
/// Stacked Lambda R xhat - b = col(A_i x_i - b_i).
Vector local_constraint_value(const Game& game, const VectorRef& x);

}  // namespace vgne
