#include "vgne/flow_double.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vgne {

namespace {

void require_full_space(const Game& game) {
    if (!game.action_set().is_full_space()) {
        throw AssumptionError(
            "double-integrator agents need unconstrained local action sets (Omega = R^n); "
            "dualize the bounded sets into the coupling constraints");
    }
}

Vector own_blocks(const Game& game, const Vector& stacked) { return select_own(game, stacked); }

void validate_double(const Game& game, const CommGraph& graph, const GainsH& gains, const DoubleState& s) {
    const Index n = game.total_dim();
    const Index N = game.num_agents();
    require_dim(s.x.size(), n, "double state x");
    require_dim(s.v.size(), n, "double state v");
    require_dim(gains.per_agent().size(), N, "gains");
    validate_state(game, graph, prediction_subsystem(s));
    const Vector zeta = to_zeta(s.x, s.v, gains.diagonal(game));
    const Vector own = own_blocks(game, s.zetahat);
    const double scale = 1.0 + zeta.lpNorm<Eigen::Infinity>();
    if ((zeta - own).lpNorm<Eigen::Infinity>() > 1e-12 * scale) {
        throw std::domain_error("double state: own prediction blocks disagree with x + H v");
    }
}

TrajectorySample make_sample(const Game& game, const CommGraph& graph, Index k, double t, const DoubleState& s) {
    TrajectorySample sample;
    sample.step = k;
    sample.t = t;
    sample.state = s.stacked();
    sample.x = s.x;
    sample.v = s.v;
    sample.lambda_mean = game.num_constraints() > 0 ? mean_block(s.lambda, game.num_agents()) : Vector();
    sample.monitors = online_monitors(game, graph, s.x, s.zetahat, s.lambda);
    return sample;
}

}  // namespace

Vector DoubleState::stacked() const {
    Vector out(x.size() + v.size() + zetahat.size() + z.size() + lambda.size());
    out << x, v, zetahat, z, lambda;
    return out;
}

DoubleState DoubleState::unpack(const Game& game, const VectorRef& stacked) {
    const Index n = game.total_dim();
    const Index Nn = game.num_agents() * n;
    const Index Nm = game.num_agents() * game.num_constraints();
    require_dim(stacked.size(), 2 * n + Nn + 2 * Nm, "DoubleState::unpack");
    return {stacked.head(n), stacked.segment(n, n), stacked.segment(2 * n, Nn), stacked.segment(2 * n + Nn, Nm),
            stacked.tail(Nm)};
}

GainsH::GainsH(Vector per_agent) : h_(std::move(per_agent)) {
    for (Index i = 0; i < h_.size(); ++i) {
        if (!(h_[i] > 0.0) || !std::isfinite(h_[i])) {
            throw std::invalid_argument("GainsH: h_" + std::to_string(i + 1) + " must be positive and finite");
        }
    }
}

Vector GainsH::diagonal(const Game& game) const {
    require_dim(h_.size(), game.num_agents(), "GainsH");
    Vector d(game.total_dim());
    for (Index i = 0; i < game.num_agents(); ++i) d.segment(game.agent_offset(i), game.agent_dim(i)).setConstant(h_[i]);
    return d;
}

Vector to_zeta(const VectorRef& x, const VectorRef& v, const VectorRef& h_diag) {
    require_dim(v.size(), x.size(), "to_zeta (v)");
    require_dim(h_diag.size(), x.size(), "to_zeta (H)");
    return x + h_diag.cwiseProduct(v);
}

Vector from_zeta(const VectorRef& zeta, const VectorRef& v, const VectorRef& h_diag) {
    require_dim(v.size(), zeta.size(), "from_zeta (v)");
    require_dim(h_diag.size(), zeta.size(), "from_zeta (H)");
    return zeta - h_diag.cwiseProduct(v);
}

DoubleState initial_double_state(const Game& game, const GainsH& gains, const VectorRef& positions,
                                 const VectorRef& velocities) {
    const Index n = game.total_dim();
    const Index N = game.num_agents();
    const Index m = game.num_constraints();
    require_dim(positions.size(), n, "initial positions");
    require_dim(velocities.size(), n, "initial velocities");
    const Vector zeta = to_zeta(positions, velocities, gains.diagonal(game));
    DoubleState s{positions, velocities, Vector::Zero(N * n), Vector::Zero(N * m), Vector::Zero(N * m)};
    s.zetahat = embed(game, zeta, select_others(game, s.zetahat));
    return s;
}

SingleState prediction_subsystem(const DoubleState& s) { return {s.zetahat, s.z, s.lambda}; }

DoubleState vector_field_double(const Game& game, const CommGraph& graph, double c, const GainsH& gains,
                                const DoubleState& s) {
    require_full_space(game);
    validate_double(game, graph, gains, s);
    const SingleState sub = prediction_subsystem(s);
    const SingleState drift = unprojected_drift(game, graph, c, sub);
    const Vector u_tilde = own_blocks(game, drift.xhat);
    const Vector h_diag = gains.diagonal(game);

    DoubleState d;
    d.x = s.v;
    d.v = (u_tilde - s.v).cwiseQuotient(h_diag);
    d.zetahat = drift.xhat;
    d.z = drift.z;
    d.lambda = tangent_project_state(game, sub, drift).lambda;
    return d;
}

DoubleState step_double(const Game& game, const CommGraph& graph, const FlowParams& params, const GainsH& gains,
                        const DoubleState& s) {
    const SingleState sub = prediction_subsystem(s);
    const SingleState drift = unprojected_drift(game, graph, params.c, sub);
    const Vector u_tilde = own_blocks(game, drift.xhat);
    const Vector h_diag = gains.diagonal(game);

    const SingleState next_sub = projected_euler_update(game, params.step, sub, drift);
    DoubleState next;
    next.v = s.v + params.step * (u_tilde - s.v).cwiseQuotient(h_diag);
    next.x = from_zeta(own_blocks(game, next_sub.xhat), next.v, h_diag);
    next.zetahat = next_sub.xhat;
    next.z = next_sub.z;
    next.lambda = next_sub.lambda;
    return next;
}

Trajectory simulate_double(const Game& game, const CommGraph& graph, const FlowParams& params, const GainsH& gains,
                           const DoubleState& initial, const StepObserver& observer) {
    require_full_space(game);
    if (!(params.c > 0.0)) throw std::invalid_argument("simulate_double: gain c must be positive");
    if (!(params.step > 0.0)) throw std::invalid_argument("simulate_double: step must be positive");
    if (params.record_stride < 1) throw std::invalid_argument("simulate_double: record stride must be >= 1");
    validate_double(game, graph, gains, initial);

    Trajectory traj;
    traj.model = AgentModel::double_integrator;
    traj.step = params.step;
    traj.record_stride = params.record_stride;

    DoubleState s = initial;
    traj.samples.push_back(make_sample(game, graph, 0, 0.0, s));
    const Index max_steps = static_cast<Index>(std::ceil(params.t_max / params.step - 1e-9));
    Index k = 0;
    while (k < max_steps) {
        DoubleState next = step_double(game, graph, params, gains, s);
        ++k;
        const double t = static_cast<double>(k) * params.step;
        if (!next.stacked().allFinite()) {
            std::ostringstream os;
            os << "integration diverged at step " << k << " (t = " << t
               << "); reduce the step size or check the game constants";
            throw DivergenceError(os.str());
        }
        const double residual = std::sqrt((next.v - s.v).squaredNorm() + (next.zetahat - s.zetahat).squaredNorm() +
                                          (next.z - s.z).squaredNorm() + (next.lambda - s.lambda).squaredNorm()) /
                                params.step;
        s = std::move(next);
        if (observer) observer(k, t, s.stacked());
        traj.final_residual = residual;
        const bool done = residual <= params.stop_tol;
        if (done) traj.stop = StopReason::converged;
        if (done || k == max_steps || k % params.record_stride == 0) {
            traj.samples.push_back(make_sample(game, graph, k, t, s));
        }
        if (done) break;
    }
    traj.steps = k;
    return traj;
}

}  // namespace vgne
