#include "vgne/flow_single.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vgne {

namespace {

template <typename Fn>
void for_each_own_block(const Game& game, Fn&& fn) {
    const Index n = game.total_dim();
    for (Index i = 0; i < game.num_agents(); ++i) {
        fn(i, i * n + game.agent_offset(i), game.agent_offset(i), game.agent_dim(i));
    }
}

TrajectorySample make_sample(const Game& game, const CommGraph& graph, Index k, double t, const SingleState& s) {
    TrajectorySample sample;
    sample.step = k;
    sample.t = t;
    sample.state = s.stacked();
    sample.x = select_own(game, s.xhat);
    sample.lambda_mean = game.num_constraints() > 0 ? mean_block(s.lambda, game.num_agents()) : Vector();
    sample.monitors = online_monitors(game, graph, sample.x, s.xhat, s.lambda);
    return sample;
}

void check_finite(const SingleState& s, Index k, double t) {
    auto bad = [](const Vector& v) { return !v.allFinite(); };
    if (bad(s.xhat) || bad(s.z) || bad(s.lambda)) {
        std::ostringstream os;
        os << "integration diverged at step " << k << " (t = " << t << "): non-finite "
           << (bad(s.xhat) ? "estimates" : bad(s.z) ? "auxiliary z" : "multipliers")
           << "; reduce the step size or check the game constants";
        throw DivergenceError(os.str());
    }
}

}  // namespace

Vector SingleState::stacked() const {
    Vector out(xhat.size() + z.size() + lambda.size());
    out << xhat, z, lambda;
    return out;
}

SingleState SingleState::unpack(const Game& game, const VectorRef& stacked) {
    const Index Nn = game.num_agents() * game.total_dim();
    const Index Nm = game.num_agents() * game.num_constraints();
    require_dim(stacked.size(), Nn + 2 * Nm, "SingleState::unpack");
    return {stacked.head(Nn), stacked.segment(Nn, Nm), stacked.tail(Nm)};
}

double default_step(double theta0, double c, const CommGraph& graph) {
    const double lmax = graph.max_eigenvalue();
    return std::min(0.1 / (theta0 + c * lmax + lmax + 1.0), 1e-2);
}

SingleState initial_single_state(const Game& game, const VectorRef& positions) {
    const Index n = game.total_dim();
    const Index N = game.num_agents();
    const Index m = game.num_constraints();
    require_dim(positions.size(), n, "initial positions");
    const Vector x = project(game.action_set(), positions);
    SingleState s{Vector::Zero(N * n), Vector::Zero(N * m), Vector::Zero(N * m)};
    for_each_own_block(game, [&](Index, Index pos, Index off, Index ni) { s.xhat.segment(pos, ni) = x.segment(off, ni); });
    return s;
}

void validate_state(const Game& game, const CommGraph& graph, const SingleState& s) {
    const Index N = game.num_agents();
    if (graph.num_nodes() != N) {
        throw DimensionError("graph has " + std::to_string(graph.num_nodes()) + " nodes but the game has " +
                             std::to_string(N) + " agents");
    }
    require_dim(s.xhat.size(), N * game.total_dim(), "state estimates");
    require_dim(s.z.size(), N * game.num_constraints(), "state z");
    require_dim(s.lambda.size(), N * game.num_constraints(), "state lambda");
    if (!game.action_set().contains(select_own(game, s.xhat))) {
        throw std::domain_error("state: own actions lie outside the local sets");
    }
    if (s.lambda.size() > 0 && s.lambda.minCoeff() < -kMembershipTol) {
        throw std::domain_error("state: multiplier estimates must be nonnegative");
    }
}

Vector multiplier_force(const Game& game, const VectorRef& lambda) {
    const Index m = game.num_constraints();
    Vector out(game.total_dim());
    for (Index i = 0; i < game.num_agents(); ++i) {
        out.segment(game.agent_offset(i), game.agent_dim(i)).noalias() =
            game.agent(i).A.transpose() * lambda.segment(i * m, m);
    }
    return out;
}

Vector local_constraint_value(const Game& game, const VectorRef& x) {
    const Index m = game.num_constraints();
    Vector out(game.num_agents() * m);
    for (Index i = 0; i < game.num_agents(); ++i) {
        out.segment(i * m, m).noalias() = game.agent(i).A * x.segment(game.agent_offset(i), game.agent_dim(i));
    }
    return out - game.stacked_bounds();
}

SingleState unprojected_drift(const Game& game, const CommGraph& graph, double c, const SingleState& s) {
    const Index n = game.total_dim();
    const Index m = game.num_constraints();
    SingleState d;
    d.xhat = -c * laplacian_apply(graph, n, s.xhat);
    const Vector own_force = extended_pseudo_gradient(game, s.xhat) + multiplier_force(game, s.lambda);
    for_each_own_block(game, [&](Index, Index pos, Index off, Index ni) { d.xhat.segment(pos, ni) -= own_force.segment(off, ni); });
    const Vector L_lambda = laplacian_apply(graph, m, s.lambda);
    d.z = L_lambda;
    d.lambda = local_constraint_value(game, select_own(game, s.xhat)) - L_lambda - laplacian_apply(graph, m, s.z);
    return d;
}

SingleState tangent_project_state(const Game& game, const SingleState& s, const SingleState& direction) {
    SingleState t = direction;
    for_each_own_block(game, [&](Index i, Index pos, Index, Index ni) {
        t.xhat.segment(pos, ni) =
            tangent_project(game.agent(i).local_set, s.xhat.segment(pos, ni), direction.xhat.segment(pos, ni));
    });
    if (t.lambda.size() > 0) {
        t.lambda = tangent_project(ConvexSet::nonneg_orthant(s.lambda.size()), s.lambda, direction.lambda);
    }
    return t;
}

SingleState vector_field_single(const Game& game, const CommGraph& graph, double c, const SingleState& s) {
    validate_state(game, graph, s);
    return tangent_project_state(game, s, unprojected_drift(game, graph, c, s));
}

SingleState skew_coupling_apply(const Game& game, const CommGraph& graph, const SingleState& s) {
    const Index m = game.num_constraints();
    SingleState out;
    out.xhat = Vector::Zero(s.xhat.size());
    const Vector force = multiplier_force(game, s.lambda);
    for_each_own_block(game, [&](Index, Index pos, Index off, Index ni) { out.xhat.segment(pos, ni) = force.segment(off, ni); });
    out.z = -laplacian_apply(graph, m, s.lambda);
    out.lambda = -(local_constraint_value(game, select_own(game, s.xhat)) + game.stacked_bounds()) +
                 laplacian_apply(graph, m, s.z);
    return out;
}

SingleState monotone_part(const Game& game, const CommGraph& graph, double c, const SingleState& s) {
    const Index n = game.total_dim();
    const Index m = game.num_constraints();
    SingleState out;
    out.xhat = c * laplacian_apply(graph, n, s.xhat);
    const Vector F = extended_pseudo_gradient(game, s.xhat);
    for_each_own_block(game, [&](Index, Index pos, Index off, Index ni) { out.xhat.segment(pos, ni) += F.segment(off, ni); });
    out.z = Vector::Zero(s.z.size());
    out.lambda = laplacian_apply(graph, m, s.lambda) + game.stacked_bounds();
    return out;
}

SingleState projected_euler_update(const Game& game, double step, const SingleState& s, const SingleState& drift) {
    SingleState next{s.xhat + step * drift.xhat, s.z + step * drift.z, (s.lambda + step * drift.lambda).cwiseMax(0.0)};
    const Vector& lo = game.action_set().lower();
    const Vector& hi = game.action_set().upper();
    for_each_own_block(game, [&](Index, Index pos, Index off, Index ni) {
        next.xhat.segment(pos, ni) = next.xhat.segment(pos, ni).cwiseMax(lo.segment(off, ni)).cwiseMin(hi.segment(off, ni));
    });
    return next;
}

SingleState step_single(const Game& game, const CommGraph& graph, const FlowParams& params, const SingleState& s) {
    return projected_euler_update(game, params.step, s, unprojected_drift(game, graph, params.c, s));
}

Trajectory simulate_single(const Game& game, const CommGraph& graph, const FlowParams& params,
                           const SingleState& initial, const StepObserver& observer) {
    if (!(params.c > 0.0)) throw std::invalid_argument("simulate_single: gain c must be positive");
    if (!(params.step > 0.0)) throw std::invalid_argument("simulate_single: step must be positive");
    if (params.record_stride < 1) throw std::invalid_argument("simulate_single: record stride must be >= 1");
    validate_state(game, graph, initial);

    Trajectory traj;
    traj.model = AgentModel::single_integrator;
    traj.step = params.step;
    traj.record_stride = params.record_stride;

    SingleState s = initial;
    traj.samples.push_back(make_sample(game, graph, 0, 0.0, s));
    const Index max_steps = static_cast<Index>(std::ceil(params.t_max / params.step - 1e-9));
    Index k = 0;
    while (k < max_steps) {
        SingleState next = step_single(game, graph, params, s);
        ++k;
        const double t = static_cast<double>(k) * params.step;
        check_finite(next, k, t);
        const double residual = std::sqrt((next.xhat - s.xhat).squaredNorm() + (next.z - s.z).squaredNorm() +
                                          (next.lambda - s.lambda).squaredNorm()) /
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
