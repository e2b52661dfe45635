#include "vgne/analysis.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>
#include <string>

namespace vgne {

ConvergenceCert compute_cert(double mu, double theta0, double theta, Index num_agents, double lambda2, double c) {
    if (!(mu > 0.0) || !(lambda2 > 0.0) || num_agents < 1) {
        throw std::invalid_argument("compute_cert: mu, lambda2 and N must be positive");
    }
    if (!(theta >= mu) || !(theta0 >= theta)) {
        throw std::invalid_argument("compute_cert: constants must satisfy theta0 >= theta >= mu");
    }
    if (!(c > 0.0)) throw std::invalid_argument("compute_cert: gain c must be positive");

    ConvergenceCert cert;
    cert.mu = mu;
    cert.theta0 = theta0;
    cert.theta = theta;
    cert.lambda2 = lambda2;
    cert.num_agents = num_agents;
    cert.c_used = c;

    const double N = static_cast<double>(num_agents);
    const double a = mu / N;
    const double off = -(theta0 + theta) / (2.0 * std::sqrt(N));
    const double d = c * lambda2 - theta;
    cert.M << a, off, off, d;
    cert.c_threshold = ((theta0 + theta) * (theta0 + theta) + 4.0 * mu * theta) / (4.0 * mu * lambda2);

    // det M = (mu lambda2 / N) (c - c_threshold) exactly; the largest
    // eigenvalue is free of cancellation since a > 0.
    const double det = (mu * lambda2 / N) * (c - cert.c_threshold);
    const double half_gap = 0.5 * (a - d);
    const double lambda_max = 0.5 * (a + d) + std::sqrt(half_gap * half_gap + off * off);
    cert.lambda_min_M = det / lambda_max;
    cert.satisfied = c > cert.c_threshold && cert.lambda_min_M > 0.0;
    return cert;
}

ConvergenceCert certify(const Game& game, const CommGraph& graph, const GameConstants& constants, double c) {
    if (graph.num_nodes() != game.num_agents()) {
        throw DimensionError("certify: graph and game disagree on the number of agents");
    }
    return compute_cert(constants.mu, constants.theta0, constants.theta, game.num_agents(),
                        graph.algebraic_connectivity(), c);
}

namespace {

constexpr double kActiveTol = 1e-7;

std::vector<bool> activity(const Game& game, const Vector& x, const Vector& lambda) {
    const Vector slack = game.coupling_bound() - game.coupling_matrix() * x;
    std::vector<bool> active(static_cast<std::size_t>(game.num_constraints()));
    for (Index k = 0; k < game.num_constraints(); ++k) {
        active[k] = lambda[k] > kActiveTol || slack[k] <= kActiveTol;
    }
    return active;
}

/// Solves the KKT equations of a quadratic game on the active set guessed
/// from (x, lambda). Returns false when the guess does not reproduce a KKT
/// point within tol.
bool polish(const Game& game, Vector& x, Vector& lambda, double tol) {
    const Index n = game.total_dim();
    const Index m = game.num_constraints();
    const Matrix& G = game.jacobian();
    const Matrix& A = game.coupling_matrix();
    const Vector& lo = game.action_set().lower();
    const Vector& hi = game.action_set().upper();

    const std::vector<bool> active = activity(game, x, lambda);
    std::vector<Index> rows;
    for (Index k = 0; k < m; ++k)
        if (active[k]) rows.push_back(k);
    const Index a = static_cast<Index>(rows.size());

    Matrix K = Matrix::Zero(n + a, n + a);
    Vector rhs = Vector::Zero(n + a);
    for (Index j = 0; j < n; ++j) {
        const bool at_lower = x[j] - lo[j] <= kActiveTol;
        const bool at_upper = hi[j] - x[j] <= kActiveTol;
        if (at_lower || at_upper) {
            K(j, j) = 1.0;
            rhs[j] = at_lower ? lo[j] : hi[j];
        } else {
            K.row(j).head(n) = G.row(j);
            for (Index r = 0; r < a; ++r) K(j, n + r) = A(rows[r], j);
            rhs[j] = -game.gradient_offset()[j];
        }
    }
    for (Index r = 0; r < a; ++r) {
        K.row(n + r).head(n) = A.row(rows[r]);
        rhs[n + r] = game.coupling_bound()[rows[r]];
    }
    const Vector sol = K.completeOrthogonalDecomposition().solve(rhs);
    if (!sol.allFinite()) return false;

    Vector x_new = project(game.action_set(), sol.head(n));
    Vector lambda_new = Vector::Zero(m);
    for (Index r = 0; r < a; ++r) lambda_new[rows[r]] = std::max(0.0, sol[n + r]);
    if (kkt_residual(game, x_new, lambda_new) > tol) return false;
    x = std::move(x_new);
    lambda = std::move(lambda_new);
    return true;
}

}  // namespace

EquilibriumReport oracle_vgne(const Game& game, const OracleOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("oracle_vgne: tolerance must be positive");
    const Index n = game.total_dim();
    const Index m = game.num_constraints();
    const Matrix& A = game.coupling_matrix();
    const Vector& b = game.coupling_bound();
    const ConvexSet& omega = game.action_set();

    Vector x = options.warm_x ? project(omega, *options.warm_x) : project(omega, Vector::Zero(n));
    Vector lambda = options.warm_lambda ? Vector(options.warm_lambda->cwiseMax(0.0)) : Vector(Vector::Zero(m));
    require_dim(x.size(), n, "oracle warm start x");
    require_dim(lambda.size(), m, "oracle warm start lambda");

    const GameConstants constants = game.is_quadratic() ? estimate_constants(game) : sample_constants(game, 400, 10.0, 1);
    const double norm_A = m > 0 ? Eigen::JacobiSVD<Matrix>(A).singularValues()(0) : 0.0;
    const double lipschitz = (game.is_quadratic() ? 1.0 : 2.0) * constants.theta0 + norm_A;
    const double gamma = 0.5 / lipschitz;

    EquilibriumReport report;
    auto finish = [&](Index it, bool checked) {
        report.x = x;
        report.lambda = lambda;
        report.kkt_residual = kkt_residual(game, x, lambda);
        report.iterations = it;
        report.active = activity(game, x, lambda);
        report.linear_solve_checked = checked;
        return report;
    };

    for (Index it = 0; it <= options.max_iter; ++it) {
        const double r = kkt_residual(game, x, lambda);
        if (game.is_quadratic() && it % 50 == 0) {
            Vector xp = x;
            Vector lp = lambda;
            if (polish(game, xp, lp, options.tol)) {
                x = std::move(xp);
                lambda = std::move(lp);
                return finish(it, true);
            }
        }
        if (r <= options.tol) return finish(it, false);
        if (it == options.max_iter) break;

        const Vector gx = pseudo_gradient(game, x) + A.transpose() * lambda;
        const Vector gl = b - A * x;
        const Vector xh = project(omega, x - gamma * gx);
        const Vector lh = (lambda - gamma * gl).cwiseMax(0.0);
        x = project(omega, x - gamma * (pseudo_gradient(game, xh) + A.transpose() * lh));
        lambda = (lambda - gamma * (b - A * xh)).cwiseMax(0.0);
        if (!x.allFinite() || !lambda.allFinite()) throw DivergenceError("oracle_vgne: iterates became non-finite");
    }
    throw ConvergenceError("oracle_vgne: no KKT point within " + std::to_string(options.max_iter) +
                           " iterations (residual " + std::to_string(kkt_residual(game, x, lambda)) +
                           "); check strong monotonicity and Slater's condition");
}

Vector lyapunov_coordinates(const Game& game, AgentModel model, const VectorRef& stacked) {
    if (model == AgentModel::single_integrator) return stacked;
    const Index skip = 2 * game.total_dim();
    return stacked.tail(stacked.size() - skip);
}

Vector lyapunov_reference(const Game& game, const Trajectory& traj, const EquilibriumReport& report) {
    const Index N = game.num_agents();
    const Index Nn = N * game.total_dim();
    const Index Nm = N * game.num_constraints();
    require_dim(report.x.size(), game.total_dim(), "lyapunov_reference (x*)");
    require_dim(report.lambda.size(), game.num_constraints(), "lyapunov_reference (lambda*)");
    const Vector last = lyapunov_coordinates(game, traj.model, traj.final().state);
    require_dim(last.size(), Nn + 2 * Nm, "lyapunov_reference (state)");
    Vector bar(Nn + 2 * Nm);
    bar << replicate(report.x, N), last.segment(Nn, Nm), replicate(report.lambda, N);
    return bar;
}

Trajectory monitor_channels(const Game& game, const CommGraph& graph, const Trajectory& traj,
                            const EquilibriumReport& report, const Game* reference) {
    if (traj.samples.empty()) throw std::invalid_argument("monitor_channels: empty trajectory");
    const Index N = game.num_agents();
    const Index Nn = N * game.total_dim();
    const Index Nm = N * game.num_constraints();
    const Vector bar = lyapunov_reference(game, traj, report);
    const Game& ref = reference ? *reference : game;
    if (ref.total_dim() != game.total_dim() || ref.num_constraints() > game.num_constraints()) {
        throw DimensionError("monitor_channels: reference game is incompatible with the simulated game");
    }

    Trajectory out = traj;
    for (TrajectorySample& s : out.samples) {
        const Vector omega = lyapunov_coordinates(game, traj.model, s.state);
        require_dim(omega.size(), Nn + 2 * Nm, "monitor_channels (sample)");
        const Vector lambda = omega.tail(Nm);
        MonitorValues mv = online_monitors(game, graph, s.x, omega.head(Nn), lambda);
        if (reference) {
            const Vector lam = s.lambda_mean.head(ref.num_constraints()).cwiseMax(0.0);
            mv.kkt_residual = kkt_residual(ref, s.x, lam);
            mv.coupling_violation =
                ref.num_constraints() > 0 ? (ref.coupling_matrix() * s.x - ref.coupling_bound()).cwiseMax(0.0).maxCoeff()
                                          : 0.0;
            mv.local_violation = ref.action_set().violation(s.x);
        }
        mv.lyapunov = 0.5 * (omega - bar).squaredNorm();
        s.monitors = mv;
    }
    return out;
}

LyapunovCheck check_lyapunov(const Trajectory& traj, double slack_per_step) {
    LyapunovCheck check;
    for (std::size_t k = 1; k < traj.samples.size(); ++k) {
        const TrajectorySample& prev = traj.samples[k - 1];
        const TrajectorySample& cur = traj.samples[k];
        const double increase = cur.monitors.lyapunov - prev.monitors.lyapunov;
        const double slack = slack_per_step * static_cast<double>(cur.step - prev.step);
        ++check.transitions;
        check.max_increase = std::max(check.max_increase, increase);
        if (!(increase <= slack)) ++check.violations;
    }
    return check;
}

LyapunovTracker::LyapunovTracker(const Game& game, AgentModel model, Vector omega_bar, double slack,
                                 const VectorRef& initial_stacked)
    : game_(&game), model_(model), omega_bar_(std::move(omega_bar)), slack_(slack) {
    const Vector omega = lyapunov_coordinates(game, model, initial_stacked);
    require_dim(omega.size(), omega_bar_.size(), "LyapunovTracker");
    last_ = 0.5 * (omega - omega_bar_).squaredNorm();
}

void LyapunovTracker::observe(const Vector& stacked) {
    const double value = 0.5 * (lyapunov_coordinates(*game_, model_, stacked) - omega_bar_).squaredNorm();
    const double increase = value - last_;
    ++check_.transitions;
    check_.max_increase = std::max(check_.max_increase, increase);
    if (!(increase <= slack_)) ++check_.violations;
    last_ = value;
}

StepObserver LyapunovTracker::observer() {
    return [this](Index, double, const Vector& stacked) { observe(stacked); };
}

}  // namespace vgne
