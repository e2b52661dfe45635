#include "vgne/scenarios.hpp"

#include "vgne/analysis.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace vgne {

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::single: return "single";
        case RunMode::double_integrator: return "double";
        case RunMode::both: return "both";
    }
    return "single";
}

RunMode parse_run_mode(const std::string& text) {
    if (text == "single") return RunMode::single;
    if (text == "double") return RunMode::double_integrator;
    if (text == "both") return RunMode::both;
    throw std::invalid_argument("unknown mode '" + text + "' (expected single, double or both)");
}

void validate_scenario(const ScenarioSpec& spec) {
    const Game& g = spec.game;
    if (g.num_agents() < 2) throw std::invalid_argument("scenario '" + spec.name + "': at least two agents are required");
    if (spec.graph.num_nodes() != g.num_agents()) {
        throw DimensionError("scenario '" + spec.name + "': graph has " + std::to_string(spec.graph.num_nodes()) +
                             " nodes for " + std::to_string(g.num_agents()) + " agents");
    }
    require_dim(spec.initial_positions.size(), g.total_dim(), "initial positions");
    require_dim(spec.initial_velocities.size(), g.total_dim(), "initial velocities");
    require_dim(spec.gains.size(), g.num_agents(), "gains h");
    if (!(spec.flow.c > 0.0)) throw std::invalid_argument("scenario '" + spec.name + "': c must be positive");
    if (!spec.auto_step && !(spec.flow.step > 0.0)) throw std::invalid_argument("step must be positive");
    if (!(spec.flow.t_max > 0.0) || !(spec.flow.stop_tol > 0.0) || spec.flow.record_stride < 1) {
        throw std::invalid_argument("scenario '" + spec.name + "': t_max, stop_tol and record_stride must be positive");
    }
    GainsH gains(spec.gains);  // validates positivity
    (void)gains;
    const bool wants_double = spec.mode != RunMode::single;
    if (wants_double && !g.action_set().is_full_space() && !spec.dualize_local_sets) {
        throw AssumptionError("scenario '" + spec.name +
                              "': double-integrator mode needs unconstrained local sets (Omega = R^n); "
                              "set dualize_local_sets to move the bounds into the coupling constraints");
    }
}

GameConstants scenario_constants(const ScenarioSpec& spec) {
    if (spec.constants) return *spec.constants;
    return estimate_constants(spec.game, 200, 10.0, spec.seed);
}

double scenario_step(const ScenarioSpec& spec) {
    if (!spec.auto_step) return spec.flow.step;
    return default_step(scenario_constants(spec).theta0, spec.flow.c, spec.graph);
}

namespace {

std::vector<Edge> ring(Index n) {
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, 1.0});
    return edges;
}

}  // namespace

std::vector<Eigen::Vector2d> default_sensor_offsets() {
    return {{0.239, -0.651}, {0.537, 0.891}, {-0.052, 0.867}, {0.086, 0.235}, {-0.084, -0.52}};
}

Vector default_sensor_positions() {
    Vector p(10);
    p << -0.348, 0.204, 0.125, -0.034, -0.474, 0.204, -0.011, 0.448, 0.045, -0.029;
    return p;
}

ScenarioSpec sensor_network_scenario(const std::vector<Eigen::Vector2d>& offsets, std::uint64_t seed) {
    constexpr Index N = 5;
    constexpr Index d = 2;
    constexpr Index n = N * d;
    if (static_cast<Index>(offsets.size()) != N) {
        throw std::invalid_argument("sensor network: expected 5 offset vectors r_i, got " +
                                    std::to_string(offsets.size()));
    }
    const std::vector<Edge> edges = ring(N);
    const Index m = 4 * static_cast<Index>(edges.size());

    // Chebyshev distance <= 0.2 per edge: +-(p_i - p_j) <= 0.2 per coordinate.
    Matrix A = Matrix::Zero(m, n);
    Index row = 0;
    for (const Edge& e : edges) {
        for (Index coord = 0; coord < d; ++coord) {
            for (double sign : {1.0, -1.0}) {
                A(row, e.i * d + coord) = sign;
                A(row, e.j * d + coord) = -sign;
                ++row;
            }
        }
    }
    const Vector b_share = Vector::Constant(m, 0.2 / static_cast<double>(N));

    std::vector<AgentSpec> agents;
    for (Index i = 0; i < N; ++i) {
        // Hessian of J_i over the full profile.
        Matrix Q = Matrix::Zero(n, n);
        for (Index j = 0; j < N; ++j) {
            if (j == i) continue;
            Q.block(i * d, i * d, d, d) += 2.0 * Matrix::Identity(d, d);
            Q.block(j * d, j * d, d, d) += 2.0 * Matrix::Identity(d, d);
            Q.block(i * d, j * d, d, d) -= 2.0 * Matrix::Identity(d, d);
            Q.block(j * d, i * d, d, d) -= 2.0 * Matrix::Identity(d, d);
        }
        Q.block(i * d, i * d, d, d) += 2.0 * Matrix::Identity(d, d);
        Vector q = Vector::Zero(n);
        q.segment(i * d, d) = offsets[static_cast<std::size_t>(i)];

        Vector lo(2), hi(2);
        lo << -kInf, 0.1;
        hi << kInf, 0.5;
        agents.push_back(AgentSpec::with_quadratic_cost({Q, q}, ConvexSet::box(lo, hi), A.middleCols(i * d, d),
                                                        b_share, d));
    }

    FlowParams flow;
    flow.c = 30.0;
    flow.t_max = 1000.0;
    flow.stop_tol = 1e-8;
    flow.record_stride = 100;

    return ScenarioSpec{"sensor-network",
                        Game(std::move(agents)),
                        CommGraph::from_edges(N, edges),
                        flow,
                        true,
                        Vector::Ones(N),
                        default_sensor_positions(),
                        Vector::Zero(n),
                        seed,
                        RunMode::both,
                        true,
                        std::nullopt,
                        std::nullopt};
}

ScenarioSpec two_agent_scenario(bool coupled) {
    Matrix Q1(2, 2), Q2(2, 2);
    Q1 << 2, 1, 1, 0;
    Q2 << 0, 1, 1, 2;
    Vector q1(2), q2(2);
    q1 << -1, 0;
    q2 << 0, -2;
    const Index m = coupled ? 1 : 0;
    const Matrix A = Matrix::Ones(m, 1);
    const Vector b = Vector::Constant(m, 0.25);
    std::vector<AgentSpec> agents{
        AgentSpec::with_quadratic_cost({Q1, q1}, ConvexSet::full_space(1), A, b, 1),
        AgentSpec::with_quadratic_cost({Q2, q2}, ConvexSet::full_space(1), A, b, 1)};

    FlowParams flow;
    flow.c = 10.0;
    flow.t_max = 200.0;
    flow.stop_tol = 1e-8;
    flow.record_stride = 10;
    Vector x0(2);
    x0 << 1.0, -1.0;

    return ScenarioSpec{coupled ? "twoagent-coupled" : "twoagent",
                        Game(std::move(agents)),
                        CommGraph::from_edges(2, {{0, 1, 1.0}}),
                        flow,
                        true,
                        Vector::Ones(2),
                        x0,
                        Vector::Zero(2),
                        0,
                        RunMode::both,
                        false,
                        std::nullopt,
                        std::nullopt};
}

ScenarioSpec random_quadratic_game(Index num_agents, Index agent_dim, Index num_constraints, double mu_target,
                                   std::uint64_t seed) {
    if (num_agents < 2 || agent_dim < 1 || num_constraints < 0) {
        throw std::invalid_argument("random_quadratic_game: need N >= 2, n_i >= 1, m >= 0");
    }
    if (!(mu_target > 0.0)) throw std::invalid_argument("random_quadratic_game: mu_target must be positive");

    const Index N = num_agents;
    const Index d = agent_dim;
    const Index n = N * d;
    const Index m = num_constraints;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto gaussian = [&](Index rows, Index cols, double scale) {
        Matrix M(rows, cols);
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c) M(r, c) = scale * normal(rng);
        return M;
    };
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };

    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const Matrix R = gaussian(n, n, scale);
    const Matrix S = R * R.transpose() + mu_target * Matrix::Identity(n, n);
    Matrix K = gaussian(n, n, 0.5 * scale);
    K = 0.5 * (K - K.transpose()).eval();
    for (Index i = 0; i < N; ++i) K.block(i * d, i * d, d, d).setZero();
    const Matrix G = S + K;
    const Vector g = gaussian(n, 1, 2.0);

    const Vector interior = gaussian(n, 1, 0.5);
    const Matrix A = gaussian(m, n, 1.0);
    Vector b = A * interior;
    for (Index k = 0; k < m; ++k) b[k] += uniform(0.2, 1.0);

    std::vector<AgentSpec> agents;
    for (Index i = 0; i < N; ++i) {
        Matrix Q = Matrix::Zero(n, n);
        Q.middleRows(i * d, d) = G.middleRows(i * d, d);
        Q.middleCols(i * d, d) = G.middleRows(i * d, d).transpose();
        Vector q = Vector::Zero(n);
        q.segment(i * d, d) = g.segment(i * d, d);

        Vector lo = Vector::Constant(d, -kInf);
        Vector hi = Vector::Constant(d, kInf);
        for (Index k = 0; k < d; ++k) {
            if (unif(rng) < 0.5) {
                lo[k] = interior[i * d + k] - uniform(0.3, 1.5);
                hi[k] = interior[i * d + k] + uniform(0.3, 1.5);
            }
        }
        agents.push_back(AgentSpec::with_quadratic_cost({Q, q}, ConvexSet::box(lo, hi), A.middleCols(i * d, d),
                                                        b / static_cast<double>(N), d));
    }

    std::vector<Edge> edges;
    for (Index k = 1; k < N; ++k) {
        const Index parent = static_cast<Index>(unif(rng) * static_cast<double>(k)) % k;
        edges.push_back({parent, k, uniform(0.5, 1.5)});
    }
    for (Index i = 0; i < N; ++i) {
        for (Index j = i + 1; j < N; ++j) {
            const bool already = std::any_of(edges.begin(), edges.end(), [&](const Edge& e) {
                return (e.i == i && e.j == j) || (e.i == j && e.j == i);
            });
            if (!already && unif(rng) < 0.4) edges.push_back({i, j, uniform(0.5, 1.5)});
        }
    }

    Vector gains(N);
    for (Index i = 0; i < N; ++i) gains[i] = uniform(0.5, 2.0);
    const Vector positions = interior + gaussian(n, 1, 1.5);
    const Vector velocities = gaussian(n, 1, 0.3);

    Game game(std::move(agents));
    CommGraph graph = CommGraph::from_edges(N, edges);
    const GameConstants constants = estimate_constants(game);
    FlowParams flow;
    flow.c = 1.5 * certify(game, graph, constants, 1.0).c_threshold;
    flow.t_max = 400.0;
    flow.stop_tol = 1e-8;
    flow.record_stride = 100;

    return ScenarioSpec{"random-" + std::to_string(seed),
                        std::move(game),
                        std::move(graph),
                        flow,
                        true,
                        gains,
                        positions,
                        velocities,
                        seed,
                        RunMode::both,
                        true,
                        std::nullopt,
                        interior};
}

namespace {

ScenarioSpec random_suite_member(std::uint64_t k) {
    const Index N = 2 + static_cast<Index>(k % 5);
    const Index m = static_cast<Index>(k % 4);
    const Index d = 1 + static_cast<Index>((k / 5) % 2);
    ScenarioSpec spec = random_quadratic_game(N, d, m, 1.0, k);
    spec.name = "random:" + std::to_string(k);
    return spec;
}

}  // namespace

ScenarioSpec builtin_scenario(const std::string& name) {
    if (name == "sensor-network") return sensor_network_scenario(default_sensor_offsets());
    if (name == "twoagent") return two_agent_scenario(false);
    if (name == "twoagent-coupled") return two_agent_scenario(true);
    const std::string prefix = "random:";
    if (name.rfind(prefix, 0) == 0) {
        const std::string digits = name.substr(prefix.size());
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("random scenario needs a numeric seed, got '" + name + "'");
        }
        return random_suite_member(std::stoull(digits));
    }
    throw std::invalid_argument("unknown built-in scenario '" + name + "'");
}

std::vector<std::string> builtin_scenario_names() {
    return {"sensor-network", "twoagent", "twoagent-coupled", "random:<seed>"};
}

}  // namespace vgne
