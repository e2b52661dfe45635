#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "vgne/analysis.hpp"
#include "vgne/scenarios.hpp"

#include <cmath>
#include <random>

using namespace vgne;

namespace {

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index k = 0;
    for (double x : xs) v[k++] = x;
    return v;
}

double eig_min(const Eigen::Matrix2d& M) {
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(M).eigenvalues()(0);
}

}  // namespace

TEST_CASE("compute_cert examples") {
    const ConvergenceCert at6 = compute_cert(1.0, 3.0, 3.0, 2, 2.0, 6.0);
    CHECK(at6.c_threshold == doctest::Approx((36.0 + 12.0) / 8.0));
    CHECK(at6.c_threshold == doctest::Approx(6.0));
    CHECK_FALSE(at6.satisfied);
    CHECK(at6.lambda_min_M <= 0.0);

    const ConvergenceCert at10 = compute_cert(1.0, 3.0, 3.0, 2, 2.0, 10.0);
    CHECK(at10.satisfied);
    CHECK(at10.lambda_min_M > 0.0);
    CHECK(at10.lambda_min_M == doctest::Approx(eig_min(at10.M)).epsilon(1e-12));
    CHECK(at10.M(0, 0) == doctest::Approx(0.5));
    CHECK(at10.M(0, 1) == doctest::Approx(-3.0 / std::sqrt(2.0)));
    CHECK(at10.M(1, 0) == at10.M(0, 1));
    CHECK(at10.M(1, 1) == doctest::Approx(17.0));
}

TEST_CASE("compute_cert degenerate single agent") {
    const double mu = 0.7;
    const double lambda2 = 1.3;
    const ConvergenceCert cert = compute_cert(mu, mu, mu, 1, lambda2, 5.0);
    Eigen::Matrix2d M;
    M << mu, -mu, -mu, 5.0 * lambda2 - mu;
    CHECK((cert.M - M).norm() <= 1e-15);
    CHECK(cert.c_threshold == doctest::Approx(2 * mu / lambda2).epsilon(1e-12));
    for (double c : {0.5, 1.0, 1.07, 1.08, 2.0, 10.0}) {
        const bool pd = mu * (c * lambda2 - mu) > mu * mu;
        CHECK(compute_cert(mu, mu, mu, 1, lambda2, c).satisfied == pd);
    }
}

TEST_CASE("compute_cert input errors") {
    CHECK_THROWS(compute_cert(0.0, 3, 3, 2, 2, 10));
    CHECK_THROWS(compute_cert(1.0, 3, 3, 2, 0.0, 10));
    CHECK_THROWS(compute_cert(1.0, 2, 3, 2, 2, 10));  // theta0 < theta
    CHECK_THROWS(compute_cert(1.0, 3, 0.5, 2, 2, 10));  // theta < mu
    CHECK_THROWS(compute_cert(1.0, 3, 3, 0, 2, 10));
    CHECK_THROWS(compute_cert(1.0, 3, 3, 2, 2, 0.0));
}

TEST_CASE("threshold sharpness on sampled constants") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> u(0.05, 5.0);
    for (int k = 0; k < 2000; ++k) {
        const double mu = u(rng);
        const double theta = mu + u(rng);
        const double theta0 = theta + u(rng);
        const double lambda2 = u(rng);
        const Index N = 1 + k % 8;
        const double cbar = compute_cert(mu, theta0, theta, N, lambda2, 1.0).c_threshold;
        const ConvergenceCert above = compute_cert(mu, theta0, theta, N, lambda2, cbar * (1 + 1e-6));
        const ConvergenceCert below = compute_cert(mu, theta0, theta, N, lambda2, cbar * (1 - 1e-6));
        CHECK(above.lambda_min_M > 0.0);
        CHECK(above.satisfied);
        CHECK(below.lambda_min_M <= 0.0);
        CHECK_FALSE(below.satisfied);
        // Cross-check the closed form against a generic eigensolver where it is well conditioned.
        const ConvergenceCert far = compute_cert(mu, theta0, theta, N, lambda2, 2 * cbar);
        CHECK(far.lambda_min_M == doctest::Approx(eig_min(far.M)).epsilon(1e-8));
    }
}

TEST_CASE("restricted strong monotonicity above the threshold") {
    std::mt19937_64 rng(52);
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const ScenarioSpec spec = builtin_scenario("random:" + std::to_string(seed));
        const Game& g = spec.game;
        const Index N = g.num_agents();
        const Index n = g.total_dim();
        const GameConstants k = estimate_constants(g);
        const double cbar = certify(g, spec.graph, k, 1.0).c_threshold;
        const ConvergenceCert cert = certify(g, spec.graph, k, 1.01 * cbar);
        REQUIRE(cert.satisfied);
        const Matrix Lx = oracle::kron_identity(spec.graph.laplacian(), n);
        const Matrix R = oracle::dense_R(g);
        for (int s = 0; s < 200; ++s) {
            const Vector xh = oracle::random_vector(rng, N * n, 3.0);
            const Vector xc = oracle::tile(oracle::random_vector(rng, n, 3.0), N);
            const Vector d = xh - xc;
            const Vector dF = oracle::dense_extended_gradient(g, xh) - oracle::dense_extended_gradient(g, xc);
            const double lhs = d.dot(R.transpose() * dF + cert.c_used * Lx * d);
            CHECK(lhs >= cert.lambda_min_M * d.squaredNorm() - 1e-10 * d.squaredNorm());
        }
    }
}

TEST_CASE("oracle examples") {
    const EquilibriumReport free = oracle_vgne(fixture::scalar_game(false));
    CHECK((free.x - vec({0, 1})).norm() <= 1e-10);
    CHECK(free.lambda.size() == 0);

    const EquilibriumReport coupled = oracle_vgne(fixture::scalar_game(true));
    CHECK((coupled.x - vec({-0.25, 0.75})).norm() <= 1e-10);
    CHECK(coupled.lambda[0] == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(coupled.kkt_residual <= 1e-10);
    CHECK(coupled.active.size() == 1);
    CHECK(coupled.active[0]);
}

TEST_CASE("oracle agrees with active-set enumeration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ScenarioSpec spec = builtin_scenario("random:" + std::to_string(seed));
        const Game d = dualize_local_sets(spec.game);
        if (d.num_constraints() > 12) continue;
        const auto ref = oracle::enumerate_kkt(d.jacobian(), d.gradient_offset(), d.coupling_matrix(),
                                               d.coupling_bound());
        REQUIRE(ref);
        const EquilibriumReport rep = oracle_vgne(spec.game);
        CHECK((rep.x - ref->x).norm() <= 1e-8);
        CHECK(kkt_residual(spec.game, rep.x, rep.lambda) <= 1e-10);
    }
}

TEST_CASE("oracle tolerance and warm start stability") {
    for (std::uint64_t seed : {3, 9, 14}) {
        const Game g = builtin_scenario("random:" + std::to_string(seed)).game;
        OracleOptions loose;
        loose.tol = 1e-8;
        const EquilibriumReport a = oracle_vgne(g, loose);
        OracleOptions tight;
        tight.tol = 1e-9;
        const EquilibriumReport b = oracle_vgne(g, tight);
        CHECK((a.x - b.x).norm() <= 1e-8);

        OracleOptions warm;
        warm.warm_x = b.x;
        warm.warm_lambda = b.lambda;
        const EquilibriumReport c = oracle_vgne(g, warm);
        CHECK((c.x - b.x).norm() <= 1e-10);
        CHECK((c.lambda - b.lambda).norm() <= 1e-9);
    }
}

TEST_CASE("oracle gives up on infeasible constraints") {
    // x1 + x2 <= -10 and -(x1 + x2) <= -10 cannot hold together.
    Matrix Q1(2, 2), Q2(2, 2);
    Q1 << 2, 1, 1, 0;
    Q2 << 0, 1, 1, 2;
    Matrix A(2, 1);
    A << 1, -1;
    std::vector<AgentSpec> agents{
        AgentSpec::with_quadratic_cost({Q1, vec({-1, 0})}, ConvexSet::full_space(1), A, vec({-5, -5}), 1),
        AgentSpec::with_quadratic_cost({Q2, vec({0, -2})}, ConvexSet::full_space(1), A, vec({-5, -5}), 1)};
    OracleOptions opts;
    opts.max_iter = 20000;
    CHECK_THROWS_AS(oracle_vgne(Game(std::move(agents)), opts), ConvergenceError);
}

TEST_CASE("monitor channels of a converged run") {
    const ScenarioSpec spec = builtin_scenario("twoagent-coupled");
    FlowParams p = spec.flow;
    p.step = scenario_step(spec);
    const EquilibriumReport eq = oracle_vgne(spec.game);
    const Trajectory raw =
        simulate_single(spec.game, spec.graph, p, initial_single_state(spec.game, spec.initial_positions));
    const Trajectory traj = monitor_channels(spec.game, spec.graph, raw, eq);
    REQUIRE(traj.samples.size() == raw.samples.size());
    const MonitorValues& last = traj.final().monitors;
    const double tol = 10 * p.stop_tol;
    CHECK(last.kkt_residual <= tol);
    CHECK(last.consensus_x <= tol);
    CHECK(last.consensus_lambda <= tol);
    CHECK(last.coupling_violation <= tol);
    CHECK(last.local_violation <= tol);
    CHECK(last.lyapunov <= tol);
    for (const auto& s : raw.samples) CHECK(std::isnan(s.monitors.lyapunov));

    const LyapunovCheck check = check_lyapunov(traj, 10 * p.step * p.step);
    CHECK(check.transitions == static_cast<Index>(traj.samples.size()) - 1);
    CHECK(check.monotone());

    // The reference point: 1 (x) x*, the final z, 1 (x) lambda*.
    const Vector bar = lyapunov_reference(spec.game, raw, eq);
    CHECK(bar.head(4) == replicate(eq.x, 2));
    CHECK(bar.tail(2) == replicate(eq.lambda, 2));
    CHECK(bar.segment(4, 2) == raw.final().state.segment(4, 2));
}

TEST_CASE("monitor channels below the threshold are still computed") {
    ScenarioSpec spec = builtin_scenario("twoagent-coupled");
    FlowParams p = spec.flow;
    p.c = 0.1 * certify(spec.game, spec.graph, scenario_constants(spec), 1.0).c_threshold;
    p.step = default_step(3.0, p.c, spec.graph);
    p.t_max = 50.0;
    const EquilibriumReport eq = oracle_vgne(spec.game);
    const Trajectory traj = monitor_channels(
        spec.game, spec.graph,
        simulate_single(spec.game, spec.graph, p, initial_single_state(spec.game, spec.initial_positions)), eq);
    for (const auto& s : traj.samples) CHECK(std::isfinite(s.monitors.lyapunov));
    const LyapunovCheck check = check_lyapunov(traj, 10 * p.step * p.step);
    CHECK(check.transitions > 0);
}

TEST_CASE("monitor_channels rejects mismatched inputs") {
    const ScenarioSpec spec = builtin_scenario("twoagent-coupled");
    FlowParams p = spec.flow;
    p.step = scenario_step(spec);
    p.t_max = 1.0;
    const Trajectory raw =
        simulate_single(spec.game, spec.graph, p, initial_single_state(spec.game, spec.initial_positions));
    EquilibriumReport wrong = oracle_vgne(spec.game);
    wrong.x = vec({1, 2, 3});
    CHECK_THROWS_AS(monitor_channels(spec.game, spec.graph, raw, wrong), DimensionError);
    CHECK_THROWS(monitor_channels(spec.game, spec.graph, Trajectory{}, oracle_vgne(spec.game)));
}

TEST_CASE("LyapunovTracker counts increases beyond the slack") {
    const Game g = fixture::scalar_game(false);
    const Vector bar = Vector::Zero(4);
    LyapunovTracker t(g, AgentModel::single_integrator, bar, 0.01, vec({1, 0, 0, 0}));
    CHECK(t.last_value() == doctest::Approx(0.5));
    t.observe(vec({0.5, 0, 0, 0}));
    t.observe(vec({0.55, 0, 0, 0}));  // increase 0.02625 > 0.01
    t.observe(vec({0.56, 0, 0, 0}));  // increase 0.00555 within slack
    CHECK(t.result().transitions == 3);
    CHECK(t.result().violations == 1);
    CHECK(t.result().fraction_ok() == doctest::Approx(2.0 / 3.0));
}
