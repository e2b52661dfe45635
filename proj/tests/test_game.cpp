#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"
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

// Same scalar game given through gradient callbacks instead of quadratic data.
Game callback_scalar_game() {
    std::vector<AgentSpec> agents;
    agents.push_back(AgentSpec::with_gradient(
        1, [](const VectorRef& x) { return Vector::Constant(1, 2 * x[0] + x[1] - 1); }, ConvexSet::full_space(1),
        Matrix(0, 1), Vector(0)));
    agents.push_back(AgentSpec::with_gradient(
        1, [](const VectorRef& x) { return Vector::Constant(1, x[0] + 2 * x[1] - 2); }, ConvexSet::full_space(1),
        Matrix(0, 1), Vector(0)));
    return Game(std::move(agents));
}

}  // namespace

TEST_CASE("pseudo_gradient of the scalar game") {
    const Game g = fixture::scalar_game(false);
    CHECK(pseudo_gradient(g, vec({0, 0})) == vec({-1, -2}));
    CHECK(pseudo_gradient(g, vec({0, 1})).norm() == 0.0);
    // Hand derivative F(x) = (2x1 + x2 - 1, x1 + 2x2 - 2).
    CHECK(pseudo_gradient(g, vec({0.3, -1.7})).isApprox(vec({2 * 0.3 - 1.7 - 1, 0.3 - 3.4 - 2}), 1e-14));
    CHECK_THROWS_AS(pseudo_gradient(g, vec({0, 0, 0})), DimensionError);
}

TEST_CASE("sensor game gradient at a common point") {
    std::vector<Eigen::Vector2d> zero(5, Eigen::Vector2d::Zero());
    const ScenarioSpec spec = sensor_network_scenario(zero);
    const Vector p = vec({0.3, 0.2});
    const Vector x = replicate(p, 5);
    const Vector F = pseudo_gradient(spec.game, x);
    for (Index i = 0; i < 5; ++i) CHECK(F.segment(2 * i, 2).isApprox(2 * p, 1e-14));
}

TEST_CASE("sensor game gradient matches the hand derivative") {
    const auto r = default_sensor_offsets();
    const ScenarioSpec spec = sensor_network_scenario(r);
    std::mt19937_64 rng(5);
    const Vector x = oracle::random_vector(rng, 10);
    const Vector F = pseudo_gradient(spec.game, x);
    for (Index i = 0; i < 5; ++i) {
        Eigen::Vector2d expect = 2 * x.segment<2>(2 * i) + r[i];
        for (Index j = 0; j < 5; ++j) expect += 2 * (x.segment<2>(2 * i) - x.segment<2>(2 * j));
        CHECK((F.segment(2 * i, 2) - expect).norm() <= 1e-12);
    }
}

TEST_CASE("extended_pseudo_gradient") {
    const Game g = fixture::scalar_game(false);
    CHECK(extended_pseudo_gradient(g, vec({0, 0, 1, 1})) == vec({-1, 1}));

    std::mt19937_64 rng(3);
    const Vector x = oracle::random_vector(rng, 2);
    CHECK(extended_pseudo_gradient(g, replicate(x, 2)) == pseudo_gradient(g, x));
    CHECK_THROWS_AS(extended_pseudo_gradient(g, vec({0, 0, 1})), DimensionError);

    // One agent: the estimate is the action itself.
    Matrix Q(1, 1);
    Q << 1;
    Game one({AgentSpec::with_quadratic_cost({Q, vec({0.5})}, ConvexSet::full_space(1), Matrix(0, 1), Vector(0), 1)});
    CHECK(extended_pseudo_gradient(one, vec({2})) == vec({2.5}));
    CHECK(pseudo_gradient(one, vec({2})) == vec({2.5}));
}

TEST_CASE("extended_pseudo_gradient matches a dense evaluation") {
    std::mt19937_64 rng(4);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const ScenarioSpec spec = builtin_scenario("random:" + std::to_string(seed));
        const Game& g = spec.game;
        const Vector xhat = oracle::random_vector(rng, g.num_agents() * g.total_dim());
        CHECK((extended_pseudo_gradient(g, xhat) - oracle::dense_extended_gradient(g, xhat)).norm() <= 1e-12);
        const Vector x = oracle::random_vector(rng, g.total_dim());
        CHECK((extended_pseudo_gradient(g, replicate(x, g.num_agents())) - pseudo_gradient(g, x)).norm() == 0.0);
    }
}

TEST_CASE("callback games agree with quadratic data") {
    const Game q = fixture::scalar_game(false);
    const Game cb = callback_scalar_game();
    CHECK_FALSE(cb.is_quadratic());
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
        const Vector xh = oracle::random_vector(rng, 4);
        CHECK((extended_pseudo_gradient(cb, xh) - extended_pseudo_gradient(q, xh)).norm() <= 1e-14);
    }
    const GameConstants c = estimate_constants(cb, 400, 10.0, 1);
    CHECK_FALSE(c.exact);
    CHECK(c.mu <= c.theta);
    CHECK(c.theta <= c.theta0);
    CHECK(c.mu >= 1.0 - 1e-9);
    CHECK(c.theta0 <= 3.0 + 1e-9);
}

TEST_CASE("selection operators") {
    const Game g = fixture::scalar_game(false);
    const Vector xhat = vec({1, 2, 3, 4});  // ((a,b),(c,d))
    CHECK(select_own(g, xhat) == vec({1, 4}));
    CHECK(select_others(g, xhat) == vec({2, 3}));
    CHECK(embed(g, select_own(g, xhat), select_others(g, xhat)) == xhat);
}

TEST_CASE("selection operators match dense R and S") {
    std::mt19937_64 rng(6);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Game g = builtin_scenario("random:" + std::to_string(seed)).game;
        const Matrix R = oracle::dense_R(g);
        const Matrix S = oracle::dense_S(g);
        CHECK((R.transpose() * R + S.transpose() * S - Matrix::Identity(R.cols(), R.cols())).norm() == 0.0);
        const Vector xhat = oracle::random_vector(rng, R.cols());
        CHECK(select_own(g, xhat) == R * xhat);
        CHECK(select_others(g, xhat) == S * xhat);
        CHECK(embed(g, select_own(g, xhat), select_others(g, xhat)) == xhat);
    }
}

TEST_CASE("estimate_constants on quadratic games") {
    const GameConstants c = estimate_constants(fixture::scalar_game(false));
    CHECK(c.exact);
    CHECK(c.mu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.theta0 == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(c.mu <= c.theta);
    CHECK(c.theta <= c.theta0);
    CHECK_THROWS(estimate_constants(fixture::scalar_game(false), 1));
    CHECK_THROWS(estimate_constants(callback_scalar_game(), 200, 0.0));
}

TEST_CASE("monotonicity and Lipschitz bounds on random samples") {
    std::mt19937_64 rng(7);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Game g = builtin_scenario("random:" + std::to_string(seed)).game;
        const GameConstants c = estimate_constants(g);
        const Index n = g.total_dim();
        const Index N = g.num_agents();
        for (int k = 0; k < 200; ++k) {
            const Vector x = oracle::random_vector(rng, n, 5.0);
            const Vector y = oracle::random_vector(rng, n, 5.0);
            const Vector dF = pseudo_gradient(g, x) - pseudo_gradient(g, y);
            CHECK((x - y).dot(dF) >= c.mu * (x - y).squaredNorm() * (1 - 1e-12));
            CHECK(dF.norm() <= c.theta0 * (x - y).norm() * (1 + 1e-12));

            const Vector xh = oracle::random_vector(rng, N * n, 5.0);
            const Vector yh = oracle::random_vector(rng, N * n, 5.0);
            const double q = (extended_pseudo_gradient(g, xh) - extended_pseudo_gradient(g, yh)).norm();
            CHECK(q <= c.theta0 * (xh - yh).norm() * (1 + 1e-12));
            CHECK(q <= c.theta * (xh - yh).norm() * (1 + 1e-12));
        }
    }
}

TEST_CASE("kkt_residual examples") {
    const Game free = fixture::scalar_game(false);
    CHECK(kkt_residual(free, vec({0, 1}), Vector(0)) == 0.0);
    CHECK(kkt_residual(free, vec({0, 0}), Vector(0)) == doctest::Approx(std::sqrt(5.0)));

    const Game coupled = fixture::scalar_game(true);
    CHECK(kkt_residual(coupled, vec({-0.25, 0.75}), vec({0.75})) <= 1e-15);
    CHECK(kkt_residual(coupled, vec({0, 1}), vec({0})) > 0.1);
    CHECK_THROWS(kkt_residual(coupled, vec({0, 1}), vec({-1})));
    CHECK_THROWS_AS(kkt_residual(coupled, vec({0, 1}), Vector(0)), DimensionError);
}

TEST_CASE("hand KKT solution of the coupled scalar game") {
    // Active constraint: [G A^T; A 0] (x, lambda) = (-g, b).
    const Game g = fixture::scalar_game(true);
    const auto p = oracle::enumerate_kkt(g.jacobian(), g.gradient_offset(), g.coupling_matrix(), g.coupling_bound());
    REQUIRE(p);
    CHECK((p->x - vec({-0.25, 0.75})).norm() <= 1e-14);
    CHECK(p->lambda[0] == doctest::Approx(0.75));
}

TEST_CASE("game construction errors") {
    Matrix Q(2, 2);
    Q << -1, 0, 0, 1;
    std::vector<AgentSpec> agents{
        AgentSpec::with_quadratic_cost({Q, Vector::Zero(2)}, ConvexSet::full_space(1), Matrix(0, 1), Vector(0), 1),
        AgentSpec::with_quadratic_cost({-Q, Vector::Zero(2)}, ConvexSet::full_space(1), Matrix(0, 1), Vector(0), 1)};
    CHECK_THROWS(Game(agents));  // agent 1's own block is not positive definite

    Matrix I = Matrix::Identity(2, 2);
    std::vector<AgentSpec> mismatched{
        AgentSpec::with_quadratic_cost({I, Vector::Zero(2)}, ConvexSet::full_space(1), Matrix::Ones(1, 1), vec({0}), 1),
        AgentSpec::with_quadratic_cost({I, Vector::Zero(2)}, ConvexSet::full_space(1), Matrix::Ones(2, 1), vec({0, 0}),
                                       1)};
    CHECK_THROWS(Game(mismatched));  // agents disagree on m

    std::vector<AgentSpec> bad_set{
        AgentSpec::with_quadratic_cost({I, Vector::Zero(2)}, ConvexSet::full_space(2), Matrix(0, 1), Vector(0), 1),
        AgentSpec::with_quadratic_cost({I, Vector::Zero(2)}, ConvexSet::full_space(1), Matrix(0, 1), Vector(0), 1)};
    CHECK_THROWS(Game(bad_set));
}

TEST_CASE("aggregated coupling data") {
    const Game g = fixture::scalar_game(true);
    CHECK(g.num_agents() == 2);
    CHECK(g.num_constraints() == 1);
    CHECK(g.coupling_matrix() == Matrix::Ones(1, 2));
    CHECK(g.coupling_bound() == vec({0.5}));
    CHECK(g.stacked_bounds() == vec({0.25, 0.25}));
}

TEST_CASE("dualize_local_sets") {
    const Game g = fixture::scalar_game(true, true);
    const Game d = dualize_local_sets(g);
    CHECK(d.action_set().is_full_space());
    CHECK(d.num_constraints() == 1 + 4);
    CHECK(d.coupling_bound().head(1) == g.coupling_bound());

    // Same feasible set: every sampled x is feasible for one iff for the other.
    std::mt19937_64 rng(8);
    for (int k = 0; k < 200; ++k) {
        const Vector x = oracle::random_vector(rng, 2, 2.0);
        const bool in_g = g.action_set().contains(x, 0.0) &&
                          ((g.coupling_matrix() * x - g.coupling_bound()).array() <= 0).all();
        const bool in_d = ((d.coupling_matrix() * x - d.coupling_bound()).array() <= 0).all();
        CHECK(in_g == in_d);
    }
    // Same v-GNE.
    const auto p = oracle::enumerate_kkt(d.jacobian(), d.gradient_offset(), d.coupling_matrix(), d.coupling_bound());
    REQUIRE(p);
    CHECK((p->x - vec({-0.25, 0.75})).norm() <= 1e-12);
}
