#pragma once

#include "vgne/convex_sets.hpp"
#include "vgne/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace vgne {

/// Gradient of an agent's cost with respect to its own action, evaluated at a
/// full action profile (own block included). Returns an n_i-vector.
using GradientFn = std::function<Vector(const VectorRef& profile)>;

/// J_i(x) = 1/2 x^T Q x + q^T x over the full profile x. Only the agent's rows
/// of Q and q enter its gradient.
struct QuadraticCost {
    Matrix Q;
    Vector q;
};

struct AgentSpec {
    Index dim = 0;
    std::optional<QuadraticCost> quadratic;
    GradientFn gradient;  // used when quadratic is empty
    ConvexSet local_set;
    Matrix A;  // m x dim
    Vector b;  // m

    static AgentSpec with_quadratic_cost(QuadraticCost cost, ConvexSet local_set, Matrix A, Vector b, Index dim);
    static AgentSpec with_gradient(Index dim, GradientFn gradient, ConvexSet local_set, Matrix A, Vector b);
};

/// A generalized game with affine coupling constraints sum_i A_i x_i <= sum_i b_i.
/// Immutable after construction.
class Game {
public:
    explicit Game(std::vector<AgentSpec> agents);

    Index num_agents() const { return static_cast<Index>(agents_.size()); }
    Index total_dim() const { return total_dim_; }
    Index num_constraints() const { return num_constraints_; }
    Index agent_dim(Index i) const { return agents_[i].dim; }
    Index agent_offset(Index i) const { return offsets_[i]; }
    const AgentSpec& agent(Index i) const { return agents_[i]; }
    const std::vector<AgentSpec>& agents() const { return agents_; }

    /// A = [A_1 ... A_N]
    const Matrix& coupling_matrix() const { return A_; }
    /// b = sum_i b_i
    const Vector& coupling_bound() const { return b_; }
    /// col(b_i)
    const Vector& stacked_bounds() const { return b_stacked_; }
    /// Omega = Omega_1 x ... x Omega_N
    const ConvexSet& action_set() const { return omega_; }

    bool is_quadratic() const { return quadratic_; }
    /// Stacked pseudo-gradient Jacobian G (rows of agent i taken from Q_i);
    /// F(x) = G x + g. Only valid for quadratic games.
    const Matrix& jacobian() const { return G_; }
    const Vector& gradient_offset() const { return g_; }

    /// Agent i's own-variable gradient at the full profile.
    Vector agent_gradient(Index i, const VectorRef& profile) const;

private:
    std::vector<AgentSpec> agents_;
    std::vector<Index> offsets_;
    Index total_dim_ = 0;
    Index num_constraints_ = 0;
    Matrix A_;
    Vector b_;
    Vector b_stacked_;
    ConvexSet omega_;
    bool quadratic_ = true;
    Matrix G_;
    Vector g_;
};

/// F(x) = col(grad_{x_i} J_i(x_i, x_{-i})).
Vector pseudo_gradient(const Game& game, const VectorRef& x);

/// col(grad_{x_i} J_i(x_i, xhat^i_{-i})): each agent's gradient at its own
/// estimate vector xhat^i (N*n stacked).
Vector extended_pseudo_gradient(const Game& game, const VectorRef& xhat);

/// x = R xhat: the own block of every estimate vector.
Vector select_own(const Game& game, const VectorRef& xhat);
/// S xhat: every estimate vector with its own block removed, (N-1)*n entries.
Vector select_others(const Game& game, const VectorRef& xhat);
/// R^T x + S^T others.
Vector embed(const Game& game, const VectorRef& x, const VectorRef& others);
/// 1_N (x) x
Vector replicate(const VectorRef& x, Index copies);

/// Strong-monotonicity and Lipschitz constants of F (mu, theta0) and the
/// Lipschitz constant of the extended pseudo-gradient (theta).
struct GameConstants {
    double mu = 0.0;
    double theta0 = 0.0;
    double theta = 0.0;
    bool exact = false;
};

/// Exact values from the Jacobian for quadratic games (theta is taken as
/// theta0, the Lipschitz bound the extended map inherits); sampled difference
/// quotients otherwise, clamped so that mu <= theta <= theta0.
GameConstants estimate_constants(const Game& game, Index sample_count = 200, double radius = 10.0,
                                 std::uint64_t seed = 0);

/// Sampled difference-quotient estimates regardless of the cost representation.
GameConstants sample_constants(const Game& game, Index sample_count, double radius, std::uint64_t seed);

/// Natural residual of the KKT inclusions:
/// |x - P_Omega(x - F(x) - A^T lambda)| + |lambda - P_{>=0}(lambda + A x - b)|.
double kkt_residual(const Game& game, const VectorRef& x, const VectorRef& lambda);

/// Rewrites finite bounds of every Omega_i as extra coupling rows (appended
/// after the existing ones, bound placed in the owning agent's b_i) and makes
/// every Omega_i the full space.
Game dualize_local_sets(const Game& game);

}  // namespace vgne
