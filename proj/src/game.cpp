#include "vgne/game.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <random>
#include <stdexcept>

namespace vgne {

AgentSpec AgentSpec::with_quadratic_cost(QuadraticCost cost, ConvexSet local_set, Matrix A, Vector b, Index dim) {
    AgentSpec a;
    a.dim = dim;
    a.quadratic = std::move(cost);
    a.local_set = std::move(local_set);
    a.A = std::move(A);
    a.b = std::move(b);
    return a;
}

AgentSpec AgentSpec::with_gradient(Index dim, GradientFn gradient, ConvexSet local_set, Matrix A, Vector b) {
    AgentSpec a;
    a.dim = dim;
    a.gradient = std::move(gradient);
    a.local_set = std::move(local_set);
    a.A = std::move(A);
    a.b = std::move(b);
    return a;
}

Game::Game(std::vector<AgentSpec> agents) : agents_(std::move(agents)) {
    if (agents_.empty()) throw std::invalid_argument("Game: at least one agent is required");

    num_constraints_ = agents_.front().A.rows();
    std::vector<ConvexSet> factors;
    for (std::size_t i = 0; i < agents_.size(); ++i) {
        const AgentSpec& a = agents_[i];
        const std::string who = "agent " + std::to_string(i + 1);
        if (a.dim <= 0) throw std::invalid_argument(who + ": dimension must be positive");
        require_dim(a.local_set.dim(), a.dim, (who + " local set").c_str());
        require_dim(a.A.rows(), num_constraints_, (who + " coupling rows").c_str());
        require_dim(a.A.cols(), a.dim, (who + " coupling columns").c_str());
        require_dim(a.b.size(), num_constraints_, (who + " coupling bound").c_str());
        if (!a.quadratic && !a.gradient) throw std::invalid_argument(who + ": no cost gradient supplied");
        offsets_.push_back(total_dim_);
        total_dim_ += a.dim;
        factors.push_back(a.local_set);
        quadratic_ = quadratic_ && a.quadratic.has_value();
    }
    omega_ = ConvexSet::product(std::move(factors));

    A_.resize(num_constraints_, total_dim_);
    b_ = Vector::Zero(num_constraints_);
    b_stacked_.resize(num_constraints_ * num_agents());
    for (Index i = 0; i < num_agents(); ++i) {
        A_.middleCols(offsets_[i], agents_[i].dim) = agents_[i].A;
        b_ += agents_[i].b;
        b_stacked_.segment(i * num_constraints_, num_constraints_) = agents_[i].b;
    }

    if (quadratic_) {
        G_.resize(total_dim_, total_dim_);
        g_.resize(total_dim_);
        for (Index i = 0; i < num_agents(); ++i) {
            const QuadraticCost& cost = *agents_[i].quadratic;
            const std::string who = "agent " + std::to_string(i + 1);
            if (cost.Q.rows() != total_dim_ || cost.Q.cols() != total_dim_) {
                throw DimensionError(who + ": Q must be " + std::to_string(total_dim_) + "x" +
                                     std::to_string(total_dim_));
            }
            require_dim(cost.q.size(), total_dim_, (who + " q").c_str());
            const Index off = offsets_[i];
            const Index ni = agents_[i].dim;
            const Matrix own = cost.Q.block(off, off, ni, ni);
            if ((own - own.transpose()).norm() > 1e-12 * std::max(1.0, own.norm())) {
                throw std::invalid_argument(who + ": own diagonal block of Q must be symmetric");
            }
            Eigen::LLT<Matrix> llt(own);
            if (llt.info() != Eigen::Success) {
                throw std::invalid_argument(who + ": own diagonal block of Q must be positive definite");
            }
            G_.middleRows(off, ni) = cost.Q.middleRows(off, ni);
            g_.segment(off, ni) = cost.q.segment(off, ni);
        }
    }
}

Vector Game::agent_gradient(Index i, const VectorRef& profile) const {
    const AgentSpec& a = agents_[i];
    if (a.quadratic) {
        return G_.middleRows(offsets_[i], a.dim) * profile + g_.segment(offsets_[i], a.dim);
    }
    Vector grad = a.gradient(profile);
    require_dim(grad.size(), a.dim, "gradient callback result");
    return grad;
}

Vector pseudo_gradient(const Game& game, const VectorRef& x) {
    require_dim(x.size(), game.total_dim(), "pseudo_gradient");
    if (game.is_quadratic()) return game.jacobian() * x + game.gradient_offset();
    Vector out(game.total_dim());
    for (Index i = 0; i < game.num_agents(); ++i) {
        out.segment(game.agent_offset(i), game.agent_dim(i)) = game.agent_gradient(i, x);
    }
    return out;
}

Vector extended_pseudo_gradient(const Game& game, const VectorRef& xhat) {
    const Index n = game.total_dim();
    require_dim(xhat.size(), game.num_agents() * n, "extended_pseudo_gradient");
    Vector out(n);
    for (Index i = 0; i < game.num_agents(); ++i) {
        out.segment(game.agent_offset(i), game.agent_dim(i)) = game.agent_gradient(i, xhat.segment(i * n, n));
    }
    return out;
}

Vector select_own(const Game& game, const VectorRef& xhat) {
    const Index n = game.total_dim();
    require_dim(xhat.size(), game.num_agents() * n, "select_own");
    Vector x(n);
    for (Index i = 0; i < game.num_agents(); ++i) {
        const Index off = game.agent_offset(i);
        x.segment(off, game.agent_dim(i)) = xhat.segment(i * n + off, game.agent_dim(i));
    }
    return x;
}

Vector select_others(const Game& game, const VectorRef& xhat) {
    const Index n = game.total_dim();
    require_dim(xhat.size(), game.num_agents() * n, "select_others");
    Vector out((game.num_agents() - 1) * n);
    Index pos = 0;
    for (Index i = 0; i < game.num_agents(); ++i) {
        const Index off = game.agent_offset(i);
        const Index ni = game.agent_dim(i);
        const auto block = xhat.segment(i * n, n);
        out.segment(pos, off) = block.head(off);
        pos += off;
        out.segment(pos, n - off - ni) = block.tail(n - off - ni);
        pos += n - off - ni;
    }
    return out;
}

Vector embed(const Game& game, const VectorRef& x, const VectorRef& others) {
    const Index n = game.total_dim();
    const Index N = game.num_agents();
    require_dim(x.size(), n, "embed (own actions)");
    require_dim(others.size(), (N - 1) * n, "embed (estimates)");
    Vector xhat(N * n);
    Index pos = 0;
    for (Index i = 0; i < N; ++i) {
        const Index off = game.agent_offset(i);
        const Index ni = game.agent_dim(i);
        auto block = xhat.segment(i * n, n);
        block.head(off) = others.segment(pos, off);
        pos += off;
        block.segment(off, ni) = x.segment(off, ni);
        block.tail(n - off - ni) = others.segment(pos, n - off - ni);
        pos += n - off - ni;
    }
    return xhat;
}

Vector replicate(const VectorRef& x, Index copies) { return x.replicate(copies, 1); }

namespace {

void enforce_ordering(GameConstants& c) {
    // Any quotient of the extended map is also a valid lower bound on theta0,
    // and theta >= mu holds for the true constants.
    c.theta = std::max(c.theta, c.mu);
    c.theta0 = std::max(c.theta0, c.theta);
}

}  // namespace

GameConstants sample_constants(const Game& game, Index sample_count, double radius, std::uint64_t seed) {
    if (sample_count < 2) throw std::invalid_argument("estimate_constants: sample_count must be >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("estimate_constants: sampling radius must be positive");

    const Index n = game.total_dim();
    const Index N = game.num_agents();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-radius, radius);
    auto draw = [&](Index size) {
        Vector v(size);
        for (Index k = 0; k < size; ++k) v[k] = unif(rng);
        return v;
    };

    GameConstants c;
    c.mu = kInf;
    for (Index s = 0; s < sample_count; ++s) {
        const Vector x = draw(n);
        const Vector y = draw(n);
        const Vector dx = x - y;
        const double d2 = dx.squaredNorm();
        if (d2 == 0.0) continue;
        const Vector dF = pseudo_gradient(game, x) - pseudo_gradient(game, y);
        c.mu = std::min(c.mu, dx.dot(dF) / d2);
        c.theta0 = std::max(c.theta0, dF.norm() / std::sqrt(d2));

        const Vector xh = draw(N * n);
        Vector yh = draw(N * n);
        if (s % 2 == 1) {
            // Same estimates of others, different own blocks.
            yh = embed(game, select_own(game, yh), select_others(game, xh));
        }
        const Vector dxh = xh - yh;
        const double dh = dxh.norm();
        if (dh == 0.0) continue;
        const double q = (extended_pseudo_gradient(game, xh) - extended_pseudo_gradient(game, yh)).norm() / dh;
        c.theta = std::max(c.theta, q);
    }
    c.exact = false;
    enforce_ordering(c);
    return c;
}

GameConstants estimate_constants(const Game& game, Index sample_count, double radius, std::uint64_t seed) {
    if (sample_count < 2) throw std::invalid_argument("estimate_constants: sample_count must be >= 2");
    if (!(radius > 0.0)) throw std::invalid_argument("estimate_constants: sampling radius must be positive");
    if (!game.is_quadratic()) return sample_constants(game, sample_count, radius, seed);

    const Matrix& G = game.jacobian();
    const Matrix sym = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
    Eigen::JacobiSVD<Matrix> svd(G);
    GameConstants c;
    c.mu = eig.eigenvalues()(0);
    c.theta0 = svd.singularValues()(0);
    c.theta = c.theta0;
    c.exact = true;
    return c;
}

double kkt_residual(const Game& game, const VectorRef& x, const VectorRef& lambda) {
    require_dim(x.size(), game.total_dim(), "kkt_residual (x)");
    require_dim(lambda.size(), game.num_constraints(), "kkt_residual (lambda)");
    if (lambda.size() > 0 && lambda.minCoeff() < -kMembershipTol) {
        throw std::domain_error("kkt_residual: multipliers must be nonnegative");
    }
    const Matrix& A = game.coupling_matrix();
    const Vector primal = x - project(game.action_set(), x - pseudo_gradient(game, x) - A.transpose() * lambda);
    const Vector dual = lambda - (lambda + A * x - game.coupling_bound()).cwiseMax(0.0);
    return primal.norm() + dual.norm();
}

Game dualize_local_sets(const Game& game) {
    struct Row {
        Index agent;
        Index coord;
        double sign;
        double bound;
    };
    std::vector<Row> rows;
    for (Index i = 0; i < game.num_agents(); ++i) {
        const ConvexSet& set = game.agent(i).local_set;
        for (Index k = 0; k < set.dim(); ++k) {
            if (std::isfinite(set.upper()[k])) rows.push_back({i, k, 1.0, set.upper()[k]});
            if (std::isfinite(set.lower()[k])) rows.push_back({i, k, -1.0, -set.lower()[k]});
        }
    }
    const Index m0 = game.num_constraints();
    const Index m = m0 + static_cast<Index>(rows.size());

    std::vector<AgentSpec> agents = game.agents();
    for (Index i = 0; i < game.num_agents(); ++i) {
        AgentSpec& a = agents[i];
        Matrix A = Matrix::Zero(m, a.dim);
        Vector b = Vector::Zero(m);
        A.topRows(m0) = a.A;
        b.head(m0) = a.b;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].agent != i) continue;
            A(m0 + static_cast<Index>(r), rows[r].coord) = rows[r].sign;
            b(m0 + static_cast<Index>(r)) = rows[r].bound;
        }
        a.A = std::move(A);
        a.b = std::move(b);
        a.local_set = ConvexSet::full_space(a.dim);
    }
    return Game(std::move(agents));
}

}  // namespace vgne
