#pragma once

#include "vgne/game.hpp"
#include "vgne/network.hpp"

namespace fixture {

using vgne::Matrix;
using vgne::Vector;

/// J_1 = x1^2 + x1 x2 - x1, J_2 = x2^2 + x1 x2 - 2 x2, optionally with
/// x1 + x2 <= 0.5 split evenly between the agents.
inline vgne::Game scalar_game(bool coupled, bool boxed = false) {
    using vgne::AgentSpec;
    using vgne::ConvexSet;
    Matrix Q1(2, 2), Q2(2, 2);
    Q1 << 2, 1, 1, 0;
    Q2 << 0, 1, 1, 2;
    const Vector q1 = (Vector(2) << -1, 0).finished();
    const Vector q2 = (Vector(2) << 0, -2).finished();
    const vgne::Index m = coupled ? 1 : 0;
    const Matrix A = Matrix::Ones(m, 1);
    const Vector b = Vector::Constant(m, 0.25);
    auto set = [&] {
        return boxed ? ConvexSet::box(Vector::Constant(1, -2.0), Vector::Constant(1, 2.0)) : ConvexSet::full_space(1);
    };
    std::vector<AgentSpec> agents;
    agents.push_back(AgentSpec::with_quadratic_cost({Q1, q1}, set(), A, b, 1));
    agents.push_back(AgentSpec::with_quadratic_cost({Q2, q2}, set(), A, b, 1));
    return vgne::Game(std::move(agents));
}

inline vgne::CommGraph edge_graph() { return vgne::CommGraph::from_edges(2, {{0, 1, 1.0}}); }

}  // namespace fixture
