#include "vgne/trajectory.hpp"

namespace vgne {

std::string to_string(AgentModel model) {
    return model == AgentModel::single_integrator ? "single" : "double";
}

std::string to_string(StopReason reason) {
    return reason == StopReason::converged ? "converged" : "time_budget";
}

Vector mean_block(const VectorRef& stacked, Index blocks) {
    const Index q = stacked.size() / blocks;
    require_dim(stacked.size(), q * blocks, "mean_block");
    Eigen::Map<const Matrix> view(stacked.data(), q, blocks);
    return view.rowwise().mean();
}

MonitorValues online_monitors(const Game& game, const CommGraph& graph, const VectorRef& x,
                              const VectorRef& estimates, const VectorRef& lambda) {
    const Index N = game.num_agents();
    const Index m = game.num_constraints();
    MonitorValues mv;
    const Vector lam = m > 0 ? mean_block(lambda, N) : Vector();
    mv.kkt_residual = kkt_residual(game, x, lam.cwiseMax(0.0));
    mv.consensus_x = laplacian_apply(graph, game.total_dim(), estimates).norm();
    mv.consensus_lambda = m > 0 ? laplacian_apply(graph, m, lambda).norm() : 0.0;
    mv.coupling_violation =
        m > 0 ? (game.coupling_matrix() * x - game.coupling_bound()).cwiseMax(0.0).maxCoeff() : 0.0;
    mv.local_violation = game.action_set().violation(x);
    return mv;
}

}  // namespace vgne
