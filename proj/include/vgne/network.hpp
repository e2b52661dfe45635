#pragma once

#include "vgne/types.hpp"

#include <vector>

namespace vgne {

/// Undirected weighted edge between agents i and j (0-based).
struct Edge {
    Index i = 0;
    Index j = 0;
    double weight = 1.0;
};

/// Weighted undirected communication graph with its Laplacian
/// L = diag(W 1) - W and cached extreme spectrum.
class CommGraph {
public:
    /// Builds the graph; throws std::invalid_argument on self-loops,
    /// out-of-range nodes or nonpositive weights, and AssumptionError when the
    /// graph is disconnected.
    static CommGraph from_edges(Index num_nodes, const std::vector<Edge>& edges);

    Index num_nodes() const { return W_.rows(); }
    const Matrix& adjacency() const { return W_; }
    const Matrix& laplacian() const { return L_; }
    const std::vector<Edge>& edges() const { return edges_; }

    /// lambda_2(L); zero for a single node.
    double algebraic_connectivity() const { return lambda2_; }
    double max_eigenvalue() const { return lambda_max_; }

private:
    Matrix W_;
    Matrix L_;
    std::vector<Edge> edges_;
    double lambda2_ = 0.0;
    double lambda_max_ = 0.0;
};

/// (L (x) I_q) y, computed blockwise.
Vector laplacian_apply(const CommGraph& graph, Index q, const VectorRef& y);

/// In-place variant writing into out (must not alias y).
void laplacian_apply_into(const CommGraph& graph, Index q, const VectorRef& y, Eigen::Ref<Vector> out);

}  // namespace vgne
