#include "vgne/network.hpp"

#include <Eigen/Eigenvalues>

#include <numeric>
#include <stdexcept>
#include <string>

namespace vgne {

namespace {

constexpr double kConnectivityTol = 1e-10;

class DisjointSets {
public:
    explicit DisjointSets(Index n) : parent_(static_cast<std::size_t>(n)) {
        std::iota(parent_.begin(), parent_.end(), Index{0});
    }
    Index find(Index a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(Index a, Index b) { parent_[find(a)] = find(b); }

private:
    std::vector<Index> parent_;
};

}  // namespace

CommGraph CommGraph::from_edges(Index num_nodes, const std::vector<Edge>& edges) {
    if (num_nodes < 1) throw std::invalid_argument("CommGraph: need at least one node");
    CommGraph g;
    g.W_ = Matrix::Zero(num_nodes, num_nodes);
    DisjointSets components(num_nodes);
    for (const Edge& e : edges) {
        if (e.i < 0 || e.j < 0 || e.i >= num_nodes || e.j >= num_nodes) {
            throw std::invalid_argument("CommGraph: edge (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                                        ") references a node outside 1.." + std::to_string(num_nodes));
        }
        if (e.i == e.j) throw std::invalid_argument("CommGraph: self-loop at node " + std::to_string(e.i + 1));
        if (!(e.weight > 0.0)) {
            throw std::invalid_argument("CommGraph: edge (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                                        ") has nonpositive weight");
        }
        g.W_(e.i, e.j) += e.weight;
        g.W_(e.j, e.i) += e.weight;
        components.unite(e.i, e.j);
    }
    g.edges_ = edges;
    g.L_ = Matrix(g.W_.rowwise().sum().asDiagonal()) - g.W_;

    Eigen::SelfAdjointEigenSolver<Matrix> eig(g.L_, Eigen::EigenvaluesOnly);
    const Vector& spectrum = eig.eigenvalues();
    g.lambda2_ = num_nodes > 1 ? spectrum(1) : 0.0;
    g.lambda_max_ = spectrum(num_nodes - 1);

    bool tree_connected = true;
    for (Index k = 1; k < num_nodes; ++k) tree_connected = tree_connected && components.find(k) == components.find(0);
    const bool spectral_connected = num_nodes == 1 || g.lambda2_ > kConnectivityTol;
    if (!tree_connected || !spectral_connected) {
        throw AssumptionError("CommGraph: communication graph is not connected (lambda_2 = " +
                              std::to_string(g.lambda2_) + ")");
    }
    return g;
}

void laplacian_apply_into(const CommGraph& graph, Index q, const VectorRef& y, Eigen::Ref<Vector> out) {
    const Index N = graph.num_nodes();
    require_dim(y.size(), N * q, "laplacian_apply");
    require_dim(out.size(), N * q, "laplacian_apply (output)");
    // Blocks are columns of a q x N view; (L (x) I_q) y = Y L since L is symmetric.
    Eigen::Map<const Matrix> Y(y.data(), q, N);
    Eigen::Map<Matrix> out_view(out.data(), q, N);
    out_view.noalias() = Y * graph.laplacian();
}

Vector laplacian_apply(const CommGraph& graph, Index q, const VectorRef& y) {
    Vector out(y.size());
    laplacian_apply_into(graph, q, y, out);
    return out;
}

}  // namespace vgne
