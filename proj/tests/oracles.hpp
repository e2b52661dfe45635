// Independent reference implementations used only by the tests. Everything
// here is written densely and directly from the definitions, without going
// through the library's index maps or blockwise kernels.
#pragma once

#include "vgne/game.hpp"
#include "vgne/network.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using vgne::Index;
using vgne::Matrix;
using vgne::Vector;

inline Vector random_vector(std::mt19937_64& rng, Index n, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    Vector v(n);
    for (Index k = 0; k < n; ++k) v[k] = normal(rng);
    return v;
}

/// 1_N (x) v
inline Vector tile(const Vector& v, Index copies) {
    Vector out(v.size() * copies);
    for (Index i = 0; i < copies; ++i) out.segment(i * v.size(), v.size()) = v;
    return out;
}

inline Matrix kron_identity(const Matrix& L, Index q) {
    const Index N = L.rows();
    Matrix K = Matrix::Zero(N * q, N * q);
    for (Index i = 0; i < N; ++i)
        for (Index j = 0; j < N; ++j) K.block(i * q, j * q, q, q) = L(i, j) * Matrix::Identity(q, q);
    return K;
}

/// L = D - W assembled from the edge list.
inline Matrix laplacian_from_edges(Index N, const std::vector<vgne::Edge>& edges) {
    Matrix L = Matrix::Zero(N, N);
    for (const auto& e : edges) {
        L(e.i, e.i) += e.weight;
        L(e.j, e.j) += e.weight;
        L(e.i, e.j) -= e.weight;
        L(e.j, e.i) -= e.weight;
    }
    return L;
}

/// R picks x_i out of xhat^i.
inline Matrix dense_R(const vgne::Game& g) {
    const Index N = g.num_agents();
    const Index n = g.total_dim();
    Matrix R = Matrix::Zero(n, N * n);
    for (Index i = 0; i < N; ++i) {
        const Index o = g.agent_offset(i);
        for (Index k = 0; k < g.agent_dim(i); ++k) R(o + k, i * n + o + k) = 1.0;
    }
    return R;
}

/// S picks xhat^i_{-i} (agent order, own block removed).
inline Matrix dense_S(const vgne::Game& g) {
    const Index N = g.num_agents();
    const Index n = g.total_dim();
    Matrix S = Matrix::Zero((N - 1) * n, N * n);
    Index row = 0;
    for (Index i = 0; i < N; ++i) {
        const Index o = g.agent_offset(i);
        for (Index k = 0; k < n; ++k) {
            if (k >= o && k < o + g.agent_dim(i)) continue;
            S(row++, i * n + k) = 1.0;
        }
    }
    return S;
}

/// blkdiag(A_1, ..., A_N)
inline Matrix dense_Lambda(const vgne::Game& g) {
    const Index N = g.num_agents();
    const Index m = g.num_constraints();
    Matrix Lam = Matrix::Zero(N * m, g.total_dim());
    for (Index i = 0; i < N; ++i) Lam.block(i * m, g.agent_offset(i), m, g.agent_dim(i)) = g.agent(i).A;
    return Lam;
}

/// Extended pseudo-gradient of a quadratic game from the per-agent cost rows:
/// row block i is [Q_i xhat^i + q_i]_{rows of agent i}.
inline Vector dense_extended_gradient(const vgne::Game& g, const Vector& xhat) {
    const Index n = g.total_dim();
    Vector out(n);
    for (Index i = 0; i < g.num_agents(); ++i) {
        const auto& cost = *g.agent(i).quadratic;
        const Index o = g.agent_offset(i);
        const Index d = g.agent_dim(i);
        const Vector est = xhat.segment(i * n, n);
        out.segment(o, d) = cost.Q.middleRows(o, d) * est + cost.q.segment(o, d);
    }
    return out;
}

/// Componentwise tangent-cone rule for a box, written from scratch.
inline Vector box_tangent(const Vector& lo, const Vector& hi, const Vector& x, const Vector& v, double tol = 1e-9) {
    Vector t = v;
    for (Index k = 0; k < x.size(); ++k) {
        if (std::abs(x[k] - lo[k]) <= tol && v[k] < 0) t[k] = 0;
        if (std::abs(x[k] - hi[k]) <= tol && v[k] > 0) t[k] = 0;
    }
    return t;
}

struct DenseField {
    Vector xhat;
    Vector z;
    Vector lambda;
};

/// Closed-loop field of the single-integrator dynamics from dense matrices:
///   own blocks  : T_Omega(-(F(xhat) + Lambda^T lambda) - c R L_x xhat)
///   estimates   : -c S L_x xhat
///   z           : L_l lambda
///   lambda      : T_{>=0}(Lambda R xhat - b - L_l lambda - L_l z)
inline DenseField dense_field_single(const vgne::Game& g, const Matrix& L, double c, const Vector& xhat,
                                     const Vector& z, const Vector& lambda) {
    const Index n = g.total_dim();
    const Index m = g.num_constraints();
    const Matrix Lx = kron_identity(L, n);
    const Matrix Ll = kron_identity(L, m);
    const Matrix R = dense_R(g);
    const Matrix S = dense_S(g);
    const Matrix Lam = dense_Lambda(g);
    const Vector b = g.stacked_bounds();

    const Vector x = R * xhat;
    Vector own = -(dense_extended_gradient(g, xhat) + Lam.transpose() * lambda) - c * R * Lx * xhat;
    own = box_tangent(g.action_set().lower(), g.action_set().upper(), x, own);
    const Vector others = -c * S * Lx * xhat;

    DenseField f;
    f.xhat = R.transpose() * own + S.transpose() * others;
    f.z = Ll * lambda;
    Vector dl = Lam * x - b - Ll * lambda - Ll * z;
    for (Index k = 0; k < dl.size(); ++k)
        if (std::abs(lambda[k]) <= 1e-9 && dl[k] < 0) dl[k] = 0;
    f.lambda = dl;
    return f;
}

struct KktPoint {
    Vector x;
    Vector lambda;
};

/// v-GNE of a quadratic game over Omega = R^n by enumerating every active set
/// of the coupling rows and keeping the one that satisfies all KKT conditions.
/// Exponential in m; meant for m <= 6 or so.
inline std::optional<KktPoint> enumerate_kkt(const Matrix& G, const Vector& gvec, const Matrix& A, const Vector& b,
                                             double tol = 1e-9) {
    const Index n = G.rows();
    const Index m = A.rows();
    for (Index mask = 0; mask < (Index(1) << m); ++mask) {
        std::vector<Index> act;
        for (Index k = 0; k < m; ++k)
            if (mask & (Index(1) << k)) act.push_back(k);
        const Index a = static_cast<Index>(act.size());
        Matrix K = Matrix::Zero(n + a, n + a);
        Vector rhs(n + a);
        K.topLeftCorner(n, n) = G;
        rhs.head(n) = -gvec;
        for (Index r = 0; r < a; ++r) {
            K.block(0, n + r, n, 1) = A.row(act[r]).transpose();
            K.block(n + r, 0, 1, n) = A.row(act[r]);
            rhs[n + r] = b[act[r]];
        }
        Eigen::FullPivLU<Matrix> lu(K);
        if (!lu.isInvertible()) continue;
        const Vector sol = lu.solve(rhs);
        KktPoint p{sol.head(n), Vector::Zero(m)};
        for (Index r = 0; r < a; ++r) p.lambda[act[r]] = sol[n + r];
        if ((p.lambda.array() < -tol).any()) continue;
        if (((A * p.x - b).array() > tol).any()) continue;
        return p;
    }
    return std::nullopt;
}

}  // namespace oracle
