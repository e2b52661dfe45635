#pragma once

#include "vgne/flow_double.hpp"
#include "vgne/flow_single.hpp"
#include "vgne/game.hpp"
#include "vgne/network.hpp"
#include "vgne/trajectory.hpp"

#include <optional>
#include <vector>

namespace vgne {

/// Restricted strong monotonicity certificate:
///   M = [[mu/N, -(theta0+theta)/(2 sqrt N)], [-(theta0+theta)/(2 sqrt N), c lambda2 - theta]]
///   c_threshold = ((theta0+theta)^2 + 4 mu theta) / (4 mu lambda2)
/// satisfied iff c_used > c_threshold (equivalently M positive definite).
struct ConvergenceCert {
    double mu = 0.0;
    double theta0 = 0.0;
    double theta = 0.0;
    double lambda2 = 0.0;
    Index num_agents = 0;
    Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
    double lambda_min_M = 0.0;
    double c_threshold = 0.0;
    double c_used = 0.0;
    bool satisfied = false;
};

/// Throws std::invalid_argument unless mu > 0, theta0 >= theta >= mu and
/// lambda2 > 0. A gain at or below the threshold is reported through
/// `satisfied`, not as an error.
ConvergenceCert compute_cert(double mu, double theta0, double theta, Index num_agents, double lambda2, double c);

ConvergenceCert certify(const Game& game, const CommGraph& graph, const GameConstants& constants, double c);

struct EquilibriumReport {
    Vector x;
    Vector lambda;
    double kkt_residual = 0.0;
    Index iterations = 0;
    std::vector<bool> active;      // per coupling row: tight at x
    bool linear_solve_checked = false;  // confirmed by a direct solve on the active set
};

struct OracleOptions {
    double tol = 1e-10;
    Index max_iter = 2'000'000;
    std::optional<Vector> warm_x;
    std::optional<Vector> warm_lambda;
};

/// Full-information v-GNE solver used as ground truth: extragradient
/// iterations on (x, lambda) -> (F(x) + A^T lambda, b - A x) with projections
/// onto Omega and the orthant. For quadratic games the iterate is polished by
/// solving the KKT equations on the identified active set.
/// Throws ConvergenceError when max_iter is exhausted.
EquilibriumReport oracle_vgne(const Game& game, const OracleOptions& options = {});

/// Result of scanning a Lyapunov sequence for increases.
struct LyapunovCheck {
    Index transitions = 0;
    Index violations = 0;  // increases beyond the slack
    double max_increase = 0.0;
    bool monotone() const { return violations == 0; }
    double fraction_ok() const {
        return transitions == 0 ? 1.0 : 1.0 - static_cast<double>(violations) / static_cast<double>(transitions);
    }
};

/// The equilibrium the Lyapunov channel is measured against:
/// (1 (x) x*, z_bar, 1 (x) lambda*), z_bar taken from the trajectory's last
/// sample. For double integrators this is the (zetahat, z, lambda) subsystem.
Vector lyapunov_reference(const Game& game, const Trajectory& traj, const EquilibriumReport& report);

/// Slice of a stacked trajectory state that the Lyapunov function covers.
Vector lyapunov_coordinates(const Game& game, AgentModel model, const VectorRef& stacked);

/// Fills the Lyapunov channel and recomputes the residual channels.
/// `report` must belong to `game` (the simulated game). When `reference` is
/// given (e.g. the game before its local sets were dualized), KKT residual and
/// violations are measured against it, using the leading multiplier entries.
Trajectory monitor_channels(const Game& game, const CommGraph& graph, const Trajectory& traj,
                            const EquilibriumReport& report, const Game* reference = nullptr);

/// Scans consecutive recorded samples; the allowed increase between two
/// samples is slack_per_step times the number of steps separating them.
LyapunovCheck check_lyapunov(const Trajectory& traj, double slack_per_step);

/// Step observer tracking V(omega_k) = 1/2 |omega_k - omega_bar|^2 at every
/// integration step; use with simulate_single / simulate_double to replay a
/// run once its limit is known.
class LyapunovTracker {
public:
    LyapunovTracker(const Game& game, AgentModel model, Vector omega_bar, double slack, const VectorRef& initial_stacked);

    void observe(const Vector& stacked);
    StepObserver observer();
    const LyapunovCheck& result() const { return check_; }
    double last_value() const { return last_; }

private:
    const Game* game_;
    AgentModel model_;
    Vector omega_bar_;
    double slack_;
    double last_;
    LyapunovCheck check_;
};

}  // namespace vgne
