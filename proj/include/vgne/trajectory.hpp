#pragma once

#include "vgne/game.hpp"
#include "vgne/network.hpp"
#include "vgne/types.hpp"

#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace vgne {

enum class AgentModel { single_integrator, double_integrator };

enum class StopReason {
    converged,     // step residual fell below the stop tolerance
    time_budget,   // t_max reached first
};

std::string to_string(AgentModel model);
std::string to_string(StopReason reason);

/// Monitor channels recorded with every sample. The Lyapunov value needs the
/// equilibrium and is filled by a post-pass (NaN until then).
struct MonitorValues {
    double kkt_residual = 0.0;
    double lyapunov = std::numeric_limits<double>::quiet_NaN();
    double consensus_x = 0.0;       // |L_x xhat| (zetahat for double integrators)
    double consensus_lambda = 0.0;  // |L_lambda lambda|
    double coupling_violation = 0.0;
    double local_violation = 0.0;
};

struct TrajectorySample {
    Index step = 0;
    double t = 0.0;
    Vector state;        // stacked controller state as produced by the integrator
    Vector x;            // true actions
    Vector v;            // velocities (double integrators only, else empty)
    Vector lambda_mean;  // average multiplier estimate
    MonitorValues monitors;
};

struct Trajectory {
    AgentModel model = AgentModel::single_integrator;
    double step = 0.0;
    Index record_stride = 1;
    Index steps = 0;
    StopReason stop = StopReason::time_budget;
    double final_residual = 0.0;  // |s_{k+1} - s_k| / h at the last step
    std::vector<TrajectorySample> samples;

    const TrajectorySample& final() const { return samples.back(); }
};

/// Called after every integration step with (step index, time, stacked state).
using StepObserver = std::function<void(Index, double, const Vector&)>;

/// Mean of the per-agent multiplier blocks of col(lambda_i).
Vector mean_block(const VectorRef& stacked, Index blocks);

/// Online channels (everything except the Lyapunov value) at one state.
/// `estimates` is the N*n estimate vector, `lambda` the N*m multiplier stack.
MonitorValues online_monitors(const Game& game, const CommGraph& graph, const VectorRef& x,
                              const VectorRef& estimates, const VectorRef& lambda);

}  // namespace vgne
