#pragma once

#include "vgne/flow_double.hpp"
#include "vgne/flow_single.hpp"
#include "vgne/game.hpp"
#include "vgne/network.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vgne {

enum class RunMode { single, double_integrator, both };

std::string to_string(RunMode mode);
RunMode parse_run_mode(const std::string& text);

struct ScenarioSpec {
    std::string name;
    Game game;
    CommGraph graph;
    FlowParams flow;
    bool auto_step = true;  // derive flow.step from default_step() at run time
    Vector gains;           // h_i for double integrators
    Vector initial_positions;
    Vector initial_velocities;
    std::uint64_t seed = 0;
    RunMode mode = RunMode::single;
    bool dualize_local_sets = false;
    std::optional<GameConstants> constants;  // user-supplied; estimated when empty
    std::optional<Vector> interior_point;    // strictly feasible point, when known
};

/// Checks dimensions, N >= 2, and that double-integrator runs either have
/// unconstrained local sets or ask for dualization. Throws on violation.
void validate_scenario(const ScenarioSpec& spec);

/// Constants used for certification: the supplied ones, else estimate_constants.
GameConstants scenario_constants(const ScenarioSpec& spec);

/// Step size for a run: the configured one, or default_step() when auto.
double scenario_step(const ScenarioSpec& spec);

/// Five planar robots with J_i = p_i^T p_i + p_i^T r_i + sum_j |p_i - p_j|^2,
/// local bounds 0.1 <= y_i <= 0.5, Chebyshev distance <= 0.2 between ring
/// neighbours, c = 30.
ScenarioSpec sensor_network_scenario(const std::vector<Eigen::Vector2d>& offsets, std::uint64_t seed = 2020);

/// The committed r_i used by the built-in sensor network.
std::vector<Eigen::Vector2d> default_sensor_offsets();
/// The committed initial positions used by the built-in sensor network.
Vector default_sensor_positions();

/// J_1 = x1^2 + x1 x2 - x1, J_2 = x2^2 + x1 x2 - 2 x2 on a single edge;
/// optionally with the shared constraint x1 + x2 <= 0.5.
ScenarioSpec two_agent_scenario(bool coupled);

/// Random quadratic game whose pseudo-gradient Jacobian has symmetric part
/// bounded below by mu_target, random coupling rows with a recorded strictly
/// feasible point, random boxes around it, a random connected graph and
/// c = 1.5 times the certificate threshold.
ScenarioSpec random_quadratic_game(Index num_agents, Index agent_dim, Index num_constraints, double mu_target,
                                   std::uint64_t seed);

/// "sensor-network", "twoagent", "twoagent-coupled" or "random:<seed>".
ScenarioSpec builtin_scenario(const std::string& name);
std::vector<std::string> builtin_scenario_names();

}  // namespace vgne
