#pragma once

#include "vgne/analysis.hpp"
#include "vgne/config.hpp"
#include "vgne/scenarios.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vgne::cli {

enum ExitCode : int { kOk = 0, kError = 1, kBudget = 2 };

/// Run-time overrides from `--override key=value`. Keys: c, h (alias step),
/// t_max, stop_tol (alias eps_stop), seed, mode.
struct Overrides {
    std::optional<double> c;
    std::optional<double> step;
    std::optional<double> t_max;
    std::optional<double> stop_tol;
    std::optional<std::uint64_t> seed;
    std::optional<RunMode> mode;
};

/// Parses and type-checks one `key=value` pair into `into`; throws
/// ConfigError on unknown keys or malformed values.
void parse_override(const std::string& assignment, Overrides& into);

/// A changed seed redraws the initial positions (Gaussian perturbation of the
/// configured ones, sd 0.5) and velocities (sd 0.3).
void apply_overrides(ScenarioSpec& spec, const Overrides& overrides);

struct RunConfig {
    std::string scenario;  // built-in name or path
    Overrides overrides;
    std::filesystem::path output_dir;
};

/// $VGNE_OUTPUT_DIR when set, else ./vgne-out.
std::filesystem::path default_output_dir();

/// Final certificates of one simulated mode.
struct ModeSummary {
    AgentModel model = AgentModel::single_integrator;
    Trajectory trajectory;  // with monitor channels filled
    double kkt_residual = 0.0;
    double distance_to_oracle = 0.0;
    LyapunovCheck lyapunov;
    double wall_time = 0.0;
    bool certified = false;  // converged and every final residual within kCertTol
};

inline constexpr double kCertTol = 1e-6;

struct RunResult {
    int exit_code = kError;
    ScenarioSpec spec;
    ConvergenceCert cert;
    GameConstants constants;
    EquilibriumReport oracle;
    std::vector<ModeSummary> modes;
    std::optional<double> mode_agreement;  // |x_single - x_double| when both ran
    double wall_time = 0.0;
};

/// Executes a run and writes trajectory.csv, per-channel .dat files and
/// summary.json under cfg.output_dir. Messages go to `log`.
RunResult execute_run(const RunConfig& cfg, std::ostream& log);

/// Header of the trajectory CSV for a trajectory of the given model.
std::vector<std::string> trajectory_columns(AgentModel model, Index n, Index num_multipliers);

void write_trajectory_csv(const Trajectory& traj, const std::filesystem::path& path);

/// Parsed trajectory CSV: column names and rows of equal width.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    Index column(const std::string& name) const;  // -1 when absent
};

/// Throws ConfigError ("schema error: ...") on ragged, non-numeric or
/// empty input.
CsvTable read_trajectory_csv(const std::filesystem::path& path);

struct AnalysisResult {
    bool passed = false;
    double max_lyapunov_increase = 0.0;
    bool lyapunov_monotone = false;
    double final_kkt = 0.0;
    double final_consensus_x = 0.0;
    double final_consensus_lambda = 0.0;
    double max_coupling_violation = 0.0;
    double final_coupling_violation = 0.0;
    double max_local_violation = 0.0;
    double final_local_violation = 0.0;
    std::optional<double> local_settle_time;  // from here on local violation < 1e-3
    double channel_mismatch = 0.0;            // recomputed vs recorded channels
};

AnalysisResult analyze_files(const std::filesystem::path& trajectory, const std::filesystem::path& report,
                             std::ostream& out);

/// Prints the certificate for a scenario; exit 0 when satisfied, 2 when not.
int certify_scenario(const std::string& scenario, const Overrides& overrides, std::ostream& out);

/// Entry point of the `vgne` executable.
int main(int argc, char** argv);

}  // namespace vgne::cli
