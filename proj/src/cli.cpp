#include "vgne/cli.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

namespace vgne::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kSettleLevel = 1e-3;
constexpr double kChannelTol = 1e-9;
const char* const kChannels[] = {"kkt_residual",     "lyapunov",           "consensus_x",
                                 "consensus_lambda", "coupling_violation", "local_violation"};

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigError("override '" + key + "': '" + text + "' is not a finite number");
    }
    return value;
}

std::string format_number(double x) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string mode_dir(AgentModel model) {
    return model == AgentModel::single_integrator ? "single" : "double";
}

double monitor_value(const MonitorValues& mv, int channel) {
    switch (channel) {
        case 0: return mv.kkt_residual;
        case 1: return mv.lyapunov;
        case 2: return mv.consensus_x;
        case 3: return mv.consensus_lambda;
        case 4: return mv.coupling_violation;
        default: return mv.local_violation;
    }
}

void write_channel_files(const Trajectory& traj, const fs::path& dir) {
    fs::create_directories(dir);
    for (int c = 0; c < 6; ++c) {
        std::ofstream out(dir / (std::string(kChannels[c]) + ".dat"));
        if (!out) throw ConfigError("cannot write " + (dir / kChannels[c]).string());
        out << "# t " << kChannels[c] << '\n';
        for (const TrajectorySample& s : traj.samples) {
            out << format_number(s.t) << ' ' << format_number(monitor_value(s.monitors, c)) << '\n';
        }
    }
}

json vector_json(const Vector& v) { return vector_to_json(v); }

json cert_json(const ConvergenceCert& cert) {
    return {{"lambda2", cert.lambda2},
            {"c", cert.c_used},
            {"c_threshold", cert.c_threshold},
            {"lambda_min_M", cert.lambda_min_M},
            {"M", {{cert.M(0, 0), cert.M(0, 1)}, {cert.M(1, 0), cert.M(1, 1)}}},
            {"satisfied", cert.satisfied}};
}

json mode_json(const ModeSummary& m, double step, double lyapunov_slack) {
    const TrajectorySample& last = m.trajectory.final();
    json j;
    j["stop"] = to_string(m.trajectory.stop);
    j["steps"] = m.trajectory.steps;
    j["step"] = step;
    j["record_stride"] = m.trajectory.record_stride;
    j["samples"] = m.trajectory.samples.size();
    j["t_final"] = last.t;
    j["final_step_residual"] = m.trajectory.final_residual;
    j["x"] = vector_json(last.x);
    if (last.v.size() > 0) {
        j["v"] = vector_json(last.v);
        j["v_norm"] = last.v.norm();
    }
    j["lambda_mean"] = vector_json(last.lambda_mean);
    j["kkt_residual"] = m.kkt_residual;
    j["consensus_x"] = last.monitors.consensus_x;
    j["consensus_lambda"] = last.monitors.consensus_lambda;
    j["coupling_violation"] = last.monitors.coupling_violation;
    j["local_violation"] = last.monitors.local_violation;
    j["distance_to_oracle"] = m.distance_to_oracle;
    j["lyapunov"] = {{"slack_per_step", lyapunov_slack},
                     {"transitions", m.lyapunov.transitions},
                     {"violations", m.lyapunov.violations},
                     {"max_increase", m.lyapunov.max_increase}};
    j["certified"] = m.certified;
    j["wall_time_s"] = m.wall_time;
    return j;
}

bool final_certified(const Trajectory& traj) {
    const MonitorValues& mv = traj.final().monitors;
    return traj.stop == StopReason::converged && mv.kkt_residual <= kCertTol && mv.consensus_x <= kCertTol &&
           mv.consensus_lambda <= kCertTol && mv.coupling_violation <= kCertTol && mv.local_violation <= kCertTol;
}

}  // namespace

void parse_override(const std::string& assignment, Overrides& into) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "': expected key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    if (key == "c") {
        into.c = parse_double(key, value);
        if (!(*into.c > 0.0)) throw ConfigError("override 'c': must be positive");
    } else if (key == "h" || key == "step") {
        into.step = parse_double(key, value);
        if (!(*into.step > 0.0)) throw ConfigError("override 'h': must be positive");
    } else if (key == "t_max") {
        into.t_max = parse_double(key, value);
        if (!(*into.t_max > 0.0)) throw ConfigError("override 't_max': must be positive");
    } else if (key == "stop_tol" || key == "eps_stop") {
        into.stop_tol = parse_double(key, value);
        if (!(*into.stop_tol > 0.0)) throw ConfigError("override 'stop_tol': must be positive");
    } else if (key == "seed") {
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), seed);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw ConfigError("override 'seed': '" + value + "' is not a nonnegative integer");
        }
        into.seed = seed;
    } else if (key == "mode") {
        try {
            into.mode = parse_run_mode(value);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("override 'mode': ") + e.what());
        }
    } else {
        throw ConfigError("unknown override key '" + key + "' (expected c, h, t_max, stop_tol, seed or mode)");
    }
}

void apply_overrides(ScenarioSpec& spec, const Overrides& o) {
    if (o.c) spec.flow.c = *o.c;
    if (o.step) {
        spec.flow.step = *o.step;
        spec.auto_step = false;
    }
    if (o.t_max) spec.flow.t_max = *o.t_max;
    if (o.stop_tol) spec.flow.stop_tol = *o.stop_tol;
    if (o.mode) spec.mode = *o.mode;
    if (o.seed && *o.seed != spec.seed) {
        spec.seed = *o.seed;
        std::mt19937_64 rng(spec.seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        for (Index k = 0; k < spec.initial_positions.size(); ++k) spec.initial_positions[k] += 0.5 * normal(rng);
        for (Index k = 0; k < spec.initial_velocities.size(); ++k) spec.initial_velocities[k] = 0.3 * normal(rng);
    }
    validate_scenario(spec);
}

fs::path default_output_dir() {
    if (const char* env = std::getenv("VGNE_OUTPUT_DIR"); env && *env) return env;
    return "vgne-out";
}

std::vector<std::string> trajectory_columns(AgentModel model, Index n, Index num_multipliers) {
    std::vector<std::string> cols{"t"};
    for (Index k = 1; k <= n; ++k) cols.push_back("x" + std::to_string(k));
    if (model == AgentModel::double_integrator) {
        for (Index k = 1; k <= n; ++k) cols.push_back("v" + std::to_string(k));
    }
    for (Index k = 1; k <= num_multipliers; ++k) cols.push_back("lambda_mean" + std::to_string(k));
    for (const char* c : kChannels) cols.emplace_back(c);
    return cols;
}

void write_trajectory_csv(const Trajectory& traj, const fs::path& path) {
    if (traj.samples.empty()) throw std::invalid_argument("write_trajectory_csv: empty trajectory");
    const TrajectorySample& first = traj.samples.front();
    const auto cols = trajectory_columns(traj.model, first.x.size(), first.lambda_mean.size());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (const TrajectorySample& s : traj.samples) {
        out << format_number(s.t);
        for (Index k = 0; k < s.x.size(); ++k) out << ',' << format_number(s.x[k]);
        if (traj.model == AgentModel::double_integrator) {
            for (Index k = 0; k < s.v.size(); ++k) out << ',' << format_number(s.v[k]);
        }
        for (Index k = 0; k < s.lambda_mean.size(); ++k) out << ',' << format_number(s.lambda_mean[k]);
        for (int c = 0; c < 6; ++c) out << ',' << format_number(monitor_value(s.monitors, c));
        out << '\n';
    }
}

Index CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<Index>(it - header.begin());
}

CsvTable read_trajectory_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(in, line) || line.empty()) throw ConfigError("schema error: " + path.string() + " has no header");
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) table.header.push_back(cell);
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<double> row;
        row.reserve(table.header.size());
        std::size_t pos = 0;
        while (pos <= line.size()) {
            const std::size_t comma = std::min(line.find(',', pos), line.size());
            double value = 0.0;
            const char* begin = line.data() + pos;
            const char* end = line.data() + comma;
            auto [ptr, ec] = std::from_chars(begin, end, value);
            if (ec != std::errc() || ptr != end) {
                throw ConfigError("schema error: line " + std::to_string(lineno) + " has a non-numeric field");
            }
            row.push_back(value);
            pos = comma + 1;
        }
        if (row.size() != table.header.size()) {
            throw ConfigError("schema error: line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                              " fields, header has " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw ConfigError("schema error: " + path.string() + " has no data rows");
    return table;
}

RunResult execute_run(const RunConfig& cfg, std::ostream& log) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto seconds_since = [](clock::time_point start) {
        return std::chrono::duration<double>(clock::now() - start).count();
    };

    RunResult result{kError, resolve_scenario(cfg.scenario), {}, {}, {}, {}, std::nullopt, 0.0};
    ScenarioSpec& spec = result.spec;
    apply_overrides(spec, cfg.overrides);

    result.constants = scenario_constants(spec);
    result.cert = certify(spec.game, spec.graph, result.constants, spec.flow.c);
    if (!result.cert.satisfied) {
        log << "warning: c ≤ c̲ (c = " << spec.flow.c << ", c̲ = " << result.cert.c_threshold
            << "); convergence is not certified, running anyway\n";
    }

    FlowParams params = spec.flow;
    params.step = scenario_step(spec);
    const double slack = 10.0 * params.step * params.step;
    result.oracle = oracle_vgne(spec.game);

    fs::create_directories(cfg.output_dir);
    json runs = json::object();

    if (spec.mode != RunMode::double_integrator) {
        const auto start = clock::now();
        ModeSummary m;
        m.model = AgentModel::single_integrator;
        Trajectory traj =
            simulate_single(spec.game, spec.graph, params, initial_single_state(spec.game, spec.initial_positions));
        m.trajectory = monitor_channels(spec.game, spec.graph, traj, result.oracle);
        result.modes.push_back(std::move(m));
        result.modes.back().wall_time = seconds_since(start);
    }
    if (spec.mode != RunMode::single) {
        const auto start = clock::now();
        const Game game = spec.dualize_local_sets ? dualize_local_sets(spec.game) : spec.game;
        const GainsH gains(spec.gains);
        OracleOptions opts;
        opts.warm_x = result.oracle.x;
        const EquilibriumReport oracle = oracle_vgne(game, opts);
        ModeSummary m;
        m.model = AgentModel::double_integrator;
        Trajectory traj = simulate_double(game, spec.graph, params, gains,
                                          initial_double_state(game, gains, spec.initial_positions,
                                                               spec.initial_velocities));
        m.trajectory = monitor_channels(game, spec.graph, traj, oracle, &spec.game);
        result.modes.push_back(std::move(m));
        result.modes.back().wall_time = seconds_since(start);
    }

    bool all_certified = true;
    for (ModeSummary& m : result.modes) {
        const TrajectorySample& last = m.trajectory.final();
        m.kkt_residual = last.monitors.kkt_residual;
        m.distance_to_oracle = (last.x - result.oracle.x).norm();
        m.lyapunov = check_lyapunov(m.trajectory, slack);
        m.certified = final_certified(m.trajectory);
        all_certified = all_certified && m.certified;

        const fs::path dir = cfg.output_dir / mode_dir(m.model);
        fs::create_directories(dir);
        write_trajectory_csv(m.trajectory, dir / "trajectory.csv");
        write_channel_files(m.trajectory, dir / "channels");
        runs[mode_dir(m.model)] = mode_json(m, params.step, slack);

        log << mode_dir(m.model) << ": " << to_string(m.trajectory.stop) << " after " << m.trajectory.steps
            << " steps (t = " << last.t << "), kkt residual " << m.kkt_residual << ", |x - x*| "
            << m.distance_to_oracle;
        if (m.model == AgentModel::double_integrator) log << ", |v| " << last.v.norm();
        log << (m.certified ? "" : " [not certified]") << '\n';
    }
    if (result.modes.size() == 2) {
        result.mode_agreement = (result.modes[0].trajectory.final().x - result.modes[1].trajectory.final().x).norm();
        log << "single vs double limit: |x_s - x_d| = " << *result.mode_agreement << '\n';
    }

    result.exit_code = all_certified ? kOk : kBudget;
    result.wall_time = seconds_since(t0);

    json summary;
    summary["schema_version"] = kScenarioSchemaVersion;
    summary["scenario"] = scenario_to_json(spec);
    summary["constants"] = {{"mu", result.constants.mu},
                            {"theta0", result.constants.theta0},
                            {"theta", result.constants.theta},
                            {"exact", result.constants.exact}};
    summary["certificate"] = cert_json(result.cert);
    summary["oracle"] = {{"x", vector_json(result.oracle.x)},
                         {"lambda", vector_json(result.oracle.lambda)},
                         {"kkt_residual", result.oracle.kkt_residual},
                         {"iterations", result.oracle.iterations},
                         {"linear_solve_checked", result.oracle.linear_solve_checked}};
    summary["runs"] = std::move(runs);
    if (result.mode_agreement) summary["mode_agreement"] = *result.mode_agreement;
    summary["certified_tolerance"] = kCertTol;
    summary["exit_code"] = result.exit_code;
    summary["wall_time_s"] = result.wall_time;
    std::ofstream out(cfg.output_dir / "summary.json");
    if (!out) throw ConfigError("cannot write " + (cfg.output_dir / "summary.json").string());
    out << summary.dump(2) << '\n';

    log << "wrote " << cfg.output_dir.string() << " (" << result.wall_time << " s)\n";
    return result;
}

AnalysisResult analyze_files(const fs::path& trajectory, const fs::path& report, std::ostream& out) {
    const CsvTable table = read_trajectory_csv(trajectory);
    json summary;
    {
        std::ifstream in(report);
        if (!in) throw ConfigError("cannot open " + report.string());
        try {
            summary = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("schema error: " + report.string() + ": " + e.what());
        }
    }
    if (!summary.is_object() || !summary.contains("scenario") || !summary.contains("runs")) {
        throw ConfigError("schema error: " + report.string() + " is not a run summary");
    }
    const ScenarioSpec spec = scenario_from_json(summary.at("scenario"));
    const Game& game = spec.game;
    const Index n = game.total_dim();
    const Index m = game.num_constraints();

    const AgentModel model = table.column("v1") >= 0 ? AgentModel::double_integrator : AgentModel::single_integrator;
    const json& runs = summary.at("runs");
    if (!runs.contains(mode_dir(model))) {
        throw ConfigError("schema error: report has no " + mode_dir(model) + " run for this trajectory");
    }
    const json& run = runs.at(mode_dir(model));
    Index num_multipliers = 0;
    for (const std::string& col : table.header) num_multipliers += col.rfind("lambda_mean", 0) == 0 ? 1 : 0;
    if (table.header != trajectory_columns(model, n, num_multipliers) || num_multipliers < m) {
        throw ConfigError("schema error: trajectory columns do not match the scenario in the report");
    }
    const std::size_t expected_rows = run.at("samples").get<std::size_t>();
    if (table.rows.size() != expected_rows) {
        throw ConfigError("schema error: trajectory has " + std::to_string(table.rows.size()) + " rows, report lists " +
                          std::to_string(expected_rows) + " samples (truncated file?)");
    }
    const double h = run.at("step").get<double>();
    const double slack = 10.0 * h * h;

    const Index col_x = 1;
    const Index col_lambda = table.column(num_multipliers > 0 ? "lambda_mean1" : "kkt_residual");
    const Index col_ch = table.column("kkt_residual");

    AnalysisResult r;
    r.lyapunov_monotone = true;
    double prev_v = 0.0;
    double prev_t = 0.0;
    Index last_above = -1;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const std::vector<double>& row = table.rows[k];
        Vector x(n);
        for (Index j = 0; j < n; ++j) x[j] = row[col_x + j];
        Vector lambda = Vector::Zero(m);
        for (Index j = 0; j < m; ++j) lambda[j] = std::max(0.0, row[col_lambda + j]);

        const double kkt = kkt_residual(game, x, lambda);
        const double coupling =
            m > 0 ? (game.coupling_matrix() * x - game.coupling_bound()).cwiseMax(0.0).maxCoeff() : 0.0;
        const double local = game.action_set().violation(x);
        r.channel_mismatch = std::max({r.channel_mismatch, std::abs(kkt - row[col_ch]),
                                       std::abs(coupling - row[col_ch + 4]), std::abs(local - row[col_ch + 5])});

        const double v = row[col_ch + 1];
        if (k > 0) {
            const double increase = v - prev_v;
            const double gap = std::max(1.0, std::round((row[0] - prev_t) / h));
            r.max_lyapunov_increase = std::max(r.max_lyapunov_increase, increase);
            if (!(increase <= slack * gap)) r.lyapunov_monotone = false;
        }
        prev_v = v;
        prev_t = row[0];
        r.max_coupling_violation = std::max(r.max_coupling_violation, coupling);
        r.max_local_violation = std::max(r.max_local_violation, local);
        if (local >= kSettleLevel) last_above = static_cast<Index>(k);
    }
    const std::vector<double>& last = table.rows.back();
    r.final_kkt = kkt_residual(game, [&] {
        Vector x(n);
        for (Index j = 0; j < n; ++j) x[j] = last[col_x + j];
        return x;
    }(), [&] {
        Vector l = Vector::Zero(m);
        for (Index j = 0; j < m; ++j) l[j] = std::max(0.0, last[col_lambda + j]);
        return l;
    }());
    r.final_consensus_x = last[col_ch + 2];
    r.final_consensus_lambda = last[col_ch + 3];
    r.final_coupling_violation = last[col_ch + 4];
    r.final_local_violation = last[col_ch + 5];
    if (last_above + 1 < static_cast<Index>(table.rows.size())) {
        r.local_settle_time = table.rows[static_cast<std::size_t>(last_above + 1)][0];
    }

    r.passed = r.lyapunov_monotone && r.final_kkt <= kCertTol && r.final_consensus_x <= kCertTol &&
               r.final_consensus_lambda <= kCertTol && r.final_coupling_violation <= kCertTol &&
               r.final_local_violation <= kCertTol && r.channel_mismatch <= kChannelTol;

    auto yes_no = [](bool b) { return b ? "yes" : "no"; };
    out << "mode: " << mode_dir(model) << " (" << table.rows.size() << " samples, t_final = " << last[0] << ")\n";
    out << "max Lyapunov increase: " << r.max_lyapunov_increase << " (slack " << slack << " per step)\n";
    out << "V monotone within tolerance: " << yes_no(r.lyapunov_monotone) << '\n';
    out << "final kkt_residual: " << r.final_kkt << '\n';
    out << "final consensus_x: " << r.final_consensus_x << '\n';
    out << "final consensus_lambda: " << r.final_consensus_lambda << '\n';
    out << "coupling violation: max " << r.max_coupling_violation << ", final " << r.final_coupling_violation << '\n';
    out << "local violation: max " << r.max_local_violation << ", final " << r.final_local_violation << '\n';
    if (r.local_settle_time) {
        out << "local violation below " << kSettleLevel << " from t = " << *r.local_settle_time << '\n';
    } else {
        out << "local violation never settles below " << kSettleLevel << '\n';
    }
    out << "recomputed channels match: " << yes_no(r.channel_mismatch <= kChannelTol) << " (max difference "
        << r.channel_mismatch << ")\n";
    out << "certificates: " << (r.passed ? "pass" : "FAIL") << '\n';
    return r;
}

int certify_scenario(const std::string& scenario, const Overrides& overrides, std::ostream& out) {
    ScenarioSpec spec = resolve_scenario(scenario);
    apply_overrides(spec, overrides);
    const GameConstants k = scenario_constants(spec);
    const ConvergenceCert cert = certify(spec.game, spec.graph, k, spec.flow.c);
    out << "scenario: " << spec.name << '\n';
    out << "mu: " << k.mu << (k.exact ? "" : " (sampled)") << '\n';
    out << "theta0: " << k.theta0 << '\n';
    out << "theta: " << k.theta << '\n';
    out << "lambda2: " << cert.lambda2 << '\n';
    out << "c_threshold: " << cert.c_threshold << '\n';
    out << "c: " << cert.c_used << '\n';
    out << "lambda_min(M): " << cert.lambda_min_M << '\n';
    out << "satisfied: " << (cert.satisfied ? "true" : "false") << '\n';
    return cert.satisfied ? kOk : kBudget;
}

namespace {

struct SweepSpec {
    std::string key;
    std::vector<std::string> values;
};

SweepSpec parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == text.size()) {
        throw ConfigError("sweep '" + text + "': expected key=v1,v2,...");
    }
    SweepSpec s{text.substr(0, eq), {}};
    std::stringstream ss(text.substr(eq + 1));
    std::string v;
    while (std::getline(ss, v, ',')) {
        if (v.empty()) throw ConfigError("sweep '" + text + "': empty value");
        s.values.push_back(v);
    }
    return s;
}

int run_command(const std::string& scenario, const std::vector<std::string>& overrides,
                const std::optional<std::string>& mode, const std::optional<std::string>& sweep,
                const std::optional<std::string>& output) {
    RunConfig base;
    base.scenario = scenario;
    for (const std::string& o : overrides) parse_override(o, base.overrides);
    if (mode) parse_override("mode=" + *mode, base.overrides);
    base.output_dir = output ? fs::path(*output) : default_output_dir();

    if (!sweep) return execute_run(base, std::cout).exit_code;

    const SweepSpec s = parse_sweep(*sweep);
    std::vector<RunConfig> configs;
    for (const std::string& v : s.values) {
        RunConfig cfg = base;
        parse_override(s.key + "=" + v, cfg.overrides);
        cfg.output_dir = base.output_dir / (s.key + "=" + v);
        configs.push_back(std::move(cfg));
    }
    std::vector<std::future<std::pair<int, std::string>>> jobs;
    for (const RunConfig& cfg : configs) {
        jobs.push_back(std::async(std::launch::async, [cfg] {
            std::ostringstream log;
            try {
                const int rc = execute_run(cfg, log).exit_code;
                return std::make_pair(rc, log.str());
            } catch (const std::exception& e) {
                log << "error: " << e.what() << '\n';
                return std::make_pair(static_cast<int>(kError), log.str());
            }
        }));
    }
    int code = kOk;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        auto [rc, text] = jobs[k].get();
        std::cout << "[" << s.key << "=" << s.values[k] << "]\n" << text;
        if (rc == kError || code == kError) {
            code = kError;
        } else {
            code = std::max(code, rc);
        }
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed v-GNE seeking simulator"};
    app.require_subcommand(1);

    std::string scenario;
    std::vector<std::string> overrides;
    std::optional<std::string> mode;
    std::optional<std::string> sweep;
    std::optional<std::string> output;
    CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write trajectories and a summary");
    run->add_option("-s,--scenario", scenario, "Built-in scenario name or path to a scenario file")->required();
    run->add_option("--mode", mode, "single, double or both");
    run->add_option("--override", overrides, "key=value (c, h, t_max, stop_tol, seed, mode)");
    run->add_option("--sweep", sweep, "key=v1,v2,... ; runs each value concurrently");
    run->add_option("-o,--output", output, "Output directory (default $VGNE_OUTPUT_DIR or ./vgne-out)");

    std::string traj_path;
    std::string report_path;
    CLI::App* analyze = app.add_subcommand("analyze", "Recompute monitor channels of a finished run");
    analyze->add_option("--trajectory", traj_path, "trajectory.csv written by run")->required();
    analyze->add_option("--report", report_path, "summary.json written by run")->required();

    std::string cert_scenario;
    std::vector<std::string> cert_overrides;
    CLI::App* cert = app.add_subcommand("certify", "Print the convergence certificate of a scenario");
    cert->add_option("-s,--scenario", cert_scenario, "Built-in scenario name or path")->required();
    cert->add_option("--override", cert_overrides, "key=value");

    std::string export_name;
    std::string export_path;
    CLI::App* scen = app.add_subcommand("scenario", "List or export built-in scenarios");
    scen->require_subcommand(1);
    CLI::App* list = scen->add_subcommand("list", "List built-in scenario names");
    CLI::App* exp = scen->add_subcommand("export", "Write a scenario file");
    exp->add_option("name", export_name, "Built-in scenario name")->required();
    exp->add_option("-o,--output", export_path, "Destination file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kError;
    }

    try {
        if (*run) return run_command(scenario, overrides, mode, sweep, output);
        if (*analyze) return analyze_files(traj_path, report_path, std::cout).passed ? kOk : kBudget;
        if (*cert) {
            Overrides o;
            for (const std::string& s : cert_overrides) parse_override(s, o);
            return certify_scenario(cert_scenario, o, std::cout);
        }
        if (*list) {
            for (const std::string& name : builtin_scenario_names()) std::cout << name << '\n';
            return kOk;
        }
        if (*exp) {
            save_scenario(builtin_scenario(export_name), export_path);
            std::cout << "wrote " << export_path << '\n';
            return kOk;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kError;
    }
    return kError;
}

}  // namespace vgne::cli
