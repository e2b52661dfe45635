#include "vgne/config.hpp"

#include <cmath>
#include <fstream>

namespace vgne {

using nlohmann::json;

namespace {

double number_from_json(const json& j, const std::string& key) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "+inf") return kInf;
        if (s == "-inf") return -kInf;
    }
    throw ConfigError("'" + key + "': expected a number (or \"inf\"/\"-inf\")");
}

json number_to_json(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    return x;
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    return obj.at(key);
}

Matrix matrix_from_json(const json& j, Index cols, const std::string& key) {
    if (!j.is_array()) throw ConfigError("'" + key + "': expected an array of rows");
    Matrix M(static_cast<Index>(j.size()), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = vector_from_json(j[r], key + "[" + std::to_string(r) + "]");
        if (row.size() != cols) {
            throw ConfigError("'" + key + "': row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                              " entries, expected " + std::to_string(cols));
        }
        M.row(static_cast<Index>(r)) = row.transpose();
    }
    return M;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Index r = 0; r < M.rows(); ++r) rows.push_back(vector_to_json(M.row(r).transpose()));
    return rows;
}

template <typename T>
T value_or(const json& obj, const std::string& key, T fallback) {
    if (!obj.is_object() || !obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("'" + key + "': wrong type");
    }
}

}  // namespace

json vector_to_json(const VectorRef& v) {
    json arr = json::array();
    for (Index k = 0; k < v.size(); ++k) arr.push_back(number_to_json(v[k]));
    return arr;
}

Vector vector_from_json(const json& j, const std::string& key) {
    if (!j.is_array()) throw ConfigError("'" + key + "': expected an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Index>(k)] = number_from_json(j[k], key);
    return v;
}

json scenario_to_json(const ScenarioSpec& spec) {
    const Game& g = spec.game;
    json doc;
    doc["schema_version"] = kScenarioSchemaVersion;
    doc["name"] = spec.name;
    doc["mode"] = to_string(spec.mode);
    doc["seed"] = spec.seed;

    json agents = json::array();
    for (Index i = 0; i < g.num_agents(); ++i) {
        const AgentSpec& a = g.agent(i);
        if (!a.quadratic) throw ConfigError("agent " + std::to_string(i + 1) + " has no quadratic cost to serialize");
        json aj;
        aj["dim"] = a.dim;
        aj["cost"] = {{"Q", matrix_to_json(a.quadratic->Q)}, {"q", vector_to_json(a.quadratic->q)}};
        if (a.local_set.is_full_space()) {
            aj["local_set"] = "full";
        } else {
            aj["local_set"] = {{"lower", vector_to_json(a.local_set.lower())},
                               {"upper", vector_to_json(a.local_set.upper())}};
        }
        aj["A"] = matrix_to_json(a.A);
        aj["b"] = vector_to_json(a.b);
        agents.push_back(std::move(aj));
    }
    doc["agents"] = std::move(agents);
    doc["coupling"] = {{"rows", g.num_constraints()}};

    json edges = json::array();
    for (const Edge& e : spec.graph.edges()) edges.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"w", e.weight}});
    doc["graph"] = {{"nodes", spec.graph.num_nodes()}, {"edges", std::move(edges)}};

    json flow;
    flow["c"] = spec.flow.c;
    flow["step"] = spec.auto_step ? json("auto") : json(spec.flow.step);
    flow["t_max"] = spec.flow.t_max;
    flow["stop_tol"] = spec.flow.stop_tol;
    flow["record_stride"] = spec.flow.record_stride;
    doc["flow"] = std::move(flow);

    doc["double_integrator"] = {{"gains", vector_to_json(spec.gains)},
                                {"dualize_local_sets", spec.dualize_local_sets}};
    doc["initial"] = {{"positions", vector_to_json(spec.initial_positions)},
                      {"velocities", vector_to_json(spec.initial_velocities)}};
    if (spec.constants) {
        doc["constants"] = {{"mu", spec.constants->mu},
                            {"theta0", spec.constants->theta0},
                            {"theta", spec.constants->theta}};
    }
    if (spec.interior_point) doc["interior_point"] = vector_to_json(*spec.interior_point);
    return doc;
}

ScenarioSpec scenario_from_json(const json& doc) {
    if (!doc.is_object()) throw ConfigError("scenario: expected a JSON object at top level");
    const int version = value_or<int>(doc, "schema_version", -1);
    if (version != kScenarioSchemaVersion) {
        throw ConfigError("scenario: unsupported schema_version " + std::to_string(version) + " (expected " +
                          std::to_string(kScenarioSchemaVersion) + ")");
    }
    try {
        const json& agents_j = require(doc, "agents", "scenario");
        if (!agents_j.is_array() || agents_j.empty()) throw ConfigError("'agents': expected a nonempty array");
        const Index N = static_cast<Index>(agents_j.size());

        Index n = 0;
        for (const json& aj : agents_j) n += require(aj, "dim", "agent").get<Index>();

        const json coupling = doc.value("coupling", json::object());
        const Index m = value_or<Index>(coupling, "rows", 0);
        std::optional<Vector> global_b;
        if (coupling.contains("b")) {
            global_b = vector_from_json(coupling.at("b"), "coupling.b");
            if (global_b->size() != m) throw ConfigError("'coupling.b': expected " + std::to_string(m) + " entries");
        }

        std::vector<AgentSpec> agents;
        for (Index i = 0; i < N; ++i) {
            const json& aj = agents_j[static_cast<std::size_t>(i)];
            const std::string where = "agents[" + std::to_string(i) + "]";
            const Index dim = aj.at("dim").get<Index>();
            if (dim <= 0) throw ConfigError(where + ".dim: must be positive");
            const json& cost = require(aj, "cost", where);
            QuadraticCost qc{matrix_from_json(require(cost, "Q", where + ".cost"), n, where + ".cost.Q"),
                             vector_from_json(require(cost, "q", where + ".cost"), where + ".cost.q")};
            if (qc.Q.rows() != n) throw ConfigError(where + ".cost.Q: expected " + std::to_string(n) + " rows");

            ConvexSet set = ConvexSet::full_space(dim);
            if (aj.contains("local_set") && !(aj.at("local_set").is_string() && aj.at("local_set") == "full")) {
                const json& sj = aj.at("local_set");
                Vector lo = vector_from_json(require(sj, "lower", where + ".local_set"), where + ".local_set.lower");
                Vector hi = vector_from_json(require(sj, "upper", where + ".local_set"), where + ".local_set.upper");
                if (lo.size() != dim || hi.size() != dim) {
                    throw ConfigError(where + ".local_set: bounds must have " + std::to_string(dim) + " entries");
                }
                try {
                    set = ConvexSet::box(lo, hi);
                } catch (const std::invalid_argument& e) {
                    throw ConfigError(where + ".local_set: " + e.what());
                }
            }

            Matrix A = aj.contains("A") ? matrix_from_json(aj.at("A"), dim, where + ".A") : Matrix(0, dim);
            if (A.rows() != m) {
                throw ConfigError(where + ".A: expected " + std::to_string(m) + " rows (coupling.rows), got " +
                                  std::to_string(A.rows()));
            }
            Vector b;
            if (aj.contains("b")) {
                b = vector_from_json(aj.at("b"), where + ".b");
            } else if (global_b) {
                b = *global_b / static_cast<double>(N);
            } else {
                b = Vector::Zero(m);
            }
            if (b.size() != m) throw ConfigError(where + ".b: expected " + std::to_string(m) + " entries");
            agents.push_back(AgentSpec::with_quadratic_cost(std::move(qc), std::move(set), std::move(A), std::move(b), dim));
        }

        const json& graph_j = require(doc, "graph", "scenario");
        const Index nodes = value_or<Index>(graph_j, "nodes", N);
        std::vector<Edge> edges;
        for (const json& ej : require(graph_j, "edges", "graph")) {
            Edge e;
            if (ej.is_array()) {
                if (ej.size() < 2 || ej.size() > 3) throw ConfigError("'graph.edges': expected [i, j] or [i, j, w]");
                e = {ej[0].get<Index>() - 1, ej[1].get<Index>() - 1, ej.size() == 3 ? ej[2].get<double>() : 1.0};
            } else {
                e = {require(ej, "i", "edge").get<Index>() - 1, require(ej, "j", "edge").get<Index>() - 1,
                     value_or<double>(ej, "w", 1.0)};
            }
            edges.push_back(e);
        }
        CommGraph graph = [&] {
            try {
                return CommGraph::from_edges(nodes, edges);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string("graph: ") + e.what());
            }
        }();

        const json flow_j = doc.value("flow", json::object());
        FlowParams flow;
        flow.c = value_or<double>(flow_j, "c", 1.0);
        bool auto_step = true;
        if (flow_j.contains("step") && !(flow_j.at("step").is_string() && flow_j.at("step") == "auto")) {
            flow.step = value_or<double>(flow_j, "step", 0.0);
            auto_step = false;
        }
        flow.t_max = value_or<double>(flow_j, "t_max", 200.0);
        flow.stop_tol = value_or<double>(flow_j, "stop_tol", 1e-8);
        flow.record_stride = value_or<Index>(flow_j, "record_stride", 10);

        const json dbl = doc.value("double_integrator", json::object());
        Vector gains = dbl.contains("gains") ? vector_from_json(dbl.at("gains"), "double_integrator.gains")
                                             : Vector::Ones(N);
        const bool dualize = value_or<bool>(dbl, "dualize_local_sets", false);

        const json init = doc.value("initial", json::object());
        Vector positions = init.contains("positions") ? vector_from_json(init.at("positions"), "initial.positions")
                                                      : Vector::Zero(n);
        Vector velocities = init.contains("velocities")
                                ? vector_from_json(init.at("velocities"), "initial.velocities")
                                : Vector::Zero(n);

        std::optional<GameConstants> constants;
        if (doc.contains("constants")) {
            const json& cj = doc.at("constants");
            GameConstants c;
            c.mu = require(cj, "mu", "constants").get<double>();
            c.theta0 = require(cj, "theta0", "constants").get<double>();
            c.theta = require(cj, "theta", "constants").get<double>();
            c.exact = false;
            constants = c;
        }
        std::optional<Vector> interior;
        if (doc.contains("interior_point")) interior = vector_from_json(doc.at("interior_point"), "interior_point");

        ScenarioSpec spec{value_or<std::string>(doc, "name", "scenario"),
                          Game(std::move(agents)),
                          std::move(graph),
                          flow,
                          auto_step,
                          std::move(gains),
                          std::move(positions),
                          std::move(velocities),
                          value_or<std::uint64_t>(doc, "seed", 0),
                          parse_run_mode(value_or<std::string>(doc, "mode", "single")),
                          dualize,
                          constants,
                          std::move(interior)};
        validate_scenario(spec);
        return spec;
    } catch (const ConfigError&) {
        throw;
    } catch (const AssumptionError&) {
        throw;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    } catch (const DimensionError& e) {
        throw ConfigError(std::string("scenario: ") + e.what());
    }
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return scenario_from_json(doc);
}

void save_scenario(const ScenarioSpec& spec, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write scenario file " + path.string());
    out << scenario_to_json(spec).dump(2) << '\n';
}

ScenarioSpec resolve_scenario(const std::string& name_or_path) {
    if (std::filesystem::exists(name_or_path)) return load_scenario(name_or_path);
    try {
        return builtin_scenario(name_or_path);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string(e.what()) + " and no such file exists");
    }
}

}  // namespace vgne
