#pragma once

// End-to-end compilation: circuit -> deferral -> allocation -> lowering ->
// DAG -> insertion -> wait materialization -> estimate.

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "bbc/allocation.hpp"
#include "bbc/circuit.hpp"
#include "bbc/cost_model.hpp"
#include "bbc/cost_table.hpp"
#include "bbc/deferral.hpp"
#include "bbc/estimate.hpp"
#include "bbc/insertion.hpp"
#include "bbc/lowering.hpp"
#include "bbc/scheduler.hpp"

namespace bbc {

inline constexpr const char *kVersion = "0.1.0";
inline constexpr const char *kSyntheticWatermark = "synthetic cost model";

enum class Allocator { Contiguous, Greedy };

inline const char *to_string(Allocator a) { return a == Allocator::Contiguous ? "contiguous" : "greedy"; }
inline const char *to_string(DeferralEngine e) {
    return e == DeferralEngine::Conventional ? "conventional" : "transvection";
}

struct RunConfig {
    std::string input;             // circuit file; empty when `gen` is used
    std::optional<GenSpec> gen;    // generated workload
    std::size_t modules = 0;       // 0: smallest count that fits
    std::size_t factories = 1;
    std::size_t capacity = kDefaultCapacity;
    Placement placement = Placement::Fac;
    DeferralEngine deferral = DeferralEngine::Transvection;
    Allocator allocator = Allocator::Contiguous;
    bool insertion = true;
    std::size_t insertion_top = 5;
    double insertion_threshold = 0.01;
    std::size_t library_cap = 64;
    std::string cost_model_path;  // empty: reference model
    std::string cost_table_path;  // empty: synthetic fallback
    double epsilon = 1e-3;
    LoweringMode mode = LoweringMode::Expected;
    std::uint64_t seed = 1;
    double aut_per_native = 2.0;
    std::string report_path;
    std::string program_path;
    std::string dag_path;

    void validate() const {
        if (input.empty() == !gen.has_value()) {
            throw InputError("exactly one of an input circuit or a generator spec is required");
        }
        if (factories == 0) {
            throw InputError("factory count must be positive");
        }
        if (capacity == 0 || capacity > kMaxTableQubits) {
            throw InputError("module capacity must be in [1, 11]");
        }
        if (insertion_threshold < 0.0 || insertion_threshold > 1.0) {
            throw InputError("insertion threshold must be a fraction in [0, 1]");
        }
        if (aut_per_native < 0.0) {
            throw InputError("aut_per_native must be non-negative");
        }
        SynthesisOracle::reference(epsilon);
    }
};

// ---- JSON (de)serialization of the config ----

inline nlohmann::ordered_json to_json(const GenSpec &g) {
    return {{"n", g.n_qubits},
            {"length", g.length},
            {"clifford_frac", g.clifford_frac},
            {"arb_frac", g.arb_frac},
            {"tlike_frac", g.tlike_frac},
            {"weights", g.weights.str()},
            {"seed", g.seed}};
}

inline nlohmann::ordered_json to_json(const RunConfig &c) {
    nlohmann::ordered_json j;
    j["input"] = c.input;
    j["gen"] = c.gen ? to_json(*c.gen) : nlohmann::ordered_json(nullptr);
    j["modules"] = c.modules;
    j["factories"] = c.factories;
    j["capacity"] = c.capacity;
    j["placement"] = to_string(c.placement);
    j["deferral"] = to_string(c.deferral);
    j["alloc"] = to_string(c.allocator);
    j["insertion"] = c.insertion;
    j["insertion_top"] = c.insertion_top;
    j["insertion_threshold"] = c.insertion_threshold;
    j["library_cap"] = c.library_cap;
    j["cost_model"] = c.cost_model_path;
    j["cost_table"] = c.cost_table_path;
    j["epsilon"] = c.epsilon;
    j["mode"] = to_string(c.mode);
    j["seed"] = c.seed;
    j["aut_per_native"] = c.aut_per_native;
    return j;
}

namespace detail {
template <typename T>
void read_field(const nlohmann::json &j, const char *key, T &out) {
    if (!j.contains(key) || j[key].is_null()) {
        return;
    }
    try {
        out = j[key].get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw InputError(std::string("config field '") + key + "': " + e.what());
    }
}
}  // namespace detail

inline Placement parse_placement(const std::string &s) {
    if (s == "lpu") {
        return Placement::Lpu;
    }
    if (s == "fac") {
        return Placement::Fac;
    }
    throw InputError("placement must be 'lpu' or 'fac', got '" + s + "'");
}
inline LoweringMode parse_mode(const std::string &s) {
    if (s == "expected") {
        return LoweringMode::Expected;
    }
    if (s == "sampled") {
        return LoweringMode::Sampled;
    }
    throw InputError("mode must be 'expected' or 'sampled', got '" + s + "'");
}
inline DeferralEngine parse_deferral(const std::string &s) {
    if (s == "conventional") {
        return DeferralEngine::Conventional;
    }
    if (s == "transvection") {
        return DeferralEngine::Transvection;
    }
    throw InputError("deferral must be 'conventional' or 'transvection', got '" + s + "'");
}
inline Allocator parse_allocator(const std::string &s) {
    if (s == "contiguous") {
        return Allocator::Contiguous;
    }
    if (s == "greedy") {
        return Allocator::Greedy;
    }
    throw InputError("alloc must be 'contiguous' or 'greedy', got '" + s + "'");
}

inline GenSpec gen_spec_from_json(const nlohmann::json &j) {
    GenSpec g;
    detail::read_field(j, "n", g.n_qubits);
    detail::read_field(j, "length", g.length);
    detail::read_field(j, "clifford_frac", g.clifford_frac);
    detail::read_field(j, "arb_frac", g.arb_frac);
    detail::read_field(j, "tlike_frac", g.tlike_frac);
    std::string weights = g.weights.str();
    detail::read_field(j, "weights", weights);
    g.weights = WeightDistribution::parse(weights);
    detail::read_field(j, "seed", g.seed);
    return g;
}

/// Accepts a bare config object or a report carrying one under "config".
inline RunConfig config_from_json(const nlohmann::json &root) {
    const nlohmann::json &j = root.contains("config") ? root["config"] : root;
    if (!j.is_object()) {
        throw InputError("config must be a JSON object");
    }
    RunConfig c;
    detail::read_field(j, "input", c.input);
    if (j.contains("gen") && !j["gen"].is_null()) {
        c.gen = gen_spec_from_json(j["gen"]);
    }
    detail::read_field(j, "modules", c.modules);
    detail::read_field(j, "factories", c.factories);
    detail::read_field(j, "capacity", c.capacity);
    std::string s;
    if (s.clear(), detail::read_field(j, "placement", s), !s.empty()) {
        c.placement = parse_placement(s);
    }
    if (s.clear(), detail::read_field(j, "deferral", s), !s.empty()) {
        c.deferral = parse_deferral(s);
    }
    if (s.clear(), detail::read_field(j, "alloc", s), !s.empty()) {
        c.allocator = parse_allocator(s);
    }
    if (s.clear(), detail::read_field(j, "mode", s), !s.empty()) {
        c.mode = parse_mode(s);
    }
    detail::read_field(j, "insertion", c.insertion);
    detail::read_field(j, "insertion_top", c.insertion_top);
    detail::read_field(j, "insertion_threshold", c.insertion_threshold);
    detail::read_field(j, "library_cap", c.library_cap);
    detail::read_field(j, "cost_model", c.cost_model_path);
    detail::read_field(j, "cost_table", c.cost_table_path);
    detail::read_field(j, "epsilon", c.epsilon);
    detail::read_field(j, "seed", c.seed);
    detail::read_field(j, "aut_per_native", c.aut_per_native);
    return c;
}

inline std::string read_text_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// ---- pipeline ----

struct CompileResult {
    DeferredCircuit deferred;
    Allocation allocation;
    BbProgram program;  // final, with waits materialized
    InstrDag dag;
    Report report;
    InsertionReport insertion;
    bool synthetic_table = true;
};

/// Prefixes errors with the failing stage.
template <typename F>
auto run_stage(const char *stage, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError &e) {
        throw InputError(std::string(stage) + ": " + e.what());
    } catch (const InvariantError &e) {
        throw InvariantError(std::string(stage) + ": " + e.what());
    }
}

inline std::size_t resolve_modules(const RunConfig &cfg, std::size_t n_qubits) {
    if (cfg.modules != 0) {
        return cfg.modules;
    }
    return std::max<std::size_t>(1, (n_qubits + cfg.capacity - 1) / cfg.capacity);
}

inline PbcCircuit load_circuit(const RunConfig &cfg) {
    return run_stage("parse", [&] {
        return cfg.gen ? gen_random(*cfg.gen) : parse_circuit(read_text_file(cfg.input));
    });
}

inline CostTable load_cost_table(const RunConfig &cfg) {
    return run_stage("cost-table", [&] {
        return cfg.cost_table_path.empty() ? CostTable::fallback(cfg.capacity) : CostTable::load(cfg.cost_table_path);
    });
}

inline CostModel load_cost_model(const RunConfig &cfg) {
    return run_stage("cost-model", [&] {
        return cfg.cost_model_path.empty() ? CostModel::reference() : CostModel::load(cfg.cost_model_path);
    });
}

inline CompileResult compile(const RunConfig &cfg, const PbcCircuit &circuit, const CostTable &table,
                             const CostModel &costs) {
    run_stage("config", [&] { cfg.validate(); });
    CompileResult r;
    r.synthetic_table = table.synthetic();
    r.deferred = run_stage("deferral", [&] { return defer(circuit, cfg.deferral); });
    const std::size_t modules = resolve_modules(cfg, circuit.n_qubits);
    r.allocation = run_stage("allocation", [&] {
        return cfg.allocator == Allocator::Contiguous ? allocate_contiguous(r.deferred.circuit, modules, cfg.capacity)
                                                      : allocate_greedy(r.deferred.circuit, modules, cfg.capacity);
    });
    const SynthesisOracle oracle = SynthesisOracle::reference(cfg.epsilon);
    LoweringOptions lo;
    lo.placement = cfg.placement;
    lo.mode = cfg.mode;
    lo.factories = cfg.factories;
    lo.aut_per_native = cfg.aut_per_native;
    lo.seed = cfg.seed;
    BbProgram prog = run_stage("lowering", [&] {
        BbProgram p = lower(r.deferred, r.allocation, table, costs, oracle, lo);
        check_topology(p);
        return p;
    });
    if (cfg.insertion) {
        InsertionOptions io;
        io.top_segments = cfg.insertion_top;
        io.threshold = cfg.insertion_threshold;
        io.aut_per_native = cfg.aut_per_native;
        auto [optimized, rep] = run_stage("insertion", [&] {
            return apply_insertion(prog, table, default_library(table, cfg.library_cap), costs, io);
        });
        prog = std::move(optimized);
        r.insertion = std::move(rep);
    }
    run_stage("schedule", [&] {
        const InstrDag first = build_dag(prog);
        r.program = materialize_waits(first, costs);
        r.dag = build_dag(r.program);
        r.report = estimate(r.dag, costs);
    });
    return r;
}

inline CompileResult compile(const RunConfig &cfg) {
    const PbcCircuit circuit = load_circuit(cfg);
    const CostTable table = load_cost_table(cfg);
    const CostModel costs = load_cost_model(cfg);
    return compile(cfg, circuit, table, costs);
}

inline nlohmann::ordered_json report_json(const RunConfig &cfg, const CompileResult &r) {
    nlohmann::ordered_json j;
    j["tool"] = "bbc";
    j["version"] = kVersion;
    j["config"] = to_json(cfg);
    j["watermark"] = r.synthetic_table ? nlohmann::ordered_json(kSyntheticWatermark) : nlohmann::ordered_json(nullptr);
    j["deferral"] = {{"engine", to_string(cfg.deferral)},
                     {"cliffords_removed", r.deferred.stats.cliffords_removed},
                     {"word_ops", r.deferred.stats.word_ops},
                     {"surviving_ops", r.deferred.circuit.ops.size()}};
    nlohmann::ordered_json alloc = nlohmann::ordered_json::array();
    for (std::size_t m = 0; m < r.allocation.num_modules; ++m) {
        alloc.push_back({{"module", m}, {"qubits", r.allocation.qubits_of(m)}});
    }
    j["allocation"] = {{"modules", r.allocation.num_modules},
                       {"capacity", r.allocation.capacity},
                       {"multi_module_ops", count_multi_module_ops(r.deferred.circuit, r.allocation)},
                       {"table", alloc}};
    nlohmann::ordered_json counts;
    nlohmann::ordered_json p_kind;
    for (InstrKind k : kAllKinds) {
        counts[to_string(k)] = r.report.count(k);
        p_kind[to_string(k)] = r.report.p_by_kind[static_cast<std::size_t>(k)];
    }
    j["counts"] = counts;
    j["inter_split"] = {{"teleportation", r.report.n_inter_tele}, {"communication", r.report.n_inter_comm}};
    j["p_circ"] = r.report.p_circ;
    j["p_cliff"] = r.report.p_cliff;
    j["t_circ"] = r.report.t_circ;
    j["t_cliff"] = r.report.t_cliff;
    j["p_by_kind"] = p_kind;
    nlohmann::ordered_json p_origin;
    for (const auto &[o, p] : r.report.p_by_origin) {
        p_origin[o] = p;
    }
    j["p_by_origin"] = p_origin;
    j["insertion"] = {{"enabled", cfg.insertion},
                      {"iterations", r.insertion.iterations},
                      {"windows", r.insertion.windows_applied},
                      {"reverted", r.insertion.reverted},
                      {"t_history", r.insertion.t_history}};
    return j;
}

inline void write_program(const BbProgram &p, std::ostream &out) {
    out << "# modules " << p.num_modules << " factories " << p.num_factories << " capacity " << p.capacity << "\n";
    char buf[160];
    for (const auto &ins : p.instrs) {
        std::snprintf(buf, sizeof(buf), "%s count=%.17g aut=%.17g latency=%.17g module=%d", to_string(ins.kind),
                      ins.count, ins.aut_count, ins.latency, ins.module);
        out << buf;
        if (ins.module2 >= 0) {
            out << "-" << ins.module2;
        }
        out << " origin=" << to_string(ins.origin);
        if (ins.request >= 0) {
            out << " request=" << ins.request;
        }
        if (ins.compute) {
            out << " pauli=" << ins.local.str();
        }
        if (ins.source_op != kNoOp) {
            out << " op=" << ins.source_op;
        }
        out << "\n";
    }
}

}  // namespace bbc
