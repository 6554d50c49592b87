// bbc: compile PBC circuits for modular bicycle-code machines and estimate cost.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bbc/bb_code.hpp"
#include "bbc/pipeline.hpp"
#include "bbc/sweep.hpp"

namespace {

using bbc::InputError;

// Run-config flags shared by compile and sweep. Every value is optional so a
// --config file or environment value is only overridden when given.
struct ConfigFlags {
    std::string config_file;
    std::optional<std::string> input;
    std::optional<std::size_t> modules, factories, capacity, insertion_top, library_cap;
    std::optional<std::string> placement, deferral, alloc, insertion, cost_model, cost_table, mode;
    std::optional<double> insertion_threshold_pct, epsilon, aut_per_native;
    std::optional<std::uint64_t> seed;
    // generator
    std::optional<std::size_t> gen_n, gen_length;
    std::optional<double> gen_clifford, gen_arb, gen_tlike;
    std::optional<std::string> gen_weights;
    std::optional<std::uint64_t> gen_seed;

    void add(CLI::App &app, bool with_input) {
        app.add_option("--config", config_file, "JSON run config (or a previous report) to start from")
            ->check(CLI::ExistingFile);
        if (with_input) {
            app.add_option("--input,-i", input, "Circuit file")->envname("BBC_INPUT");
        }
        app.add_option("--modules,-M", modules, "LPU count (default: fewest that fit)")->envname("BBC_MODULES");
        app.add_option("--factories,-F", factories, "Magic-state factory count")->envname("BBC_FACTORIES");
        app.add_option("--capacity", capacity, "Compute qubits per LPU")->envname("BBC_CAPACITY");
        app.add_option("--placement", placement, "Rotation synthesis placement")
            ->check(CLI::IsMember({"lpu", "fac"}))
            ->envname("BBC_PLACEMENT");
        app.add_option("--deferral", deferral, "Clifford deferral engine")
            ->check(CLI::IsMember({"conventional", "transvection"}))
            ->envname("BBC_DEFERRAL");
        app.add_option("--alloc", alloc, "Qubit allocator")
            ->check(CLI::IsMember({"contiguous", "greedy"}))
            ->envname("BBC_ALLOC");
        app.add_option("--insertion", insertion, "Clifford insertion")
            ->check(CLI::IsMember({"on", "off"}))
            ->envname("BBC_INSERTION");
        app.add_option("--insertion-top", insertion_top, "Segments rewritten per iteration")
            ->envname("BBC_INSERTION_TOP");
        app.add_option("--insertion-threshold", insertion_threshold_pct, "Stop below this gain, in percent")
            ->check(CLI::Range(0.0, 100.0))
            ->envname("BBC_INSERTION_THRESHOLD");
        app.add_option("--library-cap", library_cap, "Candidate Clifford library size")->envname("BBC_LIBRARY_CAP");
        app.add_option("--cost-model", cost_model, "Instruction cost file (key = value)")->envname("BBC_COST_MODEL");
        app.add_option("--cost-table", cost_table, "Binary in-module cost table")->envname("BBC_COST_TABLE");
        app.add_option("--epsilon", epsilon, "Synthesis precision (1e-3 or 1e-4)")->envname("BBC_EPSILON");
        app.add_option("--mode", mode, "Expected counts or sampled synthesis")
            ->check(CLI::IsMember({"expected", "sampled"}))
            ->envname("BBC_MODE");
        app.add_option("--seed", seed, "Lowering RNG seed")->envname("BBC_SEED");
        app.add_option("--aut-per-native", aut_per_native, "aut steps per native measurement")
            ->envname("BBC_AUT_PER_NATIVE");
        add_gen(app);
    }

    void add_gen(CLI::App &app) {
        app.add_option("--gen-n", gen_n, "Generate a random workload on this many qubits");
        app.add_option("--gen-length", gen_length, "Generated op count");
        app.add_option("--gen-clifford", gen_clifford, "Fraction of Clifford rotations");
        app.add_option("--gen-arb", gen_arb, "Fraction of arbitrary-angle rotations");
        app.add_option("--gen-tlike", gen_tlike, "Fraction of pi/8 rotations");
        app.add_option("--gen-weights", gen_weights, "uniform:<lo>:<hi> or bernoulli:<p>");
        app.add_option("--gen-seed", gen_seed, "Generator seed");
    }

    bool any_gen() const {
        return gen_n || gen_length || gen_clifford || gen_arb || gen_tlike || gen_weights || gen_seed;
    }

    bbc::GenSpec gen_spec(bbc::GenSpec g = {}) const {
        if (gen_n) g.n_qubits = *gen_n;
        if (gen_length) g.length = *gen_length;
        if (gen_clifford) g.clifford_frac = *gen_clifford;
        if (gen_arb) g.arb_frac = *gen_arb;
        if (gen_tlike) g.tlike_frac = *gen_tlike;
        if (gen_weights) g.weights = bbc::WeightDistribution::parse(*gen_weights);
        if (gen_seed) g.seed = *gen_seed;
        return g;
    }

    bbc::RunConfig resolve() const {
        bbc::RunConfig c;
        if (!config_file.empty()) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(bbc::read_text_file(config_file));
            } catch (const nlohmann::json::parse_error &e) {
                throw InputError("config '" + config_file + "': " + e.what());
            }
            c = bbc::config_from_json(j);
        }
        if (input) {
            c.input = *input;
            c.gen.reset();
        }
        if (any_gen()) {
            c.gen = gen_spec(c.gen.value_or(bbc::GenSpec{}));
            c.input.clear();
        }
        if (modules) c.modules = *modules;
        if (factories) c.factories = *factories;
        if (capacity) c.capacity = *capacity;
        if (placement) c.placement = bbc::parse_placement(*placement);
        if (deferral) c.deferral = bbc::parse_deferral(*deferral);
        if (alloc) c.allocator = bbc::parse_allocator(*alloc);
        if (insertion) c.insertion = *insertion == "on";
        if (insertion_top) c.insertion_top = *insertion_top;
        if (insertion_threshold_pct) c.insertion_threshold = *insertion_threshold_pct / 100.0;
        if (library_cap) c.library_cap = *library_cap;
        if (cost_model) c.cost_model_path = *cost_model;
        if (cost_table) c.cost_table_path = *cost_table;
        if (epsilon) c.epsilon = *epsilon;
        if (mode) c.mode = bbc::parse_mode(*mode);
        if (seed) c.seed = *seed;
        if (aut_per_native) c.aut_per_native = *aut_per_native;
        return c;
    }
};

void write_or_print(const std::string &path, const std::string &text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write '" + path + "'");
    }
    out << text;
}

std::vector<double> parse_list(const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto a = bbc::Angle::parse(item);
        if (!a || a->is_exact()) {
            throw InputError("bad number '" + item + "' in list '" + text + "'");
        }
        out.push_back(a->value());
    }
    if (out.empty()) {
        throw InputError("empty list");
    }
    return out;
}

int run_compile(const ConfigFlags &flags, const std::string &report, const std::string &program,
                const std::string &dag) {
    bbc::RunConfig cfg = flags.resolve();
    cfg.report_path = report;
    cfg.program_path = program;
    cfg.dag_path = dag;
    const bbc::CompileResult r = bbc::compile(cfg);
    write_or_print(report, bbc::report_json(cfg, r).dump(2) + "\n");
    if (!program.empty()) {
        std::ostringstream os;
        bbc::write_program(r.program, os);
        write_or_print(program, os.str());
    }
    if (!dag.empty()) {
        std::ostringstream os;
        bbc::dump_dag(r.dag, os);
        write_or_print(dag, os.str());
    }
    return 0;
}

int run_sweep_ratio(const std::string &p_list, const std::string &t_list, double epsilon,
                    const std::string &cost_model, const std::string &output) {
    const bbc::CostModel base = cost_model.empty() ? bbc::CostModel::reference() : bbc::CostModel::load(cost_model);
    const auto cells = bbc::sweep_ratio(base, parse_list(p_list), parse_list(t_list), epsilon);
    write_or_print(output, bbc::ratio_csv(cells));
    return 0;
}

int run_sweep_system(const ConfigFlags &flags, const std::vector<std::string> &inputs, std::size_t gen_count,
                     const std::vector<std::size_t> &modules, const std::vector<std::size_t> &factories,
                     std::size_t jobs, const std::string &output, const std::string &summary) {
    bbc::RunConfig base = flags.resolve();
    std::vector<bbc::Workload> workloads;
    for (const auto &path : inputs) {
        workloads.push_back({path, bbc::parse_circuit(bbc::read_text_file(path))});
    }
    if (gen_count > 0) {
        const bbc::GenSpec g = flags.gen_spec(base.gen.value_or(bbc::GenSpec{}));
        for (std::size_t i = 0; i < gen_count; ++i) {
            bbc::GenSpec gi = g;
            gi.seed = g.seed + i;
            workloads.push_back({"gen" + std::to_string(gi.seed), bbc::gen_random(gi)});
        }
    }
    if (workloads.empty()) {
        throw InputError("no workloads: pass --inputs and/or --gen-count");
    }
    base.input = "sweep";
    base.gen.reset();
    bbc::SystemSweepSpec spec;
    spec.modules = modules;
    spec.factories = factories;
    spec.jobs = jobs;
    spec.output_path = output;
    const bbc::CostTable table = bbc::load_cost_table(base);
    const bbc::CostModel costs = bbc::load_cost_model(base);
    const auto rows = bbc::sweep_system(workloads, base, spec, table, costs);
    if (output.empty()) {
        std::cout << bbc::system_csv_header();
        for (const auto &r : rows) {
            std::cout << bbc::system_csv_row(r);
        }
    }
    std::string text = "M,F,workloads,failure_ratio_gmean,duration_ratio_gmean\n";
    char buf[160];
    for (const auto &s : bbc::summarize_ratios(rows)) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%zu,%.17g,%.17g\n", s.modules, s.factories, s.workloads,
                      s.failure_ratio_gmean, s.duration_ratio_gmean);
        text += buf;
    }
    if (summary.empty()) {
        std::cerr << text;
    } else {
        write_or_print(summary, text);
    }
    return 0;
}

int run_gen(const ConfigFlags &flags, const std::string &output) {
    const bbc::GenSpec g = flags.gen_spec();
    write_or_print(output, bbc::render_circuit(bbc::gen_random(g)));
    return 0;
}

int run_verify(const std::string &path) {
    const bbc::CostTable t = bbc::CostTable::load(path);
    auto [hist, other] = t.level_histogram();
    std::uint64_t total = other;
    std::cout << "qubits " << t.num_qubits() << "\n";
    for (std::size_t j = 0; j < hist.size(); ++j) {
        std::cout << "cost " << 1 + 6 * j << ": " << hist[j] << "\n";
        total += hist[j];
    }
    std::cout << "other: " << other << "\ntotal: " << total << "\n";
    if (t.num_qubits() == 11) {
        const bool ok = bbc::matches_gross_histogram(t);
        std::cout << "gross-code histogram: " << (ok ? "match" : "MISMATCH") << "\n";
        return ok ? 0 : 1;
    }
    return 0;
}

// Spec file: {"compute_qubits": k, "measurements": ["<pivot letter><k letters>", ...],
//             "automorphisms": [[perm of 0..k-1], ...]}
int run_closure(const std::string &spec_path, const std::string &output) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(bbc::read_text_file(spec_path));
    } catch (const nlohmann::json::parse_error &e) {
        throw InputError("closure spec: " + std::string(e.what()));
    }
    bbc::NativeSetSpec spec;
    try {
        spec.compute_qubits = j.at("compute_qubits").get<std::size_t>();
        for (const auto &m : j.at("measurements")) {
            spec.measurements.push_back(bbc::SymplecticVector::from_letters(m.get<std::string>()));
        }
        if (j.contains("automorphisms")) {
            spec.automorphisms = j["automorphisms"].get<std::vector<std::vector<std::size_t>>>();
        }
    } catch (const nlohmann::json::exception &e) {
        throw InputError("closure spec: " + std::string(e.what()));
    } catch (const std::invalid_argument &e) {
        throw InputError("closure spec: " + std::string(e.what()));
    }
    const bbc::ClosureResult r = bbc::closure_costs(spec);
    std::cout << "qubits " << spec.compute_qubits << "\ndepth " << r.depth << "\n";
    for (const auto &[cost, n] : r.table.histogram()) {
        std::cout << (cost == 0 ? std::string("unreachable") : "cost " + std::to_string(cost)) << ": " << n << "\n";
    }
    if (!output.empty()) {
        r.table.save(output);
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"bbc: PBC compiler and resource estimator for modular bicycle-code architectures"};
    app.set_version_flag("--version", bbc::kVersion);
    app.require_subcommand(1);

    ConfigFlags compile_flags;
    std::string report_path, program_path, dag_path;
    auto *compile = app.add_subcommand("compile", "Compile one circuit and report p_circ / t_circ");
    compile_flags.add(*compile, true);
    compile->add_option("--report,-o", report_path, "Report JSON path (default stdout)");
    compile->add_option("--program", program_path, "Write the lowered instruction stream");
    compile->add_option("--dump-dag", dag_path, "Write a plain-text DAG listing");

    auto *sweep = app.add_subcommand("sweep", "Parameter sweeps");
    sweep->require_subcommand(1);
    std::string p_list = "0.001,0.01,0.1,1,10", t_list = "0.5,1,2";
    double ratio_epsilon = 1e-3;
    std::string ratio_model, ratio_out;
    auto *ratio = sweep->add_subcommand("ratio", "Per-rotation syn@fac / syn@LPU ratios over cost ratios");
    ratio->add_option("--p-ratios", p_list, "Comma-separated p_T/p_inter values");
    ratio->add_option("--t-ratios", t_list, "Comma-separated t_T/t_inter values");
    ratio->add_option("--epsilon", ratio_epsilon, "Synthesis precision");
    ratio->add_option("--cost-model", ratio_model, "Base cost file");
    ratio->add_option("--output,-o", ratio_out, "CSV path (default stdout)");

    ConfigFlags system_flags;
    std::vector<std::string> sweep_inputs;
    std::size_t gen_count = 0;
    std::vector<std::size_t> sweep_modules = {3, 4, 5};
    std::vector<std::size_t> sweep_factories = {1, 2};
    std::size_t jobs = 1;
    std::string system_out, summary_out;
    auto *system = sweep->add_subcommand("system", "Whole-circuit ratios over workloads x M x F x placement");
    system_flags.add(*system, false);
    system->add_option("--inputs", sweep_inputs, "Circuit files")->check(CLI::ExistingFile);
    system->add_option("--gen-count", gen_count, "Random workloads (seeds gen-seed, gen-seed+1, ...)");
    system->add_option("--modules-list", sweep_modules, "LPU counts")->delimiter(',');
    system->add_option("--factories-list", sweep_factories, "Factory counts")->delimiter(',');
    system->add_option("--jobs,-j", jobs, "Worker threads")->envname("BBC_JOBS");
    system->add_option("--output,-o", system_out, "CSV path; existing ok rows are skipped on rerun");
    system->add_option("--summary", summary_out, "Geometric-mean summary CSV (default stderr)");

    ConfigFlags gen_flags;
    std::string gen_out;
    auto *gen = app.add_subcommand("gen", "Generate a seeded random circuit");
    gen_flags.add_gen(*gen);
    gen->add_option("--output,-o", gen_out, "Circuit path (default stdout)");

    auto *table = app.add_subcommand("cost-table", "Cost table utilities");
    table->require_subcommand(1);
    std::string verify_path;
    auto *verify = table->add_subcommand("verify", "Check a table file and print its histogram");
    verify->add_option("file", verify_path, "Table file")->required();
    std::string closure_spec, closure_out;
    auto *closure = table->add_subcommand("closure", "Run the closure algorithm on a small native-set spec");
    closure->add_option("spec", closure_spec, "JSON native-set spec")->required()->check(CLI::ExistingFile);
    closure->add_option("--output,-o", closure_out, "Write the resulting table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*compile) {
            return run_compile(compile_flags, report_path, program_path, dag_path);
        }
        if (*ratio) {
            return run_sweep_ratio(p_list, t_list, ratio_epsilon, ratio_model, ratio_out);
        }
        if (*system) {
            return run_sweep_system(system_flags, sweep_inputs, gen_count, sweep_modules, sweep_factories, jobs,
                                    system_out, summary_out);
        }
        if (*gen) {
            return run_gen(gen_flags, gen_out);
        }
        if (*verify) {
            return run_verify(verify_path);
        }
        if (*closure) {
            return run_closure(closure_spec, closure_out);
        }
    } catch (const bbc::InputError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const bbc::InvariantError &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
