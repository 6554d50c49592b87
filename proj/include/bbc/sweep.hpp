#pragma once

// Sensitivity sweeps: per-rotation placement ratios over cost-ratio grids, and
// whole-system ratios over workloads, LPU counts and factory counts.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "bbc/pipeline.hpp"

namespace bbc {

struct RotationStats {
    double failure = 0.0;
    double duration = 0.0;
    double teleports = 0.0;
};

/// Failure and duration of the synthesis fragment of one rotation, measured
/// with the same estimator and scheduler as full programs.
inline RotationStats rotation_stats(Placement placement, const Angle &angle, const CostModel &m,
                                    const SynthesisOracle &oracle, std::size_t factories = 1,
                                    LoweringMode mode = LoweringMode::Expected, std::uint64_t seed = 1) {
    Rng rng(seed);
    int next_request = 0;
    SynthContext ctx{&m, &oracle, mode, &rng, &next_request};
    const SynthFragment frag =
        placement == Placement::Lpu ? synth_at_lpu(angle, ctx, 0, {}) : synth_at_fac(angle, ctx, 0, {});
    BbProgram p;
    p.num_modules = 1;
    p.num_factories = factories;
    p.instrs = frag.head;
    p.instrs.insert(p.instrs.end(), frag.tail.begin(), frag.tail.end());
    const InstrDag d = build_dag(p);
    const Report r = estimate(d, m);
    return {r.p_circ, r.t_circ, r.count(InstrKind::Tele)};
}

struct RatioCell {
    double p_ratio = 0.0;  // p_T / p_inter
    double t_ratio = 0.0;  // t_T / t_inter
    RotationStats lpu;
    RotationStats fac;
    double failure_ratio() const { return fac.failure / lpu.failure; }
    double duration_ratio() const { return fac.duration / lpu.duration; }
};

/// Moves T's rate and latency so that p_T/p_inter and t_T/t_inter take the given values.
inline CostModel with_t_ratios(CostModel m, double p_ratio, double t_ratio) {
    m.set_log10p(InstrKind::T, std::log10(p_ratio * m.p(InstrKind::Inter)));
    m.set_t(InstrKind::T, t_ratio * m.t(InstrKind::Inter));
    return m;
}

inline std::vector<RatioCell> sweep_ratio(const CostModel &base, const std::vector<double> &p_ratios,
                                          const std::vector<double> &t_ratios, double epsilon) {
    for (double v : p_ratios) {
        if (!(v > 0.0)) {
            throw InputError("ratio grid values must be positive");
        }
    }
    for (double v : t_ratios) {
        if (!(v > 0.0)) {
            throw InputError("ratio grid values must be positive");
        }
    }
    const SynthesisOracle oracle = SynthesisOracle::reference(epsilon);
    const Angle angle = Angle::radians(0.1);
    std::vector<RatioCell> cells;
    for (double pr : p_ratios) {
        for (double tr : t_ratios) {
            const CostModel m = with_t_ratios(base, pr, tr);
            RatioCell c;
            c.p_ratio = pr;
            c.t_ratio = tr;
            c.lpu = rotation_stats(Placement::Lpu, angle, m, oracle);
            c.fac = rotation_stats(Placement::Fac, angle, m, oracle);
            cells.push_back(c);
        }
    }
    return cells;
}

inline std::string ratio_csv(const std::vector<RatioCell> &cells) {
    std::string out =
        "p_T_over_p_inter,t_T_over_t_inter,failure_lpu,failure_fac,failure_ratio,duration_lpu,duration_fac,"
        "duration_ratio\n";
    char buf[320];
    for (const auto &c : cells) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", c.p_ratio, c.t_ratio,
                      c.lpu.failure, c.fac.failure, c.failure_ratio(), c.lpu.duration, c.fac.duration,
                      c.duration_ratio());
        out += buf;
    }
    return out;
}

// ---- system sweep ----

struct Workload {
    std::string name;
    PbcCircuit circuit;
};

struct SystemRow {
    std::string config_id;
    std::string workload;
    std::size_t modules = 0;
    std::size_t factories = 0;
    Placement placement = Placement::Fac;
    Report report;
    std::string status = "ok";
};

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string config_id(const RunConfig &cfg, const std::string &workload) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(workload + "|" + to_json(cfg).dump())));
    return buf;
}

inline std::string system_csv_header() {
    return "config_id,workload,M,F,placement,p_circ,p_Cliff,t_circ,t_Cliff,N_idle,N_aut,N_in,N_inter,N_tele,N_T,"
           "N_ls,N_inter_tele,N_inter_comm,status\n";
}

inline std::string system_csv_row(const SystemRow &r) {
    std::string out = r.config_id + "," + r.workload + "," + std::to_string(r.modules) + "," +
                      std::to_string(r.factories) + "," + to_string(r.placement);
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        out += buf;
    };
    num(r.report.p_circ);
    num(r.report.p_cliff);
    num(r.report.t_circ);
    num(r.report.t_cliff);
    for (InstrKind k : kAllKinds) {
        num(r.report.count(k));
    }
    num(r.report.n_inter_tele);
    num(r.report.n_inter_comm);
    out += "," + r.status + "\n";
    return out;
}

struct SystemSweepSpec {
    std::vector<std::size_t> modules = {3, 4, 5};
    std::vector<std::size_t> factories = {1, 2};
    std::vector<Placement> placements = {Placement::Lpu, Placement::Fac};
    std::size_t jobs = 1;
    std::string output_path;  // rows are appended; existing ok rows are skipped
};

struct RatioSummary {
    std::size_t modules = 0;
    std::size_t factories = 0;
    std::size_t workloads = 0;
    double failure_ratio_gmean = 0.0;
    double duration_ratio_gmean = 0.0;
};

inline double geometric_mean(const std::vector<double> &v) {
    if (v.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double x : v) {
        s += std::log(x);
    }
    return std::exp(s / static_cast<double>(v.size()));
}

inline std::set<std::string> completed_config_ids(const std::string &path) {
    std::set<std::string> done;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.starts_with("config_id")) {
            continue;
        }
        const auto comma = line.find(',');
        if (comma != std::string::npos && line.ends_with(",ok")) {
            done.insert(line.substr(0, comma));
        }
    }
    return done;
}

/// Runs every (workload, M, F, placement) cell. Failed cells are kept with an
/// error status. Rows come back in grid order regardless of `jobs`.
inline std::vector<SystemRow> sweep_system(const std::vector<Workload> &workloads, const RunConfig &base,
                                           const SystemSweepSpec &spec, const CostTable &table,
                                           const CostModel &costs) {
    struct Cell {
        const Workload *w;
        RunConfig cfg;
        SystemRow row;
    };
    std::vector<Cell> cells;
    for (const auto &w : workloads) {
        for (std::size_t m : spec.modules) {
            for (std::size_t f : spec.factories) {
                for (Placement pl : spec.placements) {
                    Cell c{&w, base, {}};
                    c.cfg.input = "workload:" + w.name;
                    c.cfg.gen.reset();
                    c.cfg.modules = m;
                    c.cfg.factories = f;
                    c.cfg.placement = pl;
                    c.row.config_id = config_id(c.cfg, w.name);
                    c.row.workload = w.name;
                    c.row.modules = m;
                    c.row.factories = f;
                    c.row.placement = pl;
                    cells.push_back(std::move(c));
                }
            }
        }
    }
    std::set<std::string> done;
    std::ofstream out;
    if (!spec.output_path.empty()) {
        done = completed_config_ids(spec.output_path);
        const bool fresh = !std::ifstream(spec.output_path).good();
        out.open(spec.output_path, std::ios::app);
        if (!out) {
            throw InputError("cannot write '" + spec.output_path + "'");
        }
        if (fresh) {
            out << system_csv_header();
        }
    }
    std::mutex write_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            Cell &c = cells[i];
            if (done.count(c.row.config_id)) {
                c.row.status = "skipped";
                continue;
            }
            try {
                c.row.report = compile(c.cfg, c.w->circuit, table, costs).report;
            } catch (const std::exception &e) {
                std::string msg = e.what();
                for (char &ch : msg) {
                    if (ch == ',' || ch == '\n') {
                        ch = ';';
                    }
                }
                c.row.status = "error: " + msg;
            }
            if (out.is_open()) {
                std::lock_guard<std::mutex> lock(write_mutex);
                out << system_csv_row(c.row);
                out.flush();
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, spec.jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < jobs; ++t) {
            pool.emplace_back(worker);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    std::vector<SystemRow> rows;
    for (auto &c : cells) {
        rows.push_back(std::move(c.row));
    }
    return rows;
}

/// Geometric means of fac/lpu ratios per (M, F) over workloads with both cells ok.
inline std::vector<RatioSummary> summarize_ratios(const std::vector<SystemRow> &rows) {
    std::map<std::tuple<std::string, std::size_t, std::size_t>, std::pair<const SystemRow *, const SystemRow *>> pairs;
    for (const auto &r : rows) {
        if (r.status != "ok") {
            continue;
        }
        auto &slot = pairs[{r.workload, r.modules, r.factories}];
        (r.placement == Placement::Lpu ? slot.first : slot.second) = &r;
    }
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto &[key, pr] : pairs) {
        if (pr.first == nullptr || pr.second == nullptr) {
            continue;
        }
        auto &g = groups[{std::get<1>(key), std::get<2>(key)}];
        g.first.push_back(pr.second->report.p_circ / pr.first->report.p_circ);
        g.second.push_back(pr.second->report.t_circ / pr.first->report.t_circ);
    }
    std::vector<RatioSummary> out;
    for (const auto &[key, g] : groups) {
        out.push_back({key.first, key.second, g.first.size(), geometric_mean(g.first), geometric_mean(g.second)});
    }
    return out;
}

}  // namespace bbc
