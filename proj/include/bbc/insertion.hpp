#pragma once

// Clifford insertion. Inside a run of in-module measurements P_1..P_L a
// window (a, b, k) wraps P_a..P_b with C_k^dagger before and C_k after, and
// measures C_k^dagger P_i C_k instead of P_i. The window pays off when the
// conjugated strings are cheaper by more than the cost of the two inserted
// native rotations.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "bbc/cost_table.hpp"
#include "bbc/lowering.hpp"
#include "bbc/scheduler.hpp"

namespace bbc {

template <typename V>
struct WindowProblem {
    std::vector<std::vector<V>> delta;  // delta[k][i], i in [0, L)
    std::vector<V> overhead;            // s per candidate

    std::size_t length() const { return delta.empty() ? 0 : delta.front().size(); }
    std::size_t candidates() const { return delta.size(); }
};

struct Window {
    std::size_t a = 0;  // 1-based, inclusive
    std::size_t b = 0;
    std::size_t k = 0;  // 0-based candidate index
    friend bool operator==(const Window &, const Window &) = default;
};

template <typename V>
struct WindowSolution {
    std::vector<Window> windows;  // ascending
    V net{};
};

/// One-pass DP over positions: dp[i] = max(dp[i-1], max_k close_k[i]) with
/// close_k[i] = base_k[i] + pref_k[i]. Ties prefer skipping. O(K L) time.
template <typename V>
WindowSolution<V> solve_windows(const WindowProblem<V> &p) {
    const std::size_t L = p.length();
    const std::size_t K = p.candidates();
    if (p.overhead.size() != K) {
        throw std::invalid_argument("one overhead per candidate required");
    }
    for (const auto &row : p.delta) {
        if (row.size() != L) {
            throw std::invalid_argument("ragged delta table");
        }
    }
    std::vector<V> dp(L + 1, V{});
    std::vector<V> pref(K, V{});
    std::vector<V> base(K);
    std::vector<std::size_t> base_start(K, 1);
    for (std::size_t k = 0; k < K; ++k) {
        base[k] = -p.overhead[k];
    }
    struct Choice {
        bool close = false;
        std::size_t k = 0;
        std::size_t start = 0;
    };
    std::vector<Choice> choice(L + 1);
    for (std::size_t i = 1; i <= L; ++i) {
        dp[i] = dp[i - 1];
        for (std::size_t k = 0; k < K; ++k) {
            pref[k] += p.delta[k][i - 1];
            const V close = base[k] + pref[k];
            if (close > dp[i]) {
                dp[i] = close;
                choice[i] = {true, k, base_start[k]};
            }
        }
        for (std::size_t k = 0; k < K; ++k) {
            const V candidate = dp[i] - pref[k] - p.overhead[k];
            if (candidate > base[k]) {
                base[k] = candidate;
                base_start[k] = i + 1;
            }
        }
    }
    WindowSolution<V> sol;
    sol.net = dp[L];
    for (std::size_t i = L; i > 0;) {
        if (!choice[i].close) {
            --i;
            continue;
        }
        sol.windows.push_back({choice[i].start, i, choice[i].k});
        i = choice[i].start - 1;
    }
    std::reverse(sol.windows.begin(), sol.windows.end());
    return sol;
}

/// A candidate Clifford: the pi/4 rotation about `axis` on the compute qubits.
struct CliffordCandidate {
    SymplecticVector axis;
    int cost = 1;
    int overhead() const { return 2 * kNativeRotationMeasurements * cost; }
};

/// Cheapest table entries, lexicographic, capped.
inline std::vector<CliffordCandidate> default_library(const CostTable &table, std::size_t cap = 64) {
    std::vector<CliffordCandidate> lib;
    for (auto &v : table.cheapest(cap)) {
        const int c = table.cost(v);
        lib.push_back({std::move(v), c});
    }
    return lib;
}

struct InsertionOptions {
    std::size_t top_segments = 5;
    double threshold = 0.01;
    std::size_t max_iterations = 100;
    double aut_per_native = 2.0;
};

/// One applied window, kept for audit: the run before and after the rewrite.
struct InsertionRecord {
    int module = -1;
    SignedPauli axis;
    std::vector<SignedPauli> original;
    std::vector<SignedPauli> rewritten;
    int net = 0;
};

struct InsertionReport {
    std::size_t iterations = 0;
    std::vector<double> t_history;  // t_circ before the first and after each accepted iteration
    std::size_t windows_applied = 0;
    bool reverted = false;
    std::vector<InsertionRecord> records;
};

namespace detail {

inline SignedPauli conjugate_for_window(const SymplecticVector &axis, const SignedPauli &p) {
    return conjugate_by_rotation(SignedPauli(axis), +1, p);
}

inline void set_compute_payload(BbInstr &ins, SignedPauli local, const CostTable &table, const CostModel &m,
                                const BbProgram &prog, double aut_per_native, int count_override = -1) {
    ins.local = std::move(local);
    ins.cost = table.cost(ins.local.vector);
    ins.count = count_override >= 0 ? count_override : ins.cost;
    ins.aut_count = aut_per_native * ins.count;
    refresh_latency(ins, m);
    ins.uses.clear();
    ins.uses.push_back(Resource::pivot(static_cast<std::size_t>(ins.module)));
    for (std::size_t q : ins.local.vector.support()) {
        ins.uses.push_back(Resource::qubit(prog.module_qubits[static_cast<std::size_t>(ins.module)][q]));
    }
}

struct PlannedWindow {
    std::vector<std::size_t> positions;  // program indices, ascending
    std::size_t k = 0;
    int net = 0;
};

struct SegmentPlan {
    std::size_t segment = 0;
    int net = 0;
    std::vector<PlannedWindow> windows;
};

inline SegmentPlan plan_segment(const BbProgram &prog, const Segment &seg, std::size_t seg_index,
                                const CostTable &table, const std::vector<CliffordCandidate> &library) {
    SegmentPlan plan;
    plan.segment = seg_index;
    const std::size_t lo = *std::min_element(seg.nodes.begin(), seg.nodes.end());
    const std::size_t hi = *std::max_element(seg.nodes.begin(), seg.nodes.end());
    std::vector<std::vector<std::size_t>> runs(1);
    for (std::size_t i = lo; i <= hi; ++i) {
        const auto &ins = prog.instrs[i];
        if (!ins.compute || ins.module != seg.module) {
            continue;
        }
        if (ins.inserted) {
            runs.emplace_back();
            continue;
        }
        runs.back().push_back(i);
    }
    for (const auto &run : runs) {
        if (run.empty()) {
            continue;
        }
        WindowProblem<int> problem;
        for (const auto &cand : library) {
            std::vector<int> row;
            row.reserve(run.size());
            for (std::size_t idx : run) {
                const auto &ins = prog.instrs[idx];
                const SignedPauli conj = conjugate_for_window(cand.axis, ins.local);
                row.push_back(ins.cost - table.cost(conj.vector));
            }
            problem.delta.push_back(std::move(row));
            problem.overhead.push_back(cand.overhead());
        }
        const auto sol = solve_windows(problem);
        plan.net += sol.net;
        for (const auto &w : sol.windows) {
            PlannedWindow pw;
            pw.k = w.k;
            for (std::size_t i = w.a; i <= w.b; ++i) {
                pw.positions.push_back(run[i - 1]);
            }
            int gain = -library[w.k].overhead();
            for (std::size_t i = w.a; i <= w.b; ++i) {
                gain += problem.delta[w.k][i - 1];
            }
            pw.net = gain;
            plan.windows.push_back(std::move(pw));
        }
    }
    return plan;
}

inline BbInstr clifford_node(const BbInstr &like, const CliffordCandidate &cand, int direction,
                             const CostTable &table, const CostModel &m, const BbProgram &prog,
                             double aut_per_native) {
    BbInstr ins;
    ins.kind = InstrKind::In;
    ins.origin = Origin::Measurement;
    ins.module = like.module;
    ins.source_op = like.source_op;
    ins.compute = true;
    ins.inserted = true;
    set_compute_payload(ins, SignedPauli(cand.axis, direction < 0), table, m, prog, aut_per_native,
                        kNativeRotationMeasurements * cand.cost);
    return ins;
}

}  // namespace detail

/// Iterative driver: plan windows on the top segments of the critical path,
/// rewrite, rebuild, and stop when the relative gain drops below the threshold.
/// A rewrite that would lengthen the circuit is discarded.
inline std::pair<BbProgram, InsertionReport> apply_insertion(const BbProgram &input, const CostTable &table,
                                                             const std::vector<CliffordCandidate> &library,
                                                             const CostModel &m, const InsertionOptions &opt) {
    InsertionReport report;
    BbProgram prog = input;
    if (library.empty()) {
        report.t_history.push_back(build_dag(prog).t_circ);
        return {prog, report};
    }
    for (const auto &cand : library) {
        if (cand.axis.num_qubits() != table.num_qubits()) {
            throw InputError("library entry '" + cand.axis.str() + "' does not match the cost table width");
        }
    }
    InstrDag dag = build_dag(prog);
    report.t_history.push_back(dag.t_circ);
    while (report.iterations < opt.max_iterations) {
        const CriticalPath cp = critical_path(dag);
        const auto segments = extract_segments(dag, cp);
        std::vector<detail::SegmentPlan> plans;
        for (std::size_t s = 0; s < segments.size(); ++s) {
            auto plan = detail::plan_segment(prog, segments[s], s, table, library);
            if (plan.net > 0) {
                plans.push_back(std::move(plan));
            }
        }
        if (plans.empty()) {
            break;
        }
        std::stable_sort(plans.begin(), plans.end(),
                         [](const auto &x, const auto &y) { return x.net > y.net; });
        if (plans.size() > opt.top_segments) {
            plans.resize(opt.top_segments);
        }

        BbProgram next = prog;
        std::map<std::size_t, std::vector<BbInstr>> before;
        std::map<std::size_t, std::vector<BbInstr>> after;
        std::vector<InsertionRecord> records;
        for (const auto &plan : plans) {
            for (const auto &w : plan.windows) {
                const auto &cand = library[w.k];
                InsertionRecord rec;
                rec.module = prog.instrs[w.positions.front()].module;
                rec.axis = SignedPauli(cand.axis);
                rec.net = w.net;
                for (std::size_t idx : w.positions) {
                    BbInstr &ins = next.instrs[idx];
                    rec.original.push_back(ins.local);
                    SignedPauli conj = detail::conjugate_for_window(cand.axis, ins.local);
                    rec.rewritten.push_back(conj);
                    detail::set_compute_payload(ins, std::move(conj), table, m, next, opt.aut_per_native);
                }
                const auto &first = prog.instrs[w.positions.front()];
                const auto &last = prog.instrs[w.positions.back()];
                before[w.positions.front()].push_back(
                    detail::clifford_node(first, cand, -1, table, m, next, opt.aut_per_native));
                after[w.positions.back()].push_back(
                    detail::clifford_node(last, cand, +1, table, m, next, opt.aut_per_native));
                records.push_back(std::move(rec));
            }
        }
        std::vector<BbInstr> merged;
        merged.reserve(next.instrs.size() + 2 * records.size());
        for (std::size_t i = 0; i < next.instrs.size(); ++i) {
            if (auto it = before.find(i); it != before.end()) {
                merged.insert(merged.end(), it->second.begin(), it->second.end());
            }
            merged.push_back(next.instrs[i]);
            if (auto it = after.find(i); it != after.end()) {
                merged.insert(merged.end(), it->second.begin(), it->second.end());
            }
        }
        next.instrs = std::move(merged);

        InstrDag next_dag = build_dag(next);
        ++report.iterations;
        if (next_dag.t_circ > dag.t_circ) {
            report.reverted = true;
            break;
        }
        const double gain = dag.t_circ > 0.0 ? (dag.t_circ - next_dag.t_circ) / dag.t_circ : 0.0;
        prog = std::move(next);
        dag = std::move(next_dag);
        report.t_history.push_back(dag.t_circ);
        report.windows_applied += records.size();
        for (auto &r : records) {
            report.records.push_back(std::move(r));
        }
        if (gain < opt.threshold) {
            break;
        }
    }
    return {prog, report};
}

/// Pauli-level action of a run treated as pi/4 rotations in time order.
inline SymplecticTransform run_action(std::size_t k, const std::vector<std::pair<SignedPauli, int>> &ops) {
    SymplecticTransform s = SymplecticTransform::identity(k);
    for (const auto &[p, dir] : ops) {
        s.compose_rotation(p, dir);
    }
    return s;
}

/// C^dagger (rewritten run) C has the same action as the original run.
inline bool record_preserves_action(const InsertionRecord &rec) {
    const std::size_t k = rec.axis.num_qubits();
    std::vector<std::pair<SignedPauli, int>> original;
    for (const auto &p : rec.original) {
        original.emplace_back(p, +1);
    }
    std::vector<std::pair<SignedPauli, int>> rewritten;
    rewritten.emplace_back(rec.axis, -1);
    for (const auto &p : rec.rewritten) {
        rewritten.emplace_back(p, +1);
    }
    rewritten.emplace_back(rec.axis, +1);
    return run_action(k, original) == run_action(k, rewritten);
}

}  // namespace bbc
