// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit 1 on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bbc/bb_code.hpp"
#include "bbc/sweep.hpp"
#include "dense_oracle.hpp"

using namespace bbc;

namespace {

struct Outcome {
    enum class Status { Pass, Fail, Skip } status = Status::Fail;
    std::string detail;
};

Outcome pass(std::string d) { return {Outcome::Status::Pass, std::move(d)}; }
Outcome fail(std::string d) { return {Outcome::Status::Fail, std::move(d)}; }
Outcome check(bool ok, std::string d) { return ok ? pass(std::move(d)) : fail(std::move(d)); }

std::string fmt(const char *f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a);
    return buf;
}

PbcCircuit random_circuit(std::uint64_t seed, std::size_t n, std::size_t len, double cliff, double arb,
                          double tlike, const std::string &weights) {
    GenSpec g;
    g.n_qubits = n;
    g.length = len;
    g.clifford_frac = cliff;
    g.arb_frac = arb;
    g.tlike_frac = tlike;
    g.weights = WeightDistribution::parse(weights);
    g.seed = seed;
    return gen_random(g);
}

// ---- 1 ----
Outcome placement_ratio() {
    const auto m = CostModel::reference();
    const auto o = SynthesisOracle::reference(1e-3);
    const auto lpu = rotation_stats(Placement::Lpu, Angle::radians(0.1), m, o);
    const auto fac = rotation_stats(Placement::Fac, Angle::radians(0.1), m, o);
    const double ratio = fac.failure / lpu.failure;
    return check(ratio >= 0.06 && ratio <= 0.08, fmt("failure ratio %.5f", ratio));
}

// ---- 2 ----
Outcome decision_grid() {
    const auto base = CostModel::reference();
    const auto o = SynthesisOracle::reference(1e-3);
    const double p_inter = base.p(InstrKind::Inter);
    int agree = 0;
    int fac_wins = 0;
    for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
            const double t_ratio = std::pow(10.0, -4.0 + 5.0 * i / 19.0);   // 1e-4 .. 10
            const double ls_ratio = std::pow(10.0, -6.0 + 6.0 * j / 19.0);  // 1e-6 .. 1
            CostModel m = base;
            m.set_log10p(InstrKind::T, std::log10(t_ratio * p_inter));
            m.set_log10p(InstrKind::Ls, std::log10(ls_ratio * p_inter));
            const double p_fac = rotation_stats(Placement::Fac, Angle::radians(0.1), m, o).failure;
            const double p_lpu = rotation_stats(Placement::Lpu, Angle::radians(0.1), m, o).failure;
            const Placement want = p_fac < p_lpu ? Placement::Fac : Placement::Lpu;
            agree += placement_decision(m, o.mean) == want ? 1 : 0;
            fac_wins += want == Placement::Fac ? 1 : 0;
        }
    }
    return check(agree == 400, std::to_string(agree) + "/400 agree, fac preferred in " + std::to_string(fac_wins));
}

// ---- 3 ----
Outcome deferral_engines() {
    std::mt19937_64 rng(2024);
    int same = 0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t n = 1 + rng() % 8;
        const std::size_t len = 1 + rng() % 300;
        const auto c = random_circuit(rng(), n, len, 0.5, 0.25, 0.1, "uniform:1:" + std::to_string(n));
        same += defer_conventional(c).circuit == defer_transvection(c).circuit ? 1 : 0;
    }
    return check(same == 1000, std::to_string(same) + "/1000 identical");
}

// ---- 4 ----
oracle::Mat dense(const SignedPauli &p) { return oracle::pauli(p.vector.str(), p.negative); }

oracle::Mat unitary_of(const std::vector<PbcOp> &ops, std::size_t n) {
    oracle::Mat u = oracle::Mat::identity(std::size_t{1} << n);
    for (const auto &op : ops) {
        u = oracle::rotation(dense(op.pauli), op.angle.value()) * u;
    }
    return u;
}

Outcome deferral_dense() {
    std::mt19937_64 rng(77);
    int ok = 0;
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + rng() % 3;
        const auto c = random_circuit(rng(), n, 2 + rng() % 20, 0.5, 0.35, 0.15, "uniform:1:" + std::to_string(n));
        std::vector<PbcOp> cliffords;
        for (const auto &op : c.ops) {
            if (op.is_clifford_rotation()) cliffords.push_back(op);
        }
        const auto d = defer_transvection(c);
        const auto trailing = unitary_of(cliffords, n);
        const auto before = unitary_of(c.ops, n);
        const auto after = trailing * unitary_of(d.circuit.ops, n);
        bool good = oracle::equal_up_to_phase(before, after, 1e-10);
        // The tracked symplectic map must be the Pauli action of the trailing Clifford.
        for (std::size_t q = 0; q < n && good; ++q) {
            for (char letter : {'X', 'Z'}) {
                std::string s(n, 'I');
                s[q] = letter;
                const auto p = SignedPauli::parse(s);
                const auto image = d.trailing->apply(p);
                const auto conj = oracle::adjoint(trailing) * dense(p) * trailing;
                const double diff = oracle::max_abs_diff(conj, dense(image));
                worst = std::max(worst, diff);
                good = good && diff < 1e-10;
            }
        }
        ok += good ? 1 : 0;
    }
    return check(ok == 200, std::to_string(ok) + "/200 agree, trailing-map deviation " + fmt("%.1e", worst));
}

// ---- 5 ----
Outcome complexity() {
    const std::size_t n = 12;
    std::vector<double> tv_norm;
    std::vector<double> conv_norm;
    double conv_over_tv = 0.0;
    for (std::size_t L : {1000u, 10000u, 100000u}) {
        // Adversarial shape: every Clifford first, then the non-Clifford tail.
        const auto prefix = random_circuit(L, n, L / 2, 1.0, 0.0, 0.0, "uniform:1:12");
        const auto tail = random_circuit(L + 1, n, L - L / 2, 0.0, 0.8, 0.0, "uniform:1:12");
        PbcCircuit c = prefix;
        c.ops.insert(c.ops.end(), tail.ops.begin(), tail.ops.end());
        const double tv = static_cast<double>(defer_transvection(c).stats.word_ops);
        const double conv = static_cast<double>(defer_conventional(c).stats.word_ops);
        tv_norm.push_back(tv / (static_cast<double>(n * n) * static_cast<double>(L)));
        conv_norm.push_back(conv / static_cast<double>(L));
        conv_over_tv = conv / tv;
    }
    const double spread = *std::max_element(tv_norm.begin(), tv_norm.end()) /
                          *std::min_element(tv_norm.begin(), tv_norm.end());
    const double growth = conv_norm.back() / conv_norm.front();
    const bool ok = spread <= 2.0 && conv_over_tv >= 5.0 && growth >= 5.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf), "transvection ops/(n^2 L) spread %.3f, conventional/transvection at 1e5 %.1fx, "
                  "conventional ops/L growth %.1fx", spread, conv_over_tv, growth);
    return check(ok, buf);
}

// ---- 6 ----
int exhaustive_windows(const WindowProblem<int> &p) {
    const std::size_t L = p.length();
    int best = 0;
    // Each disjoint window set is visited exactly once.
    std::function<void(std::size_t, int)> walk = [&](std::size_t i, int acc) {
        if (i == L) {
            best = std::max(best, acc);
            return;
        }
        walk(i + 1, acc);
        for (std::size_t k = 0; k < p.candidates(); ++k) {
            int sum = acc - p.overhead[k];
            for (std::size_t j = i; j < L; ++j) {
                sum += p.delta[k][j];
                walk(j + 1, sum);
            }
        }
    };
    walk(0, 0);
    return best;
}

Outcome dp_optimality() {
    std::mt19937_64 rng(99);
    int ok = 0;
    for (int t = 0; t < 10000; ++t) {
        WindowProblem<int> p;
        const std::size_t L = 1 + rng() % 10;
        const std::size_t K = 1 + rng() % 3;
        for (std::size_t k = 0; k < K; ++k) {
            std::vector<int> row;
            for (std::size_t i = 0; i < L; ++i) row.push_back(static_cast<int>(rng() % 31) - 12);
            p.delta.push_back(row);
            p.overhead.push_back(static_cast<int>(rng() % 13));
        }
        const auto sol = solve_windows(p);
        int value = 0;
        for (const auto &w : sol.windows) {
            value -= p.overhead[w.k];
            for (std::size_t i = w.a; i <= w.b; ++i) value += p.delta[w.k][i - 1];
        }
        const int want = exhaustive_windows(p);
        ok += (sol.net == want && value == want) ? 1 : 0;
    }
    return check(ok == 10000, std::to_string(ok) + "/10000 optimal");
}

// ---- 7 ----
Outcome insertion_safety() {
    const auto table = CostTable::fallback(11);
    const auto lib = default_library(table, 64);
    const auto m = CostModel::reference();
    const auto o = SynthesisOracle::reference(1e-3);
    int safe = 0;
    std::size_t windows = 0;
    std::size_t records_ok = 0;
    std::size_t records = 0;
    std::size_t improved = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        std::mt19937_64 rng(seed);
        const std::size_t n = 11 + rng() % 23;
        const auto c = random_circuit(seed, n, 150, 0.3, 0.2, 0.05, "uniform:1:8");
        const auto d = defer_transvection(c);
        const auto a = allocate_contiguous(d.circuit, (n + 10) / 11, 11);
        LoweringOptions lo;
        lo.placement = seed % 2 ? Placement::Fac : Placement::Lpu;
        const auto prog = lower(d, a, table, m, o, lo);
        const double before = build_dag(prog).t_circ;
        const auto [out, rep] = apply_insertion(prog, table, lib, m, {});
        const double after = build_dag(out).t_circ;
        bool ok = after <= before;
        for (std::size_t i = 1; i < rep.t_history.size(); ++i) ok = ok && rep.t_history[i] <= rep.t_history[i - 1];
        for (const auto &r : rep.records) {
            ++records;
            if (record_preserves_action(r)) {
                ++records_ok;
            } else {
                ok = false;
            }
        }
        windows += rep.windows_applied;
        improved += after < before ? 1 : 0;
        safe += ok ? 1 : 0;
    }
    return check(safe == 200 && records_ok == records,
                 std::to_string(safe) + "/200 non-increasing, " + std::to_string(records_ok) + "/" +
                     std::to_string(records) + " windows preserve the action, " + std::to_string(improved) +
                     " workloads shortened");
}

// ---- 8 ----
Outcome gross_table() {
    const std::string path = std::string(BBC_SOURCE_DIR) + "/data/gross_cost_table.bin";
    if (!std::filesystem::exists(path)) {
        return {Outcome::Status::Skip, std::string(kSyntheticWatermark) + ": " + path + " not present"};
    }
    const auto t = CostTable::load(path);
    auto [hist, other] = t.level_histogram();
    std::uint64_t sum = other;
    for (auto h : hist) sum += h;
    return check(matches_gross_histogram(t) && sum == 4194303, "histogram sum " + std::to_string(sum));
}

// ---- 9 ----
// Shortest-sandwich BFS on letter strings, independent of the packed encoding.
std::map<std::string, int> sandwich_bfs(const std::set<std::string> &level0, const std::set<std::string> &rotations) {
    auto anticommute = [](const std::string &a, const std::string &b) {
        int c = 0;
        for (std::size_t i = 0; i < a.size(); ++i) c += (a[i] != 'I' && b[i] != 'I' && a[i] != b[i]) ? 1 : 0;
        return c % 2 == 1;
    };
    auto product = [](const std::string &a, const std::string &b) {
        std::string out(a.size(), 'I');
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == 'I') out[i] = b[i];
            else if (b[i] == 'I') out[i] = a[i];
            else if (a[i] != b[i]) out[i] = static_cast<char>('X' + 'Y' + 'Z' - a[i] - b[i]);
        }
        return out;
    };
    std::map<std::string, int> depth;
    std::queue<std::string> q;
    for (const auto &s : level0) {
        depth[s] = 0;
        q.push(s);
    }
    while (!q.empty()) {
        const auto s = q.front();
        q.pop();
        for (const auto &r : rotations) {
            if (!anticommute(s, r)) continue;
            const auto next = product(s, r);
            if (!depth.count(next)) {
                depth[next] = depth[s] + 1;
                q.push(next);
            }
        }
    }
    return depth;
}

Outcome closure_oracle() {
    std::mt19937_64 rng(5);
    int ok = 0;
    const int trials = 300;
    for (int t = 0; t < trials; ++t) {
        const std::size_t k = 1 + rng() % 4;
        NativeSetSpec spec;
        spec.compute_qubits = k;
        const std::size_t count = 1 + rng() % 5;
        while (spec.measurements.size() < count) {
            std::string s(k + 1, 'I');
            for (auto &ch : s) ch = "IXYZ"[rng() % 4];
            if (s.substr(1) == std::string(k, 'I')) continue;
            spec.measurements.push_back(SymplecticVector::from_letters(s));
        }
        if (k > 1 && rng() % 2) {
            std::vector<std::size_t> shift(k);
            for (std::size_t i = 0; i < k; ++i) shift[i] = (i + 1) % k;
            spec.automorphisms.push_back(shift);
        }
        // Orbit of each measurement under the cyclic shifts, by hand.
        std::set<std::string> level0;
        std::set<std::string> rotations;
        const std::size_t orbit = spec.automorphisms.empty() ? 1 : k;
        for (const auto &mv : spec.measurements) {
            const std::string full = mv.str();
            for (std::size_t s = 0; s < orbit; ++s) {
                std::string r(k, 'I');
                for (std::size_t i = 0; i < k; ++i) r[(i + s) % k] = full[i + 1];
                level0.insert(r);
                if (full[0] != 'I') rotations.insert(r);
            }
        }
        const auto depth = sandwich_bfs(level0, rotations);
        const auto result = closure_costs(spec);
        bool good = true;
        for (std::uint64_t idx = 1; idx < result.table.size(); ++idx) {
            const auto it = depth.find(SymplecticVector::from_index(k, idx).str());
            const int want = it == depth.end() ? 0 : 1 + 6 * it->second;
            good = good && result.table.at_index(idx) == want;
        }
        ok += good ? 1 : 0;
    }
    return check(ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " tables match");
}

// ---- 10 ----
Outcome bb_construction() {
    const auto code = gross_code();
    const bool commute = (code.hx * code.hz.transpose()).is_zero();
    return check(code.n == 144 && code.k == 12 && commute,
                 "n=" + std::to_string(code.n) + " k=" + std::to_string(code.k) +
                     (commute ? " H_X H_Z^T = 0" : " H_X H_Z^T != 0"));
}

// ---- 11 ----
Outcome cascade_mc() {
    const auto m = CostModel::reference();
    const auto o = SynthesisOracle::reference(1e-3);
    Rng rng(31337);
    Rng angles(4242);
    int next_request = 0;
    SynthContext ctx{&m, &o, LoweringMode::Sampled, &rng, &next_request};
    const int draws = 1000000;
    double teleports = 0.0;
    for (int i = 0; i < draws; ++i) {
        Angle a;
        do {
            a = Angle::radians(std::numbers::pi * angles.uniform_real());
        } while (a.classify() != AngleClass::Arbitrary);
        for (const auto &ins : synth_at_fac(a, ctx, 0, {}).tail) {
            teleports += ins.kind == InstrKind::Tele ? ins.count : 0.0;
        }
    }
    const double mean = teleports / draws;
    return check(mean >= 1.98 && mean <= 2.02, fmt("mean teleports %.4f", mean));
}

// ---- 12 ----
Outcome system_sweeps() {
    std::vector<Workload> w;
    for (std::uint64_t s = 1; s <= 50; ++s) {
        std::mt19937_64 rng(s);
        const std::size_t n = 23 + rng() % 11;
        w.push_back({"w" + std::to_string(s), random_circuit(1000 + s, n, 200, 0.3, 0.4, 0.1, "uniform:1:6")});
    }
    RunConfig base;
    base.input = "acceptance";
    base.mode = LoweringMode::Expected;
    SystemSweepSpec spec;
    spec.modules = {3};
    spec.factories = {1, 2};
    spec.jobs = std::max(1u, std::thread::hardware_concurrency());
    const auto rows = sweep_system(w, base, spec, CostTable::fallback(11), CostModel::reference());
    std::map<std::pair<std::string, std::size_t>, std::pair<double, double>> p;
    std::size_t errors = 0;
    for (const auto &r : rows) {
        if (r.status != "ok") {
            ++errors;
            continue;
        }
        auto &slot = p[{r.workload, r.factories}];
        (r.placement == Placement::Lpu ? slot.first : slot.second) = r.report.p_circ;
    }
    std::size_t fac_better = 0;
    for (const auto &[key, v] : p) {
        fac_better += (key.second == 1 && v.second < v.first) ? 1 : 0;
    }
    const auto summary = summarize_ratios(rows);
    if (summary.size() != 2 || errors > 0) {
        return fail(std::to_string(errors) + " failed cells");
    }
    const auto &f1 = summary[0];
    const auto &f2 = summary[1];
    const double p_change = std::abs(f2.failure_ratio_gmean - f1.failure_ratio_gmean) / f1.failure_ratio_gmean;
    const bool a = fac_better == 50;
    const bool b = f2.duration_ratio_gmean < f1.duration_ratio_gmean;
    const bool c = p_change < 0.05;
    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "(a) fac lowers p_circ on %zu/50; (b) t ratio gmean %.4f -> %.4f; (c) p ratio gmean %.4f -> %.4f "
                  "(%.2f%%)",
                  fac_better, f1.duration_ratio_gmean, f2.duration_ratio_gmean, f1.failure_ratio_gmean,
                  f2.failure_ratio_gmean, 100.0 * p_change);
    return check(a && b && c, buf);
}

// ---- 13 ----
Outcome union_bound() {
    BbProgram prog;
    BbInstr in;
    in.kind = InstrKind::In;
    in.count = 10;
    BbInstr inter;
    inter.kind = InstrKind::Inter;
    inter.origin = Origin::Communication;
    inter.count = 2;
    prog.instrs = {in, inter};
    const double p = estimate(prog, CostModel::reference()).p_circ;
    // 4.0905e-3 is this sum rounded to five figures, so the exact arithmetic is the reference.
    const double want = 10 * 1e-5 + 2 * std::pow(10.0, -2.7);
    const double rel = std::abs(p - want) / want;
    return check(rel <= 1e-6, fmt("p_circ %.7e", p) + fmt(" vs %.7e", want) + fmt(" (rel. error %.1e", rel) +
                                  fmt("; %.1e from the rounded 4.0905e-3)", std::abs(p - 4.0905e-3) / 4.0905e-3));
}

struct Criterion {
    int id;
    const char *name;
    double limit_s;  // 0: no limit
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "per-rotation placement ratio", 1, placement_ratio},
        {2, "placement decision inequality", 10, decision_grid},
        {3, "deferral engine equivalence", 30, deferral_engines},
        {4, "deferral dense-unitary semantics", 60, deferral_dense},
        {5, "deferral word-op complexity", 120, complexity},
        {6, "window DP optimality", 60, dp_optimality},
        {7, "insertion safety", 120, insertion_safety},
        {8, "gross-code table checksum", 0, gross_table},
        {9, "closure vs sandwich BFS", 60, closure_oracle},
        {10, "BB code construction", 5, bb_construction},
        {11, "Monte-Carlo cascade teleports", 30, cascade_mc},
        {12, "system sweeps (directional)", 600, system_sweeps},
        {13, "union-bound arithmetic", 1, union_bound},
    };
    int failures = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = fail(std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (o.status != Outcome::Status::Skip && c.limit_s > 0 && secs > c.limit_s) {
            o.status = Outcome::Status::Fail;
            o.detail += fmt("; over the %.0f s limit", c.limit_s);
        }
        const char *tag = o.status == Outcome::Status::Pass ? "PASS" : o.status == Outcome::Status::Fail ? "FAIL" : "SKIP";
        failures += o.status == Outcome::Status::Fail ? 1 : 0;
        std::printf("%s %2d %-34s %s [%.2f s]\n", tag, c.id, c.name, o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
