#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "bbc/estimate.hpp"
#include "bbc/lowering.hpp"

using namespace bbc;

namespace {

BbProgram random_program(std::mt19937_64 &rng, std::size_t n_nodes, std::size_t n_resources) {
    BbProgram p;
    p.num_modules = n_resources;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        BbInstr ins;
        ins.kind = InstrKind::In;
        ins.latency = static_cast<double>(1 + rng() % 9);
        const std::size_t k = 1 + rng() % 2;
        for (std::size_t j = 0; j < k; ++j) {
            ins.uses.push_back(Resource::qubit(rng() % n_resources));
        }
        if (rng() % 4 == 0) {
            ins.waits.push_back(Resource::pivot(rng() % 2));
        }
        if (rng() % 3 == 0) {
            ins.uses.push_back(Resource::pivot(rng() % 2));
        }
        p.instrs.push_back(ins);
    }
    return p;
}

bool shares(const BbInstr &a, const BbInstr &b) {
    for (const auto &r : a.uses) {
        for (const auto &s : b.uses) {
            if (r == s) return true;
        }
    }
    return false;
}

}  // namespace

TEST(Scheduler, ResourceExclusionAndTightness) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = random_program(rng, 2 + rng() % 30, 1 + rng() % 6);
        const auto d = build_dag(p);
        double t = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) {
            t = std::max(t, d.finish[i]);
            EXPECT_DOUBLE_EQ(d.finish[i], d.start[i] + p.instrs[i].latency);
            // Any two nodes sharing a used resource run in program order without overlap.
            for (std::size_t j = 0; j < i; ++j) {
                if (shares(p.instrs[i], p.instrs[j])) {
                    EXPECT_GE(d.start[i], d.finish[j]);
                }
            }
            // Every node starts at zero or right when some predecessor ends.
            if (d.start[i] > 0.0) {
                bool tight = false;
                for (std::size_t j : d.preds[i]) tight |= d.finish[j] == d.start[i];
                EXPECT_TRUE(tight);
            }
        }
        EXPECT_DOUBLE_EQ(d.t_circ, t);
    }
}

TEST(Scheduler, CriticalPathMatchesExhaustiveSearch) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_program(rng, 2 + rng() % 12, 1 + rng() % 4);
        const auto d = build_dag(p);
        // Enumerate every path in the predecessor graph.
        std::function<double(std::size_t)> longest_to = [&](std::size_t v) {
            double best = 0.0;
            for (std::size_t u : d.preds[v]) best = std::max(best, longest_to(u));
            return best + p.instrs[v].latency;
        };
        double best = 0.0;
        for (std::size_t v = 0; v < d.size(); ++v) best = std::max(best, longest_to(v));
        const auto cp = critical_path(d);
        EXPECT_DOUBLE_EQ(cp.t_circ, best);
        EXPECT_DOUBLE_EQ(cp.t_circ, d.t_circ);
        double sum = 0.0;
        for (std::size_t k = 0; k < cp.nodes.size(); ++k) {
            sum += p.instrs[cp.nodes[k]].latency;
            if (k > 0) {
                const auto &pr = d.preds[cp.nodes[k]];
                EXPECT_NE(std::find(pr.begin(), pr.end(), cp.nodes[k - 1]), pr.end());
            }
        }
        EXPECT_DOUBLE_EQ(sum, cp.t_circ);
    }
}

TEST(Scheduler, FactoryAssignmentEarliestReadyLowestIndex) {
    BbProgram p;
    p.num_factories = 2;
    auto t_node = [](int request, double latency) {
        BbInstr ins;
        ins.kind = InstrKind::T;
        ins.origin = Origin::Synthesis;
        ins.request = request;
        ins.latency = latency;
        ins.uses = {Resource::prod(), Resource::patch()};
        return ins;
    };
    p.instrs = {t_node(0, 10), t_node(1, 5), t_node(2, 1), t_node(3, 1)};
    const auto d = build_dag(p);
    EXPECT_EQ(d.factory_of_request, (std::vector<int>{0, 1, 1, 1}));
    EXPECT_DOUBLE_EQ(d.start[2], 5);
    EXPECT_DOUBLE_EQ(d.start[3], 6);
    EXPECT_EQ(d.program.instrs[1].uses[0].index, 1);
}

TEST(Scheduler, RequestWithoutIdThrows) {
    BbProgram p;
    BbInstr ins;
    ins.kind = InstrKind::T;
    ins.uses = {Resource::prod()};
    p.instrs.push_back(ins);
    EXPECT_THROW(build_dag(p), InvariantError);
}

TEST(Scheduler, WaitsDelayWithoutClaiming) {
    BbProgram p;
    BbInstr a;
    a.latency = 10;
    a.uses = {Resource::pivot(0)};
    BbInstr b;
    b.latency = 3;
    b.uses = {Resource::qubit(0)};
    b.waits = {Resource::pivot(0)};
    BbInstr c;
    c.latency = 1;
    c.uses = {Resource::pivot(0)};
    p.instrs = {a, b, c};
    const auto d = build_dag(p);
    EXPECT_DOUBLE_EQ(d.start[1], 10);
    EXPECT_DOUBLE_EQ(d.start[2], 10);  // b did not take the pivot
}

TEST(Scheduler, MaterializedWaitsKeepSchedule) {
    const auto m = CostModel::reference();
    const auto o = SynthesisOracle::reference(1e-3);
    const auto c = parse_circuit("qubits 6\nrot XIIZII 0.1\nrot IIIZZI 0.4\nmeas XXXIII\nrot IXIIXI 1.0\n");
    const auto def = defer_transvection(c);
    const auto alloc = allocate_contiguous(def.circuit, 2, 3);
    LoweringOptions lo;
    lo.factories = 1;
    const auto prog = lower(def, alloc, CostTable::fallback(3), m, o, lo);
    const auto d = build_dag(prog);
    const auto with_idle = materialize_waits(d, m);
    const auto d2 = build_dag(with_idle);
    EXPECT_NEAR(d2.t_circ, d.t_circ, 1e-9);
    double idle_latency = 0.0;
    for (const auto &ins : with_idle.instrs) {
        if (ins.kind == InstrKind::Idle) {
            EXPECT_EQ(ins.origin, Origin::Synthesis);
            EXPECT_NEAR(ins.count * m.t(InstrKind::Idle), ins.latency, 1e-9);
            idle_latency += ins.latency;
        }
    }
    EXPECT_GT(idle_latency, 0.0);
    const auto r = estimate(d2, m);
    EXPECT_LE(r.t_cliff, r.t_circ);
    EXPECT_GT(r.count(InstrKind::Idle), 0.0);
}

TEST(Segments, SplitByModuleAndFactoryNodes) {
    BbProgram p;
    p.num_modules = 2;
    auto compute = [](int module) {
        BbInstr ins;
        ins.compute = true;
        ins.module = module;
        ins.latency = 1;
        ins.uses = {Resource::pivot(static_cast<std::size_t>(module))};
        return ins;
    };
    BbInstr inter;
    inter.kind = InstrKind::Inter;
    inter.latency = 1;
    inter.uses = {Resource::pivot(0), Resource::pivot(1)};
    BbInstr pivot_x;
    pivot_x.latency = 1;
    pivot_x.module = 0;
    pivot_x.uses = {Resource::pivot(0)};
    BbInstr tele;
    tele.kind = InstrKind::Tele;
    tele.latency = 1;
    tele.request = 0;
    tele.uses = {Resource::port(), Resource::pivot(0)};
    p.instrs = {compute(0), compute(0), pivot_x, compute(0), inter, compute(1), compute(1), inter,
                compute(0), tele, compute(0)};
    const auto d = build_dag(p);
    const auto cp = critical_path(d);
    ASSERT_EQ(cp.nodes.size(), p.instrs.size());
    const auto segs = extract_segments(d, cp);
    ASSERT_EQ(segs.size(), 4u);
    EXPECT_EQ(segs[0].nodes, (std::vector<std::size_t>{0, 1, 3}));
    EXPECT_EQ(segs[1].module, 1);
    EXPECT_EQ(segs[1].nodes, (std::vector<std::size_t>{5, 6}));
    EXPECT_EQ(segs[2].nodes, (std::vector<std::size_t>{8}));
    EXPECT_EQ(segs[3].nodes, (std::vector<std::size_t>{10}));
}
