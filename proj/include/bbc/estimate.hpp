#pragma once

// First-order union bound: p_circ = sum_i N_i p_i over instruction kinds, and
// durations from the critical path.

#include <array>
#include <map>
#include <string>

#include "bbc/cost_model.hpp"
#include "bbc/program.hpp"
#include "bbc/scheduler.hpp"

namespace bbc {

struct Report {
    std::array<double, kNumKinds> counts{};
    double n_inter_tele = 0.0;  // teleportation-induced
    double n_inter_comm = 0.0;  // communication-induced
    double p_circ = 0.0;
    double p_cliff = 0.0;
    double t_circ = 0.0;
    double t_cliff = 0.0;
    std::array<double, kNumKinds> p_by_kind{};
    std::map<std::string, double> p_by_origin;

    double count(InstrKind k) const { return counts[static_cast<std::size_t>(k)]; }
};

inline Report estimate_counts(const std::array<double, kNumKinds> &counts, const CostModel &m) {
    Report r;
    r.counts = counts;
    for (InstrKind k : kAllKinds) {
        const double contrib = r.count(k) * m.p(k);
        r.p_by_kind[static_cast<std::size_t>(k)] = contrib;
        r.p_circ += contrib;
        if (!is_synthesis_kind(k)) {
            r.p_cliff += contrib;
        }
    }
    r.n_inter_tele = r.count(InstrKind::Tele);
    r.n_inter_comm = r.count(InstrKind::Inter);
    return r;
}

/// Counts and failure probability only.
inline Report estimate(const BbProgram &p, const CostModel &m) {
    Report r = estimate_counts(p.counts(), m);
    for (const auto &ins : p.instrs) {
        r.p_by_origin[to_string(ins.origin)] += ins.count * m.p(ins.kind) + ins.aut_count * m.p(InstrKind::Aut);
    }
    return r;
}

/// Counts, failure probability and critical-path durations.
inline Report estimate(const InstrDag &d, const CostModel &m) {
    Report r = estimate(d.program, m);
    const CriticalPath cp = critical_path(d);
    r.t_circ = cp.t_circ;
    r.t_cliff = clifford_only_duration(d, cp);
    return r;
}

}  // namespace bbc
