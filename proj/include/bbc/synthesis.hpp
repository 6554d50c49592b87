#pragma once

// Rotation synthesis: the T-count oracle and the two placements.
//
// syn@LPU: the factory streams n_T |T> states to the requesting pivot, where
// the rotation is synthesized. Production and teleport pipeline, so the
// stream takes n_T * max(t_T, t_tele) + min(t_T, t_tele).
//
// syn@fac: the factory builds |theta> from n_T |T> states plus one
// lattice-surgery step per state, and teleports it once. A failed injection
// (probability 1/2) needs |2 theta>, and so on; in expectation two cascade
// steps are consumed.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "bbc/circuit.hpp"
#include "bbc/cost_model.hpp"
#include "bbc/error.hpp"
#include "bbc/program.hpp"
#include "bbc/rng.hpp"

namespace bbc {

enum class Placement { Lpu, Fac };
enum class LoweringMode { Expected, Sampled };

inline const char *to_string(Placement p) { return p == Placement::Lpu ? "lpu" : "fac"; }
inline const char *to_string(LoweringMode m) { return m == LoweringMode::Expected ? "expected" : "sampled"; }

/// T-count model for approximating a rotation to precision epsilon.
struct SynthesisOracle {
    enum class Mode { ReferenceStatistics, Fixed, Table };

    Mode mode = Mode::ReferenceStatistics;
    double epsilon = 1e-3;
    double mean = 28.63;
    double variance = 7.57;
    double fixed_count = 0.0;
    std::vector<std::pair<double, double>> table;  // (radians, n_T)

    static SynthesisOracle reference(double epsilon) {
        SynthesisOracle o;
        o.epsilon = epsilon;
        if (std::abs(epsilon - 1e-3) < 1e-15) {
            o.mean = 28.63;
            o.variance = 7.57;
        } else if (std::abs(epsilon - 1e-4) < 1e-16) {
            o.mean = 39.25;
            o.variance = 4.65;
        } else {
            throw InputError("no T-count statistics for epsilon " + std::to_string(epsilon) +
                             " (supported: 1e-3, 1e-4)");
        }
        return o;
    }

    static SynthesisOracle fixed(double n_t) {
        SynthesisOracle o;
        o.mode = Mode::Fixed;
        o.fixed_count = n_t;
        o.mean = n_t;
        o.variance = 0.0;
        return o;
    }

    /// Mean T count for an arbitrary angle, before any sampling.
    double arbitrary_mean(const Angle &angle) const {
        switch (mode) {
            case Mode::Fixed:
                return fixed_count;
            case Mode::Table:
                for (const auto &[rad, n] : table) {
                    if (std::abs(rad - angle.value()) <= Angle::kSnapTolerance) {
                        return n;
                    }
                }
                return mean;
            case Mode::ReferenceStatistics:
                break;
        }
        return mean;
    }

    double expected_count(const Angle &angle) const {
        switch (angle.classify()) {
            case AngleClass::Clifford:
                return 0.0;
            case AngleClass::Tlike:
                return 1.0;
            case AngleClass::Arbitrary:
                break;
        }
        return arbitrary_mean(angle);
    }

    double sample_count(const Angle &angle, Rng &rng) const {
        switch (angle.classify()) {
            case AngleClass::Clifford:
                return 0.0;
            case AngleClass::Tlike:
                return 1.0;
            case AngleClass::Arbitrary:
                break;
        }
        if (mode != Mode::ReferenceStatistics) {
            return arbitrary_mean(angle);
        }
        const double draw = std::round(rng.normal(mean, std::sqrt(variance)));
        return std::max(1.0, draw);
    }
};

/// One |theta>-family state built at the factory and teleported.
struct CascadeStep {
    Angle angle;
    double t_count = 0.0;
    bool needs_ls = true;  // false for a single |T>
};

/// Cascade for syn@fac. Expected mode uses the closed form (two unit-weight
/// steps); sampled mode continues with probability 1/2 and stops once the
/// doubled angle is Clifford.
inline std::vector<CascadeStep> fac_cascade(const Angle &angle, const SynthesisOracle &oracle, LoweringMode mode,
                                            Rng &rng) {
    std::vector<CascadeStep> steps;
    if (angle.classify() == AngleClass::Clifford) {
        return steps;
    }
    if (angle.classify() == AngleClass::Tlike) {
        steps.push_back({angle, 1.0, false});
        return steps;
    }
    if (mode == LoweringMode::Expected) {
        const double n = oracle.expected_count(angle);
        steps.push_back({angle, n, true});
        steps.push_back({angle.doubled(), n, true});
        return steps;
    }
    Angle current = angle;
    while (true) {
        const AngleClass cls = current.classify();
        if (cls == AngleClass::Clifford) {
            break;
        }
        steps.push_back({current, oracle.sample_count(current, rng), cls == AngleClass::Arbitrary});
        if (!rng.coin()) {
            break;
        }
        current = current.doubled();
    }
    return steps;
}

/// Synthesis instructions for one rotation. `head` is issued when the
/// rotation's pivots become free; `tail` consumes the states on `pivot`.
struct SynthFragment {
    std::vector<BbInstr> head;
    std::vector<BbInstr> tail;
};

struct SynthContext {
    const CostModel *costs = nullptr;
    const SynthesisOracle *oracle = nullptr;
    LoweringMode mode = LoweringMode::Expected;
    Rng *rng = nullptr;
    int *next_request = nullptr;
};

namespace detail {
inline BbInstr synth_node(InstrKind kind, Origin origin, double count, double latency, int request,
                          std::size_t source_op) {
    BbInstr ins;
    ins.kind = kind;
    ins.origin = origin;
    ins.count = count;
    ins.latency = latency;
    ins.request = request;
    ins.source_op = source_op;
    return ins;
}
}  // namespace detail

inline double synth_count(const Angle &angle, const SynthContext &ctx) {
    return ctx.mode == LoweringMode::Expected ? ctx.oracle->expected_count(angle)
                                              : ctx.oracle->sample_count(angle, *ctx.rng);
}

inline SynthFragment synth_at_lpu(const Angle &angle, const SynthContext &ctx, std::size_t pivot,
                                  const std::vector<Resource> &waits, std::size_t source_op = kNoOp) {
    SynthFragment frag;
    const double n = synth_count(angle, ctx);
    if (n <= 0.0) {
        return frag;
    }
    const CostModel &m = *ctx.costs;
    const int request = (*ctx.next_request)++;
    BbInstr head = detail::synth_node(InstrKind::T, Origin::Synthesis, n, m.t(InstrKind::T), request, source_op);
    head.uses = {Resource::prod()};
    head.waits = waits;
    frag.head.push_back(std::move(head));

    const double step = std::max(m.t(InstrKind::T), m.t(InstrKind::Tele));
    BbInstr stream = detail::synth_node(InstrKind::Tele, Origin::Teleportation, n,
                                        (n - 1.0) * step + m.t(InstrKind::Tele), request, source_op);
    stream.module = static_cast<int>(pivot);
    stream.uses = {Resource::prod(), Resource::port(), Resource::pivot(pivot)};
    frag.tail.push_back(std::move(stream));
    return frag;
}

inline SynthFragment synth_at_fac(const Angle &angle, const SynthContext &ctx, std::size_t pivot,
                                  const std::vector<Resource> &waits, std::size_t source_op = kNoOp) {
    SynthFragment frag;
    const CostModel &m = *ctx.costs;
    for (const CascadeStep &s : fac_cascade(angle, *ctx.oracle, ctx.mode, *ctx.rng)) {
        const int request = (*ctx.next_request)++;
        BbInstr t = detail::synth_node(InstrKind::T, Origin::Synthesis, s.t_count, s.t_count * m.t(InstrKind::T),
                                       request, source_op);
        t.uses = {Resource::prod(), Resource::patch()};
        t.waits = waits;
        frag.head.push_back(std::move(t));
        if (s.needs_ls) {
            BbInstr ls = detail::synth_node(InstrKind::Ls, Origin::Synthesis, s.t_count, m.t(InstrKind::Ls), request,
                                            source_op);
            ls.uses = {Resource::patch()};
            frag.head.push_back(std::move(ls));
        }
        BbInstr tele =
            detail::synth_node(InstrKind::Tele, Origin::Teleportation, 1.0, m.t(InstrKind::Tele), request, source_op);
        tele.module = static_cast<int>(pivot);
        tele.uses = {Resource::port(), Resource::patch(), Resource::pivot(pivot)};
        frag.tail.push_back(std::move(tele));
    }
    return frag;
}

/// syn@fac is preferred iff p_T/p_inter + 2 p_ls/p_inter < 1 - 2/n_T.
inline Placement placement_decision(const CostModel &m, double n_t) {
    const double p_inter = m.p(InstrKind::Tele);
    const double lhs = m.p(InstrKind::T) / p_inter + 2.0 * m.p(InstrKind::Ls) / p_inter;
    const double rhs = 1.0 - 2.0 / n_t;
    return lhs < rhs ? Placement::Fac : Placement::Lpu;
}

}  // namespace bbc
