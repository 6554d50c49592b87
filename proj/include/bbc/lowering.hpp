#pragma once

// Lowering of a deferred, allocated circuit to native instructions.
//
// In-module measurement of a compute Pauli P: one `in` node of count f(P)
// holding the module pivot, carrying aut_per_native * f(P) automorphism steps.
//
// An operation touching modules a < b first builds a GHZ chain with b - a
// `inter` measurements on adjacent pivots, measures Z_pivot (x) P_m inside
// every touched module, and finishes with an X measurement on each chain pivot.
// Rotations add synthesis: factory-side nodes issued when the chain pivots are
// free, and the teleport(s) into pivot a before the pivot X measurements.

#include <string>
#include <vector>

#include "bbc/allocation.hpp"
#include "bbc/cost_table.hpp"
#include "bbc/deferral.hpp"
#include "bbc/program.hpp"
#include "bbc/synthesis.hpp"

namespace bbc {

struct LoweringOptions {
    Placement placement = Placement::Fac;
    LoweringMode mode = LoweringMode::Expected;
    std::size_t factories = 1;
    double aut_per_native = 2.0;
    std::uint64_t seed = 1;
};

namespace detail {

inline BbInstr measurement_node(const CostModel &m, const CostTable &table, std::size_t module,
                                SignedPauli local, const std::vector<std::size_t> &module_qubits,
                                double aut_per_native, std::size_t source_op) {
    BbInstr ins;
    ins.kind = InstrKind::In;
    ins.origin = Origin::Measurement;
    ins.module = static_cast<int>(module);
    ins.source_op = source_op;
    ins.compute = true;
    ins.cost = table.cost(local.vector);
    ins.count = ins.cost;
    ins.aut_count = aut_per_native * ins.cost;
    ins.latency = ins.count * m.t(InstrKind::In) + ins.aut_count * m.t(InstrKind::Aut);
    ins.uses.push_back(Resource::pivot(module));
    for (std::size_t q : local.vector.support()) {
        ins.uses.push_back(Resource::qubit(module_qubits[q]));
    }
    ins.local = std::move(local);
    return ins;
}

inline BbInstr pivot_x_node(const CostModel &m, std::size_t module, std::size_t source_op) {
    BbInstr ins;
    ins.kind = InstrKind::In;
    ins.origin = Origin::Plumbing;
    ins.module = static_cast<int>(module);
    ins.source_op = source_op;
    ins.count = 1.0;
    ins.latency = m.t(InstrKind::In);
    ins.uses.push_back(Resource::pivot(module));
    return ins;
}

inline BbInstr inter_node(const CostModel &m, std::size_t left, std::size_t source_op) {
    BbInstr ins;
    ins.kind = InstrKind::Inter;
    ins.origin = Origin::Communication;
    ins.module = static_cast<int>(left);
    ins.module2 = static_cast<int>(left + 1);
    ins.source_op = source_op;
    ins.count = 1.0;
    ins.latency = m.t(InstrKind::Inter);
    ins.uses = {Resource::pivot(left), Resource::pivot(left + 1)};
    return ins;
}

}  // namespace detail

/// Recomputes latency from counts; used after counts change.
inline void refresh_latency(BbInstr &ins, const CostModel &m) {
    if (ins.kind == InstrKind::In) {
        ins.latency = ins.count * m.t(InstrKind::In) + ins.aut_count * m.t(InstrKind::Aut);
    }
}

inline BbProgram lower(const DeferredCircuit &deferred, const Allocation &alloc, const CostTable &table,
                       const CostModel &costs, const SynthesisOracle &oracle, const LoweringOptions &opt) {
    const PbcCircuit &c = deferred.circuit;
    c.validate();
    alloc.validate(c.n_qubits);
    if (table.num_qubits() != alloc.capacity) {
        throw InputError("cost table covers " + std::to_string(table.num_qubits()) +
                         " compute qubits but modules hold " + std::to_string(alloc.capacity));
    }
    if (opt.factories == 0) {
        throw InputError("at least one factory is required");
    }

    BbProgram prog;
    prog.num_modules = alloc.num_modules;
    prog.num_factories = opt.factories;
    prog.capacity = alloc.capacity;
    for (std::size_t m = 0; m < alloc.num_modules; ++m) {
        prog.module_qubits.push_back(alloc.qubits_of(m));
    }
    const auto local_index = alloc.local_index();

    Rng rng(opt.seed);
    int next_request = 0;
    SynthContext ctx{&costs, &oracle, opt.mode, &rng, &next_request};

    for (std::size_t i = 0; i < c.ops.size(); ++i) {
        const PbcOp &op = c.ops[i];
        if (op.is_clifford_rotation()) {
            throw InputError("op " + std::to_string(i) + ": Clifford rotation reached lowering (defer first)");
        }
        const auto mods = alloc.modules_of(op.pauli.vector);
        const std::size_t a = mods.front();
        const std::size_t b = mods.back();

        // Compute-part Paulis per touched module. The op sign rides on the first piece.
        std::vector<SignedPauli> locals;
        for (std::size_t m : mods) {
            SignedPauli local(SymplecticVector(alloc.capacity), false);
            for (std::size_t q : op.pauli.vector.support()) {
                if (alloc.module_of[q] == m) {
                    local.vector.set_letter(local_index[q], op.pauli.vector.letter(q));
                }
            }
            locals.push_back(std::move(local));
        }
        locals.front().negative = op.pauli.negative;

        const bool multi = a != b;
        if (!op.is_rotation() && !multi) {
            prog.instrs.push_back(detail::measurement_node(costs, table, a, locals.front(), prog.module_qubits[a],
                                                           opt.aut_per_native, i));
            continue;
        }

        SynthFragment frag;
        if (op.is_rotation()) {
            std::vector<Resource> chain;
            for (std::size_t m = a; m <= b; ++m) {
                chain.push_back(Resource::pivot(m));
            }
            frag = opt.placement == Placement::Lpu ? synth_at_lpu(op.angle, ctx, a, chain, i)
                                                   : synth_at_fac(op.angle, ctx, a, chain, i);
        }
        for (auto &ins : frag.head) {
            prog.instrs.push_back(std::move(ins));
        }
        for (std::size_t m = a; m < b; ++m) {
            prog.instrs.push_back(detail::inter_node(costs, m, i));
        }
        for (std::size_t j = 0; j < mods.size(); ++j) {
            prog.instrs.push_back(detail::measurement_node(costs, table, mods[j], locals[j],
                                                           prog.module_qubits[mods[j]], opt.aut_per_native, i));
        }
        for (auto &ins : frag.tail) {
            prog.instrs.push_back(std::move(ins));
        }
        for (std::size_t m = a; m <= b; ++m) {
            prog.instrs.push_back(detail::pivot_x_node(costs, m, i));
        }
    }
    return prog;
}

/// Structural checks: inter nodes join adjacent pivots and carry an origin.
inline void check_topology(const BbProgram &p) {
    for (std::size_t i = 0; i < p.instrs.size(); ++i) {
        const auto &ins = p.instrs[i];
        if (ins.kind == InstrKind::Inter) {
            if (ins.module < 0 || ins.module2 != ins.module + 1 ||
                static_cast<std::size_t>(ins.module2) >= p.num_modules) {
                throw InvariantError("inter node " + std::to_string(i) + " does not join adjacent modules");
            }
            if (ins.origin != Origin::Communication) {
                throw InvariantError("inter node " + std::to_string(i) + " lacks the communication tag");
            }
        }
        if (ins.kind == InstrKind::Tele && ins.origin != Origin::Teleportation) {
            throw InvariantError("tele node " + std::to_string(i) + " lacks the teleportation tag");
        }
    }
}

}  // namespace bbc
