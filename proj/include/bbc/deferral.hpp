#pragma once

// Clifford deferral. Every Clifford-class rotation is commuted to the end of
// the circuit, conjugating the operators it passes, and then dropped.
//
// For a circuit C_1 ... Q (time order) the surviving operator is
// Q' = S(Q) with S = conj_{C_1} o conj_{C_2} o ..., conj_C(Q) = C^dagger Q C.
// The dropped trailing Clifford is the time-ordered product of the original
// Clifford rotations, and its Pauli action is exactly S.

#include <cstdint>
#include <optional>
#include <vector>

#include "bbc/circuit.hpp"
#include "bbc/pauli.hpp"

namespace bbc {

struct DeferralStats {
    std::size_t cliffords_removed = 0;
    std::uint64_t word_ops = 0;
};

struct DeferredCircuit {
    PbcCircuit circuit;
    DeferralStats stats;
    // Accumulated map; filled by the transvection engine only.
    std::optional<SymplecticTransform> trailing;
};

enum class DeferralEngine { Conventional, Transvection };

/// pi/4 steps for a Clifford angle: pi/4 -> {+1}, pi/2 -> {+1,+1}, 3pi/4 -> {-1}.
inline std::vector<int> clifford_steps(const Angle &angle) {
    switch (angle.quarter_turns()) {
        case 0:
            return {};
        case 1:
            return {+1};
        case 2:
            return {+1, +1};
        default:
            return {-1};
    }
}

namespace detail {

// Operators packed into one flat array so the quadratic sweep stays cache friendly.
struct PackedOps {
    std::size_t n = 0;
    std::size_t w = 0;
    std::vector<std::uint64_t> words;  // per op: x words then z words
    std::vector<std::uint8_t> negative;

    std::uint64_t *x(std::size_t i) { return words.data() + 2 * w * i; }
    std::uint64_t *z(std::size_t i) { return words.data() + 2 * w * i + w; }

    SignedPauli get(std::size_t i) {
        SignedPauli p{SymplecticVector(n), negative[i] != 0};
        for (std::size_t k = 0; k < w; ++k) {
            p.vector.x_words()[k] = x(i)[k];
            p.vector.z_words()[k] = z(i)[k];
        }
        return p;
    }
};

}  // namespace detail

/// Conventional sweep: each Clifford rewrites every later operator in place.
inline DeferredCircuit defer_conventional(const PbcCircuit &c) {
    c.validate();
    const std::size_t L = c.ops.size();
    detail::PackedOps ops;
    ops.n = c.n_qubits;
    ops.w = detail::words_for(c.n_qubits);
    ops.words.resize(2 * ops.w * L);
    ops.negative.resize(L);
    for (std::size_t i = 0; i < L; ++i) {
        const auto &v = c.ops[i].pauli.vector;
        for (std::size_t k = 0; k < ops.w; ++k) {
            ops.x(i)[k] = v.x_words()[k];
            ops.z(i)[k] = v.z_words()[k];
        }
        ops.negative[i] = c.ops[i].pauli.negative;
    }

    DeferredCircuit out;
    out.circuit.n_qubits = c.n_qubits;
    const std::size_t w = ops.w;
    std::uint64_t counted = 0;
    std::vector<std::uint64_t> ax(w);
    std::vector<std::uint64_t> az(w);
    for (std::size_t i = 0; i < L; ++i) {
        const PbcOp &op = c.ops[i];
        if (!op.is_clifford_rotation()) {
            continue;
        }
        ++out.stats.cliffords_removed;
        std::copy_n(ops.x(i), w, ax.begin());
        std::copy_n(ops.z(i), w, az.begin());
        int axis_self = 0;
        for (std::size_t k = 0; k < w; ++k) {
            axis_self += std::popcount(ax[k] & az[k]);
        }
        const bool axis_negative = ops.negative[i] != 0;
        for (int direction : clifford_steps(op.angle)) {
            const int factor = (axis_negative ? -direction : direction) > 0 ? 1 : 3;
            for (std::size_t j = i + 1; j < L; ++j) {
                std::uint64_t *ux = ops.x(j);
                std::uint64_t *uz = ops.z(j);
                std::uint64_t acc = 0;
                for (std::size_t k = 0; k < w; ++k) {
                    acc ^= (ax[k] & uz[k]) ^ (az[k] & ux[k]);
                }
                counted += 2 * w;
                if ((std::popcount(acc) & 1) == 0) {
                    continue;
                }
                // axis * u with the same phase rule as product_phase, then the i*d factor.
                long long k4 = axis_self;
                for (std::size_t k = 0; k < w; ++k) {
                    k4 += std::popcount(ux[k] & uz[k]);
                    k4 += 2 * std::popcount(az[k] & ux[k]);
                    k4 -= std::popcount((ax[k] ^ ux[k]) & (az[k] ^ uz[k]));
                    ux[k] ^= ax[k];
                    uz[k] ^= az[k];
                }
                counted += 4 * w;
                const int phase = static_cast<int>((((k4 + (ops.negative[j] ? 2 : 0) + factor) % 4) + 4) % 4);
                if ((phase & 1) != 0) {
                    throw InvariantError("conjugation produced an anti-Hermitian operator");
                }
                ops.negative[j] = phase == 2;
            }
        }
    }
    for (std::size_t i = 0; i < L; ++i) {
        if (c.ops[i].is_clifford_rotation()) {
            continue;
        }
        PbcOp op = c.ops[i];
        op.pauli = ops.get(i);
        out.circuit.ops.push_back(std::move(op));
    }
    out.stats.word_ops = counted;
    return out;
}

/// Accumulated-transvection pass: one left-to-right sweep maintaining S.
inline DeferredCircuit defer_transvection(const PbcCircuit &c) {
    c.validate();
    DeferredCircuit out;
    out.circuit.n_qubits = c.n_qubits;
    WordOpCounter counter;
    SymplecticTransform s = SymplecticTransform::identity(c.n_qubits);
    for (const PbcOp &op : c.ops) {
        if (op.is_clifford_rotation()) {
            ++out.stats.cliffords_removed;
            for (int direction : clifford_steps(op.angle)) {
                s.compose_rotation(op.pauli, direction, &counter);
            }
            continue;
        }
        PbcOp rewritten = op;
        rewritten.pauli = s.apply(op.pauli, &counter);
        out.circuit.ops.push_back(std::move(rewritten));
    }
    out.stats.word_ops = counter.ops;
    out.trailing = std::move(s);
    return out;
}

inline DeferredCircuit defer(const PbcCircuit &c, DeferralEngine engine) {
    return engine == DeferralEngine::Conventional ? defer_conventional(c) : defer_transvection(c);
}

/// Wraps a circuit that is passed through without deferral (Cliffords must be absent).
inline DeferredCircuit as_deferred(const PbcCircuit &c) {
    for (const auto &op : c.ops) {
        if (op.is_clifford_rotation()) {
            throw InputError("circuit contains Clifford rotations; run deferral first");
        }
    }
    DeferredCircuit out;
    out.circuit = c;
    return out;
}

}  // namespace bbc
