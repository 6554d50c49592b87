#pragma once

// The native instruction stream produced by lowering.
//
// Every instruction names the resources it occupies. Scheduling orders any two
// instructions that share a resource by program order. `waits` resources only
// delay the instruction (it starts after their current holder) without
// claiming them. A factory index of -1 stands for "the factory serving this
// request"; the scheduler resolves it.

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "bbc/cost_model.hpp"
#include "bbc/pauli.hpp"

namespace bbc {

enum class Origin { Measurement, Communication, Teleportation, Synthesis, Plumbing };

inline const char *to_string(Origin o) {
    static constexpr const char *names[] = {"measurement", "communication", "teleportation", "synthesis", "plumbing"};
    return names[static_cast<int>(o)];
}

struct Resource {
    enum class Type : std::uint8_t { Qubit, Pivot, FactoryProd, FactoryPatch, FactoryPort };
    Type type = Type::Qubit;
    int index = 0;

    static Resource qubit(std::size_t q) { return {Type::Qubit, static_cast<int>(q)}; }
    static Resource pivot(std::size_t m) { return {Type::Pivot, static_cast<int>(m)}; }
    static Resource prod(int f = -1) { return {Type::FactoryProd, f}; }
    static Resource patch(int f = -1) { return {Type::FactoryPatch, f}; }
    static Resource port(int f = -1) { return {Type::FactoryPort, f}; }

    bool is_factory() const { return type != Type::Qubit && type != Type::Pivot; }

    std::string str() const {
        static constexpr const char *names[] = {"q", "pivot", "prod", "patch", "port"};
        return std::string(names[static_cast<int>(type)]) + std::to_string(index);
    }

    friend bool operator==(const Resource &, const Resource &) = default;
};

inline constexpr std::size_t kNoOp = std::numeric_limits<std::size_t>::max();

struct BbInstr {
    InstrKind kind = InstrKind::In;
    Origin origin = Origin::Measurement;
    double count = 1.0;     // instruction count (fractional in expected mode)
    double aut_count = 0.0;  // automorphism steps carried by an `in` node
    double latency = 0.0;
    int module = -1;
    int module2 = -1;  // second endpoint of an inter node
    std::size_t source_op = kNoOp;
    int request = -1;  // synthesis request; all its nodes share one factory
    std::vector<Resource> uses;
    std::vector<Resource> waits;

    // In-module measurement payload. `local` is over the module's compute qubits.
    bool compute = false;
    bool inserted = false;
    SignedPauli local;
    int cost = 0;

    /// Plumbing on a pivot alone (chain X measurements), no factory involvement.
    bool pivot_only() const { return !compute && (kind == InstrKind::In || kind == InstrKind::Aut); }
};

struct BbProgram {
    std::size_t num_modules = 0;
    std::size_t num_factories = 1;
    std::size_t capacity = 0;
    std::vector<std::vector<std::size_t>> module_qubits;  // global qubit ids in local order
    std::vector<BbInstr> instrs;

    std::array<double, kNumKinds> counts() const {
        std::array<double, kNumKinds> n{};
        for (const auto &ins : instrs) {
            n[static_cast<std::size_t>(ins.kind)] += ins.count;
            n[static_cast<std::size_t>(InstrKind::Aut)] += ins.aut_count;
        }
        return n;
    }

    double count_origin(InstrKind kind, Origin origin) const {
        double total = 0.0;
        for (const auto &ins : instrs) {
            if (ins.kind == kind && ins.origin == origin) {
                total += ins.count;
            }
        }
        return total;
    }
};

}  // namespace bbc
