#pragma once

// In-module synthesis cost f(P): the number of native measurements needed to
// measure a logical Pauli P on the k' compute qubits of one module.
//
// A table is a dense byte array indexed by x | (z << k'). Byte 0 marks an
// entry as unreachable (and the identity). Reachable costs are 1 + 6j: level
// j needs j native pi/4 rotations on each side of a native measurement, and
// each native rotation costs three native measurements.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "bbc/error.hpp"
#include "bbc/pauli.hpp"

namespace bbc {

inline constexpr std::size_t kMaxTableQubits = 11;
inline constexpr std::array<std::uint64_t, 5> kGrossCodeHistogram = {245, 12579, 490770, 3505249, 185460};
inline constexpr int kNativeRotationMeasurements = 3;

class CostTable {
   public:
    static constexpr std::uint8_t kUnreachable = 0;

    CostTable() = default;
    CostTable(std::size_t k, std::vector<std::uint8_t> costs, bool synthetic)
        : k_(k), costs_(std::move(costs)), synthetic_(synthetic) {
        if (k_ == 0 || k_ > kMaxTableQubits) {
            throw InputError("cost table qubit count must be in [1, 11]");
        }
        if (costs_.size() != (std::size_t{1} << (2 * k_))) {
            throw InputError("cost table has " + std::to_string(costs_.size()) + " entries, expected 4^" +
                             std::to_string(k_));
        }
    }

    /// Support-weight buckets; Y counts twice. Used when no data file is available.
    static CostTable fallback(std::size_t k) {
        std::vector<std::uint8_t> costs(std::size_t{1} << (2 * k), kUnreachable);
        const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
        for (std::uint64_t idx = 1; idx < costs.size(); ++idx) {
            const std::uint64_t x = idx & mask;
            const std::uint64_t z = idx >> k;
            const int u = std::popcount(x) + std::popcount(z);
            costs[idx] = fallback_cost(u);
        }
        return CostTable(k, std::move(costs), true);
    }

    static std::uint8_t fallback_cost(int weighted_support) {
        if (weighted_support <= 1) {
            return 1;
        }
        if (weighted_support <= 3) {
            return 7;
        }
        if (weighted_support <= 6) {
            return 13;
        }
        if (weighted_support <= 10) {
            return 19;
        }
        return 25;
    }

    /// Every nonidentity string costs 1.
    static CostTable all_native(std::size_t k) {
        std::vector<std::uint8_t> costs(std::size_t{1} << (2 * k), 1);
        costs[0] = kUnreachable;
        return CostTable(k, std::move(costs), true);
    }

    std::size_t num_qubits() const { return k_; }
    std::size_t size() const { return costs_.size(); }
    bool synthetic() const { return synthetic_; }
    const std::vector<std::uint8_t> &raw() const { return costs_; }

    std::uint8_t at_index(std::uint64_t index) const { return costs_.at(index); }

    /// f(P); throws on identity or unreachable entries.
    int cost(const SymplecticVector &p) const {
        if (p.num_qubits() != k_) {
            throw InvariantError("cost lookup on " + std::to_string(p.num_qubits()) + " qubits, table has " +
                                 std::to_string(k_));
        }
        if (p.is_identity()) {
            throw InvariantError("cost lookup on the identity");
        }
        const std::uint8_t c = costs_[p.index()];
        if (c == kUnreachable) {
            throw InvariantError("no cost entry for " + p.str());
        }
        return c;
    }

    /// Histogram over levels 1, 7, 13, 19, 25, plus everything else (reachable or not, identity excluded).
    std::pair<std::array<std::uint64_t, 5>, std::uint64_t> level_histogram() const {
        std::array<std::uint64_t, 5> hist{};
        std::uint64_t other = 0;
        for (std::size_t i = 1; i < costs_.size(); ++i) {
            const int c = costs_[i];
            if (c >= 1 && c <= 25 && (c - 1) % 6 == 0) {
                ++hist[static_cast<std::size_t>((c - 1) / 6)];
            } else {
                ++other;
            }
        }
        return {hist, other};
    }

    /// Full histogram keyed by cost (0 = unreachable).
    std::map<int, std::uint64_t> histogram() const {
        std::map<int, std::uint64_t> out;
        for (std::size_t i = 1; i < costs_.size(); ++i) {
            ++out[costs_[i]];
        }
        return out;
    }

    /// Nonidentity strings of minimal cost, lexicographic by letters, at most `cap`.
    std::vector<SymplecticVector> cheapest(std::size_t cap) const {
        int best = 0;
        for (std::size_t i = 1; i < costs_.size(); ++i) {
            if (costs_[i] != kUnreachable && (best == 0 || costs_[i] < best)) {
                best = costs_[i];
            }
        }
        std::vector<std::string> names;
        for (std::size_t i = 1; i < costs_.size(); ++i) {
            if (costs_[i] == best) {
                names.push_back(SymplecticVector::from_index(k_, i).str());
            }
        }
        std::sort(names.begin(), names.end());
        if (names.size() > cap) {
            names.resize(cap);
        }
        std::vector<SymplecticVector> out;
        for (const auto &s : names) {
            out.push_back(SymplecticVector::from_letters(s));
        }
        return out;
    }

    // File layout (little-endian): "BBCOSTT1", u32 version, u32 k',
    // u64 histogram[5], u64 other, then 4^k' cost bytes.
    void save(const std::string &path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw InputError("cannot write cost table '" + path + "'");
        }
        out.write(kMagic, 8);
        write_le<std::uint32_t>(out, kVersion);
        write_le<std::uint32_t>(out, static_cast<std::uint32_t>(k_));
        auto [hist, other] = level_histogram();
        for (auto h : hist) {
            write_le<std::uint64_t>(out, h);
        }
        write_le<std::uint64_t>(out, other);
        out.write(reinterpret_cast<const char *>(costs_.data()), static_cast<std::streamsize>(costs_.size()));
    }

    /// Loads and checks the stored histogram against the payload.
    static CostTable load(const std::string &path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) {
            throw InputError("cannot open cost table '" + path + "'");
        }
        char magic[8];
        in.read(magic, 8);
        if (!in || std::memcmp(magic, kMagic, 8) != 0) {
            throw InputError("'" + path + "' is not a cost table (bad magic)");
        }
        const auto version = read_le<std::uint32_t>(in);
        if (version != kVersion) {
            throw InputError("unsupported cost table version " + std::to_string(version));
        }
        const auto k = read_le<std::uint32_t>(in);
        if (k == 0 || k > kMaxTableQubits) {
            throw InputError("cost table qubit count " + std::to_string(k) + " out of range");
        }
        std::array<std::uint64_t, 5> stored{};
        for (auto &h : stored) {
            h = read_le<std::uint64_t>(in);
        }
        const auto stored_other = read_le<std::uint64_t>(in);
        std::vector<std::uint8_t> costs(std::size_t{1} << (2 * k));
        in.read(reinterpret_cast<char *>(costs.data()), static_cast<std::streamsize>(costs.size()));
        if (!in) {
            throw InputError("cost table '" + path + "' is truncated");
        }
        CostTable t(k, std::move(costs), false);
        auto [hist, other] = t.level_histogram();
        if (hist != stored || other != stored_other) {
            throw InputError("cost table '" + path + "' histogram checksum mismatch");
        }
        return t;
    }

   private:
    static constexpr char kMagic[9] = "BBCOSTT1";
    static constexpr std::uint32_t kVersion = 1;

    template <typename T>
    static void write_le(std::ostream &out, T value) {
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            out.put(static_cast<char>((value >> (8 * i)) & 0xff));
        }
    }
    template <typename T>
    static T read_le(std::istream &in) {
        T value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            const int c = in.get();
            if (c == EOF) {
                throw InputError("cost table header truncated");
            }
            value |= static_cast<T>(static_cast<std::uint8_t>(c)) << (8 * i);
        }
        return value;
    }

    std::size_t k_ = 0;
    std::vector<std::uint8_t> costs_;
    bool synthetic_ = true;
};

/// True when the table histogram equals the published gross-code level counts.
inline bool matches_gross_histogram(const CostTable &t) {
    auto [hist, other] = t.level_histogram();
    return t.num_qubits() == 11 && other == 0 && hist == kGrossCodeHistogram;
}

/// Generating measurements on (pivot, compute qubits) plus automorphisms acting
/// on the compute qubits. Automorphisms are given as qubit permutations.
struct NativeSetSpec {
    std::size_t compute_qubits = 0;
    std::vector<SymplecticVector> measurements;  // length 1 + compute_qubits; qubit 0 is the pivot
    std::vector<std::vector<std::size_t>> automorphisms;
};

struct NativeSets {
    std::vector<SymplecticVector> native;     // Q (x) R, full length
    std::vector<SymplecticVector> level0;     // R != I, cost 1
    std::vector<SymplecticVector> rotations;  // R with Q != I
};

namespace detail {

inline SymplecticVector compute_part(const SymplecticVector &full, std::size_t k) {
    SymplecticVector r(k);
    for (std::size_t q = 0; q < k; ++q) {
        r.set_letter(q, full.letter(q + 1));
    }
    return r;
}

inline std::vector<std::vector<std::size_t>> permutation_group(const std::vector<std::vector<std::size_t>> &gens,
                                                               std::size_t k) {
    std::vector<std::size_t> id(k);
    std::iota(id.begin(), id.end(), std::size_t{0});
    std::set<std::vector<std::size_t>> seen{id};
    std::deque<std::vector<std::size_t>> queue{id};
    while (!queue.empty()) {
        auto p = queue.front();
        queue.pop_front();
        for (const auto &g : gens) {
            std::vector<std::size_t> q(k);
            for (std::size_t i = 0; i < k; ++i) {
                q[i] = g[p[i]];
            }
            if (seen.insert(q).second) {
                queue.push_back(std::move(q));
            }
        }
    }
    return {seen.begin(), seen.end()};
}

}  // namespace detail

inline NativeSets derive_native_sets(const NativeSetSpec &spec) {
    const std::size_t k = spec.compute_qubits;
    if (k == 0 || k > kMaxTableQubits) {
        throw InputError("compute qubit count must be in [1, 11]");
    }
    for (const auto &g : spec.automorphisms) {
        std::vector<std::size_t> sorted = g;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            if (sorted.size() != k || sorted[i] != i) {
                throw InputError("automorphism is not a permutation of the compute qubits");
            }
        }
    }
    for (const auto &m : spec.measurements) {
        if (m.num_qubits() != k + 1) {
            throw InputError("measurement '" + m.str() + "' must cover the pivot plus " + std::to_string(k) +
                             " compute qubits");
        }
    }
    const auto group = detail::permutation_group(spec.automorphisms, k);
    std::set<std::string> native_names;
    NativeSets out;
    for (const auto &m : spec.measurements) {
        for (const auto &perm : group) {
            SymplecticVector image(k + 1);
            image.set_letter(0, m.letter(0));
            for (std::size_t q = 0; q < k; ++q) {
                image.set_letter(perm[q] + 1, m.letter(q + 1));
            }
            if (native_names.insert(image.str()).second) {
                out.native.push_back(image);
            }
        }
    }
    std::set<std::string> l0;
    std::set<std::string> rot;
    for (const auto &v : out.native) {
        const SymplecticVector r = detail::compute_part(v, k);
        if (r.is_identity()) {
            continue;
        }
        l0.insert(r.str());
        if (v.letter(0) != 'I') {
            rot.insert(r.str());
        }
    }
    for (const auto &s : l0) {
        out.level0.push_back(SymplecticVector::from_letters(s));
    }
    for (const auto &s : rot) {
        out.rotations.push_back(SymplecticVector::from_letters(s));
    }
    return out;
}

struct ClosureResult {
    CostTable table;
    std::size_t unreachable = 0;
    std::size_t depth = 0;
};

/// Breadth-first closure: level 0 is the native set, and every layer
/// conjugates the previous one by every native rotation.
inline ClosureResult closure_costs(const NativeSetSpec &spec) {
    const NativeSets sets = derive_native_sets(spec);
    const std::size_t k = spec.compute_qubits;
    std::vector<std::uint8_t> costs(std::size_t{1} << (2 * k), CostTable::kUnreachable);
    std::vector<std::uint64_t> frontier;
    for (const auto &r : sets.level0) {
        costs[r.index()] = 1;
        frontier.push_back(r.index());
    }
    std::vector<std::uint64_t> rot_x;
    std::vector<std::uint64_t> rot_z;
    const std::uint64_t mask = (std::uint64_t{1} << k) - 1;
    for (const auto &r : sets.rotations) {
        rot_x.push_back(r.index() & mask);
        rot_z.push_back(r.index() >> k);
    }
    std::size_t depth = 0;
    while (!frontier.empty()) {
        std::vector<std::uint64_t> next;
        const int level_cost = 1 + 6 * static_cast<int>(depth + 1);
        for (std::uint64_t p : frontier) {
            const std::uint64_t px = p & mask;
            const std::uint64_t pz = p >> k;
            for (std::size_t j = 0; j < rot_x.size(); ++j) {
                const int inner = std::popcount((px & rot_z[j]) ^ (pz & rot_x[j])) & 1;
                if (inner == 0) {
                    continue;
                }
                const std::uint64_t q = (px ^ rot_x[j]) | ((pz ^ rot_z[j]) << k);
                if (costs[q] == CostTable::kUnreachable && q != 0) {
                    if (level_cost > 255) {
                        throw InvariantError("closure depth exceeds the byte cost range");
                    }
                    costs[q] = static_cast<std::uint8_t>(level_cost);
                    next.push_back(q);
                }
            }
        }
        if (next.empty()) {
            break;
        }
        ++depth;
        frontier = std::move(next);
    }
    ClosureResult result;
    result.depth = depth;
    for (std::size_t i = 1; i < costs.size(); ++i) {
        result.unreachable += costs[i] == CostTable::kUnreachable ? 1 : 0;
    }
    result.table = CostTable(k, std::move(costs), true);
    return result;
}

}  // namespace bbc
