#pragma once

// Logical-qubit placement onto LPUs. Each module hosts up to `capacity`
// compute qubits next to its pivot; modules sit on a line, so an operation
// touching modules a < b routes through every module in between.

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "bbc/circuit.hpp"
#include "bbc/error.hpp"

namespace bbc {

inline constexpr std::size_t kDefaultCapacity = 11;

struct Allocation {
    std::vector<std::size_t> module_of;
    std::size_t num_modules = 0;
    std::size_t capacity = kDefaultCapacity;

    /// Compute qubits of module m in ascending order; position = local index.
    std::vector<std::size_t> qubits_of(std::size_t m) const {
        std::vector<std::size_t> out;
        for (std::size_t q = 0; q < module_of.size(); ++q) {
            if (module_of[q] == m) {
                out.push_back(q);
            }
        }
        return out;
    }

    std::vector<std::size_t> local_index() const {
        std::vector<std::size_t> out(module_of.size());
        std::vector<std::size_t> next(num_modules, 0);
        for (std::size_t q = 0; q < module_of.size(); ++q) {
            out[q] = next[module_of[q]]++;
        }
        return out;
    }

    /// Distinct modules touched by a Pauli, ascending.
    std::vector<std::size_t> modules_of(const SymplecticVector &v) const {
        std::vector<std::size_t> mods;
        for (std::size_t q : v.support()) {
            mods.push_back(module_of[q]);
        }
        std::sort(mods.begin(), mods.end());
        mods.erase(std::unique(mods.begin(), mods.end()), mods.end());
        return mods;
    }

    bool is_multi_module(const SymplecticVector &v) const { return modules_of(v).size() >= 2; }

    void validate(std::size_t n_qubits) const {
        if (module_of.size() != n_qubits) {
            throw InputError("allocation covers " + std::to_string(module_of.size()) + " qubits, circuit has " +
                             std::to_string(n_qubits));
        }
        std::vector<std::size_t> load(num_modules, 0);
        for (std::size_t m : module_of) {
            if (m >= num_modules) {
                throw InputError("allocation references module " + std::to_string(m));
            }
            if (++load[m] > capacity) {
                throw InputError("module " + std::to_string(m) + " exceeds capacity " + std::to_string(capacity));
            }
        }
    }
};

inline std::size_t count_multi_module_ops(const PbcCircuit &c, const Allocation &a) {
    std::size_t count = 0;
    for (const auto &op : c.ops) {
        count += a.is_multi_module(op.pauli.vector) ? 1 : 0;
    }
    return count;
}

namespace detail {
inline void check_capacity(std::size_t n, std::size_t modules, std::size_t capacity) {
    if (modules == 0 || capacity == 0) {
        throw InputError("module count and capacity must be positive");
    }
    if (n > modules * capacity) {
        throw InputError(std::to_string(n) + " qubits exceed capacity of " + std::to_string(modules) + " modules x " +
                         std::to_string(capacity));
    }
}
}  // namespace detail

/// q -> floor(q / capacity).
inline Allocation allocate_contiguous(const PbcCircuit &c, std::size_t modules,
                                      std::size_t capacity = kDefaultCapacity) {
    detail::check_capacity(c.n_qubits, modules, capacity);
    Allocation a;
    a.num_modules = modules;
    a.capacity = capacity;
    a.module_of.resize(c.n_qubits);
    for (std::size_t q = 0; q < c.n_qubits; ++q) {
        a.module_of[q] = q / capacity;
    }
    return a;
}

/// Co-occurrence greedy: merge the heaviest qubit pairs into clusters that fit
/// one module, then pack clusters first-fit decreasing. Falls back to the
/// contiguous allocation whenever that one has fewer multi-module ops.
inline Allocation allocate_greedy(const PbcCircuit &c, std::size_t modules,
                                  std::size_t capacity = kDefaultCapacity) {
    const std::size_t n = c.n_qubits;
    detail::check_capacity(n, modules, capacity);

    std::vector<std::size_t> weight(n * n, 0);
    for (const auto &op : c.ops) {
        const auto supp = op.pauli.vector.support();
        for (std::size_t i = 0; i < supp.size(); ++i) {
            for (std::size_t j = i + 1; j < supp.size(); ++j) {
                ++weight[supp[i] * n + supp[j]];
            }
        }
    }
    struct Pair {
        std::size_t w, i, j;
    };
    std::vector<Pair> pairs;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (weight[i * n + j] > 0) {
                pairs.push_back({weight[i * n + j], i, j});
            }
        }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair &a, const Pair &b) {
        if (a.w != b.w) {
            return a.w > b.w;
        }
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });

    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::vector<std::size_t> size(n, 1);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto &p : pairs) {
        std::size_t a = find(p.i);
        std::size_t b = find(p.j);
        if (a == b || size[a] + size[b] > capacity) {
            continue;
        }
        if (b < a) {
            std::swap(a, b);
        }
        parent[b] = a;
        size[a] += size[b];
    }

    std::vector<std::vector<std::size_t>> clusters;
    std::vector<std::size_t> cluster_of_root(n, SIZE_MAX);
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t r = find(q);
        if (cluster_of_root[r] == SIZE_MAX) {
            cluster_of_root[r] = clusters.size();
            clusters.emplace_back();
        }
        clusters[cluster_of_root[r]].push_back(q);
    }
    std::stable_sort(clusters.begin(), clusters.end(),
                     [](const auto &a, const auto &b) { return a.size() > b.size(); });

    Allocation greedy;
    greedy.num_modules = modules;
    greedy.capacity = capacity;
    greedy.module_of.assign(n, 0);
    std::vector<std::size_t> room(modules, capacity);
    for (const auto &cluster : clusters) {
        auto fit = std::find_if(room.begin(), room.end(), [&](std::size_t r) { return r >= cluster.size(); });
        if (fit != room.end()) {
            const auto m = static_cast<std::size_t>(fit - room.begin());
            for (std::size_t q : cluster) {
                greedy.module_of[q] = m;
            }
            *fit -= cluster.size();
            continue;
        }
        // Fragmented: split the cluster over the emptiest modules.
        for (std::size_t q : cluster) {
            auto best = std::max_element(room.begin(), room.end());
            greedy.module_of[q] = static_cast<std::size_t>(best - room.begin());
            --*best;
        }
    }

    Allocation contiguous = allocate_contiguous(c, modules, capacity);
    if (count_multi_module_ops(c, contiguous) < count_multi_module_ops(c, greedy)) {
        return contiguous;
    }
    return greedy;
}

}  // namespace bbc
