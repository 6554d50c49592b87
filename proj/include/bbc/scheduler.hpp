#pragma once

// Instruction DAG, critical path and segments.
//
// Edges run from the previous holder of every resource an instruction uses or
// waits on. Start times are as-soon-as-possible, so the finish time of a node
// is the longest weighted path ending at it. Synthesis requests are bound to
// factories while the DAG is built, in program order: the factory whose
// resources free up first wins, ties going to the lowest index.

#include <algorithm>
#include <cstdio>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "bbc/error.hpp"
#include "bbc/program.hpp"

namespace bbc {

struct InstrDag {
    BbProgram program;  // factory indices resolved
    std::vector<std::vector<std::size_t>> preds;
    std::vector<double> start;
    std::vector<double> finish;
    std::vector<int> factory_of_request;
    double t_circ = 0.0;

    std::size_t size() const { return program.instrs.size(); }
};

namespace detail {
inline long long resource_key(const Resource &r) {
    return (static_cast<long long>(r.type) << 40) + static_cast<long long>(r.index);
}
}  // namespace detail

inline InstrDag build_dag(const BbProgram &p) {
    InstrDag d;
    d.program = p;
    auto &instrs = d.program.instrs;
    const std::size_t n = instrs.size();
    d.preds.assign(n, {});
    d.start.assign(n, 0.0);
    d.finish.assign(n, 0.0);
    std::map<long long, std::size_t> last;
    std::map<int, int> factory_of;
    const int factories = static_cast<int>(std::max<std::size_t>(p.num_factories, 1));

    auto holder_finish = [&](const Resource &r) {
        auto it = last.find(detail::resource_key(r));
        return it == last.end() ? 0.0 : d.finish[it->second];
    };

    for (std::size_t i = 0; i < n; ++i) {
        BbInstr &ins = instrs[i];
        if (!(ins.latency >= 0.0)) {
            throw InvariantError("node " + std::to_string(i) + " has negative latency");
        }
        bool needs_factory = false;
        for (const auto &r : ins.uses) {
            needs_factory |= r.is_factory() && r.index < 0;
        }
        if (needs_factory) {
            if (ins.request < 0) {
                throw InvariantError("node " + std::to_string(i) + " needs a factory but has no request");
            }
            auto it = factory_of.find(ins.request);
            if (it == factory_of.end()) {
                int best = 0;
                double best_ready = 0.0;
                for (int f = 0; f < factories; ++f) {
                    double ready = 0.0;
                    for (const auto &r : {Resource::prod(f), Resource::patch(f), Resource::port(f)}) {
                        ready = std::max(ready, holder_finish(r));
                    }
                    if (f == 0 || ready < best_ready) {
                        best = f;
                        best_ready = ready;
                    }
                }
                it = factory_of.emplace(ins.request, best).first;
            }
            for (auto &r : ins.uses) {
                if (r.is_factory() && r.index < 0) {
                    r.index = it->second;
                }
            }
        }

        auto &pr = d.preds[i];
        auto add_pred = [&](const Resource &r) {
            auto found = last.find(detail::resource_key(r));
            if (found != last.end()) {
                pr.push_back(found->second);
            }
        };
        for (const auto &r : ins.uses) {
            add_pred(r);
        }
        for (const auto &r : ins.waits) {
            add_pred(r);
        }
        std::sort(pr.begin(), pr.end());
        pr.erase(std::unique(pr.begin(), pr.end()), pr.end());
        double s = 0.0;
        for (std::size_t j : pr) {
            if (j >= i) {
                throw InvariantError("dependency cycle at node " + std::to_string(i));
            }
            s = std::max(s, d.finish[j]);
        }
        d.start[i] = s;
        d.finish[i] = s + ins.latency;
        d.t_circ = std::max(d.t_circ, d.finish[i]);
        for (const auto &r : ins.uses) {
            last[detail::resource_key(r)] = i;
        }
    }
    int max_request = -1;
    for (const auto &[req, f] : factory_of) {
        max_request = std::max(max_request, req);
    }
    d.factory_of_request.assign(static_cast<std::size_t>(max_request + 1), -1);
    for (const auto &[req, f] : factory_of) {
        d.factory_of_request[static_cast<std::size_t>(req)] = f;
    }
    return d;
}

struct CriticalPath {
    std::vector<std::size_t> nodes;  // in time order
    double t_circ = 0.0;
};

/// Longest weighted path; ties go to the lowest node index.
inline CriticalPath critical_path(const InstrDag &d) {
    CriticalPath cp;
    if (d.size() == 0) {
        return cp;
    }
    // Recompute the DP from the edge lists rather than trusting d.finish.
    std::vector<double> dist(d.size(), 0.0);
    std::vector<std::size_t> from(d.size(), kNoOp);
    for (std::size_t i = 0; i < d.size(); ++i) {
        double best = 0.0;
        for (std::size_t j : d.preds[i]) {
            if (j >= i) {
                throw InvariantError("dependency cycle at node " + std::to_string(i));
            }
            if (from[i] == kNoOp || dist[j] > best) {
                best = dist[j];
                from[i] = j;
            }
        }
        dist[i] = best + d.program.instrs[i].latency;
    }
    std::size_t end = 0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (dist[i] > dist[end]) {
            end = i;
        }
    }
    cp.t_circ = dist[end];
    for (std::size_t v = end; v != kNoOp; v = from[v]) {
        cp.nodes.push_back(v);
    }
    std::reverse(cp.nodes.begin(), cp.nodes.end());
    return cp;
}

/// Critical-path duration without synthesis: tele, T and ls nodes and the
/// idle nodes that wait for them are dropped.
inline double clifford_only_duration(const InstrDag &d, const CriticalPath &cp) {
    double total = 0.0;
    for (std::size_t v : cp.nodes) {
        const auto &ins = d.program.instrs[v];
        if (is_synthesis_kind(ins.kind) || (ins.kind == InstrKind::Idle && ins.origin == Origin::Synthesis)) {
            continue;
        }
        total += ins.latency;
    }
    return total;
}

struct Segment {
    int module = -1;
    std::vector<std::size_t> nodes;  // compute measurement nodes, time order
    std::size_t path_position = 0;   // index in the path of the first node
};

/// Maximal same-module runs of compute measurements along the path. Inter and
/// pivot-only nodes are spanned; synthesis nodes (T, ls, tele, idle) and other
/// modules' compute nodes end a run.
inline std::vector<Segment> extract_segments(const InstrDag &d, const CriticalPath &cp) {
    std::vector<Segment> out;
    Segment current;
    auto flush = [&] {
        if (!current.nodes.empty()) {
            out.push_back(std::move(current));
        }
        current = Segment{};
    };
    for (std::size_t pos = 0; pos < cp.nodes.size(); ++pos) {
        const auto &ins = d.program.instrs[cp.nodes[pos]];
        if (ins.compute) {
            if (current.nodes.empty() || current.module != ins.module) {
                flush();
                current.module = ins.module;
                current.path_position = pos;
            }
            current.nodes.push_back(cp.nodes[pos]);
        } else if (ins.kind == InstrKind::Inter || ins.pivot_only()) {
            continue;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

/// Inserts `idle` nodes on pivots ahead of teleports that wait for a factory.
/// Each fills the gap exactly, so the schedule and t_circ stay the same.
inline BbProgram materialize_waits(const InstrDag &d, const CostModel &m) {
    BbProgram out = d.program;
    out.instrs.clear();
    std::map<long long, std::size_t> last_pivot_user;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto &ins = d.program.instrs[i];
        if (ins.kind == InstrKind::Tele) {
            for (const auto &r : ins.uses) {
                if (r.type != Resource::Type::Pivot) {
                    continue;
                }
                auto it = last_pivot_user.find(detail::resource_key(r));
                const double ready = it == last_pivot_user.end() ? 0.0 : d.finish[it->second];
                const double gap = d.start[i] - ready;
                if (gap > 1e-9) {
                    BbInstr idle;
                    idle.kind = InstrKind::Idle;
                    idle.origin = Origin::Synthesis;
                    idle.module = r.index;
                    idle.source_op = ins.source_op;
                    idle.latency = gap;
                    idle.count = gap / m.t(InstrKind::Idle);
                    idle.uses = {r};
                    out.instrs.push_back(std::move(idle));
                }
            }
        }
        out.instrs.push_back(ins);
        for (const auto &r : ins.uses) {
            if (r.type == Resource::Type::Pivot) {
                last_pivot_user[detail::resource_key(r)] = i;
            }
        }
    }
    return out;
}

/// Plain-text adjacency listing.
inline void dump_dag(const InstrDag &d, std::ostream &out) {
    out << "# nodes " << d.size() << " t_circ " << d.t_circ << "\n";
    char buf[256];
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto &ins = d.program.instrs[i];
        std::snprintf(buf, sizeof(buf), "%zu %s origin=%s count=%.6g aut=%.6g latency=%.6g start=%.6g module=%d", i,
                      to_string(ins.kind), to_string(ins.origin), ins.count, ins.aut_count, ins.latency, d.start[i],
                      ins.module);
        out << buf;
        if (ins.module2 >= 0) {
            out << "-" << ins.module2;
        }
        if (ins.compute) {
            out << " pauli=" << ins.local.str() << " f=" << ins.cost << (ins.inserted ? " inserted" : "");
        }
        out << " uses=";
        for (std::size_t k = 0; k < ins.uses.size(); ++k) {
            out << (k ? "," : "") << ins.uses[k].str();
        }
        out << " preds=";
        for (std::size_t k = 0; k < d.preds[i].size(); ++k) {
            out << (k ? "," : "") << d.preds[i][k];
        }
        out << "\n";
    }
}

}  // namespace bbc
