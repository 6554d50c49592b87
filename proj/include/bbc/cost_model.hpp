#pragma once

// Per-instruction latency (timesteps) and logical error rate. Error rates are
// kept as log10 values, which is how the reference table is written.

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "bbc/error.hpp"

namespace bbc {

enum class InstrKind : int { Idle = 0, Aut, In, Inter, Tele, T, Ls };

inline constexpr std::size_t kNumKinds = 7;
inline constexpr std::array<InstrKind, kNumKinds> kAllKinds = {InstrKind::Idle, InstrKind::Aut,  InstrKind::In,
                                                              InstrKind::Inter, InstrKind::Tele, InstrKind::T,
                                                              InstrKind::Ls};

inline const char *to_string(InstrKind k) {
    static constexpr const char *names[] = {"idle", "aut", "in", "inter", "tele", "T", "ls"};
    return names[static_cast<int>(k)];
}

inline InstrKind parse_kind(std::string_view s) {
    for (InstrKind k : kAllKinds) {
        if (s == to_string(k)) {
            return k;
        }
    }
    throw InputError("unknown instruction kind '" + std::string(s) + "'");
}

/// Synthesis instructions; everything else is Clifford-side.
inline bool is_synthesis_kind(InstrKind k) { return k == InstrKind::Tele || k == InstrKind::T || k == InstrKind::Ls; }

struct KindCost {
    double t = 0.0;
    double log10p = 0.0;
    double p() const { return std::pow(10.0, log10p); }
};

class CostModel {
   public:
    static CostModel reference() {
        CostModel m;
        m.set(InstrKind::Idle, 8, -8.8);
        m.set(InstrKind::Aut, 14, -6.4);
        m.set(InstrKind::In, 120, -5.0);
        m.set(InstrKind::Inter, 120, -2.7);
        m.set(InstrKind::T, 122, std::log10(2e-6));
        m.set(InstrKind::Ls, 66, -7.2);
        return m;
    }

    const KindCost &operator[](InstrKind k) const { return kinds_[static_cast<std::size_t>(k)]; }
    double t(InstrKind k) const { return (*this)[k].t; }
    double p(InstrKind k) const { return (*this)[k].p(); }

    /// Setting inter also moves tele unless tele was given explicitly.
    void set(InstrKind k, double t, double log10p) {
        set_t(k, t);
        set_log10p(k, log10p);
    }
    void set_t(InstrKind k, double t) {
        kinds_[static_cast<std::size_t>(k)].t = t;
        if (k == InstrKind::Tele) {
            tele_t_explicit_ = true;
        } else if (k == InstrKind::Inter && !tele_t_explicit_) {
            kinds_[static_cast<std::size_t>(InstrKind::Tele)].t = t;
        }
    }
    void set_log10p(InstrKind k, double log10p) {
        kinds_[static_cast<std::size_t>(k)].log10p = log10p;
        if (k == InstrKind::Tele) {
            tele_p_explicit_ = true;
        } else if (k == InstrKind::Inter && !tele_p_explicit_) {
            kinds_[static_cast<std::size_t>(InstrKind::Tele)].log10p = log10p;
        }
    }

    void validate() const {
        for (InstrKind k : kAllKinds) {
            const auto &c = (*this)[k];
            if (!(c.t > 0.0) || !std::isfinite(c.t)) {
                throw InputError(std::string("latency of '") + to_string(k) + "' must be positive");
            }
            if (!(c.log10p < 0.0) || !std::isfinite(c.log10p)) {
                throw InputError(std::string("error rate of '") + to_string(k) + "' must lie in (0, 1)");
            }
        }
    }

    /// Key-value text, one entry per line: `<kind>.t = <timesteps>`,
    /// `<kind>.log10p = <log10 rate>` or `<kind>.p = <rate>`. Unlisted kinds
    /// keep their reference values.
    static CostModel parse(std::string_view text) {
        CostModel m = reference();
        std::istringstream in{std::string(text)};
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (auto hash = line.find('#'); hash != std::string::npos) {
                line.resize(hash);
            }
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) {
                continue;
            }
            auto fail = [&](const std::string &why) {
                return InputError("cost model line " + std::to_string(line_no) + ": " + why);
            };
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw fail("expected '<kind>.<field> = <value>'");
            }
            auto trim = [](std::string s) {
                const auto a = s.find_first_not_of(" \t\r");
                const auto b = s.find_last_not_of(" \t\r");
                return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
            };
            const std::string key = trim(line.substr(0, eq));
            const std::string value_text = trim(line.substr(eq + 1));
            const auto dot = key.find('.');
            if (dot == std::string::npos) {
                throw fail("key '" + key + "' lacks a field");
            }
            InstrKind kind;
            try {
                kind = parse_kind(key.substr(0, dot));
            } catch (const InputError &e) {
                throw fail(e.what());
            }
            const std::string field = key.substr(dot + 1);
            char *end = nullptr;
            const double value = std::strtod(value_text.c_str(), &end);
            if (value_text.empty() || end != value_text.c_str() + value_text.size()) {
                throw fail("malformed number '" + value_text + "'");
            }
            if (field == "t") {
                m.set_t(kind, value);
            } else if (field == "log10p") {
                m.set_log10p(kind, value);
            } else if (field == "p") {
                if (!(value > 0.0)) {
                    throw fail("error rate must be positive");
                }
                m.set_log10p(kind, std::log10(value));
            } else {
                throw fail("unknown field '" + field + "'");
            }
        }
        m.validate();
        return m;
    }

    static CostModel load(const std::string &path) {
        std::ifstream in(path);
        if (!in) {
            throw InputError("cannot open cost model '" + path + "'");
        }
        std::stringstream buf;
        buf << in.rdbuf();
        return parse(buf.str());
    }

    std::string render() const {
        std::string out;
        char buf[96];
        for (InstrKind k : kAllKinds) {
            std::snprintf(buf, sizeof(buf), "%s.t = %.17g\n%s.log10p = %.17g\n", to_string(k), t(k), to_string(k),
                          (*this)[k].log10p);
            out += buf;
        }
        return out;
    }

    friend bool operator==(const CostModel &a, const CostModel &b) {
        for (InstrKind k : kAllKinds) {
            if (a[k].t != b[k].t || a[k].log10p != b[k].log10p) {
                return false;
            }
        }
        return true;
    }

   private:
    std::array<KindCost, kNumKinds> kinds_{};
    bool tele_t_explicit_ = false;
    bool tele_p_explicit_ = false;
};

}  // namespace bbc
