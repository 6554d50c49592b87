#pragma once

// Pauli-based-computation circuits: Pauli rotations exp(-i theta P) and Pauli
// measurements over n logical qubits, with a line-oriented text format:
//
//   # comment
//   qubits 3
//   rot +XZI pi/8
//   rot -ZZY 0.123
//   meas +ZII

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bbc/error.hpp"
#include "bbc/pauli.hpp"
#include "bbc/rng.hpp"

namespace bbc {

enum class AngleClass { Clifford, Tlike, Arbitrary };

inline const char *to_string(AngleClass c) {
    switch (c) {
        case AngleClass::Clifford:
            return "clifford";
        case AngleClass::Tlike:
            return "tlike";
        case AngleClass::Arbitrary:
            return "arbitrary";
    }
    return "?";
}

/// A rotation angle: either an exact rational multiple of pi or float radians.
class Angle {
   public:
    static constexpr double kSnapTolerance = 1e-12;

    Angle() = default;

    static Angle exact(long long numerator, long long denominator) {
        if (denominator == 0) {
            throw std::invalid_argument("zero denominator");
        }
        if (denominator < 0) {
            numerator = -numerator;
            denominator = -denominator;
        }
        const long long g = std::gcd(numerator < 0 ? -numerator : numerator, denominator);
        Angle a;
        a.exact_ = true;
        a.num_ = numerator / (g == 0 ? 1 : g);
        a.den_ = denominator / (g == 0 ? 1 : g);
        if (a.num_ == 0) {
            a.den_ = 1;
        }
        return a;
    }

    static Angle radians(double value) {
        Angle a;
        a.exact_ = false;
        a.radians_ = value;
        return a;
    }

    bool is_exact() const { return exact_; }
    long long numerator() const { return num_; }
    long long denominator() const { return den_; }

    double value() const {
        return exact_ ? std::numbers::pi * static_cast<double>(num_) / static_cast<double>(den_) : radians_;
    }

    /// Index k in [0, 8) when the angle equals k*pi/8 modulo pi, exactly or within tolerance.
    std::optional<int> eighth_turns() const {
        if (exact_) {
            if ((8 % den_) != 0) {
                return std::nullopt;
            }
            const long long k = num_ * (8 / den_);
            return static_cast<int>(((k % 8) + 8) % 8);
        }
        const double units = radians_ / (std::numbers::pi / 8.0);
        const double nearest = std::round(units);
        if (std::abs(radians_ - nearest * std::numbers::pi / 8.0) > kSnapTolerance) {
            return std::nullopt;
        }
        const long long k = static_cast<long long>(nearest);
        return static_cast<int>(((k % 8) + 8) % 8);
    }

    AngleClass classify() const {
        auto k = eighth_turns();
        if (!k) {
            return AngleClass::Arbitrary;
        }
        return (*k % 2 == 0) ? AngleClass::Clifford : AngleClass::Tlike;
    }

    /// For Clifford angles: the number of pi/4 steps modulo pi, in {0,1,2,3}.
    int quarter_turns() const {
        auto k = eighth_turns();
        if (!k || (*k % 2) != 0) {
            throw std::logic_error("quarter_turns on a non-Clifford angle");
        }
        return *k / 2;
    }

    /// Angles whose rotation is a Pauli or the identity: 0 and pi/2 modulo pi.
    bool is_trivial() const {
        auto k = eighth_turns();
        return k && (*k % 4) == 0;
    }

    Angle doubled() const { return exact_ ? exact(2 * num_, den_) : radians(2.0 * radians_); }

    std::string str() const {
        if (!exact_) {
            char buf[40];
            std::snprintf(buf, sizeof(buf), "%.17g", radians_);
            std::string s(buf);
            // Keep floats distinguishable from integers so they re-parse as radians.
            if (s.find_first_of(".eEn") == std::string::npos) {
                s += ".0";
            }
            return s;
        }
        std::string out;
        long long num = num_;
        if (num < 0) {
            out += "-";
            num = -num;
        }
        if (num != 1) {
            out += std::to_string(num) + "*";
        }
        out += "pi";
        if (den_ != 1) {
            out += "/" + std::to_string(den_);
        }
        return out;
    }

    /// Accepts [-][k*]pi[/d] and decimal radians.
    static std::optional<Angle> parse(std::string_view text) {
        if (text.empty()) {
            return std::nullopt;
        }
        const auto pi_pos = text.find("pi");
        if (pi_pos != std::string_view::npos) {
            std::string_view head = text.substr(0, pi_pos);
            std::string_view tail = text.substr(pi_pos + 2);
            long long sign = 1;
            if (head.starts_with("-")) {
                sign = -1;
                head.remove_prefix(1);
            } else if (head.starts_with("+")) {
                head.remove_prefix(1);
            }
            long long num = 1;
            if (!head.empty()) {
                if (!head.ends_with("*")) {
                    return std::nullopt;
                }
                head.remove_suffix(1);
                if (!parse_int(head, num)) {
                    return std::nullopt;
                }
            }
            long long den = 1;
            if (!tail.empty()) {
                if (!tail.starts_with("/")) {
                    return std::nullopt;
                }
                tail.remove_prefix(1);
                if (!parse_int(tail, den) || den <= 0) {
                    return std::nullopt;
                }
            }
            return exact(sign * num, den);
        }
        std::string buf(text);
        char *end = nullptr;
        const double v = std::strtod(buf.c_str(), &end);
        if (end != buf.c_str() + buf.size() || !std::isfinite(v)) {
            return std::nullopt;
        }
        return radians(v);
    }

    friend bool operator==(const Angle &a, const Angle &b) {
        if (a.exact_ != b.exact_) {
            return false;
        }
        return a.exact_ ? (a.num_ == b.num_ && a.den_ == b.den_) : a.radians_ == b.radians_;
    }

   private:
    static bool parse_int(std::string_view s, long long &out) {
        if (s.empty()) {
            return false;
        }
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    }

    bool exact_ = true;
    long long num_ = 0;
    long long den_ = 1;
    double radians_ = 0.0;
};

enum class OpKind { Rotation, Measurement };

struct PbcOp {
    OpKind kind = OpKind::Measurement;
    SignedPauli pauli;
    Angle angle;  // meaningful only for rotations

    static PbcOp rotation(SignedPauli p, Angle a) { return PbcOp{OpKind::Rotation, std::move(p), a}; }
    static PbcOp measurement(SignedPauli p) { return PbcOp{OpKind::Measurement, std::move(p), Angle{}}; }

    bool is_rotation() const { return kind == OpKind::Rotation; }
    bool is_clifford_rotation() const { return is_rotation() && angle.classify() == AngleClass::Clifford; }

    friend bool operator==(const PbcOp &a, const PbcOp &b) {
        if (a.kind != b.kind || !(a.pauli == b.pauli)) {
            return false;
        }
        return a.kind == OpKind::Measurement || a.angle == b.angle;
    }
};

struct PbcCircuit {
    std::size_t n_qubits = 0;
    std::vector<PbcOp> ops;

    std::size_t size() const { return ops.size(); }

    void validate() const {
        if (n_qubits == 0) {
            throw InputError("circuit has zero qubits");
        }
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (ops[i].pauli.num_qubits() != n_qubits) {
                throw InputError("op " + std::to_string(i) + ": Pauli length " +
                                 std::to_string(ops[i].pauli.num_qubits()) + " != " + std::to_string(n_qubits));
            }
            if (ops[i].pauli.vector.is_identity()) {
                throw InputError("op " + std::to_string(i) + ": identity Pauli");
            }
        }
    }

    friend bool operator==(const PbcCircuit &, const PbcCircuit &) = default;
};

namespace detail {

inline std::vector<std::pair<std::size_t, std::string_view>> split_words(std::string_view line) {
    std::vector<std::pair<std::size_t, std::string_view>> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) {
            ++i;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
            ++i;
        }
        if (i > start) {
            out.emplace_back(start, line.substr(start, i - start));
        }
    }
    return out;
}

}  // namespace detail

/// Parses the circuit text format. Errors carry "line L, column C".
inline PbcCircuit parse_circuit(std::string_view text) {
    PbcCircuit circuit;
    bool have_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        auto words = detail::split_words(line);
        if (words.empty()) {
            if (eol == text.size()) {
                break;
            }
            continue;
        }
        auto fail = [&](std::size_t word, const std::string &msg) -> InputError {
            const std::size_t col = word < words.size() ? words[word].first + 1 : line.size() + 1;
            return InputError("line " + std::to_string(line_no) + ", column " + std::to_string(col) + ": " + msg);
        };
        const std::string_view directive = words[0].second;
        if (!have_header) {
            if (directive != "qubits") {
                throw fail(0, "expected 'qubits <n>' as the first directive");
            }
            if (words.size() != 2) {
                throw fail(words.size() < 2 ? 1 : 2, "expected exactly one qubit count");
            }
            long long n = 0;
            auto [ptr, ec] = std::from_chars(words[1].second.data(), words[1].second.data() + words[1].second.size(), n);
            if (ec != std::errc() || ptr != words[1].second.data() + words[1].second.size() || n < 0) {
                throw fail(1, "malformed qubit count");
            }
            if (n == 0) {
                throw fail(1, "zero qubits");
            }
            circuit.n_qubits = static_cast<std::size_t>(n);
            have_header = true;
            if (eol == text.size()) {
                break;
            }
            continue;
        }
        auto parse_pauli = [&](std::size_t word) {
            SignedPauli p;
            try {
                p = SignedPauli::parse(words[word].second);
            } catch (const std::invalid_argument &e) {
                throw fail(word, e.what());
            }
            if (p.num_qubits() != circuit.n_qubits) {
                throw fail(word, "Pauli length " + std::to_string(p.num_qubits()) + " does not match " +
                                     std::to_string(circuit.n_qubits) + " qubits");
            }
            if (p.vector.is_identity()) {
                throw fail(word, "identity Pauli");
            }
            return p;
        };
        if (directive == "rot") {
            if (words.size() != 3) {
                throw fail(words.size() < 3 ? words.size() : 3, "expected 'rot <pauli> <angle>'");
            }
            SignedPauli p = parse_pauli(1);
            auto angle = Angle::parse(words[2].second);
            if (!angle) {
                throw fail(2, "malformed angle '" + std::string(words[2].second) + "'");
            }
            circuit.ops.push_back(PbcOp::rotation(std::move(p), *angle));
        } else if (directive == "meas") {
            if (words.size() != 2) {
                throw fail(words.size() < 2 ? 1 : 2, "expected 'meas <pauli>'");
            }
            circuit.ops.push_back(PbcOp::measurement(parse_pauli(1)));
        } else if (directive == "qubits") {
            throw fail(0, "duplicate 'qubits' directive");
        } else {
            throw fail(0, "unknown directive '" + std::string(directive) + "'");
        }
        if (eol == text.size()) {
            break;
        }
    }
    if (!have_header) {
        throw InputError("line " + std::to_string(line_no) + ", column 1: missing 'qubits <n>' directive");
    }
    return circuit;
}

inline std::string render_circuit(const PbcCircuit &circuit) {
    std::ostringstream out;
    out << "qubits " << circuit.n_qubits << "\n";
    for (const auto &op : circuit.ops) {
        if (op.is_rotation()) {
            out << "rot " << op.pauli.str() << " " << op.angle.str() << "\n";
        } else {
            out << "meas " << op.pauli.str() << "\n";
        }
    }
    return out.str();
}

/// How many qubits a random Pauli touches.
struct WeightDistribution {
    enum class Kind { Uniform, Bernoulli };
    Kind kind = Kind::Uniform;
    std::size_t min_weight = 1;
    std::size_t max_weight = 4;
    double probability = 0.3;

    /// "uniform:<lo>:<hi>" or "bernoulli:<p>".
    static WeightDistribution parse(std::string_view spec) {
        WeightDistribution d;
        auto bad = [&] { return InputError("bad weight distribution '" + std::string(spec) + "'"); };
        if (spec.starts_with("uniform:")) {
            std::string rest(spec.substr(8));
            std::size_t lo = 0;
            std::size_t hi = 0;
            char extra = 0;
            if (std::sscanf(rest.c_str(), "%zu:%zu%c", &lo, &hi, &extra) != 2 || lo == 0 || hi < lo) {
                throw bad();
            }
            d.kind = Kind::Uniform;
            d.min_weight = lo;
            d.max_weight = hi;
        } else if (spec.starts_with("bernoulli:")) {
            auto a = Angle::parse(spec.substr(10));  // reuse the strict decimal parser
            if (!a || a->is_exact() || a->value() <= 0.0 || a->value() > 1.0) {
                throw bad();
            }
            d.kind = Kind::Bernoulli;
            d.probability = a->value();
        } else {
            throw bad();
        }
        return d;
    }

    std::string str() const {
        if (kind == Kind::Uniform) {
            return "uniform:" + std::to_string(min_weight) + ":" + std::to_string(max_weight);
        }
        char buf[40];
        std::snprintf(buf, sizeof(buf), "bernoulli:%.17g", probability);
        return buf;
    }
};

struct GenSpec {
    std::size_t n_qubits = 5;
    std::size_t length = 100;
    double clifford_frac = 0.3;
    double arb_frac = 0.3;
    double tlike_frac = 0.0;  // remaining ops are measurements
    WeightDistribution weights;
    std::uint64_t seed = 1;
};

namespace detail {

inline SymplecticVector random_pauli(Rng &rng, std::size_t n, const WeightDistribution &dist) {
    SymplecticVector v(n);
    auto random_letter = [&](std::size_t q) {
        const auto which = rng.uniform_index(3);
        v.set_letter(q, "XYZ"[which]);
    };
    if (dist.kind == WeightDistribution::Kind::Uniform) {
        const std::size_t hi = std::min(dist.max_weight, n);
        const std::size_t lo = std::min(dist.min_weight, hi);
        const std::size_t w = lo + rng.uniform_index(hi - lo + 1);
        // Partial Fisher-Yates for w distinct qubits.
        std::vector<std::size_t> qubits(n);
        std::iota(qubits.begin(), qubits.end(), std::size_t{0});
        for (std::size_t i = 0; i < w; ++i) {
            const std::size_t j = i + rng.uniform_index(n - i);
            std::swap(qubits[i], qubits[j]);
            random_letter(qubits[i]);
        }
    } else {
        do {
            for (std::size_t q = 0; q < n; ++q) {
                v.set_letter(q, 'I');
                if (rng.uniform_real() < dist.probability) {
                    random_letter(q);
                }
            }
        } while (v.is_identity());
    }
    return v;
}

}  // namespace detail

/// Seeded random workload. Op classes are drawn independently per op with the
/// given probabilities; whatever probability mass is left becomes measurements.
inline PbcCircuit gen_random(const GenSpec &spec) {
    const double total = spec.clifford_frac + spec.arb_frac + spec.tlike_frac;
    if (spec.clifford_frac < 0 || spec.arb_frac < 0 || spec.tlike_frac < 0 || total > 1.0 + 1e-12) {
        throw InputError("invalid op-class fractions (each must be >= 0 and their sum <= 1)");
    }
    if (spec.n_qubits == 0) {
        throw InputError("zero qubits");
    }
    Rng rng(spec.seed);
    PbcCircuit c;
    c.n_qubits = spec.n_qubits;
    c.ops.reserve(spec.length);
    static const Angle kCliffordAngles[] = {Angle::exact(1, 4), Angle::exact(-1, 4), Angle::exact(1, 2)};
    static const Angle kTAngles[] = {Angle::exact(1, 8), Angle::exact(-1, 8)};
    for (std::size_t i = 0; i < spec.length; ++i) {
        const double u = rng.uniform_real();
        SignedPauli p(detail::random_pauli(rng, spec.n_qubits, spec.weights), rng.coin());
        if (u < spec.clifford_frac) {
            c.ops.push_back(PbcOp::rotation(std::move(p), kCliffordAngles[rng.uniform_index(3)]));
        } else if (u < spec.clifford_frac + spec.arb_frac) {
            Angle a;
            do {
                a = Angle::radians(std::numbers::pi * rng.uniform_real());
            } while (a.classify() != AngleClass::Arbitrary);
            c.ops.push_back(PbcOp::rotation(std::move(p), a));
        } else if (u < total) {
            c.ops.push_back(PbcOp::rotation(std::move(p), kTAngles[rng.uniform_index(2)]));
        } else {
            c.ops.push_back(PbcOp::measurement(std::move(p)));
        }
    }
    return c;
}

}  // namespace bbc
