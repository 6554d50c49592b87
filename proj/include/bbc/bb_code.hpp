#pragma once

// Bivariate bicycle codes. With x = S_l (x) I_m and y = I_l (x) S_m, where S_k
// is the k x k cyclic shift, a code is fixed by two polynomials A, B in x, y:
// H_X = [A | B], H_Z = [B^T | A^T].

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bbc/error.hpp"
#include "bbc/gf2.hpp"

namespace bbc {

/// Sum of monomials x^a y^b, exponents reduced mod (l, m) on materialization.
struct BbPolynomial {
    std::vector<std::pair<long, long>> terms;

    /// Parses e.g. "1 + y + x^3 y^-1" or "1+x+x^-1*y^-3".
    static BbPolynomial parse(std::string_view text) {
        BbPolynomial p;
        std::string s;
        for (char ch : text) {
            if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '*') {
                s += ch;
            }
        }
        if (s.empty()) {
            throw InputError("empty polynomial");
        }
        std::size_t i = 0;
        auto bad = [&](const std::string &why) {
            return InputError("polynomial '" + std::string(text) + "': " + why);
        };
        auto read_exponent = [&]() -> long {
            if (i >= s.size() || s[i] != '^') {
                return 1;
            }
            ++i;
            const std::size_t start = i;
            if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
                ++i;
            }
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                ++i;
            }
            if (i == start || (i == start + 1 && !std::isdigit(static_cast<unsigned char>(s[start])))) {
                throw bad("malformed exponent");
            }
            return std::stol(s.substr(start, i - start));
        };
        while (i < s.size()) {
            long a = 0;
            long b = 0;
            bool any = false;
            if (s[i] == '1') {
                ++i;
                any = true;
            } else {
                while (i < s.size() && (s[i] == 'x' || s[i] == 'y')) {
                    const char var = s[i++];
                    const long e = read_exponent();
                    (var == 'x' ? a : b) += e;
                    any = true;
                }
            }
            if (!any) {
                throw bad("expected a monomial at offset " + std::to_string(i));
            }
            p.terms.emplace_back(a, b);
            if (i < s.size()) {
                if (s[i] != '+') {
                    throw bad("expected '+' at offset " + std::to_string(i));
                }
                ++i;
                if (i == s.size()) {
                    throw bad("trailing '+'");
                }
            }
        }
        return p;
    }

    /// The lm x lm matrix; row (a,b) -> a*m+b has ones at ((a+p) mod l, (b+q) mod m).
    BitMatrix matrix(std::size_t l, std::size_t m) const {
        BitMatrix out(l * m, l * m);
        const auto L = static_cast<long>(l);
        const auto M = static_cast<long>(m);
        for (const auto &[p, q] : terms) {
            for (long a = 0; a < L; ++a) {
                for (long b = 0; b < M; ++b) {
                    const long ca = ((a + p) % L + L) % L;
                    const long cb = ((b + q) % M + M) % M;
                    out.flip(static_cast<std::size_t>(a * M + b), static_cast<std::size_t>(ca * M + cb));
                }
            }
        }
        return out;
    }
};

struct BbCode {
    std::size_t l = 0;
    std::size_t m = 0;
    BbPolynomial a;
    BbPolynomial b;
    BitMatrix hx;
    BitMatrix hz;
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t rank_hx = 0;
    std::size_t rank_hz = 0;
};

inline BbCode build_bb_code(std::size_t l, std::size_t m, const BbPolynomial &a, const BbPolynomial &b) {
    if (l == 0 || m == 0) {
        throw InputError("cycle lengths must be positive");
    }
    BbCode code;
    code.l = l;
    code.m = m;
    code.a = a;
    code.b = b;
    const BitMatrix A = a.matrix(l, m);
    const BitMatrix B = b.matrix(l, m);
    code.hx = A.hconcat(B);
    code.hz = B.transpose().hconcat(A.transpose());
    if (!(code.hx * code.hz.transpose()).is_zero()) {
        throw InputError("H_X H_Z^T != 0: polynomials do not give commuting checks");
    }
    code.n = 2 * l * m;
    code.rank_hx = rank_elimination(code.hx);
    code.rank_hz = rank_elimination(code.hz);
    code.k = code.n - code.rank_hx - code.rank_hz;
    return code;
}

/// The [[144,12,12]] gross code.
inline BbCode gross_code() {
    return build_bb_code(12, 6, BbPolynomial::parse("1 + y + x^3 y^-1"), BbPolynomial::parse("1 + x + x^-1 y^-3"));
}

}  // namespace bbc
