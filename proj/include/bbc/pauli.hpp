#pragma once

// Symplectic GF(2) representation of Pauli operators.
//
// A Pauli string on n qubits is stored as v = [x | z], two packed bit-vectors.
// Qubit q carries X when only x_q is set, Z when only z_q is set and Y when
// both are set. Hermitian representatives use the convention Y = iXZ, so the
// operator for v is P_v = i^{|x & z|} X^x Z^z.
//
// Phase convention: pauli_multiply returns i^k P_{a+b} with k in Z_4. When a
// Clifford C = exp(-i d pi/4 P_v) (d = +1 or -1) is commuted past a later
// operator Q, Q becomes C^dagger Q C, which for anticommuting P_v, Q equals
// i d P_v Q. All conjugations in this library use that rule.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bbc/error.hpp"

namespace bbc {

/// Counts 64-bit word operations performed by the symplectic kernels.
/// Used for complexity measurements that do not depend on wall-clock time.
struct WordOpCounter {
    std::uint64_t ops = 0;
    void add(std::uint64_t k) { ops += k; }
};

namespace detail {
inline void count(WordOpCounter *counter, std::uint64_t k) {
    if (counter != nullptr) {
        counter->add(k);
    }
}
constexpr std::size_t words_for(std::size_t n) { return (n + 63) / 64; }
}  // namespace detail

class SymplecticVector {
   public:
    SymplecticVector() = default;
    explicit SymplecticVector(std::size_t num_qubits)
        : n_(num_qubits), w_(detail::words_for(num_qubits)), words_(2 * w_, 0) {}

    /// Parses letters from {I, X, Y, Z} ('_' is accepted for I).
    static SymplecticVector from_letters(std::string_view letters) {
        SymplecticVector v(letters.size());
        for (std::size_t q = 0; q < letters.size(); ++q) {
            v.set_letter(q, letters[q]);
        }
        return v;
    }

    /// Dense index x | (z << n); only valid for n <= 32.
    static SymplecticVector from_index(std::size_t num_qubits, std::uint64_t index) {
        if (num_qubits > 32) {
            throw std::invalid_argument("from_index supports at most 32 qubits");
        }
        SymplecticVector v(num_qubits);
        const std::uint64_t mask = num_qubits == 0 ? 0 : (~std::uint64_t{0} >> (64 - num_qubits));
        if (num_qubits > 0) {
            v.words_[0] = index & mask;
            v.words_[v.w_] = (index >> num_qubits) & mask;
        }
        return v;
    }

    std::uint64_t index() const {
        if (n_ > 32) {
            throw std::invalid_argument("index() supports at most 32 qubits");
        }
        if (n_ == 0) {
            return 0;
        }
        return words_[0] | (words_[w_] << n_);
    }

    std::size_t num_qubits() const { return n_; }
    std::size_t num_words() const { return w_; }

    bool x(std::size_t q) const { return (words_[q >> 6] >> (q & 63)) & 1; }
    bool z(std::size_t q) const { return (words_[w_ + (q >> 6)] >> (q & 63)) & 1; }

    void set_x(std::size_t q, bool value) { set_bit(q >> 6, q & 63, value); }
    void set_z(std::size_t q, bool value) { set_bit(w_ + (q >> 6), q & 63, value); }

    char letter(std::size_t q) const { return "IXZY"[x(q) | (z(q) << 1)]; }

    void set_letter(std::size_t q, char c) {
        switch (c) {
            case 'I':
            case '_':
                set_x(q, false);
                set_z(q, false);
                break;
            case 'X':
                set_x(q, true);
                set_z(q, false);
                break;
            case 'Y':
                set_x(q, true);
                set_z(q, true);
                break;
            case 'Z':
                set_x(q, false);
                set_z(q, true);
                break;
            default:
                throw std::invalid_argument(std::string("bad Pauli character '") + c + "'");
        }
    }

    std::span<const std::uint64_t> x_words() const { return {words_.data(), w_}; }
    std::span<const std::uint64_t> z_words() const { return {words_.data() + w_, w_}; }
    std::span<std::uint64_t> x_words() { return {words_.data(), w_}; }
    std::span<std::uint64_t> z_words() { return {words_.data() + w_, w_}; }

    bool is_identity() const {
        for (auto w : words_) {
            if (w != 0) {
                return false;
            }
        }
        return true;
    }

    std::size_t weight() const {
        std::size_t total = 0;
        for (std::size_t k = 0; k < w_; ++k) {
            total += static_cast<std::size_t>(std::popcount(words_[k] | words_[w_ + k]));
        }
        return total;
    }

    /// Qubits with a non-identity letter, ascending.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < w_; ++k) {
            std::uint64_t bits = words_[k] | words_[w_ + k];
            while (bits != 0) {
                out.push_back(64 * k + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
        return out;
    }

    SymplecticVector &operator^=(const SymplecticVector &other) {
        check_same_size(other);
        for (std::size_t k = 0; k < words_.size(); ++k) {
            words_[k] ^= other.words_[k];
        }
        return *this;
    }

    friend SymplecticVector operator^(SymplecticVector a, const SymplecticVector &b) {
        a ^= b;
        return a;
    }

    friend bool operator==(const SymplecticVector &a, const SymplecticVector &b) {
        return a.n_ == b.n_ && a.words_ == b.words_;
    }

    friend bool operator<(const SymplecticVector &a, const SymplecticVector &b) {
        if (a.n_ != b.n_) {
            return a.n_ < b.n_;
        }
        return a.str() < b.str();
    }

    std::string str() const {
        std::string out(n_, 'I');
        for (std::size_t q = 0; q < n_; ++q) {
            out[q] = letter(q);
        }
        return out;
    }

    void check_same_size(const SymplecticVector &other) const {
        if (n_ != other.n_) {
            throw std::invalid_argument("Pauli length mismatch: " + std::to_string(n_) + " vs " +
                                        std::to_string(other.n_));
        }
    }

    std::size_t hash() const {
        std::size_t h = n_;
        for (auto w : words_) {
            h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

   private:
    void set_bit(std::size_t word, std::size_t bit, bool value) {
        const std::uint64_t mask = std::uint64_t{1} << bit;
        words_[word] = value ? (words_[word] | mask) : (words_[word] & ~mask);
    }

    std::size_t n_ = 0;
    std::size_t w_ = 0;
    std::vector<std::uint64_t> words_;
};

struct SymplecticVectorHash {
    std::size_t operator()(const SymplecticVector &v) const { return v.hash(); }
};

/// A Hermitian Pauli operator: +P_v or -P_v.
struct SignedPauli {
    SymplecticVector vector;
    bool negative = false;

    SignedPauli() = default;
    explicit SignedPauli(SymplecticVector v, bool neg = false) : vector(std::move(v)), negative(neg) {}

    std::size_t num_qubits() const { return vector.num_qubits(); }
    int sign() const { return negative ? -1 : 1; }

    /// Text form: optional sign ('+', '-' or U+2212) followed by I/X/Y/Z letters.
    static SignedPauli parse(std::string_view text) {
        bool neg = false;
        if (text.starts_with("+")) {
            text.remove_prefix(1);
        } else if (text.starts_with("-")) {
            neg = true;
            text.remove_prefix(1);
        } else if (text.starts_with("\xE2\x88\x92")) {
            neg = true;
            text.remove_prefix(3);
        }
        if (text.empty()) {
            throw std::invalid_argument("empty Pauli string");
        }
        return SignedPauli(SymplecticVector::from_letters(text), neg);
    }

    std::string str() const { return (negative ? "-" : "+") + vector.str(); }

    friend bool operator==(const SignedPauli &, const SignedPauli &) = default;
};

/// i^phase * P_v, phase in Z_4.
struct PhasedPauli {
    SymplecticVector vector;
    int phase = 0;

    bool is_hermitian() const { return (phase & 1) == 0; }

    SignedPauli to_signed() const {
        if (!is_hermitian()) {
            throw InvariantError("product is anti-Hermitian (phase i^" + std::to_string(phase) + ")");
        }
        return SignedPauli(vector, phase == 2);
    }
};

/// <v, u> = v_x . u_z + v_z . u_x (mod 2); true iff P_v and P_u anticommute.
inline bool symplectic_inner(const SymplecticVector &v, const SymplecticVector &u,
                             WordOpCounter *counter = nullptr) {
    v.check_same_size(u);
    auto vx = v.x_words();
    auto vz = v.z_words();
    auto ux = u.x_words();
    auto uz = u.z_words();
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < vx.size(); ++k) {
        acc ^= (vx[k] & uz[k]) ^ (vz[k] & ux[k]);
    }
    detail::count(counter, 2 * vx.size());
    return (std::popcount(acc) & 1) != 0;
}

/// Exponent k (mod 4) with P_a P_b = i^k P_{a+b}.
///
/// From P_v = i^{|x&z|} X^x Z^z and Z^{z_a} X^{x_b} = (-1)^{|z_a & x_b|} X^{x_b} Z^{z_a}:
/// k = |x_a&z_a| + |x_b&z_b| + 2|z_a&x_b| - |(x_a^x_b)&(z_a^z_b)|.
inline int product_phase(const SymplecticVector &a, const SymplecticVector &b,
                         WordOpCounter *counter = nullptr) {
    a.check_same_size(b);
    auto ax = a.x_words();
    auto az = a.z_words();
    auto bx = b.x_words();
    auto bz = b.z_words();
    long long k = 0;
    for (std::size_t w = 0; w < ax.size(); ++w) {
        k += std::popcount(ax[w] & az[w]);
        k += std::popcount(bx[w] & bz[w]);
        k += 2 * std::popcount(az[w] & bx[w]);
        k -= std::popcount((ax[w] ^ bx[w]) & (az[w] ^ bz[w]));
    }
    detail::count(counter, 2 * ax.size());
    return static_cast<int>(((k % 4) + 4) % 4);
}

inline PhasedPauli pauli_multiply(const SignedPauli &a, const SignedPauli &b,
                                  WordOpCounter *counter = nullptr) {
    int phase = product_phase(a.vector, b.vector, counter);
    phase = (phase + (a.negative ? 2 : 0) + (b.negative ? 2 : 0)) & 3;
    detail::count(counter, 2 * a.vector.num_words());
    return PhasedPauli{a.vector ^ b.vector, phase};
}

/// T_v(u) = u + <v,u> v over GF(2).
inline SymplecticVector transvect(const SymplecticVector &v, const SymplecticVector &u) {
    if (v.is_identity()) {
        throw std::invalid_argument("transvection axis must be nonzero");
    }
    return symplectic_inner(v, u) ? (u ^ v) : u;
}

/// C^dagger u C for C = exp(-i d pi/4 axis), d = +1 or -1.
///
/// The vector part is transvect(axis, u). The sign of the axis folds into d.
inline SignedPauli conjugate_by_rotation(const SignedPauli &axis, int direction, const SignedPauli &u,
                                         WordOpCounter *counter = nullptr) {
    if (axis.vector.is_identity()) {
        throw std::invalid_argument("rotation axis must be nonzero");
    }
    if (!symplectic_inner(axis.vector, u.vector, counter)) {
        return u;
    }
    const int d = direction * axis.sign();
    PhasedPauli p = pauli_multiply(SignedPauli(axis.vector), u, counter);
    p.phase = (p.phase + (d > 0 ? 1 : 3)) & 3;
    return p.to_signed();
}

/// Symplectic map with sign data: the image of every basis Pauli X_q, Z_q.
///
/// The bit-matrix view has column j equal to the image vector of basis j
/// (j < n: X_j, otherwise Z_{j-n}) with rows ordered [x | z].
class SymplecticTransform {
   public:
    SymplecticTransform() = default;

    static SymplecticTransform identity(std::size_t n) {
        SymplecticTransform t;
        t.n_ = n;
        t.images_.reserve(2 * n);
        for (std::size_t j = 0; j < 2 * n; ++j) {
            SymplecticVector v(n);
            if (j < n) {
                v.set_x(j, true);
            } else {
                v.set_z(j - n, true);
            }
            t.images_.emplace_back(std::move(v));
        }
        return t;
    }

    /// Qubit relabelling q -> perm[q]. Permutations are symplectic with all signs +.
    static SymplecticTransform permutation(const std::vector<std::size_t> &perm) {
        const std::size_t n = perm.size();
        SymplecticTransform t = identity(n);
        for (std::size_t q = 0; q < n; ++q) {
            SymplecticVector x(n);
            SymplecticVector z(n);
            x.set_x(perm[q], true);
            z.set_z(perm[q], true);
            t.images_[q] = SignedPauli(std::move(x));
            t.images_[n + q] = SignedPauli(std::move(z));
        }
        return t;
    }

    /// Builds a transform from explicit images [X_0..X_{n-1}, Z_0..Z_{n-1}].
    static SymplecticTransform from_images(std::vector<SignedPauli> images) {
        if (images.size() % 2 != 0) {
            throw std::invalid_argument("transform needs 2n images");
        }
        SymplecticTransform t;
        t.n_ = images.size() / 2;
        for (const auto &img : images) {
            if (img.num_qubits() != t.n_) {
                throw std::invalid_argument("image length mismatch");
            }
        }
        t.images_ = std::move(images);
        return t;
    }

    std::size_t num_qubits() const { return n_; }
    const SignedPauli &image_of_x(std::size_t q) const { return images_[q]; }
    const SignedPauli &image_of_z(std::size_t q) const { return images_[n_ + q]; }
    const std::vector<SignedPauli> &images() const { return images_; }

    bool matrix_entry(std::size_t row, std::size_t col) const {
        const auto &img = images_[col].vector;
        return row < n_ ? img.x(row) : img.z(row - n_);
    }

    /// Image of u under the accumulated map; O(n * words).
    SignedPauli apply(const SignedPauli &u, WordOpCounter *counter = nullptr) const {
        if (u.num_qubits() != n_) {
            throw std::invalid_argument("transform/operand size mismatch");
        }
        SymplecticVector acc(n_);
        int phase = 0;
        for (std::size_t w = 0; w < u.vector.num_words(); ++w) {
            phase += std::popcount(u.vector.x_words()[w] & u.vector.z_words()[w]);
        }
        auto fold = [&](const SignedPauli &img) {
            phase += product_phase(acc, img.vector, counter) + (img.negative ? 2 : 0);
            acc ^= img.vector;
            detail::count(counter, 2 * acc.num_words());
        };
        for_each_bit(u.vector.x_words(), [&](std::size_t q) { fold(images_[q]); });
        for_each_bit(u.vector.z_words(), [&](std::size_t q) { fold(images_[n_ + q]); });
        phase += u.negative ? 2 : 0;
        return PhasedPauli{std::move(acc), phase & 3}.to_signed();
    }

    /// this <- this o conj_C with C = exp(-i d pi/4 axis); in matrix terms S <- S T_v.
    ///
    /// Only basis images that anticommute with the axis change, each by one
    /// multiplication with S(axis): O(n * words) word operations.
    void compose_rotation(const SignedPauli &axis, int direction, WordOpCounter *counter = nullptr) {
        if (axis.num_qubits() != n_) {
            throw std::invalid_argument("transform/axis size mismatch");
        }
        if (axis.vector.is_identity()) {
            throw std::invalid_argument("rotation axis must be nonzero");
        }
        const SignedPauli s_axis = apply(SignedPauli(axis.vector), counter);
        const int factor = direction * axis.sign() > 0 ? 1 : 3;
        auto update = [&](std::size_t j) {
            PhasedPauli p = pauli_multiply(s_axis, images_[j], counter);
            p.phase = (p.phase + factor) & 3;
            images_[j] = p.to_signed();
        };
        // X_q anticommutes with the axis iff axis has z on q; Z_q iff axis has x on q.
        for_each_bit(axis.vector.z_words(), [&](std::size_t q) { update(q); });
        for_each_bit(axis.vector.x_words(), [&](std::size_t q) { update(n_ + q); });
    }

    /// (a o b)(u) = a(b(u)).
    friend SymplecticTransform compose(const SymplecticTransform &a, const SymplecticTransform &b) {
        if (a.n_ != b.n_) {
            throw std::invalid_argument("transform size mismatch");
        }
        SymplecticTransform out;
        out.n_ = a.n_;
        out.images_.reserve(b.images_.size());
        for (const auto &img : b.images_) {
            out.images_.push_back(a.apply(img));
        }
        return out;
    }

    /// M^T Omega M = Omega, checked on all pairs of basis images.
    bool is_symplectic() const {
        for (std::size_t i = 0; i < 2 * n_; ++i) {
            for (std::size_t j = i; j < 2 * n_; ++j) {
                const bool expected = (i + n_ == j) || (j + n_ == i);
                if (symplectic_inner(images_[i].vector, images_[j].vector) != expected) {
                    return false;
                }
            }
        }
        return true;
    }

    bool same_matrix(const SymplecticTransform &other) const {
        if (n_ != other.n_) {
            return false;
        }
        for (std::size_t j = 0; j < images_.size(); ++j) {
            if (!(images_[j].vector == other.images_[j].vector)) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const SymplecticTransform &, const SymplecticTransform &) = default;

   private:
    template <typename F>
    static void for_each_bit(std::span<const std::uint64_t> words, F &&f) {
        for (std::size_t k = 0; k < words.size(); ++k) {
            std::uint64_t bits = words[k];
            while (bits != 0) {
                f(64 * k + static_cast<std::size_t>(std::countr_zero(bits)));
                bits &= bits - 1;
            }
        }
    }

    std::size_t n_ = 0;
    std::vector<SignedPauli> images_;
};

/// Returns S o T_v as a new value.
inline SymplecticTransform compose_transvection(SymplecticTransform s, const SignedPauli &axis, int direction,
                                                WordOpCounter *counter = nullptr) {
    s.compose_rotation(axis, direction, counter);
    return s;
}

inline SignedPauli apply_transform(const SymplecticTransform &s, const SignedPauli &u,
                                   WordOpCounter *counter = nullptr) {
    return s.apply(u, counter);
}

}  // namespace bbc
