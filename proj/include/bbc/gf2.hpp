#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bbc {

/// Dense row-major GF(2) matrix with packed rows.
class BitMatrix {
   public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), w_((cols + 63) / 64), data_(rows * w_, 0) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return (data_[r * w_ + (c >> 6)] >> (c & 63)) & 1; }
    void set(std::size_t r, std::size_t c, bool v) {
        const std::uint64_t mask = std::uint64_t{1} << (c & 63);
        auto &word = data_[r * w_ + (c >> 6)];
        word = v ? (word | mask) : (word & ~mask);
    }
    void flip(std::size_t r, std::size_t c) { data_[r * w_ + (c >> 6)] ^= std::uint64_t{1} << (c & 63); }

    const std::uint64_t *row(std::size_t r) const { return data_.data() + r * w_; }
    std::uint64_t *row(std::size_t r) { return data_.data() + r * w_; }
    std::size_t row_words() const { return w_; }

    BitMatrix transpose() const {
        BitMatrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                if (get(r, c)) {
                    t.set(c, r, true);
                }
            }
        }
        return t;
    }

    /// [this | other]
    BitMatrix hconcat(const BitMatrix &other) const {
        if (rows_ != other.rows_) {
            throw std::invalid_argument("hconcat row mismatch");
        }
        BitMatrix out(rows_, cols_ + other.cols_);
        for (std::size_t r = 0; r < rows_; ++r) {
            for (std::size_t c = 0; c < cols_; ++c) {
                out.set(r, c, get(r, c));
            }
            for (std::size_t c = 0; c < other.cols_; ++c) {
                out.set(r, cols_ + c, other.get(r, c));
            }
        }
        return out;
    }

    friend BitMatrix operator*(const BitMatrix &a, const BitMatrix &b) {
        if (a.cols_ != b.rows_) {
            throw std::invalid_argument("matrix product dimension mismatch");
        }
        BitMatrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                if (!a.get(r, k)) {
                    continue;
                }
                for (std::size_t w = 0; w < out.w_; ++w) {
                    out.row(r)[w] ^= b.row(k)[w];
                }
            }
        }
        return out;
    }

    friend BitMatrix operator+(BitMatrix a, const BitMatrix &b) {
        if (a.rows_ != b.rows_ || a.cols_ != b.cols_) {
            throw std::invalid_argument("matrix sum dimension mismatch");
        }
        for (std::size_t i = 0; i < a.data_.size(); ++i) {
            a.data_[i] ^= b.data_[i];
        }
        return a;
    }

    bool is_zero() const {
        for (auto w : data_) {
            if (w != 0) {
                return false;
            }
        }
        return true;
    }

    friend bool operator==(const BitMatrix &, const BitMatrix &) = default;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t w_ = 0;
    std::vector<std::uint64_t> data_;
};

/// Rank by row reduction.
inline std::size_t rank_elimination(BitMatrix m) {
    std::size_t rank = 0;
    const std::size_t w = m.row_words();
    for (std::size_t c = 0; c < m.cols() && rank < m.rows(); ++c) {
        std::size_t pivot = rank;
        while (pivot < m.rows() && !m.get(pivot, c)) {
            ++pivot;
        }
        if (pivot == m.rows()) {
            continue;
        }
        if (pivot != rank) {
            for (std::size_t k = 0; k < w; ++k) {
                std::swap(m.row(pivot)[k], m.row(rank)[k]);
            }
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r != rank && m.get(r, c)) {
                for (std::size_t k = 0; k < w; ++k) {
                    m.row(r)[k] ^= m.row(rank)[k];
                }
            }
        }
        ++rank;
    }
    return rank;
}

/// Rank as the size of an XOR basis of the columns. Shares no code with
/// rank_elimination so the two can cross-check each other.
inline std::size_t rank_column_basis(const BitMatrix &m) {
    const std::size_t w = (m.rows() + 63) / 64;
    // basis[b] holds a vector whose highest set bit is b, or is empty.
    std::vector<std::vector<std::uint64_t>> basis(m.rows());
    std::size_t rank = 0;
    for (std::size_t c = 0; c < m.cols(); ++c) {
        std::vector<std::uint64_t> v(w, 0);
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (m.get(r, c)) {
                v[r >> 6] |= std::uint64_t{1} << (r & 63);
            }
        }
        for (std::size_t k = w; k-- > 0;) {
            while (v[k] != 0) {
                const std::size_t top = 64 * k + 63 - static_cast<std::size_t>(std::countl_zero(v[k]));
                if (basis[top].empty()) {
                    basis[top] = v;
                    ++rank;
                    v.assign(w, 0);
                    break;
                }
                for (std::size_t j = 0; j < w; ++j) {
                    v[j] ^= basis[top][j];
                }
            }
        }
    }
    return rank;
}

}  // namespace bbc
