#pragma once

// Dense GF(2) linear algebra on bit-packed words.
//
// BitVector and BitMatrix carry every binary object in the library (IQP
// matrices, secrets, codewords, Gram matrices, basis-change matrices).
// Elimination routines pick the lowest-index pivot available so that ranks,
// kernels and solutions are deterministic functions of their input.
//
// Bit order: bit j of a row corresponds to column j, LSB-first within each
// 64-bit word. File I/O relies on this being stable.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace iqp {

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t n) : n_(n), w_(words_for(n), 0) {}

    static BitVector zeros(std::size_t n) { return BitVector(n); }

    static BitVector ones(std::size_t n) {
        BitVector v(n);
        for (std::size_t i = 0; i < v.w_.size(); ++i) v.w_[i] = ~0ull;
        v.trim();
        return v;
    }

    static BitVector unit(std::size_t n, std::size_t i) {
        BitVector v(n);
        v.set(i, true);
        return v;
    }

    static BitVector random(std::size_t n, Rng& rng) {
        BitVector v(n);
        for (auto& w : v.w_) w = rng.word();
        v.trim();
        return v;
    }

    static BitVector from_string(const std::string& s) {
        BitVector v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') v.set(i, true);
            else if (s[i] != '0') throw std::invalid_argument("BitVector::from_string: invalid character");
        }
        return v;
    }

    std::size_t size() const { return n_; }

    bool get(std::size_t i) const {
        check_index(i);
        return (w_[i >> 6] >> (i & 63)) & 1ull;
    }

    void set(std::size_t i, bool v) {
        check_index(i);
        std::uint64_t mask = 1ull << (i & 63);
        if (v) w_[i >> 6] |= mask;
        else w_[i >> 6] &= ~mask;
    }

    void flip(std::size_t i) {
        check_index(i);
        w_[i >> 6] ^= 1ull << (i & 63);
    }

    BitVector& operator^=(const BitVector& o) {
        if (o.n_ != n_) throw std::invalid_argument("BitVector::operator^=: length mismatch");
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] ^= o.w_[i];
        return *this;
    }

    friend BitVector operator^(BitVector a, const BitVector& b) {
        a ^= b;
        return a;
    }

    BitVector& operator&=(const BitVector& o) {
        if (o.n_ != n_) throw std::invalid_argument("BitVector::operator&=: length mismatch");
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] &= o.w_[i];
        return *this;
    }

    friend BitVector operator&(BitVector a, const BitVector& b) {
        a &= b;
        return a;
    }

    BitVector& operator|=(const BitVector& o) {
        if (o.n_ != n_) throw std::invalid_argument("BitVector::operator|=: length mismatch");
        for (std::size_t i = 0; i < w_.size(); ++i) w_[i] |= o.w_[i];
        return *this;
    }

    friend BitVector operator|(BitVector a, const BitVector& b) {
        a |= b;
        return a;
    }

    bool operator==(const BitVector&) const = default;

    // Parity of the AND of two vectors (the GF(2) inner product).
    bool dot(const BitVector& o) const {
        if (o.n_ != n_) throw std::invalid_argument("BitVector::dot: length mismatch");
        std::uint64_t acc = 0;
        for (std::size_t i = 0; i < w_.size(); ++i) acc ^= w_[i] & o.w_[i];
        return std::popcount(acc) & 1;
    }

    std::size_t weight() const {
        std::size_t c = 0;
        for (auto w : w_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool parity() const { return weight() & 1; }
    bool any() const {
        for (auto w : w_)
            if (w) return true;
        return false;
    }
    bool none() const { return !any(); }

    std::string to_string() const {
        std::string s(n_, '0');
        for (std::size_t i = 0; i < n_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    std::size_t word_count() const { return w_.size(); }
    std::uint64_t word(std::size_t i) const { return w_[i]; }

    // Index of the lowest set bit, or size() if none.
    std::size_t first_set() const {
        for (std::size_t i = 0; i < w_.size(); ++i)
            if (w_[i]) return (i << 6) + static_cast<std::size_t>(std::countr_zero(w_[i]));
        return n_;
    }

    friend std::ostream& operator<<(std::ostream& os, const BitVector& v) { return os << v.to_string(); }

private:
    static std::size_t words_for(std::size_t n) { return (n + 63) >> 6; }

    void check_index(std::size_t i) const {
        if (i >= n_) throw std::out_of_range("BitVector: index out of range");
    }

    // Clears trailing bits beyond n_ in the last word (class invariant).
    void trim() {
        if (n_ & 63) w_.back() &= (~0ull) >> (64 - (n_ & 63));
    }

    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, BitVector(cols)) {}

    static BitMatrix zeros(std::size_t r, std::size_t c) { return BitMatrix(r, c); }

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.rows_[i].set(i, true);
        return m;
    }

    static BitMatrix random(std::size_t r, std::size_t c, Rng& rng) {
        BitMatrix m(r, c);
        for (auto& row : m.rows_) row = BitVector::random(c, rng);
        return m;
    }

    static BitMatrix from_rows(std::vector<BitVector> rows) {
        BitMatrix m;
        m.rows_ = std::move(rows);
        m.cols_ = m.rows_.empty() ? 0 : m.rows_.front().size();
        for (const auto& r : m.rows_)
            if (r.size() != m.cols_) throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
        return m;
    }

    static BitMatrix from_cols(const std::vector<BitVector>& cols) {
        if (cols.empty()) return BitMatrix(0, 0);
        std::size_t r = cols.front().size();
        BitMatrix m(r, cols.size());
        for (std::size_t j = 0; j < cols.size(); ++j) {
            if (cols[j].size() != r) throw std::invalid_argument("BitMatrix::from_cols: ragged columns");
            for (std::size_t i = 0; i < r; ++i)
                if (cols[j].get(i)) m.rows_[i].set(j, true);
        }
        return m;
    }

    // Uniformly distributed invertible matrix. Plain rejection is cheap at
    // small n (acceptance > 0.288); larger sizes multiply random transvections
    // starting from the identity, which still reaches every invertible matrix.
    static BitMatrix random_invertible(std::size_t n, Rng& rng) {
        if (n == 0) return BitMatrix(0, 0);
        if (n <= 64) {
            for (;;) {
                BitMatrix m = random(n, n, rng);
                if (m.rank() == n) return m;
            }
        }
        BitMatrix m = identity(n);
        for (std::size_t k = 0; k < 4 * n * n; ++k) {
            std::size_t i = rng.index(n);
            std::size_t j = rng.index(n - 1);
            if (j >= i) ++j;
            m.rows_[j] ^= m.rows_[i];
        }
        return m;
    }

    std::size_t rows() const { return rows_.size(); }
    std::size_t cols() const { return cols_; }

    const BitVector& row(std::size_t i) const { return rows_.at(i); }
    BitVector& row(std::size_t i) { return rows_.at(i); }

    bool get(std::size_t i, std::size_t j) const { return rows_.at(i).get(j); }
    void set(std::size_t i, std::size_t j, bool v) { rows_.at(i).set(j, v); }

    BitVector col(std::size_t j) const {
        BitVector c(rows());
        for (std::size_t i = 0; i < rows(); ++i)
            if (rows_[i].get(j)) c.set(i, true);
        return c;
    }

    void set_col(std::size_t j, const BitVector& c) {
        if (c.size() != rows()) throw std::invalid_argument("BitMatrix::set_col: length mismatch");
        for (std::size_t i = 0; i < rows(); ++i) rows_[i].set(j, c.get(i));
    }

    void append_row(BitVector r) {
        if (rows_.empty() && cols_ == 0) cols_ = r.size();
        if (r.size() != cols_) throw std::invalid_argument("BitMatrix::append_row: length mismatch");
        rows_.push_back(std::move(r));
    }

    bool operator==(const BitMatrix&) const = default;

    bool is_zero() const {
        for (const auto& r : rows_)
            if (r.any()) return false;
        return true;
    }

    BitMatrix transposed() const {
        BitMatrix t(cols_, rows());
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                if (rows_[i].get(j)) t.rows_[j].set(i, true);
        return t;
    }

    // A·x for a column vector x of length cols().
    BitVector mul(const BitVector& x) const {
        if (x.size() != cols_) throw std::invalid_argument("BitMatrix::mul: dimension mismatch");
        BitVector y(rows());
        for (std::size_t i = 0; i < rows(); ++i)
            if (rows_[i].dot(x)) y.set(i, true);
        return y;
    }

    // y^T·A for a row vector y of length rows(); returns a length-cols() vector.
    BitVector mul_left(const BitVector& y) const {
        if (y.size() != rows()) throw std::invalid_argument("BitMatrix::mul_left: dimension mismatch");
        BitVector r(cols_);
        for (std::size_t i = 0; i < rows(); ++i)
            if (y.get(i)) r ^= rows_[i];
        return r;
    }

    BitMatrix mul(const BitMatrix& b) const {
        if (b.rows() != cols_) throw std::invalid_argument("BitMatrix::mul: dimension mismatch");
        BitMatrix c(rows(), b.cols());
        for (std::size_t i = 0; i < rows(); ++i) {
            BitVector& out = c.rows_[i];
            for (std::size_t j = 0; j < cols_; ++j)
                if (rows_[i].get(j)) out ^= b.rows_[j];
        }
        return c;
    }

    // M^T·M; symmetric cols()×cols() Gram matrix.
    BitMatrix gram() const {
        BitMatrix t = transposed();
        BitMatrix g(cols_, cols_);
        for (std::size_t j = 0; j < cols_; ++j)
            for (std::size_t k = j; k < cols_; ++k)
                if (t.rows_[j].dot(t.rows_[k])) {
                    g.rows_[j].set(k, true);
                    g.rows_[k].set(j, true);
                }
        return g;
    }

    std::size_t rank() const {
        std::vector<BitVector> work(rows_);
        return eliminate(work, cols_).size();
    }

    // Columns form a deterministic basis of the right kernel {v : Mv = 0}.
    BitMatrix kernel_basis() const {
        std::vector<BitVector> work(rows_);
        std::vector<std::size_t> pivots = eliminate(work, cols_);
        std::vector<bool> is_pivot(cols_, false);
        for (auto p : pivots) is_pivot[p] = true;

        std::vector<BitVector> basis;
        for (std::size_t f = 0; f < cols_; ++f) {
            if (is_pivot[f]) continue;
            BitVector v(cols_);
            v.set(f, true);
            for (std::size_t i = 0; i < pivots.size(); ++i)
                if (work[i].get(f)) v.set(pivots[i], true);
            basis.push_back(std::move(v));
        }
        return from_cols_sized(basis, cols_);
    }

    // The nonzero rows of the reduced row echelon form: a canonical basis of
    // the row space, one matrix row per basis vector.
    BitMatrix row_basis() const {
        std::vector<BitVector> work(rows_);
        std::size_t r = eliminate(work, cols_).size();
        work.resize(r, BitVector(cols_));
        BitMatrix m = from_rows(std::move(work));
        if (r == 0) m = BitMatrix(0, cols_);
        return m;
    }

    // A particular solution of Mv = b (free variables zero), if consistent.
    std::optional<BitVector> solve(const BitVector& b) const {
        if (b.size() != rows()) throw std::invalid_argument("BitMatrix::solve: length mismatch");
        // Eliminate the augmented system [M | b].
        std::vector<BitVector> work;
        work.reserve(rows());
        for (std::size_t i = 0; i < rows(); ++i) {
            BitVector r(cols_ + 1);
            for (std::size_t j = 0; j < cols_; ++j) r.set(j, rows_[i].get(j));
            r.set(cols_, b.get(i));
            work.push_back(std::move(r));
        }
        std::vector<std::size_t> pivots = eliminate(work, cols_);
        for (std::size_t i = pivots.size(); i < work.size(); ++i)
            if (work[i].get(cols_)) return std::nullopt;  // row 0 = 1: inconsistent
        BitVector v(cols_);
        for (std::size_t i = 0; i < pivots.size(); ++i)
            if (work[i].get(cols_)) v.set(pivots[i], true);
        return v;
    }

    std::optional<BitMatrix> inverse() const {
        if (rows() != cols_) return std::nullopt;
        std::size_t n = cols_;
        // Eliminate [M | I] to [I | M^-1].
        std::vector<BitVector> work;
        work.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            BitVector r(2 * n);
            for (std::size_t j = 0; j < n; ++j) r.set(j, rows_[i].get(j));
            r.set(n + i, true);
            work.push_back(std::move(r));
        }
        std::vector<std::size_t> pivots = eliminate(work, n);
        if (pivots.size() != n) return std::nullopt;
        BitMatrix inv(n, n);
        // Pivots are the full column set in order, so work row i holds e_i on the left.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                inv.rows_[i].set(j, work[i].get(n + j));
        return inv;
    }

    // Rows i with mask bit i set, in their original order.
    BitMatrix rows_where(const BitVector& mask) const {
        if (mask.size() != rows()) throw std::invalid_argument("BitMatrix::rows_where: length mismatch");
        BitMatrix m(0, cols_);
        m.cols_ = cols_;
        for (std::size_t i = 0; i < rows(); ++i)
            if (mask.get(i)) m.rows_.push_back(rows_[i]);
        return m;
    }

    BitMatrix submatrix_rows(const std::vector<std::size_t>& idx) const {
        BitMatrix m(0, cols_);
        m.cols_ = cols_;
        for (auto i : idx) m.rows_.push_back(rows_.at(i));
        return m;
    }

    // Columns [c0, c1) as a new matrix.
    BitMatrix col_slice(std::size_t c0, std::size_t c1) const {
        if (c0 > c1 || c1 > cols_) throw std::invalid_argument("BitMatrix::col_slice: bad range");
        BitMatrix m(rows(), c1 - c0);
        for (std::size_t i = 0; i < rows(); ++i)
            for (std::size_t j = c0; j < c1; ++j)
                if (rows_[i].get(j)) m.rows_[i].set(j - c0, true);
        return m;
    }

    static BitMatrix hstack(const BitMatrix& a, const BitMatrix& b) {
        if (a.rows() != b.rows()) throw std::invalid_argument("BitMatrix::hstack: row mismatch");
        BitMatrix m(a.rows(), a.cols() + b.cols());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = 0; j < a.cols(); ++j)
                if (a.rows_[i].get(j)) m.rows_[i].set(j, true);
            for (std::size_t j = 0; j < b.cols(); ++j)
                if (b.rows_[i].get(j)) m.rows_[i].set(a.cols() + j, true);
        }
        return m;
    }

    static BitMatrix vstack(const BitMatrix& a, const BitMatrix& b) {
        if (a.cols() != b.cols() && a.rows() != 0 && b.rows() != 0)
            throw std::invalid_argument("BitMatrix::vstack: column mismatch");
        BitMatrix m = a;
        if (m.rows_.empty()) m.cols_ = b.cols_;
        for (const auto& r : b.rows_) m.rows_.push_back(r);
        return m;
    }

    std::vector<BitVector> cols_as_vectors() const {
        std::vector<BitVector> cs;
        cs.reserve(cols_);
        for (std::size_t j = 0; j < cols_; ++j) cs.push_back(col(j));
        return cs;
    }

    friend std::ostream& operator<<(std::ostream& os, const BitMatrix& m) {
        for (std::size_t i = 0; i < m.rows(); ++i) os << m.rows_[i] << '\n';
        return os;
    }

private:
    static BitMatrix from_cols_sized(const std::vector<BitVector>& cols, std::size_t nrows) {
        if (cols.empty()) return BitMatrix(nrows, 0);
        return from_cols(cols);
    }

    // In-place row echelon over the first `ncols` columns with lowest-index
    // pivoting; returns the pivot columns in ascending order. Rows are fully
    // reduced (entries above pivots cleared too) and reordered so that row i
    // is the pivot row of pivots[i].
    static std::vector<std::size_t> eliminate(std::vector<BitVector>& work, std::size_t ncols) {
        std::vector<std::size_t> pivots;
        std::size_t next_row = 0;
        for (std::size_t c = 0; c < ncols && next_row < work.size(); ++c) {
            std::size_t pr = next_row;
            while (pr < work.size() && !work[pr].get(c)) ++pr;
            if (pr == work.size()) continue;
            std::swap(work[next_row], work[pr]);
            for (std::size_t i = 0; i < work.size(); ++i)
                if (i != next_row && work[i].get(c)) work[i] ^= work[next_row];
            pivots.push_back(c);
            ++next_row;
        }
        return pivots;
    }

    std::size_t cols_ = 0;
    std::vector<BitVector> rows_;
};

namespace detail {

// Incremental row-echelon accumulator for independence tests: try_add keeps
// the vector only if it enlarges the span.
class RowSpan {
public:
    bool try_add(BitVector v) {
        for (const auto& [p, r] : rows_)
            if (v.get(p)) v ^= r;
        if (v.none()) return false;
        rows_.emplace_back(v.first_set(), std::move(v));
        return true;
    }
    std::size_t size() const { return rows_.size(); }
    bool covers_pivot(std::size_t j) const {
        for (const auto& [p, r] : rows_)
            if (p == j) return true;
        return false;
    }

private:
    std::vector<std::pair<std::size_t, BitVector>> rows_;
};

}  // namespace detail

}  // namespace iqp
