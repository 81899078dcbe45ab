#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace linksim::gf2 {

// Dense bit matrix, one row = packed 64-bit words.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(static_cast<size_t>(rows) * words_, 0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    bool get(int r, int c) const { return (row(r)[c >> 6] >> (c & 63)) & 1u; }
    void set(int r, int c, bool v) {
        uint64_t mask = uint64_t(1) << (c & 63);
        if (v)
            row(r)[c >> 6] |= mask;
        else
            row(r)[c >> 6] &= ~mask;
    }
    void flip(int r, int c) { row(r)[c >> 6] ^= uint64_t(1) << (c & 63); }

    void xor_rows(int dst, int src) {
        uint64_t* d = row(dst);
        const uint64_t* s = row(src);
        for (int w = 0; w < words_; ++w) d[w] ^= s[w];
    }
    void swap_rows(int a, int b) {
        if (a == b) return;
        uint64_t* ra = row(a);
        uint64_t* rb = row(b);
        for (int w = 0; w < words_; ++w) std::swap(ra[w], rb[w]);
    }

    uint64_t* row(int r) { return data_.data() + static_cast<size_t>(r) * words_; }
    const uint64_t* row(int r) const { return data_.data() + static_cast<size_t>(r) * words_; }

  private:
    int rows_ = 0;
    int cols_ = 0;
    int words_ = 0;
    std::vector<uint64_t> data_;
};

// Row-reduction based solver for square systems. Factorization is done once;
// solve() then costs O(n^2/64) per right-hand side.
class Solver {
  public:
    Solver() = default;

    // Returns false if the matrix is singular.
    bool factorize(const BitMatrix& a) {
        n_ = a.rows();
        if (a.cols() != n_) throw std::invalid_argument("gf2::Solver: matrix must be square");
        u_ = a;
        perm_.resize(n_);
        ops_.clear();
        for (int i = 0; i < n_; ++i) perm_[i] = i;
        for (int col = 0; col < n_; ++col) {
            int pivot = -1;
            for (int r = col; r < n_; ++r) {
                if (u_.get(r, col)) {
                    pivot = r;
                    break;
                }
            }
            if (pivot < 0) return false;
            if (pivot != col) {
                u_.swap_rows(col, pivot);
                std::swap(perm_[col], perm_[pivot]);
                ops_.push_back({OpKind::Swap, col, pivot});
            }
            for (int r = col + 1; r < n_; ++r) {
                if (u_.get(r, col)) {
                    u_.xor_rows(r, col);
                    ops_.push_back({OpKind::Xor, r, col});
                }
            }
        }
        factorized_ = true;
        return true;
    }

    bool factorized() const { return factorized_; }

    // Solves A x = b.
    std::vector<uint8_t> solve(const std::vector<uint8_t>& b) const {
        if (!factorized_) throw std::logic_error("gf2::Solver: not factorized");
        std::vector<uint8_t> y(b);
        for (const Op& op : ops_) {
            if (op.kind == OpKind::Swap)
                std::swap(y[op.a], y[op.b]);
            else
                y[op.a] = static_cast<uint8_t>(y[op.a] ^ y[op.b]);
        }
        std::vector<uint8_t> x(n_, 0);
        for (int r = n_ - 1; r >= 0; --r) {
            uint8_t acc = y[r];
            for (int c = r + 1; c < n_; ++c)
                if (u_.get(r, c)) acc ^= x[c];
            x[r] = acc;
        }
        return x;
    }

  private:
    enum class OpKind { Swap, Xor };
    struct Op {
        OpKind kind;
        int a;
        int b;
    };

    int n_ = 0;
    bool factorized_ = false;
    BitMatrix u_;
    std::vector<int> perm_;
    std::vector<Op> ops_;
};

inline int rank(BitMatrix m) {
    int r = 0;
    const int rows = m.rows(), cols = m.cols();
    for (int col = 0; col < cols && r < rows; ++col) {
        int pivot = -1;
        for (int i = r; i < rows; ++i) {
            if (m.get(i, col)) {
                pivot = i;
                break;
            }
        }
        if (pivot < 0) continue;
        m.swap_rows(r, pivot);
        for (int i = r + 1; i < rows; ++i)
            if (m.get(i, col)) m.xor_rows(i, r);
        ++r;
    }
    return r;
}

}  // namespace linksim::gf2
