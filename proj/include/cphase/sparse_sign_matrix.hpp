#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cphase {

/// Row index with a ±1 sign packed into the top bit.
class SignedIndex {
public:
    constexpr SignedIndex() = default;
    constexpr SignedIndex(std::uint32_t index, int sign) noexcept
        : bits_(index | (sign < 0 ? kSignBit : 0u))
    {
    }

    constexpr std::uint32_t index() const noexcept { return bits_ & ~kSignBit; }
    constexpr int sign() const noexcept { return (bits_ & kSignBit) ? -1 : 1; }

    friend constexpr bool operator==(SignedIndex, SignedIndex) = default;

    static constexpr std::uint32_t kMaxIndex = 0x7fffffffu;

private:
    static constexpr std::uint32_t kSignBit = 0x80000000u;
    std::uint32_t bits_ = 0;
};

struct RowEntry {
    std::uint32_t col;
    int sign;
    friend bool operator==(const RowEntry&, const RowEntry&) = default;
};

/// Sparse ±1 matrix stored column-major: each column lists the rows it
/// touches. Decoding only ever asks "which rows contain coordinate i", so the
/// column view is the primary one; row lists are produced on demand.
class SparseSignMatrix {
public:
    SparseSignMatrix() = default;
    SparseSignMatrix(std::size_t n_rows, std::size_t n_cols);

    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t n_cols() const noexcept { return n_cols_; }
    std::size_t nnz() const noexcept { return entries_.size(); }

    std::span<const SignedIndex> column(std::size_t col) const;

    template <class F>
    void for_each_in_column(std::size_t col, F&& f) const
    {
        for (SignedIndex e : column(col))
            f(e.index(), e.sign());
    }

    /// Appends the next column; columns must be pushed in order 0..n_cols-1.
    /// Row indices must be strictly increasing within the column.
    void push_column(std::span<const SignedIndex> entries);

    /// Row-major view: per row, (column, sign) pairs in increasing column order.
    std::vector<std::vector<RowEntry>> rows() const;

    static SparseSignMatrix from_rows(std::size_t n_cols, const std::vector<std::vector<RowEntry>>& rows);

    /// Checks the structural invariants; throws ConstructionError on violation.
    void validate() const;

    friend bool operator==(const SparseSignMatrix&, const SparseSignMatrix&) = default;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<std::size_t> col_ptr_{0};
    std::vector<SignedIndex> entries_;
};

} // namespace cphase
