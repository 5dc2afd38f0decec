#include "cphase/sparse_sign_matrix.hpp"

#include "cphase/errors.hpp"

#include <string>

namespace cphase {

SparseSignMatrix::SparseSignMatrix(std::size_t n_rows, std::size_t n_cols)
    : n_rows_(n_rows), n_cols_(n_cols)
{
    if (n_rows > SignedIndex::kMaxIndex)
        throw ConstructionError("sparse sign matrix: too many rows");
    col_ptr_.reserve(n_cols + 1);
}

std::span<const SignedIndex> SparseSignMatrix::column(std::size_t col) const
{
    if (col + 1 >= col_ptr_.size())
        throw DimensionError("sparse sign matrix: column " + std::to_string(col) + " out of range");
    return {entries_.data() + col_ptr_[col], col_ptr_[col + 1] - col_ptr_[col]};
}

void SparseSignMatrix::push_column(std::span<const SignedIndex> entries)
{
    if (col_ptr_.size() > n_cols_)
        throw ConstructionError("sparse sign matrix: too many columns pushed");
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].index() >= n_rows_)
            throw ConstructionError("sparse sign matrix: row index out of range");
        if (i > 0 && entries[i - 1].index() >= entries[i].index())
            throw ConstructionError("sparse sign matrix: rows within a column must be strictly increasing");
    }
    entries_.insert(entries_.end(), entries.begin(), entries.end());
    col_ptr_.push_back(entries_.size());
}

std::vector<std::vector<RowEntry>> SparseSignMatrix::rows() const
{
    std::vector<std::vector<RowEntry>> out(n_rows_);
    for (std::size_t c = 0; c + 1 < col_ptr_.size(); ++c)
        for (SignedIndex e : column(c))
            out[e.index()].push_back({static_cast<std::uint32_t>(c), e.sign()});
    return out;
}

SparseSignMatrix SparseSignMatrix::from_rows(std::size_t n_cols, const std::vector<std::vector<RowEntry>>& rows)
{
    std::vector<std::vector<SignedIndex>> cols(n_cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (const RowEntry& e : rows[r]) {
            if (e.col >= n_cols)
                throw ConstructionError("sparse sign matrix: column index out of range in row " + std::to_string(r));
            if (e.sign != 1 && e.sign != -1)
                throw ConstructionError("sparse sign matrix: sign must be +1 or -1");
            cols[e.col].emplace_back(static_cast<std::uint32_t>(r), e.sign);
        }
    }
    SparseSignMatrix m(rows.size(), n_cols);
    for (const auto& c : cols)
        m.push_column(c);
    m.validate();
    return m;
}

void SparseSignMatrix::validate() const
{
    if (col_ptr_.size() != n_cols_ + 1)
        throw ConstructionError("sparse sign matrix: incomplete column set");
    for (std::size_t c = 0; c < n_cols_; ++c) {
        auto col = column(c);
        for (std::size_t j = 0; j < col.size(); ++j) {
            if (col[j].index() >= n_rows_)
                throw ConstructionError("sparse sign matrix: row index out of range");
            // Strictly increasing rows <=> each column index appears at most once per row.
            if (j > 0 && col[j].index() <= col[j - 1].index())
                throw ConstructionError("sparse sign matrix: duplicate or unsorted entry in column " +
                                        std::to_string(c));
        }
    }
}

} // namespace cphase
