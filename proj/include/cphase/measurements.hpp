#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cphase {

/// Counts measurement reads and matrix-entry visits made by a decoder.
struct AccessCounter {
    std::size_t reads = 0;
    std::size_t entries = 0;
};

/// Read-only view of a contiguous run of measurements. Every element access
/// goes through operator[] so a decoder's footprint can be audited.
class MeasurementSlice {
public:
    MeasurementSlice() = default;
    MeasurementSlice(std::span<const double> values, AccessCounter* counter = nullptr)
        : values_(values), counter_(counter)
    {
    }

    double operator[](std::size_t i) const
    {
        if (counter_)
            ++counter_->reads;
        return values_[i];
    }
    std::size_t size() const noexcept { return values_.size(); }
    AccessCounter* counter() const noexcept { return counter_; }

private:
    std::span<const double> values_;
    AccessCounter* counter_ = nullptr;
};

struct BlockRange {
    std::string name;
    std::size_t offset = 0;
    std::size_t rows = 0;
    friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

/// y = |Φx|, partitioned into the ensemble's named blocks.
class Measurements {
public:
    Measurements() = default;
    Measurements(std::vector<double> y, std::vector<BlockRange> blocks);

    std::span<const double> values() const noexcept { return y_; }
    std::size_t size() const noexcept { return y_.size(); }
    const std::vector<BlockRange>& blocks() const noexcept { return blocks_; }

    const BlockRange& block(std::string_view name) const;
    std::size_t global_index(std::string_view name, std::size_t local) const;
    MeasurementSlice slice(std::string_view name, AccessCounter* counter = nullptr) const;

    friend bool operator==(const Measurements&, const Measurements&) = default;

private:
    std::vector<double> y_;
    std::vector<BlockRange> blocks_;
};

} // namespace cphase
