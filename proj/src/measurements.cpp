#include "cphase/measurements.hpp"

#include "cphase/errors.hpp"

namespace cphase {

Measurements::Measurements(std::vector<double> y, std::vector<BlockRange> blocks)
    : y_(std::move(y)), blocks_(std::move(blocks))
{
    std::size_t next = 0;
    for (const auto& b : blocks_) {
        if (b.offset != next)
            throw DimensionError("measurements: block table is not a consecutive partition at " + b.name);
        next += b.rows;
    }
    if (next != y_.size())
        throw DimensionError("measurements: block table covers " + std::to_string(next) + " rows, have " +
                             std::to_string(y_.size()));
    for (double v : y_)
        if (!(v >= 0.0))
            throw DimensionError("measurements: entries must be nonnegative");
}

const BlockRange& Measurements::block(std::string_view name) const
{
    for (const auto& b : blocks_)
        if (b.name == name)
            return b;
    throw DimensionError("measurements: no block named " + std::string(name));
}

std::size_t Measurements::global_index(std::string_view name, std::size_t local) const
{
    const auto& b = block(name);
    if (local >= b.rows)
        throw DimensionError("measurements: row " + std::to_string(local) + " outside block " + b.name);
    return b.offset + local;
}

MeasurementSlice Measurements::slice(std::string_view name, AccessCounter* counter) const
{
    const auto& b = block(name);
    return MeasurementSlice(std::span<const double>(y_).subspan(b.offset, b.rows), counter);
}

} // namespace cphase
