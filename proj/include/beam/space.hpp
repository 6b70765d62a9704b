#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace beam {

using GridIndex = std::uint64_t;

/// One searchable factor: the grid low, low + step, ..., up to high.
class AxisSpec {
public:
    AxisSpec(std::string name, double low, double high, double step);

    const std::string& name() const noexcept { return name_; }
    double low() const noexcept { return low_; }
    double high() const noexcept { return high_; }
    double step() const noexcept { return step_; }
    std::uint64_t cardinality() const noexcept { return cardinality_; }

    /// Grid value at position i. Decimal grids (0.01, 0.2, 50, ...) yield the
    /// double nearest the decimal, so "0.17" parsed from text compares equal.
    double value(std::uint64_t i) const;

    /// Position of the grid point within 1e-6 * step of v; throws off_grid or
    /// out_of_range naming the axis.
    std::uint64_t position(double v) const;

    /// i / (cardinality - 1); 0 on a single-point axis.
    double unit(std::uint64_t i) const noexcept;

private:
    std::string name_;
    double low_;
    double high_;
    double step_;
    std::uint64_t cardinality_;
    int decimals_;  // -1 when the grid is not decimal
};

struct ContextEntry {
    std::string name;
    double value;

    bool operator==(const ContextEntry&) const = default;
};

/// A grid point. `values` are exact grid values; `index` is the mixed-radix
/// encoding with the first axis most significant.
struct Configuration {
    GridIndex index = 0;
    std::vector<double> values;

    bool operator==(const Configuration&) const = default;
};

/// Immutable d-axis grid. Axis order is authoritative for index arithmetic.
class ParameterSpace {
public:
    explicit ParameterSpace(std::vector<AxisSpec> axes, std::vector<ContextEntry> fixed_context = {});

    std::size_t dimensions() const noexcept { return axes_.size(); }
    const std::vector<AxisSpec>& axes() const noexcept { return axes_; }
    const AxisSpec& axis(std::size_t a) const { return axes_.at(a); }
    const std::vector<ContextEntry>& fixed_context() const noexcept { return context_; }

    /// Product of per-axis cardinalities (validated against overflow at construction).
    std::uint64_t cardinality() const noexcept { return cardinality_; }

    /// Position of the axis with this name; throws invalid_argument if absent.
    std::size_t axis_position(const std::string& name) const;

    Configuration encode(std::span<const double> values) const;
    Configuration decode(GridIndex index) const;

    /// Per-axis grid positions of an index.
    std::vector<std::uint64_t> positions(GridIndex index) const;
    GridIndex index_of(std::span<const std::uint64_t> positions) const;

    std::vector<double> normalize(const Configuration& config) const;
    void normalize_index(GridIndex index, std::span<double> out) const;

    /// Coordinates used for neighbor distances. Each axis is scaled by
    /// L / (n - 1) with L the least common multiple of the (n - 1), so
    /// positions are integers and squared distances are exact. Multiply a
    /// squared metric distance by metric_to_unit2() for normalized units.
    /// Spaces whose L is too large for exact doubles fall back to unit
    /// coordinates.
    void metric_index(GridIndex index, std::span<double> out) const;
    double metric_to_unit2() const noexcept { return metric_to_unit2_; }
    double metric_scale(std::size_t a) const { return metric_scale_.at(a); }

    std::uint64_t stride(std::size_t a) const { return strides_.at(a); }

    bool operator==(const ParameterSpace& other) const;

private:
    std::vector<AxisSpec> axes_;
    std::vector<ContextEntry> context_;
    std::vector<std::uint64_t> strides_;
    std::uint64_t cardinality_ = 1;
    std::vector<double> metric_scale_;
    double metric_to_unit2_ = 1.0;
};

/// Product of axis cardinalities; throws overflow when it does not fit in 64 bits.
std::uint64_t cardinality(std::span<const AxisSpec> axes);

/// The five-axis DED process grid (feed rate, gas flow, Inconel thickness,
/// scan speed, layer height) with laser power as fixed context.
ParameterSpace ded_process_space(double laser_power_w);

/// Every index in [0, cardinality) satisfying `keep`, ascending.
template <typename Pred>
std::vector<GridIndex> enumerate_indices(const ParameterSpace& space, Pred&& keep)
{
    std::vector<GridIndex> out;
    for (GridIndex i = 0; i < space.cardinality(); ++i) {
        if (keep(i)) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace beam
