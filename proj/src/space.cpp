#include "beam/space.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "beam/error.hpp"

namespace beam {

namespace {

// Smallest number of decimal digits that reproduces x exactly, or -1.
int decimal_digits(double x)
{
    double scale = 1.0;
    for (int d = 0; d <= 12; ++d) {
        const double scaled = x * scale;
        if (std::abs(scaled) >= 0x1.0p52) {
            return -1;
        }
        if (std::round(scaled) / scale == x) {
            return d;
        }
        scale *= 10.0;
    }
    return -1;
}

std::string describe(double v)
{
    std::ostringstream os;
    os.precision(15);
    os << v;
    return os.str();
}

}  // namespace

AxisSpec::AxisSpec(std::string name, double low, double high, double step)
    : name_(std::move(name)), low_(low), high_(high), step_(step)
{
    if (name_.empty()) {
        throw Error(ErrorKind::invalid_argument, "axis name must not be empty");
    }
    if (!std::isfinite(low) || !std::isfinite(high) || !std::isfinite(step)) {
        throw Error(ErrorKind::invalid_argument, "axis '" + name_ + "': bounds and step must be finite");
    }
    if (step <= 0.0) {
        throw Error(ErrorKind::invalid_argument, "axis '" + name_ + "': step must be positive");
    }
    if (high < low) {
        throw Error(ErrorKind::invalid_argument, "axis '" + name_ + "': high must be >= low");
    }
    const double span = std::floor((high - low) / step + 1e-9);
    if (span >= 0x1.0p62) {
        throw Error(ErrorKind::overflow, "axis '" + name_ + "': too many grid points");
    }
    cardinality_ = static_cast<std::uint64_t>(span) + 1;

    const int dl = decimal_digits(low);
    const int ds = decimal_digits(step);
    decimals_ = (dl < 0 || ds < 0) ? -1 : std::max(dl, ds);
    if (decimals_ >= 0) {
        const double top = std::abs(low) + static_cast<double>(cardinality_) * step;
        if (top * std::pow(10.0, decimals_) >= 0x1.0p52) {
            decimals_ = -1;
        }
    }
}

double AxisSpec::value(std::uint64_t i) const
{
    const double raw = low_ + static_cast<double>(i) * step_;
    if (decimals_ < 0) {
        return raw;
    }
    const double scale = std::pow(10.0, decimals_);
    return std::round(raw * scale) / scale;
}

std::uint64_t AxisSpec::position(double v) const
{
    const double tolerance = 1e-6 * step_;
    if (!std::isfinite(v) || v < low_ - tolerance || v > high_ + tolerance) {
        throw Error(ErrorKind::out_of_range,
                    "axis '" + name_ + "': value " + describe(v) + " outside [" + describe(low_) + ", " +
                        describe(high_) + "]");
    }
    const double nearest = std::round((v - low_) / step_);
    if (nearest < 0.0 || nearest >= static_cast<double>(cardinality_)) {
        throw Error(ErrorKind::out_of_range,
                    "axis '" + name_ + "': value " + describe(v) + " beyond the last grid point");
    }
    const auto i = static_cast<std::uint64_t>(nearest);
    if (std::abs(v - value(i)) > tolerance) {
        throw Error(ErrorKind::off_grid,
                    "axis '" + name_ + "': value " + describe(v) + " is not on the grid (step " + describe(step_) +
                        ", nearest " + describe(value(i)) + ")");
    }
    return i;
}

double AxisSpec::unit(std::uint64_t i) const noexcept
{
    if (cardinality_ <= 1) {
        return 0.0;
    }
    return static_cast<double>(i) / static_cast<double>(cardinality_ - 1);
}

std::uint64_t cardinality(std::span<const AxisSpec> axes)
{
    std::uint64_t total = 1;
    for (const auto& axis : axes) {
        if (__builtin_mul_overflow(total, axis.cardinality(), &total)) {
            throw Error(ErrorKind::overflow, "parameter space cardinality exceeds 64-bit range");
        }
    }
    return total;
}

ParameterSpace::ParameterSpace(std::vector<AxisSpec> axes, std::vector<ContextEntry> fixed_context)
    : axes_(std::move(axes)), context_(std::move(fixed_context))
{
    if (axes_.empty()) {
        throw Error(ErrorKind::invalid_argument, "parameter space needs at least one axis");
    }
    std::unordered_set<std::string> names;
    for (const auto& axis : axes_) {
        if (!names.insert(axis.name()).second) {
            throw Error(ErrorKind::invalid_argument, "duplicate axis name '" + axis.name() + "'");
        }
    }
    for (const auto& entry : context_) {
        if (names.count(entry.name) != 0) {
            throw Error(ErrorKind::invalid_argument,
                        "fixed context '" + entry.name + "' collides with an axis name");
        }
    }
    cardinality_ = beam::cardinality(axes_);
    strides_.assign(axes_.size(), 1);
    for (std::size_t a = axes_.size() - 1; a > 0; --a) {
        strides_[a - 1] = strides_[a] * axes_[a].cardinality();
    }

    constexpr double exact_limit = 9007199254740992.0;  // 2^53
    std::uint64_t lcm = 1;
    bool exact = true;
    for (const auto& axis : axes_) {
        const std::uint64_t span = std::max<std::uint64_t>(axis.cardinality() - 1, 1);
        const std::uint64_t g = std::gcd(lcm, span);
        if (lcm / g > std::numeric_limits<std::uint32_t>::max() / span) {
            exact = false;
            break;
        }
        lcm = lcm / g * span;
    }
    const double l = static_cast<double>(lcm);
    exact = exact && l * l * static_cast<double>(axes_.size()) < exact_limit;
    metric_scale_.resize(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const std::uint64_t span = axes_[a].cardinality() - 1;
        if (span == 0) {
            metric_scale_[a] = 0.0;
        } else {
            metric_scale_[a] = exact ? static_cast<double>(lcm / span) : 1.0 / static_cast<double>(span);
        }
    }
    metric_to_unit2_ = exact ? 1.0 / (l * l) : 1.0;
}

std::size_t ParameterSpace::axis_position(const std::string& name) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        if (axes_[a].name() == name) {
            return a;
        }
    }
    throw Error(ErrorKind::invalid_argument, "unknown axis '" + name + "'");
}

Configuration ParameterSpace::encode(std::span<const double> values) const
{
    if (values.size() != axes_.size()) {
        throw Error(ErrorKind::invalid_argument, "expected " + std::to_string(axes_.size()) + " values, got " +
                                                     std::to_string(values.size()));
    }
    Configuration config;
    config.values.resize(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const std::uint64_t i = axes_[a].position(values[a]);
        config.index += i * strides_[a];
        config.values[a] = axes_[a].value(i);
    }
    return config;
}

Configuration ParameterSpace::decode(GridIndex index) const
{
    if (index >= cardinality_) {
        throw Error(ErrorKind::out_of_range,
                    "index " + std::to_string(index) + " outside [0, " + std::to_string(cardinality_) + ")");
    }
    Configuration config{index, std::vector<double>(axes_.size())};
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        config.values[a] = axes_[a].value(index / strides_[a]);
        index %= strides_[a];
    }
    return config;
}

std::vector<std::uint64_t> ParameterSpace::positions(GridIndex index) const
{
    std::vector<std::uint64_t> out(axes_.size());
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        out[a] = index / strides_[a];
        index %= strides_[a];
    }
    return out;
}

GridIndex ParameterSpace::index_of(std::span<const std::uint64_t> positions) const
{
    GridIndex index = 0;
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        index += positions[a] * strides_[a];
    }
    return index;
}

std::vector<double> ParameterSpace::normalize(const Configuration& config) const
{
    std::vector<double> out(axes_.size());
    normalize_index(config.index, out);
    return out;
}

void ParameterSpace::normalize_index(GridIndex index, std::span<double> out) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        out[a] = axes_[a].unit(index / strides_[a]);
        index %= strides_[a];
    }
}

void ParameterSpace::metric_index(GridIndex index, std::span<double> out) const
{
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        out[a] = static_cast<double>(index / strides_[a]) * metric_scale_[a];
        index %= strides_[a];
    }
}

bool ParameterSpace::operator==(const ParameterSpace& other) const
{
    if (axes_.size() != other.axes_.size() || context_ != other.context_) {
        return false;
    }
    for (std::size_t a = 0; a < axes_.size(); ++a) {
        const auto& x = axes_[a];
        const auto& y = other.axes_[a];
        if (x.name() != y.name() || x.low() != y.low() || x.high() != y.high() || x.step() != y.step()) {
            return false;
        }
    }
    return true;
}

ParameterSpace ded_process_space(double laser_power_w)
{
    return ParameterSpace(
        {
            AxisSpec("feed_rate_rpm", 0.01, 1.0, 0.01),
            AxisSpec("gas_flow_lpm", 3.0, 10.0, 0.5),
            AxisSpec("inconel_thickness", 0.0, 10.0, 0.2),
            AxisSpec("scan_speed_mm_min", 200.0, 1600.0, 50.0),
            AxisSpec("layer_height_mm", 0.05, 0.5, 0.01),
        },
        {{"laser_power_w", laser_power_w}, {"hatch_spacing_max_mm", 1.0}, {"interpass_wait_s", 0.0}});
}

}  // namespace beam
