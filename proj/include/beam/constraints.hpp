#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "beam/space.hpp"

namespace beam {

/// min <= value <= max on one axis (inclusive, with the axis snap tolerance).
struct IntervalBound {
    std::string axis;
    double min = -std::numeric_limits<double>::infinity();
    double max = std::numeric_limits<double>::infinity();

    bool operator==(const IntervalBound&) const = default;
};

/// Forbidden grid values on one axis.
struct Exclusion {
    std::string axis;
    std::vector<double> values;

    bool operator==(const Exclusion&) const = default;
};

/// min_ratio <= numerator / denominator <= max_ratio.
struct PairRatio {
    std::string numerator;
    std::string denominator;
    double min_ratio = -std::numeric_limits<double>::infinity();
    double max_ratio = std::numeric_limits<double>::infinity();

    bool operator==(const PairRatio&) const = default;
};

using Constraint = std::variant<IntervalBound, Exclusion, PairRatio>;

/// Conjunction of hard constraints, resolved against one space at construction
/// so that unknown axes and off-grid exclusions fail at load time.
class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(const ParameterSpace& space, std::vector<Constraint> constraints);

    bool satisfies(const Configuration& config) const;
    bool satisfies(const ParameterSpace& space, GridIndex index) const;

    bool empty() const noexcept { return constraints_.empty(); }
    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }

private:
    struct Bound {
        enum class Kind { interval, exclusion, ratio } kind;
        std::size_t axis = 0;
        std::size_t other = 0;
        double lo = 0;
        double hi = 0;
        std::vector<double> forbidden;
    };

    std::vector<Constraint> constraints_;
    std::vector<Bound> bounds_;
};

}  // namespace beam
