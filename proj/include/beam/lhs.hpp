#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "beam/constraints.hpp"
#include "beam/space.hpp"

namespace beam {

struct LhsDesign {
    std::vector<Configuration> points;
    /// Pre-snap unit-cube coordinates of each kept point.
    std::vector<std::vector<double>> unit_samples;
    std::vector<std::string> warnings;
};

/// Latin hypercube design: each axis is cut into n strata with one sample per
/// stratum, snapped to the nearest grid point. Constraint violators and
/// duplicates are redrawn inside their strata up to `retry_cap` times, then
/// dropped with a warning.
LhsDesign init_lhs(const ParameterSpace& space, const ConstraintSet& constraints, int n, std::uint64_t seed,
                   int retry_cap = 100);

}  // namespace beam
