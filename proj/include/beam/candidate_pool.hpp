#pragma once

#include <cstdint>
#include <vector>

#include "beam/constraints.hpp"
#include "beam/dataset.hpp"
#include "beam/space.hpp"

namespace beam {

struct PoolSettings {
    std::uint64_t cap = 100'000;
    /// Spaces up to this size are enumerated to test constraints exactly;
    /// larger ones are sampled.
    std::uint64_t enumeration_limit = 4'000'000;

    bool operator==(const PoolSettings&) const = default;
};

/// Unlabeled, constraint-satisfying candidates scored in one suggestion round.
struct CandidatePool {
    std::vector<GridIndex> indices;  // ascending, unique
    bool exhaustive = false;
    std::uint64_t seed = 0;
};

/// Exhaustive when the constrained grid fits in `settings.cap`; otherwise the
/// axis neighbors (one step either way) of every observed success plus a
/// seeded uniform sample, filled up to the cap.
CandidatePool build_pool(const ParameterSpace& space, const ConstraintSet& constraints, const Dataset& dataset,
                         const PoolSettings& settings, std::uint64_t seed);

/// Axis neighbors (+-1 step per axis) of a grid point.
std::vector<GridIndex> axis_neighbors(const ParameterSpace& space, GridIndex index);

}  // namespace beam
