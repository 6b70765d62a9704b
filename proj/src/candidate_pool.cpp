#include "beam/candidate_pool.hpp"

#include <algorithm>
#include <unordered_set>

#include "beam/error.hpp"
#include "beam/rng.hpp"

namespace beam {

std::vector<GridIndex> axis_neighbors(const ParameterSpace& space, GridIndex index)
{
    std::vector<GridIndex> out;
    const auto pos = space.positions(index);
    for (std::size_t a = 0; a < space.dimensions(); ++a) {
        if (pos[a] > 0) {
            out.push_back(index - space.stride(a));
        }
        if (pos[a] + 1 < space.axis(a).cardinality()) {
            out.push_back(index + space.stride(a));
        }
    }
    return out;
}

CandidatePool build_pool(const ParameterSpace& space, const ConstraintSet& constraints, const Dataset& dataset,
                         const PoolSettings& settings, std::uint64_t seed)
{
    if (settings.cap < 1) {
        throw Error(ErrorKind::invalid_argument, "pool cap must be >= 1");
    }
    CandidatePool pool;
    pool.seed = seed;
    const auto eligible = [&](GridIndex i) { return !dataset.contains(i) && constraints.satisfies(space, i); };

    std::vector<GridIndex> all;
    const bool enumerable = space.cardinality() <= settings.enumeration_limit;
    if (enumerable) {
        all = enumerate_indices(space, eligible);
        if (all.empty()) {
            throw Error(ErrorKind::over_constrained, "search space exhausted or over-constrained: no candidate "
                                                     "satisfies the constraints outside the observed set");
        }
        if (all.size() <= settings.cap) {
            pool.indices = std::move(all);
            pool.exhaustive = true;
            return pool;
        }
    }

    std::unordered_set<GridIndex> chosen;
    std::vector<GridIndex> picked;
    for (const auto& o : dataset.observations()) {
        if (o.outcome != Outcome::success) {
            continue;
        }
        for (GridIndex j : axis_neighbors(space, o.config.index)) {
            if (picked.size() < settings.cap && eligible(j) && chosen.insert(j).second) {
                picked.push_back(j);
            }
        }
    }

    Rng rng(seed);
    if (enumerable) {
        // Partial Fisher-Yates over the eligible list.
        std::uint64_t remaining = all.size();
        while (picked.size() < settings.cap && remaining > 0) {
            const std::uint64_t r = rng.below(remaining);
            std::swap(all[r], all[remaining - 1]);
            const GridIndex j = all[--remaining];
            if (chosen.insert(j).second) {
                picked.push_back(j);
            }
        }
    } else {
        const std::uint64_t attempts = 50 * settings.cap + 1000;
        for (std::uint64_t a = 0; a < attempts && picked.size() < settings.cap; ++a) {
            const GridIndex j = rng.below(space.cardinality());
            if (chosen.count(j) == 0 && eligible(j)) {
                chosen.insert(j);
                picked.push_back(j);
            }
        }
        if (picked.empty()) {
            throw Error(ErrorKind::over_constrained,
                        "search space exhausted or over-constrained: sampling found no admissible candidate");
        }
    }
    std::sort(picked.begin(), picked.end());
    pool.indices = std::move(picked);
    return pool;
}

}  // namespace beam
