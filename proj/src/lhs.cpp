#include "beam/lhs.hpp"

#include <cmath>
#include <numeric>
#include <unordered_set>

#include "beam/error.hpp"
#include "beam/rng.hpp"

namespace beam {

LhsDesign init_lhs(const ParameterSpace& space, const ConstraintSet& constraints, int n, std::uint64_t seed,
                   int retry_cap)
{
    if (n < 1) {
        throw Error(ErrorKind::invalid_argument, "Latin hypercube size must be >= 1");
    }
    const std::size_t d = space.dimensions();
    Rng rng(seed);
    std::vector<std::vector<int>> strata(d, std::vector<int>(static_cast<std::size_t>(n)));
    for (auto& perm : strata) {
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t i = perm.size(); i > 1; --i) {
            std::swap(perm[i - 1], perm[rng.below(i)]);
        }
    }

    LhsDesign design;
    std::unordered_set<GridIndex> seen;
    std::vector<double> unit(d);
    std::vector<std::uint64_t> pos(d);
    for (int i = 0; i < n; ++i) {
        bool kept = false;
        for (int attempt = 0; attempt <= retry_cap && !kept; ++attempt) {
            for (std::size_t a = 0; a < d; ++a) {
                unit[a] = (strata[a][static_cast<std::size_t>(i)] + rng.uniform()) / n;
                const auto card = space.axis(a).cardinality();
                pos[a] = static_cast<std::uint64_t>(std::llround(unit[a] * static_cast<double>(card - 1)));
            }
            const GridIndex index = space.index_of(pos);
            if (seen.count(index) == 0 && constraints.satisfies(space, index)) {
                seen.insert(index);
                design.points.push_back(space.decode(index));
                design.unit_samples.push_back(unit);
                kept = true;
            }
        }
        if (!kept) {
            design.warnings.push_back("Latin hypercube sample " + std::to_string(i) + " dropped after " +
                                      std::to_string(retry_cap) + " redraws");
        }
    }
    if (design.points.empty()) {
        throw Error(ErrorKind::over_constrained, "Latin hypercube found no point satisfying the constraints");
    }
    return design;
}

}  // namespace beam
