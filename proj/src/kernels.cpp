#include "beam/kernels.hpp"

#include <algorithm>
#include <functional>
#include <limits>

namespace beam::kernels {

namespace {

// Sum of the `count` largest values of the pool after the candidates in
// scratch.affected take their shifted values and `x` leaves the pool.
double top_sum(const PoolPosterior& post, std::uint32_t x, double y, std::size_t count,
               ExplorationScratch& scratch)
{
    double sum = 0.0;
    std::size_t taken = 0;
    if (post.everyone_affected()) {
        for (std::uint32_t c : post.shifted_ranking(static_cast<int>(y))) {
            if (taken == count) {
                break;
            }
            if (c != x) {
                sum += post.shifted(c, y);
                ++taken;
            }
        }
        return sum;
    }

    auto& values = scratch.values;
    values.clear();
    scratch.mark_begin();
    scratch.mark(x);
    for (std::uint32_t c : scratch.affected) {
        values.push_back(post.shifted(c, y));
        scratch.mark(c);
    }
    std::sort(values.begin(), values.end(), std::greater<>());

    const auto ranking = post.ranking();
    constexpr double none = -std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    std::size_t j = 0;
    while (taken < count) {
        while (i < ranking.size() && scratch.marked(ranking[i])) {
            ++i;
        }
        const double kept = i < ranking.size() ? post.probability(ranking[i]) : none;
        const double moved = j < values.size() ? values[j] : none;
        if (kept == none && moved == none) {
            break;
        }
        if (kept >= moved) {
            sum += kept;
            ++i;
        } else {
            sum += moved;
            ++j;
        }
        ++taken;
    }
    return sum;
}

}  // namespace

double exploration(const PoolPosterior& posterior, std::size_t pos, int remaining_budget,
                   ExplorationScratch& scratch)
{
    if (remaining_budget <= 0 || !posterior.active(pos)) {
        return 0.0;
    }
    const std::size_t others = posterior.active_count() - 1;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(remaining_budget), others);
    if (count == 0) {
        return 0.0;
    }
    const auto x = static_cast<std::uint32_t>(pos);
    if (!posterior.everyone_affected()) {
        posterior.affected(posterior.index(pos), scratch.affected);
    }
    const double p = posterior.probability(pos);
    const double success = top_sum(posterior, x, 1.0, count, scratch);
    const double failure = top_sum(posterior, x, 0.0, count, scratch);
    return p * success + (1.0 - p) * failure;
}

std::vector<double> exploration(const PoolPosterior& posterior, int remaining_budget, Execution execution)
{
    const std::size_t n = posterior.size();
    std::vector<double> beta(n, 0.0);
    if (remaining_budget <= 0) {
        return beta;
    }
    const bool parallel = execution == Execution::parallel;
#pragma omp parallel if (parallel)
    {
        ExplorationScratch scratch(n);
#pragma omp for schedule(dynamic, 64)
        for (std::ptrdiff_t s = 0; s < static_cast<std::ptrdiff_t>(n); ++s) {
            const auto i = static_cast<std::size_t>(s);
            if (posterior.active(i)) {
                beta[i] = exploration(posterior, i, remaining_budget, scratch);
            }
        }
    }
    return beta;
}

}  // namespace beam::kernels
