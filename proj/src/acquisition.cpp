#include "beam/acquisition.hpp"

#include "beam/error.hpp"
#include "beam/kernels.hpp"
#include "beam/rng.hpp"

namespace beam {

std::string_view to_string(Policy policy)
{
    switch (policy) {
    case Policy::greedy: return "greedy";
    case Policy::nonmyopic: return "nonmyopic";
    case Policy::random: return "random";
    }
    return "unknown";
}

Policy policy_from_string(std::string_view text)
{
    if (text == "greedy") {
        return Policy::greedy;
    }
    if (text == "nonmyopic" || text == "beam") {
        return Policy::nonmyopic;
    }
    if (text == "random") {
        return Policy::random;
    }
    throw Error(ErrorKind::invalid_argument, "unknown policy '" + std::string(text) + "'");
}

std::size_t AcquisitionScores::argmax() const
{
    if (records.empty()) {
        throw Error(ErrorKind::over_constrained, "search space exhausted or over-constrained: empty pool");
    }
    // Scores within kTieTolerance count as equal, so rounding in the
    // lookahead sums cannot override the lowest-index rule.
    std::size_t best = 0;
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].alpha > records[best].alpha + kTieTolerance) {
            best = i;
        }
    }
    return best;
}

AcquisitionScores greedy_score(const PoolPosterior& posterior)
{
    if (posterior.active_count() == 0) {
        throw Error(ErrorKind::over_constrained, "search space exhausted or over-constrained: empty pool");
    }
    AcquisitionScores scores;
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        if (posterior.active(i)) {
            const double p = posterior.probability(i);
            scores.records.push_back({posterior.index(i), p, 0.0, p});
        }
    }
    return scores;
}

double exploration_term(const PoolPosterior& posterior, std::size_t pos, int remaining_budget)
{
    if (pos >= posterior.size() || !posterior.active(pos)) {
        throw Error(ErrorKind::invalid_argument, "exploration term requested for a candidate outside the pool");
    }
    if (remaining_budget < 0) {
        throw Error(ErrorKind::invalid_argument, "remaining budget must be >= 0");
    }
    kernels::ExplorationScratch scratch(posterior.size());
    return kernels::exploration(posterior, pos, remaining_budget, scratch);
}

AcquisitionScores nonmyopic_score(const PoolPosterior& posterior, int remaining_budget, Execution execution)
{
    if (remaining_budget < 0) {
        throw Error(ErrorKind::invalid_argument, "remaining budget must be >= 0");
    }
    AcquisitionScores scores = greedy_score(posterior);
    scores.remaining_budget = remaining_budget;
    const auto beta = kernels::exploration(posterior, remaining_budget, execution);
    std::size_t r = 0;
    for (std::size_t i = 0; i < posterior.size(); ++i) {
        if (posterior.active(i)) {
            auto& rec = scores.records[r++];
            rec.beta = beta[i];
            rec.alpha = rec.p + rec.beta;
        }
    }
    return scores;
}

std::vector<BatchPick> select_batch(const Surrogate& model, std::shared_ptr<const PoolGeometry> geometry,
                                    int batch_size, int remaining_budget, Policy policy, std::uint64_t seed,
                                    Execution execution)
{
    if (batch_size < 1) {
        throw Error(ErrorKind::invalid_argument, "batch size must be >= 1");
    }
    if (geometry->size() < static_cast<std::size_t>(batch_size)) {
        throw Error(ErrorKind::over_constrained, "only " + std::to_string(geometry->size()) +
                                                     " candidates remain for a batch of " +
                                                     std::to_string(batch_size));
    }
    const ParameterSpace& space = model.space();
    std::vector<Evidence> evidence(model.evidence().begin(), model.evidence().end());
    std::vector<char> active(geometry->size(), 1);
    Rng rng(seed);
    std::vector<BatchPick> picks;

    for (int b = 0; b < batch_size; ++b) {
        const Surrogate fantasized(space, model.settings(), evidence);
        const PoolPosterior posterior(fantasized, geometry, active, execution);
        const int lookahead = std::max(0, remaining_budget - b);

        std::size_t chosen = 0;
        double alpha = 0.0;
        if (policy == Policy::random) {
            auto ranking = posterior.ranking();
            std::vector<std::uint32_t> order(ranking.begin(), ranking.end());
            std::sort(order.begin(), order.end());
            chosen = order[rng.below(order.size())];
            alpha = posterior.probability(chosen);
        } else {
            const AcquisitionScores scores = policy == Policy::greedy
                                                 ? greedy_score(posterior)
                                                 : nonmyopic_score(posterior, lookahead, execution);
            const auto& best = scores.records[scores.argmax()];
            chosen = *geometry->position_of(best.index);
            alpha = best.alpha;
        }
        const double p = posterior.probability(chosen);
        const GridIndex index = geometry->index(chosen);
        picks.push_back({space.decode(index), p, alpha});
        evidence.push_back({index, p});
        active[chosen] = 0;
    }
    return picks;
}

}  // namespace beam
