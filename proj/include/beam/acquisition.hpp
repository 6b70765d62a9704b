#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "beam/execution.hpp"
#include "beam/pool_posterior.hpp"

namespace beam {

/// greedy: alpha = p. nonmyopic: alpha = p + beta (budget-aware lookahead).
/// random: uniform choice over the pool, the baseline.
enum class Policy { greedy, nonmyopic, random };

std::string_view to_string(Policy policy);
Policy policy_from_string(std::string_view text);

struct CandidateScore {
    GridIndex index;
    double p;
    double beta;
    double alpha;
};

/// Absolute gap below which two acquisition scores are treated as tied.
inline constexpr double kTieTolerance = 1e-12;

struct AcquisitionScores {
    std::vector<CandidateScore> records;  // ascending index
    int remaining_budget = 0;

    /// Position in `records` of the highest alpha; the lowest index wins ties.
    std::size_t argmax() const;
};

AcquisitionScores greedy_score(const PoolPosterior& posterior);

/// Expected sum of the top-`remaining_budget` posteriors over the rest of the
/// pool after observing candidate `pos`, both outcomes weighted by p(pos).
/// The sum truncates at the number of other active candidates.
double exploration_term(const PoolPosterior& posterior, std::size_t pos, int remaining_budget);

AcquisitionScores nonmyopic_score(const PoolPosterior& posterior, int remaining_budget,
                                  Execution execution = Execution::parallel);

struct BatchPick {
    Configuration config;
    double p;
    double alpha;
};

/// Sequential batch construction: take the argmax, fantasize its outcome as
/// the fractional label p, refit, repeat. Pick j of the batch looks ahead
/// over remaining_budget - j further experiments.
std::vector<BatchPick> select_batch(const Surrogate& model, std::shared_ptr<const PoolGeometry> geometry,
                                    int batch_size, int remaining_budget, Policy policy, std::uint64_t seed,
                                    Execution execution = Execution::parallel);

}  // namespace beam
