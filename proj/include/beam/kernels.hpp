#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "beam/execution.hpp"
#include "beam/pool_posterior.hpp"

namespace beam::kernels {

/// Per-thread buffers for the exploration kernel.
class ExplorationScratch {
public:
    explicit ExplorationScratch(std::size_t pool_size) : stamp_(pool_size, 0) {}

    std::vector<std::uint32_t> affected;
    std::vector<double> values;

    void mark_begin()
    {
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
    }
    void mark(std::uint32_t pos) { stamp_[pos] = epoch_; }
    bool marked(std::uint32_t pos) const { return stamp_[pos] == epoch_; }

private:
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
};

/// Exploration term of one candidate, reusing `scratch`.
double exploration(const PoolPosterior& posterior, std::size_t pos, int remaining_budget,
                   ExplorationScratch& scratch);

/// Exploration term of every active candidate by pool position (0 for inactive).
std::vector<double> exploration(const PoolPosterior& posterior, int remaining_budget, Execution execution);

}  // namespace beam::kernels
