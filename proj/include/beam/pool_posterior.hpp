#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "beam/execution.hpp"
#include "beam/surrogate.hpp"

namespace beam {

/// Data-independent structure of a candidate pool: coordinates, the k-NN graph
/// of every member with its reverse index (space mode), and a kd-tree over the
/// members (observed mode). Shared by every refit within one suggestion round.
class PoolGeometry {
public:
    /// `pool` must be sorted ascending without duplicates.
    PoolGeometry(const ParameterSpace& space, std::vector<GridIndex> pool, int k, Neighborhood neighborhood,
                 Execution execution = Execution::parallel);

    std::size_t size() const noexcept { return indices_.size(); }
    std::size_t dimensions() const noexcept { return dims_; }
    GridIndex index(std::size_t pos) const { return indices_[pos]; }
    const std::vector<GridIndex>& indices() const noexcept { return indices_; }
    std::optional<std::size_t> position_of(GridIndex index) const;
    std::span<const double> coords(std::size_t pos) const { return {coords_.data() + pos * dims_, dims_}; }
    Neighborhood neighborhood() const noexcept { return neighborhood_; }

    /// Graph neighbors of pool member `pos` (space mode).
    std::span<const GridIndex> graph_neighbors(std::size_t pos) const
    {
        return {graph_.data() + graph_offset_[pos], graph_offset_[pos + 1] - graph_offset_[pos]};
    }

    /// Pool members that have `x` among their graph neighbors (space mode).
    template <typename F>
    void for_each_reverse(GridIndex x, F&& f) const
    {
        auto it = std::lower_bound(reverse_.begin(), reverse_.end(), std::pair<GridIndex, std::uint32_t>{x, 0});
        for (; it != reverse_.end() && it->first == x; ++it) {
            f(it->second);
        }
    }

    struct Node {
        std::uint32_t begin, end;  // range in tree_order()
        std::int32_t left = -1, right = -1;
    };
    const std::vector<Node>& tree() const noexcept { return nodes_; }
    const std::vector<std::uint32_t>& tree_order() const noexcept { return order_; }
    std::span<const double> node_lo(std::size_t node) const { return {box_lo_.data() + node * dims_, dims_}; }
    std::span<const double> node_hi(std::size_t node) const { return {box_hi_.data() + node * dims_, dims_}; }

private:
    std::int32_t build_tree(std::uint32_t begin, std::uint32_t end);

    std::size_t dims_;
    Neighborhood neighborhood_;
    std::vector<GridIndex> indices_;
    std::vector<double> coords_;
    std::vector<GridIndex> graph_;
    std::vector<std::size_t> graph_offset_;
    std::vector<std::pair<GridIndex, std::uint32_t>> reverse_;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> order_;
    std::vector<double> box_lo_, box_hi_;
};

/// A surrogate evaluated over a pool: per-candidate posteriors, their ranking,
/// and the hypothetical posterior each candidate would take if a new point
/// joined its neighborhood. Candidates can be deactivated (already picked
/// into the current batch).
class PoolPosterior {
public:
    PoolPosterior(const Surrogate& model, std::shared_ptr<const PoolGeometry> geometry,
                  std::vector<char> active = {}, Execution execution = Execution::parallel);

    const Surrogate& model() const noexcept { return *model_; }
    const PoolGeometry& geometry() const noexcept { return *geometry_; }
    std::size_t size() const noexcept { return geometry_->size(); }
    std::size_t active_count() const noexcept { return ranking_.size(); }
    bool active(std::size_t pos) const { return active_[pos] != 0; }
    GridIndex index(std::size_t pos) const { return geometry_->index(pos); }

    double probability(std::size_t pos) const { return probability_[pos]; }
    const NeighborSummary& summary(std::size_t pos) const { return summaries_[pos]; }

    /// Posterior of candidate `pos` once a point labeled y enters its neighborhood.
    double shifted(std::size_t pos, double y) const
    {
        return posterior_with(summaries_[pos], model_->settings().gamma, y);
    }

    /// Active candidates (other than x) whose labeled neighborhood changes when x is observed.
    void affected(GridIndex x, std::vector<std::uint32_t>& out) const;
    std::vector<std::uint32_t> affected(GridIndex x) const;

    /// True when every candidate would gain any new point as a neighbor
    /// (observed mode with fewer than k observations).
    bool everyone_affected() const noexcept { return everyone_affected_; }

    /// Active positions by descending posterior, ties by ascending index.
    std::span<const std::uint32_t> ranking() const noexcept { return ranking_; }
    /// Active positions by descending shifted(pos, y); only built when everyone_affected().
    std::span<const std::uint32_t> shifted_ranking(int y) const noexcept { return shifted_ranking_[y ? 1 : 0]; }

private:
    std::shared_ptr<const Surrogate> model_;
    std::shared_ptr<const PoolGeometry> geometry_;
    std::vector<char> active_;
    std::vector<NeighborSummary> summaries_;
    std::vector<double> probability_;
    std::vector<std::uint32_t> ranking_;
    std::vector<std::uint32_t> shifted_ranking_[2];
    std::vector<double> node_radius2_;
    bool everyone_affected_ = false;
};

}  // namespace beam
