#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "beam/dataset.hpp"
#include "beam/space.hpp"

namespace beam {

/// Which points compete for the k neighbor slots of a query.
///
/// `space`: the k nearest grid points of the query in the whole space (the
/// query itself excluded); only the labeled ones among them count. Far from
/// all data the posterior is the prior gamma.
///
/// `observed`: the k nearest labeled points, however far away; with fewer
/// than k observations every observation is a neighbor.
enum class Neighborhood { space, observed };

std::string_view to_string(Neighborhood n);
Neighborhood neighborhood_from_string(std::string_view text);

struct SurrogateSettings {
    int k = 5;
    double gamma = 0.05;
    Neighborhood neighborhood = Neighborhood::space;

    void validate() const;
    bool operator==(const SurrogateSettings&) const = default;
};

/// Labeled-neighbor statistics of one query point.
struct NeighborSummary {
    double positive = 0.0;     // sum of labels over the labeled neighbors
    std::uint32_t count = 0;   // m, labeled neighbors in use
    bool full = false;         // observed mode with m == k: a newcomer evicts the k-th
    double kth_distance2 = 0;  // observed mode only, metric units
    GridIndex kth_index = 0;
    double kth_label = 0;
};

inline double posterior(const NeighborSummary& s, double gamma)
{
    return (gamma + s.positive) / (1.0 + s.count);
}

/// Posterior of the query after a new labeled point with label y joins its neighborhood.
inline double posterior_with(const NeighborSummary& s, double gamma, double y)
{
    if (s.full) {
        return (gamma + (s.positive - s.kth_label) + y) / (1.0 + s.count);
    }
    return (gamma + s.positive + y) / (2.0 + s.count);
}

/// Lexicographic (distance, index) order used for every neighbor ranking.
inline bool closer(double d2_a, GridIndex a, double d2_b, GridIndex b)
{
    return d2_a < d2_b || (d2_a == d2_b && a < b);
}

/// k nearest grid points of a grid point in normalized coordinates, the point
/// itself excluded, ties broken by ascending index.
class GridNeighbors {
public:
    GridNeighbors(const ParameterSpace& space, int k);

    std::vector<GridIndex> of(GridIndex query) const;
    void of(GridIndex query, std::vector<GridIndex>& out) const;

private:
    std::vector<std::uint64_t> cardinality_;
    std::vector<std::uint64_t> stride_;
    std::vector<double> scale_;
    double to_unit2_ = 1.0;
    int k_;
    double start_radius_ = 1.0;
};

/// Squared Euclidean distance between two grid points in metric coordinates
/// (see ParameterSpace::metric_index).
double distance2(const ParameterSpace& space, GridIndex a, GridIndex b);
double distance2(std::span<const double> a, std::span<const double> b);

/// Probabilistic k-NN posterior p(x) = (gamma + positives) / (1 + m).
/// Immutable; refitting means constructing a new instance.
class Surrogate {
public:
    Surrogate(ParameterSpace space, SurrogateSettings settings, std::vector<Evidence> evidence);
    Surrogate(ParameterSpace space, SurrogateSettings settings, const Dataset& dataset);

    const ParameterSpace& space() const noexcept { return space_; }
    const SurrogateSettings& settings() const noexcept { return settings_; }
    std::span<const Evidence> evidence() const noexcept { return evidence_; }

    bool observed(GridIndex index) const { return labels_.count(index) != 0; }

    NeighborSummary summarize(GridIndex query) const;
    /// Observed-mode summary for a query whose normalized coordinates are known.
    NeighborSummary summarize_observed(std::span<const double> query_coords) const;
    /// Label of an observed point, or nullptr.
    const double* label(GridIndex index) const;
    double predict(GridIndex query) const { return posterior(summarize(query), settings_.gamma); }
    double predict(const Configuration& config) const { return predict(config.index); }

    /// predict over evidence + {extra} without refitting. extra.label may be fractional.
    double predict_with_hypothetical(Evidence extra, GridIndex query) const;

    /// Whether `x` would take a neighbor slot of a query with the given summary.
    bool enters(const NeighborSummary& summary, GridIndex query, GridIndex x) const;

    /// Graph neighbors of a point (space mode).
    std::vector<GridIndex> graph_neighbors(GridIndex query) const { return graph_.of(query); }

private:
    ParameterSpace space_;
    SurrogateSettings settings_;
    std::vector<Evidence> evidence_;
    std::unordered_map<GridIndex, double> labels_;
    std::vector<double> coords_;  // evidence coordinates, row-major n x d (observed mode)
    GridNeighbors graph_;
};

}  // namespace beam
