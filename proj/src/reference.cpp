#include "beam/reference.hpp"

#include <algorithm>
#include <functional>
#include <tuple>
#include <unordered_map>

#include "beam/error.hpp"

namespace beam::reference {

namespace {

struct Ranked {
    double d2;
    GridIndex index;
};

bool by_distance(const Ranked& a, const Ranked& b)
{
    return std::tie(a.d2, a.index) < std::tie(b.d2, b.index);
}

// k nearest grid points of `query` by sorting the whole grid.
std::vector<GridIndex> sorted_grid_neighbors(const ParameterSpace& space, int k, GridIndex query)
{
    if (space.cardinality() > 2'000'000) {
        throw Error(ErrorKind::invalid_argument, "reference graph neighbors need a small space");
    }
    std::vector<Ranked> ranked;
    ranked.reserve(space.cardinality());
    for (GridIndex j = 0; j < space.cardinality(); ++j) {
        if (j != query) {
            ranked.push_back({distance2(space, query, j), j});
        }
    }
    std::sort(ranked.begin(), ranked.end(), by_distance);
    std::vector<GridIndex> out;
    for (std::size_t j = 0; j < std::min(static_cast<std::size_t>(k), ranked.size()); ++j) {
        out.push_back(ranked[j].index);
    }
    return out;
}

class BruteForce {
public:
    BruteForce(const ParameterSpace& space, const SurrogateSettings& settings) : space_(space), settings_(settings) {}

    std::vector<GridIndex> labeled_neighbors(std::span<const Evidence> evidence, GridIndex query)
    {
        std::vector<GridIndex> out;
        if (settings_.neighborhood == Neighborhood::observed) {
            std::vector<Ranked> ranked;
            for (const auto& e : evidence) {
                ranked.push_back({distance2(space_, query, e.index), e.index});
            }
            std::sort(ranked.begin(), ranked.end(), by_distance);
            for (std::size_t j = 0; j < std::min(static_cast<std::size_t>(settings_.k), ranked.size()); ++j) {
                out.push_back(ranked[j].index);
            }
            return out;
        }
        auto it = graph_.find(query);
        if (it == graph_.end()) {
            it = graph_.emplace(query, sorted_grid_neighbors(space_, settings_.k, query)).first;
        }
        for (GridIndex j : it->second) {
            if (label(evidence, j) >= 0.0) {
                out.push_back(j);
            }
        }
        return out;
    }

    double predict(std::span<const Evidence> evidence, GridIndex query)
    {
        double positive = 0.0;
        const auto neighbors = labeled_neighbors(evidence, query);
        for (GridIndex j : neighbors) {
            positive += label(evidence, j);
        }
        return (settings_.gamma + positive) / (1.0 + static_cast<double>(neighbors.size()));
    }

    double exploration_term(std::span<const Evidence> evidence, std::span<const GridIndex> pool, GridIndex x,
                            int remaining_budget)
    {
        if (remaining_budget <= 0 || pool.size() < 2) {
            return 0.0;
        }
        const std::size_t count =
            std::min<std::size_t>(static_cast<std::size_t>(remaining_budget), pool.size() - 1);
        const double p = predict(evidence, x);
        double value = 0.0;
        for (const double y : {1.0, 0.0}) {
            std::vector<Evidence> extended(evidence.begin(), evidence.end());
            extended.push_back({x, y});
            std::vector<double> updated;
            for (GridIndex c : pool) {
                if (c != x) {
                    updated.push_back(predict(extended, c));
                }
            }
            std::sort(updated.begin(), updated.end(), std::greater<>());
            double top = 0.0;
            for (std::size_t j = 0; j < count; ++j) {
                top += updated[j];
            }
            value += (y == 1.0 ? p : 1.0 - p) * top;
        }
        return value;
    }

private:
    static double label(std::span<const Evidence> evidence, GridIndex j)
    {
        for (const auto& e : evidence) {
            if (e.index == j) {
                return e.label;
            }
        }
        return -1.0;
    }

    const ParameterSpace& space_;
    SurrogateSettings settings_;
    std::unordered_map<GridIndex, std::vector<GridIndex>> graph_;
};

}  // namespace

std::vector<GridIndex> labeled_neighbors(const ParameterSpace& space, const SurrogateSettings& settings,
                                         std::span<const Evidence> evidence, GridIndex query)
{
    return BruteForce(space, settings).labeled_neighbors(evidence, query);
}

double predict(const ParameterSpace& space, const SurrogateSettings& settings, std::span<const Evidence> evidence,
               GridIndex query)
{
    return BruteForce(space, settings).predict(evidence, query);
}

std::vector<GridIndex> affected(const ParameterSpace& space, const SurrogateSettings& settings,
                                std::span<const Evidence> evidence, std::span<const GridIndex> pool, GridIndex x)
{
    BruteForce brute(space, settings);
    std::vector<Evidence> extended(evidence.begin(), evidence.end());
    extended.push_back({x, 0.0});
    std::vector<GridIndex> out;
    for (GridIndex c : pool) {
        if (c == x) {
            continue;
        }
        auto before = brute.labeled_neighbors(evidence, c);
        auto after = brute.labeled_neighbors(extended, c);
        std::sort(before.begin(), before.end());
        std::sort(after.begin(), after.end());
        if (before != after) {
            out.push_back(c);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

double exploration_term(const ParameterSpace& space, const SurrogateSettings& settings,
                        std::span<const Evidence> evidence, std::span<const GridIndex> pool, GridIndex x,
                        int remaining_budget)
{
    return BruteForce(space, settings).exploration_term(evidence, pool, x, remaining_budget);
}

std::vector<double> exploration(const ParameterSpace& space, const SurrogateSettings& settings,
                                std::span<const Evidence> evidence, std::span<const GridIndex> pool,
                                int remaining_budget)
{
    BruteForce brute(space, settings);
    std::vector<double> out;
    out.reserve(pool.size());
    for (GridIndex x : pool) {
        out.push_back(brute.exploration_term(evidence, pool, x, remaining_budget));
    }
    return out;
}

}  // namespace beam::reference
