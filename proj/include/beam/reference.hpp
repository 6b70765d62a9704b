#pragma once

#include <span>
#include <vector>

#include "beam/surrogate.hpp"

/// Brute-force serial implementations: every neighbor set is recomputed by a
/// full sort and every hypothetical posterior by a full refit. Quadratic or
/// worse; kept as the oracle for the fast kernels and as the benchmark baseline.
namespace beam::reference {

/// Indices of the labeled points counted by the posterior at `query`.
std::vector<GridIndex> labeled_neighbors(const ParameterSpace& space, const SurrogateSettings& settings,
                                         std::span<const Evidence> evidence, GridIndex query);

double predict(const ParameterSpace& space, const SurrogateSettings& settings, std::span<const Evidence> evidence,
               GridIndex query);

/// Pool members (other than x) whose labeled-neighbor set differs once x is observed.
std::vector<GridIndex> affected(const ParameterSpace& space, const SurrogateSettings& settings,
                                std::span<const Evidence> evidence, std::span<const GridIndex> pool, GridIndex x);

double exploration_term(const ParameterSpace& space, const SurrogateSettings& settings,
                        std::span<const Evidence> evidence, std::span<const GridIndex> pool, GridIndex x,
                        int remaining_budget);

/// exploration_term for every pool member, in pool order.
std::vector<double> exploration(const ParameterSpace& space, const SurrogateSettings& settings,
                                std::span<const Evidence> evidence, std::span<const GridIndex> pool,
                                int remaining_budget);

}  // namespace beam::reference
