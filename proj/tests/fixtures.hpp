#pragma once

// Hand-built surrogate cases with their expected posteriors worked out on
// paper. Coordinates are integer grids (step 1), so normalized distances are
// i/(n-1) and ties are exact.

#include <string>
#include <vector>

#include "beam/surrogate.hpp"

namespace beam::fixtures {

struct CraftedCase {
    std::string name;
    ParameterSpace space;
    SurrogateSettings settings;
    std::vector<Evidence> evidence;
    GridIndex query;
    double expected;
};

inline ParameterSpace line(int n)
{
    return ParameterSpace({AxisSpec("x", 0, n - 1, 1)});
}

inline std::vector<CraftedCase> crafted_cases()
{
    const auto obs = [](int k, double gamma = 0.05) { return SurrogateSettings{k, gamma, Neighborhood::observed}; };
    const auto spc = [](int k, double gamma = 0.05) { return SurrogateSettings{k, gamma, Neighborhood::space}; };
    const ParameterSpace square({AxisSpec("x", 0, 4, 1), AxisSpec("y", 0, 4, 1)});  // index = 5x + y

    std::vector<Evidence> seeds37;
    for (GridIndex i = 0; i < 37; ++i) {
        seeds37.push_back({i * 2, 0.0});
    }

    return {
        {"empty dataset, observed", line(10), obs(5), {}, 4, 0.05},
        {"empty dataset, space", line(10), spc(5), {}, 4, 0.05},
        {"one success one failure", line(10), obs(5), {{2, 1}, {7, 0}}, 4, (0.05 + 1) / (1 + 2)},
        {"37 seed failures", line(100), obs(5), seeds37, 51, (0.05 + 0) / (1 + 5)},
        {"single success, far", line(10), obs(5), {{0, 1}}, 9, (0.05 + 1) / (1 + 1)},
        {"tie k=1 lower index wins success", line(11), obs(1), {{3, 1}, {7, 0}}, 5, (0.05 + 1) / (1 + 1)},
        {"tie k=1 lower index wins failure", line(11), obs(1), {{3, 0}, {7, 1}}, 5, (0.05 + 0) / (1 + 1)},
        {"four equidistant k=2", square, obs(2), {{7, 1}, {11, 0}, {13, 1}, {17, 1}}, 12, (0.05 + 1) / (1 + 2)},
        {"labeled query counts itself", line(10), obs(3, 0.1), {{0, 1}, {1, 1}, {2, 0}, {9, 0}}, 1,
         (0.1 + 2) / (1 + 3)},
        {"graph neighbor labeled", line(10), spc(2), {{4, 1}}, 5, (0.05 + 1) / (1 + 1)},
        {"graph ignores labels beyond k", line(10), spc(2), {{4, 1}, {6, 0}, {8, 1}}, 5, (0.05 + 1) / (1 + 2)},
        {"graph tie excludes right", line(10), spc(1), {{6, 1}}, 5, 0.05},
        {"graph tie includes left", line(10), spc(1), {{4, 1}}, 5, (0.05 + 1) / (1 + 1)},
        {"graph far data is prior", line(10), spc(2), {{0, 1}}, 9, 0.05},
        {"graph excludes the query", line(10), spc(2), {{5, 1}}, 5, 0.05},
        {"fractional label", line(10), spc(1), {{4, 0.35}}, 5, (0.05 + 0.35) / (1 + 1)},
    };
}

}  // namespace beam::fixtures
