#include "beam/dataset.hpp"

#include <algorithm>

#include "beam/error.hpp"

namespace beam {

std::string_view to_string(Origin origin)
{
    switch (origin) {
    case Origin::seed_import: return "seed-import";
    case Origin::suggested: return "suggested";
    case Origin::manual: return "manual";
    }
    return "unknown";
}

Origin origin_from_string(std::string_view text)
{
    if (text == "seed-import") {
        return Origin::seed_import;
    }
    if (text == "suggested") {
        return Origin::suggested;
    }
    if (text == "manual") {
        return Origin::manual;
    }
    throw Error(ErrorKind::format, "unknown observation origin '" + std::string(text) + "'");
}

void Dataset::append(Observation observation)
{
    const GridIndex index = observation.config.index;
    if (const auto prior = find(index); prior >= 0) {
        const auto& clash = observations_[static_cast<std::size_t>(prior)];
        throw Error(ErrorKind::duplicate, "configuration " + std::to_string(index) +
                                              " already observed as record #" + std::to_string(prior + 1) + " (" +
                                              std::string(to_string(clash.origin)) + ")");
    }
    position_.emplace(index, observations_.size());
    observations_.push_back(std::move(observation));
}

std::ptrdiff_t Dataset::find(GridIndex index) const
{
    const auto it = position_.find(index);
    return it == position_.end() ? -1 : static_cast<std::ptrdiff_t>(it->second);
}

std::vector<Evidence> Dataset::evidence() const
{
    std::vector<Evidence> out;
    out.reserve(observations_.size());
    for (const auto& o : observations_) {
        out.push_back({o.config.index, o.outcome == Outcome::success ? 1.0 : 0.0});
    }
    return out;
}

std::size_t Dataset::count(Origin origin) const
{
    return static_cast<std::size_t>(
        std::count_if(observations_.begin(), observations_.end(), [&](const auto& o) { return o.origin == origin; }));
}

std::size_t Dataset::successes() const
{
    return static_cast<std::size_t>(std::count_if(observations_.begin(), observations_.end(),
                                                  [](const auto& o) { return o.outcome == Outcome::success; }));
}

}  // namespace beam
