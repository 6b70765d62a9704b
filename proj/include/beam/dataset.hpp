#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "beam/space.hpp"

namespace beam {

enum class Outcome : std::uint8_t { failure = 0, success = 1 };

enum class Origin : std::uint8_t { seed_import, suggested, manual };

std::string_view to_string(Origin origin);
Origin origin_from_string(std::string_view text);

/// A labeled point as the surrogate sees it. `label` is 0/1 for real
/// observations and fractional for fantasized batch members.
struct Evidence {
    GridIndex index;
    double label;
};

struct Observation {
    Configuration config;
    Outcome outcome = Outcome::failure;
    Origin origin = Origin::suggested;
    std::string recorded_at;

    bool operator==(const Observation&) const = default;
};

/// Append-only observation history with unique configuration indices.
class Dataset {
public:
    /// Throws duplicate naming the earlier record when the index is already present.
    void append(Observation observation);

    bool contains(GridIndex index) const { return position_.count(index) != 0; }

    /// Position of the observation with this index, or -1.
    std::ptrdiff_t find(GridIndex index) const;

    std::size_t size() const noexcept { return observations_.size(); }
    bool empty() const noexcept { return observations_.empty(); }
    const Observation& operator[](std::size_t i) const { return observations_[i]; }
    std::span<const Observation> observations() const noexcept { return observations_; }

    std::vector<Evidence> evidence() const;

    std::size_t count(Origin origin) const;
    std::size_t successes() const;

    bool operator==(const Dataset& other) const { return observations_ == other.observations_; }

private:
    std::vector<Observation> observations_;
    std::unordered_map<GridIndex, std::size_t> position_;
};

}  // namespace beam
