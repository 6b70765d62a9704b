#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "beam/campaign.hpp"

namespace beam {

using Json = nlohmann::ordered_json;

inline constexpr const char* campaign_format = "beam-campaign";
inline constexpr int campaign_format_version = 1;

/// Canonical document: fixed key order, axis-ordered value arrays, shortest
/// round-trip doubles, so load(save(c)) re-serializes byte-identically.
Json campaign_to_json(const Campaign& campaign);
Campaign campaign_from_json(const Json& document);

/// Atomic: writes `<path>.tmp-<pid>` beside the target, flushes, renames.
void save_campaign(const Campaign& campaign, const std::filesystem::path& path);
Campaign load_campaign(const std::filesystem::path& path);

Json space_to_json(const ParameterSpace& space);
ParameterSpace space_from_json(const Json& j);
Json constraint_to_json(const Constraint& constraint);
Constraint constraint_from_json(const Json& j);
Json settings_to_json(const CampaignSettings& settings);
CampaignSettings settings_from_json(const Json& j);

/// {"index": i, "values": {axis: value, ...}} for API output.
Json configuration_json(const ParameterSpace& space, const Configuration& config);
Json metrics_json(const CampaignMetrics& metrics);

/// ISO-8601 UTC with seconds, e.g. 2024-05-01T12:00:00Z.
std::string utc_timestamp();

}  // namespace beam
