#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "beam/acquisition.hpp"
#include "beam/candidate_pool.hpp"
#include "beam/constraints.hpp"
#include "beam/dataset.hpp"
#include "beam/execution.hpp"
#include "beam/surrogate.hpp"

namespace beam {

struct CampaignSettings {
    int budget = 10;  // T, counted in experiments
    int batch_size = 2;
    Policy policy = Policy::nonmyopic;
    SurrogateSettings surrogate;
    PoolSettings pool;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const CampaignSettings&) const = default;
};

struct PendingSuggestion {
    Configuration config;
    double p = 0;  // posterior when suggested
    double alpha = 0;

    bool operator==(const PendingSuggestion&) const = default;
};

struct SuggestionEvent {
    int round = 0;
    int experiments_used = 0;
    std::size_t dataset_size = 0;
    int budget = 0;
    std::vector<PendingSuggestion> batch;

    bool operator==(const SuggestionEvent&) const = default;
};

struct SeedRecord {
    std::vector<double> values;  // axis order
    Outcome outcome = Outcome::failure;
};

/// Parses the seed-data table: a header of the axis names plus "outcome" (any
/// column order, comma or tab delimited), then one row per experiment with
/// outcome 0 or 1. Throws invalid_argument listing every malformed row.
std::vector<SeedRecord> parse_seed_table(std::istream& in, const ParameterSpace& space);

enum class RecordMode { pending, manual };

struct TraceEntry {
    Configuration config;
    Outcome outcome = Outcome::failure;
    Origin origin = Origin::suggested;
    std::optional<double> p_at_suggestion;  // empty for manual experiments
    std::size_t discoveries = 0;  // cumulative
};

struct CampaignMetrics {
    std::size_t discovery_rate = 0;  // successes among budgeted experiments
    int experiments_used = 0;
    int budget = 0;
    std::uint64_t space_size = 0;
    double fraction_explored = 0;
    int manual_experiments = 0;
    std::size_t manual_discoveries = 0;
    std::vector<TraceEntry> trace;
};

/// One budgeted suggest -> experiment -> record loop at a fixed context.
///
/// Seed imports never consume budget; suggested and manual records do. A
/// suggested batch stays pending, and suggest() keeps returning it, until
/// every member has an outcome.
class Campaign {
public:
    Campaign(ParameterSpace space, std::vector<Constraint> constraints, CampaignSettings settings);

    const ParameterSpace& space() const noexcept { return space_; }
    const ConstraintSet& constraints() const noexcept { return constraints_; }
    const CampaignSettings& settings() const noexcept { return settings_; }
    const Dataset& dataset() const noexcept { return dataset_; }
    const std::vector<PendingSuggestion>& pending() const noexcept { return pending_; }
    const std::vector<SuggestionEvent>& history() const noexcept { return history_; }
    std::uint64_t state_version() const noexcept { return state_version_; }

    int experiments_used() const noexcept { return experiments_used_; }
    int remaining_budget() const noexcept { return settings_.budget - experiments_used_; }
    bool complete() const noexcept { return experiments_used_ >= settings_.budget; }

    /// All-or-nothing; throws listing every rejected row.
    void import_seed_data(std::span<const SeedRecord> records, const std::string& timestamp = {});

    const std::vector<PendingSuggestion>& suggest(Execution execution = Execution::parallel);

    void record(GridIndex index, Outcome outcome, RecordMode mode = RecordMode::pending,
                const std::string& timestamp = {});
    void record(std::span<const double> values, Outcome outcome, RecordMode mode = RecordMode::pending,
                const std::string& timestamp = {});

    void extend_budget(int additional);

    CampaignMetrics metrics() const;
    std::vector<Configuration> discovered() const;

    /// Current posterior at a configuration, fitted on every recorded observation.
    Surrogate surrogate() const;

    /// Rebuilds a campaign from persisted state after validating every invariant.
    static Campaign restore(ParameterSpace space, std::vector<Constraint> constraints, CampaignSettings settings,
                            Dataset dataset, std::vector<PendingSuggestion> pending,
                            std::vector<SuggestionEvent> history, std::uint64_t state_version);

    /// Compares everything except state_version.
    bool operator==(const Campaign& other) const;

private:
    friend Campaign replay(const Campaign& campaign, Execution execution);

    void check_invariants() const;

    ParameterSpace space_;
    ConstraintSet constraints_;
    CampaignSettings settings_;
    Dataset dataset_;
    std::vector<PendingSuggestion> pending_;
    std::vector<SuggestionEvent> history_;
    int experiments_used_ = 0;
    std::uint64_t state_version_ = 0;
};

/// Posterior over the grid cells of two free axes with every other axis
/// pinned to a grid value. `p` is row-major, rows along `row_axis`.
struct PosteriorSlice {
    std::size_t row_axis = 0;
    std::size_t col_axis = 0;
    std::vector<double> row_values;
    std::vector<double> col_values;
    std::vector<ContextEntry> pinned;  // axis order
    std::vector<double> p;
};

PosteriorSlice posterior_slice(const Campaign& campaign, const std::string& row_axis, const std::string& col_axis,
                               const std::map<std::string, double>& pins, std::uint64_t max_cells = 1'000'000);

/// Re-executes a campaign's history from an empty state: imports, records and
/// budget extensions in their original order, every suggestion regenerated.
/// Throws format if a regenerated batch differs from the recorded one.
Campaign replay(const Campaign& campaign, Execution execution = Execution::parallel);

}  // namespace beam
