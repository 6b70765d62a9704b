#include "beam/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <unordered_map>
#include <unordered_set>

#include "beam/error.hpp"
#include "beam/pool_posterior.hpp"
#include "beam/rng.hpp"

namespace beam {

void CampaignSettings::validate() const
{
    if (budget < 0) {
        throw Error(ErrorKind::invalid_argument, "budget must be >= 0");
    }
    if (batch_size < 1) {
        throw Error(ErrorKind::invalid_argument, "batch size must be >= 1");
    }
    if (pool.cap < 1) {
        throw Error(ErrorKind::invalid_argument, "pool cap must be >= 1");
    }
    surrogate.validate();
}

namespace {

std::vector<std::string> split(const std::string& line, char delimiter)
{
    std::vector<std::string> fields;
    std::string field;
    for (char c : line) {
        if (c == delimiter) {
            fields.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field += c;
        }
    }
    fields.push_back(field);
    for (auto& f : fields) {
        const auto first = f.find_first_not_of(" \t");
        const auto last = f.find_last_not_of(" \t");
        f = first == std::string::npos ? std::string() : f.substr(first, last - first + 1);
    }
    return fields;
}

bool parse_double(const std::string& text, double& out)
{
    if (text.empty()) {
        return false;
    }
    char* end = nullptr;
    out = std::strtod(text.c_str(), &end);
    return end == text.c_str() + text.size() && std::isfinite(out);
}

std::string join(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        out += "\n  " + l;
    }
    return out;
}

}  // namespace

std::vector<SeedRecord> parse_seed_table(std::istream& in, const ParameterSpace& space)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) {
            break;
        }
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
        throw Error(ErrorKind::invalid_argument, "seed table is empty: expected a header row");
    }
    const char delimiter = line.find('\t') != std::string::npos ? '\t' : ',';
    const auto header = split(line, delimiter);

    std::vector<std::ptrdiff_t> column_of_axis(space.dimensions(), -1);
    std::ptrdiff_t outcome_column = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (header[c] == "outcome") {
            if (outcome_column >= 0) {
                throw Error(ErrorKind::invalid_argument, "seed table header repeats column 'outcome'");
            }
            outcome_column = static_cast<std::ptrdiff_t>(c);
            continue;
        }
        std::size_t a = 0;
        while (a < space.dimensions() && space.axis(a).name() != header[c]) {
            ++a;
        }
        if (a == space.dimensions()) {
            throw Error(ErrorKind::invalid_argument, "seed table header names unknown column '" + header[c] + "'");
        }
        if (column_of_axis[a] >= 0) {
            throw Error(ErrorKind::invalid_argument, "seed table header repeats column '" + header[c] + "'");
        }
        column_of_axis[a] = static_cast<std::ptrdiff_t>(c);
    }
    for (std::size_t a = 0; a < space.dimensions(); ++a) {
        if (column_of_axis[a] < 0) {
            throw Error(ErrorKind::invalid_argument,
                        "seed table header is missing axis '" + space.axis(a).name() + "'");
        }
    }
    if (outcome_column < 0) {
        throw Error(ErrorKind::invalid_argument, "seed table header is missing column 'outcome'");
    }

    std::vector<SeedRecord> records;
    std::vector<std::string> problems;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto fields = split(line, delimiter);
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (fields.size() != header.size()) {
            problems.push_back(where + "expected " + std::to_string(header.size()) + " fields, found " +
                               std::to_string(fields.size()));
            continue;
        }
        SeedRecord record;
        record.values.resize(space.dimensions());
        bool ok = true;
        for (std::size_t a = 0; a < space.dimensions(); ++a) {
            const auto& text = fields[static_cast<std::size_t>(column_of_axis[a])];
            if (!parse_double(text, record.values[a])) {
                problems.push_back(where + space.axis(a).name() + " value '" + text + "' is not a number");
                ok = false;
            }
        }
        const auto& outcome = fields[static_cast<std::size_t>(outcome_column)];
        if (outcome == "0" || outcome == "1") {
            record.outcome = outcome == "1" ? Outcome::success : Outcome::failure;
        } else {
            problems.push_back(where + "outcome '" + outcome + "' must be 0 or 1");
            ok = false;
        }
        if (ok) {
            records.push_back(std::move(record));
        }
    }
    if (!problems.empty()) {
        throw Error(ErrorKind::invalid_argument,
                    std::to_string(problems.size()) + " malformed seed row(s):" + join(problems));
    }
    return records;
}

Campaign::Campaign(ParameterSpace space, std::vector<Constraint> constraints, CampaignSettings settings)
    : space_(std::move(space)),
      constraints_(space_, std::move(constraints)),
      settings_(std::move(settings))
{
    settings_.validate();
}

void Campaign::import_seed_data(std::span<const SeedRecord> records, const std::string& timestamp)
{
    std::vector<Observation> accepted;
    std::vector<std::string> problems;
    std::unordered_map<GridIndex, std::size_t> batch_rows;
    for (std::size_t r = 0; r < records.size(); ++r) {
        const std::string where = "row " + std::to_string(r + 1) + ": ";
        Configuration config;
        try {
            config = space_.encode(records[r].values);
        } catch (const Error& e) {
            problems.push_back(where + e.what());
            continue;
        }
        const auto prior = dataset_.find(config.index);
        if (prior >= 0) {
            problems.push_back(where + "duplicates observation #" + std::to_string(prior + 1) + " (" +
                               std::string(to_string(dataset_[static_cast<std::size_t>(prior)].origin)) + ")");
            continue;
        }
        if (std::any_of(pending_.begin(), pending_.end(),
                        [&](const PendingSuggestion& s) { return s.config.index == config.index; })) {
            problems.push_back(where + "configuration is pending from the current suggestion batch");
            continue;
        }
        const auto [it, fresh] = batch_rows.emplace(config.index, r);
        if (!fresh) {
            problems.push_back(where + "duplicates row " + std::to_string(it->second + 1) + " of this import");
            continue;
        }
        accepted.push_back({std::move(config), records[r].outcome, Origin::seed_import, timestamp});
    }
    if (!problems.empty()) {
        throw Error(problems.size() == 1 && problems.front().find("duplicates") != std::string::npos
                        ? ErrorKind::duplicate
                        : ErrorKind::invalid_argument,
                    "seed import rejected, " + std::to_string(problems.size()) + " of " +
                        std::to_string(records.size()) + " row(s) invalid:" + join(problems));
    }
    if (accepted.empty()) {
        return;
    }
    for (auto& o : accepted) {
        dataset_.append(std::move(o));
    }
    ++state_version_;
}

const std::vector<PendingSuggestion>& Campaign::suggest(Execution execution)
{
    if (!pending_.empty()) {
        return pending_;
    }
    if (complete()) {
        throw Error(ErrorKind::budget_exhausted, "campaign complete: " + std::to_string(experiments_used_) + " of " +
                                                     std::to_string(settings_.budget) +
                                                     " experiments used; extend the budget to continue");
    }
    const int round = static_cast<int>(history_.size());
    const int remaining = remaining_budget();
    const int batch = std::min(settings_.batch_size, remaining);

    CandidatePool pool = build_pool(space_, constraints_, dataset_, settings_.pool,
                                    derive_seed(settings_.seed, 2 * static_cast<std::uint64_t>(round)));
    auto geometry = std::make_shared<const PoolGeometry>(space_, std::move(pool.indices), settings_.surrogate.k,
                                                         settings_.surrogate.neighborhood, execution);
    const Surrogate model(space_, settings_.surrogate, dataset_);
    const auto picks = select_batch(model, geometry, batch, remaining - 1, settings_.policy,
                                    derive_seed(settings_.seed, 2 * static_cast<std::uint64_t>(round) + 1),
                                    execution);

    SuggestionEvent event{round, experiments_used_, dataset_.size(), settings_.budget, {}};
    for (const auto& pick : picks) {
        event.batch.push_back({pick.config, pick.p, pick.alpha});
    }
    pending_ = event.batch;
    history_.push_back(std::move(event));
    ++state_version_;
    return pending_;
}

void Campaign::record(GridIndex index, Outcome outcome, RecordMode mode, const std::string& timestamp)
{
    if (index >= space_.cardinality()) {
        throw Error(ErrorKind::out_of_range, "grid index " + std::to_string(index) + " is outside the space (size " +
                                                 std::to_string(space_.cardinality()) + ")");
    }
    const auto prior = dataset_.find(index);
    if (prior >= 0) {
        throw Error(ErrorKind::duplicate, "configuration " + std::to_string(index) + " was already recorded as #" +
                                              std::to_string(prior + 1));
    }
    const auto it = std::find_if(pending_.begin(), pending_.end(),
                                 [&](const PendingSuggestion& s) { return s.config.index == index; });
    if (mode == RecordMode::pending) {
        if (it == pending_.end()) {
            throw Error(ErrorKind::not_pending,
                        "configuration " + std::to_string(index) +
                            " is not in the pending batch; record it as a manual experiment instead");
        }
        dataset_.append({it->config, outcome, Origin::suggested, timestamp});
        pending_.erase(it);
    } else {
        if (it != pending_.end()) {
            throw Error(ErrorKind::invalid_argument, "configuration " + std::to_string(index) +
                                                         " is pending; record it without the manual flag");
        }
        if (experiments_used_ + static_cast<int>(pending_.size()) >= settings_.budget) {
            throw Error(ErrorKind::budget_exhausted,
                        "no budget left for a manual experiment: " + std::to_string(experiments_used_) + " used, " +
                            std::to_string(pending_.size()) + " pending, budget " +
                            std::to_string(settings_.budget));
        }
        dataset_.append({space_.decode(index), outcome, Origin::manual, timestamp});
    }
    ++experiments_used_;
    ++state_version_;
}

void Campaign::record(std::span<const double> values, Outcome outcome, RecordMode mode, const std::string& timestamp)
{
    record(space_.encode(values).index, outcome, mode, timestamp);
}

void Campaign::extend_budget(int additional)
{
    if (additional < 1) {
        throw Error(ErrorKind::invalid_argument, "budget extension must be >= 1");
    }
    if (settings_.budget > std::numeric_limits<int>::max() - additional) {
        throw Error(ErrorKind::overflow, "budget extension overflows");
    }
    settings_.budget += additional;
    ++state_version_;
}

Surrogate Campaign::surrogate() const
{
    return Surrogate(space_, settings_.surrogate, dataset_);
}

std::vector<Configuration> Campaign::discovered() const
{
    std::vector<Configuration> out;
    for (const auto& o : dataset_.observations()) {
        if (o.outcome == Outcome::success) {
            out.push_back(o.config);
        }
    }
    return out;
}

CampaignMetrics Campaign::metrics() const
{
    std::unordered_map<GridIndex, double> p_at;
    for (const auto& event : history_) {
        for (const auto& s : event.batch) {
            p_at[s.config.index] = s.p;
        }
    }
    CampaignMetrics m;
    m.experiments_used = experiments_used_;
    m.budget = settings_.budget;
    m.space_size = space_.cardinality();
    m.fraction_explored = static_cast<double>(experiments_used_) / static_cast<double>(space_.cardinality());
    for (const auto& o : dataset_.observations()) {
        if (o.origin == Origin::seed_import) {
            continue;
        }
        const bool hit = o.outcome == Outcome::success;
        m.discovery_rate += hit ? 1 : 0;
        TraceEntry entry{o.config, o.outcome, o.origin, std::nullopt, m.discovery_rate};
        if (o.origin == Origin::manual) {
            ++m.manual_experiments;
            m.manual_discoveries += hit ? 1 : 0;
        } else if (const auto it = p_at.find(o.config.index); it != p_at.end()) {
            entry.p_at_suggestion = it->second;
        }
        m.trace.push_back(std::move(entry));
    }
    return m;
}

void Campaign::check_invariants() const
{
    settings_.validate();
    const auto fail = [](const std::string& what) { throw Error(ErrorKind::format, "inconsistent campaign: " + what); };
    std::unordered_set<GridIndex> suggested;
    for (std::size_t e = 0; e < history_.size(); ++e) {
        const auto& event = history_[e];
        if (event.round != static_cast<int>(e)) {
            fail("suggestion rounds are not numbered 0.." + std::to_string(history_.size() - 1));
        }
        if (event.batch.empty() || event.batch.size() > static_cast<std::size_t>(settings_.batch_size) ||
            event.batch.size() > static_cast<std::size_t>(std::max(0, event.budget - event.experiments_used))) {
            fail("round " + std::to_string(e) + " has an invalid batch size");
        }
        for (const auto& s : event.batch) {
            if (s.config != space_.decode(s.config.index)) {
                fail("round " + std::to_string(e) + " suggestion does not match its grid index");
            }
            suggested.insert(s.config.index);
        }
    }
    int used = 0;
    for (const auto& o : dataset_.observations()) {
        if (o.config.index >= space_.cardinality() || o.config != space_.decode(o.config.index)) {
            fail("observation values do not match grid index " + std::to_string(o.config.index));
        }
        if (o.origin != Origin::seed_import) {
            ++used;
        }
        if (o.origin == Origin::suggested && suggested.count(o.config.index) == 0) {
            fail("observation " + std::to_string(o.config.index) + " is tagged suggested but was never suggested");
        }
    }
    if (used > settings_.budget) {
        fail(std::to_string(used) + " experiments exceed the budget of " + std::to_string(settings_.budget));
    }
    if (pending_.size() > static_cast<std::size_t>(settings_.batch_size)) {
        fail("more pending suggestions than the batch size");
    }
    if (used + static_cast<int>(pending_.size()) > settings_.budget) {
        fail("pending suggestions exceed the remaining budget");
    }
    for (const auto& s : pending_) {
        if (dataset_.contains(s.config.index)) {
            fail("pending configuration " + std::to_string(s.config.index) + " is already observed");
        }
        const auto& last = history_.empty() ? std::vector<PendingSuggestion>{} : history_.back().batch;
        if (std::find(last.begin(), last.end(), s) == last.end()) {
            fail("pending configuration " + std::to_string(s.config.index) + " is not from the latest batch");
        }
    }
}

Campaign Campaign::restore(ParameterSpace space, std::vector<Constraint> constraints, CampaignSettings settings,
                           Dataset dataset, std::vector<PendingSuggestion> pending,
                           std::vector<SuggestionEvent> history, std::uint64_t state_version)
{
    Campaign c(std::move(space), std::move(constraints), std::move(settings));
    c.dataset_ = std::move(dataset);
    c.pending_ = std::move(pending);
    c.history_ = std::move(history);
    c.state_version_ = state_version;
    c.experiments_used_ = static_cast<int>(c.dataset_.count(Origin::suggested) + c.dataset_.count(Origin::manual));
    c.check_invariants();
    return c;
}

bool Campaign::operator==(const Campaign& other) const
{
    return space_ == other.space_ && constraints_.constraints() == other.constraints_.constraints() &&
           settings_ == other.settings_ && dataset_ == other.dataset_ && pending_ == other.pending_ &&
           history_ == other.history_ && experiments_used_ == other.experiments_used_;
}

PosteriorSlice posterior_slice(const Campaign& campaign, const std::string& row_axis, const std::string& col_axis,
                               const std::map<std::string, double>& pins, std::uint64_t max_cells)
{
    const ParameterSpace& space = campaign.space();
    PosteriorSlice slice;
    slice.row_axis = space.axis_position(row_axis);
    slice.col_axis = space.axis_position(col_axis);
    if (slice.row_axis == slice.col_axis) {
        throw Error(ErrorKind::invalid_argument, "row and column axes must differ");
    }
    const std::uint64_t rows = space.axis(slice.row_axis).cardinality();
    const std::uint64_t cols = space.axis(slice.col_axis).cardinality();
    if (rows * cols > max_cells) {
        throw Error(ErrorKind::invalid_argument, "slice of " + std::to_string(rows * cols) + " cells exceeds the " +
                                                     std::to_string(max_cells) + "-cell limit");
    }
    for (const auto& [name, value] : pins) {
        const std::size_t a = space.axis_position(name);
        if (a == slice.row_axis || a == slice.col_axis) {
            throw Error(ErrorKind::invalid_argument, "axis '" + name + "' is free in this slice and cannot be pinned");
        }
    }
    std::vector<std::uint64_t> pos(space.dimensions(), 0);
    for (std::size_t a = 0; a < space.dimensions(); ++a) {
        if (a == slice.row_axis || a == slice.col_axis) {
            continue;
        }
        const auto it = pins.find(space.axis(a).name());
        if (it == pins.end()) {
            throw Error(ErrorKind::invalid_argument, "axis '" + space.axis(a).name() + "' must be pinned to a value");
        }
        pos[a] = space.axis(a).position(it->second);
        slice.pinned.push_back({space.axis(a).name(), space.axis(a).value(pos[a])});
    }
    for (std::uint64_t i = 0; i < rows; ++i) {
        slice.row_values.push_back(space.axis(slice.row_axis).value(i));
    }
    for (std::uint64_t j = 0; j < cols; ++j) {
        slice.col_values.push_back(space.axis(slice.col_axis).value(j));
    }
    const Surrogate model = campaign.surrogate();
    slice.p.reserve(rows * cols);
    for (std::uint64_t i = 0; i < rows; ++i) {
        pos[slice.row_axis] = i;
        for (std::uint64_t j = 0; j < cols; ++j) {
            pos[slice.col_axis] = j;
            slice.p.push_back(model.predict(space.index_of(pos)));
        }
    }
    return slice;
}

Campaign replay(const Campaign& campaign, Execution execution)
{
    CampaignSettings settings = campaign.settings();
    const int final_budget = settings.budget;
    Campaign out(campaign.space(), campaign.constraints().constraints(), settings);

    const auto observations = campaign.dataset().observations();
    std::size_t next = 0;
    const auto apply_until = [&](std::size_t size) {
        for (; next < size; ++next) {
            const auto& o = observations[next];
            switch (o.origin) {
            case Origin::seed_import: {
                const SeedRecord row{o.config.values, o.outcome};
                out.import_seed_data(std::span<const SeedRecord>(&row, 1), o.recorded_at);
                break;
            }
            case Origin::suggested: out.record(o.config.index, o.outcome, RecordMode::pending, o.recorded_at); break;
            case Origin::manual: out.record(o.config.index, o.outcome, RecordMode::manual, o.recorded_at); break;
            }
        }
    };

    for (const auto& event : campaign.history()) {
        apply_until(event.dataset_size);
        out.settings_.budget = event.budget;
        out.suggest(execution);
        if (out.history_.back() != event) {
            throw Error(ErrorKind::format,
                        "replay diverged at suggestion round " + std::to_string(event.round));
        }
        out.settings_.budget = final_budget;
    }
    apply_until(observations.size());
    out.settings_.budget = final_budget;
    out.state_version_ = campaign.state_version();
    return out;
}

}  // namespace beam
