#include "cli.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "beam/campaign.hpp"
#include "beam/campaign_file.hpp"
#include "beam/error.hpp"
#include "beam/rng.hpp"
#include "beam/service.hpp"
#include "beam/simulator.hpp"

namespace beam::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string campaign;
    std::string format = "plain";

    // init
    std::string preset;
    double laser_power = 600;
    std::vector<std::string> axes;
    std::vector<std::string> context;
    std::vector<std::string> constraints;
    int budget = 10;
    int batch = 2;
    std::uint64_t seed = 0;
    std::string policy = "nonmyopic";
    std::string neighborhood = "space";
    int k = 5;
    double gamma = 0.05;
    std::uint64_t pool_cap = 100'000;
    bool force = false;

    // import
    std::string table;

    // record
    std::int64_t index = -1;
    std::vector<std::string> set;
    std::vector<double> values;
    std::string outcome;
    bool manual = false;

    // slice
    std::string rows;
    std::string cols;
    std::vector<std::string> at;

    // simulate / bench
    std::vector<std::string> oracles{"clustered"};
    double fraction = 0.005;
    int clusters = 3;
    std::vector<std::string> strategies{"nonmyopic", "greedy", "random"};
    int repetitions = 20;
    int seed_failures = 0;
    std::string out_dir;

    // serve
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;

    // extend
    int by = 10;
    bool yes = false;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::io: return io;
    case ErrorKind::budget_exhausted: return budget_exhausted;
    case ErrorKind::over_constrained: return over_constrained;
    case ErrorKind::format:
    case ErrorKind::version: return file_format;
    case ErrorKind::conflict: return conflict;
    default: return invalid_input;
    }
}

bool machine(const Options& o)
{
    return o.format == "machine";
}

std::string num(double v, int precision = 10)
{
    std::ostringstream s;
    s << std::setprecision(precision) << v;
    return s.str();
}

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(text);
    while (std::getline(in, part, sep)) {
        parts.push_back(part);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

double to_double(const std::string& text, const std::string& what)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw Error(ErrorKind::invalid_argument, what + " '" + text + "' is not a number");
    }
    return v;
}

std::pair<std::string, double> assignment(const std::string& text)
{
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw Error(ErrorKind::invalid_argument, "expected name=value, got '" + text + "'");
    }
    return {text.substr(0, eq), to_double(text.substr(eq + 1), "value for '" + text.substr(0, eq) + "'")};
}

/// Left-aligned columns separated by two spaces.
class Table {
public:
    void row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

    void print(std::ostream& out, const std::string& indent = "") const
    {
        std::vector<std::size_t> width;
        for (const auto& r : rows_) {
            width.resize(std::max(width.size(), r.size()), 0);
            for (std::size_t c = 0; c < r.size(); ++c) {
                width[c] = std::max(width[c], r[c].size());
            }
        }
        for (const auto& r : rows_) {
            std::string line = indent;
            for (std::size_t c = 0; c < r.size(); ++c) {
                line += r[c];
                if (c + 1 < r.size()) {
                    line += std::string(width[c] - r[c].size() + 2, ' ');
                }
            }
            out << line << '\n';
        }
    }

private:
    std::vector<std::vector<std::string>> rows_;
};

fs::path campaign_path(const Options& o)
{
    if (!o.campaign.empty()) {
        return o.campaign;
    }
    if (const char* env = std::getenv("BEAM_CAMPAIGN"); env != nullptr && *env != '\0') {
        return env;
    }
    throw UsageError("no campaign file: pass --campaign or set BEAM_CAMPAIGN");
}

AxisSpec parse_axis(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 4) {
        throw Error(ErrorKind::invalid_argument, "axis '" + text + "' is not name:low:high:step");
    }
    return AxisSpec(parts[0], to_double(parts[1], "axis low"), to_double(parts[2], "axis high"),
                    to_double(parts[3], "axis step"));
}

Constraint parse_constraint(const std::string& text)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const auto parts = split(text, ':');
    const auto bound = [&](const std::string& s, double unbounded) {
        return s.empty() ? unbounded : to_double(s, "constraint bound");
    };
    if (parts.size() == 4 && parts[0] == "interval") {
        return IntervalBound{parts[1], bound(parts[2], -inf), bound(parts[3], inf)};
    }
    if (parts.size() == 3 && parts[0] == "exclude") {
        Exclusion e{parts[1], {}};
        for (const auto& v : split(parts[2], ',')) {
            e.values.push_back(to_double(v, "excluded value"));
        }
        return e;
    }
    if (parts.size() == 5 && parts[0] == "ratio") {
        return PairRatio{parts[1], parts[2], bound(parts[3], -inf), bound(parts[4], inf)};
    }
    throw Error(ErrorKind::invalid_argument,
                "constraint '" + text +
                    "' is not interval:AXIS:MIN:MAX, exclude:AXIS:V1,V2,... or ratio:NUM:DEN:MIN:MAX");
}

ParameterSpace space_from(const Options& o)
{
    if (!o.preset.empty()) {
        if (o.preset != "ded") {
            throw Error(ErrorKind::invalid_argument, "unknown preset '" + o.preset + "' (known: ded)");
        }
        if (!o.axes.empty()) {
            throw Error(ErrorKind::invalid_argument, "--preset and --axis are mutually exclusive");
        }
        return ded_process_space(o.laser_power);
    }
    if (o.axes.empty()) {
        throw Error(ErrorKind::invalid_argument, "define the space with --preset ded or one --axis per parameter");
    }
    std::vector<AxisSpec> axes;
    for (const auto& a : o.axes) {
        axes.push_back(parse_axis(a));
    }
    std::vector<ContextEntry> context;
    for (const auto& c : o.context) {
        const auto [name, value] = assignment(c);
        context.push_back({name, value});
    }
    return ParameterSpace(std::move(axes), std::move(context));
}

CampaignSettings settings_from(const Options& o)
{
    CampaignSettings s;
    s.budget = o.budget;
    s.batch_size = o.batch;
    s.policy = policy_from_string(o.policy);
    s.surrogate.k = o.k;
    s.surrogate.gamma = o.gamma;
    s.surrogate.neighborhood = neighborhood_from_string(o.neighborhood);
    s.pool.cap = o.pool_cap;
    s.seed = o.seed;
    return s;
}

Json suggestion_json(const ParameterSpace& space, const PendingSuggestion& s)
{
    Json j = configuration_json(space, s.config);
    j["p"] = s.p;
    j["alpha"] = s.alpha;
    return j;
}

int cmd_init(const Options& o, std::ostream& out)
{
    const fs::path path = campaign_path(o);
    if (fs::exists(path) && !o.force) {
        throw Error(ErrorKind::conflict, "'" + path.string() + "' already exists; pass --force to overwrite it");
    }
    std::vector<Constraint> constraints;
    for (const auto& c : o.constraints) {
        constraints.push_back(parse_constraint(c));
    }
    const Campaign campaign(space_from(o), std::move(constraints), settings_from(o));
    save_campaign(campaign, path);
    if (machine(o)) {
        out << Json{{"campaign", path.string()},
                    {"space_size", campaign.space().cardinality()},
                    {"budget", campaign.settings().budget},
                    {"state_version", campaign.state_version()}}
                   .dump()
            << '\n';
    } else {
        out << "Created " << path.string() << ": " << campaign.space().dimensions() << " axes, "
            << campaign.space().cardinality() << " configurations, budget " << campaign.settings().budget << '\n';
    }
    return ok;
}

int cmd_import(const Options& o, std::ostream& out)
{
    const fs::path path = campaign_path(o);
    Campaign campaign = load_campaign(path);
    std::ifstream in(o.table);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open seed table '" + o.table + "'");
    }
    const auto records = parse_seed_table(in, campaign.space());
    campaign.import_seed_data(records, utc_timestamp());
    save_campaign(campaign, path);
    if (machine(o)) {
        out << Json{{"imported", records.size()},
                    {"observations", campaign.dataset().size()},
                    {"state_version", campaign.state_version()}}
                   .dump()
            << '\n';
    } else {
        out << "Imported " << records.size() << " seed observation(s); dataset now holds "
            << campaign.dataset().size() << ", budget untouched (" << campaign.experiments_used() << " of "
            << campaign.settings().budget << " used)\n";
    }
    return ok;
}

void print_batch(const Campaign& c, std::ostream& out)
{
    const ParameterSpace& space = c.space();
    Table t;
    std::vector<std::string> header{"#", "index"};
    for (const auto& e : space.fixed_context()) {
        header.push_back(e.name);
    }
    for (const auto& a : space.axes()) {
        header.push_back(a.name());
    }
    header.insert(header.end(), {"p", "alpha"});
    t.row(header);
    for (std::size_t i = 0; i < c.pending().size(); ++i) {
        const auto& s = c.pending()[i];
        std::vector<std::string> row{std::to_string(i + 1), std::to_string(s.config.index)};
        for (const auto& e : space.fixed_context()) {
            row.push_back(num(e.value));
        }
        for (double v : s.config.values) {
            row.push_back(num(v));
        }
        row.push_back(num(s.p, 6));
        row.push_back(num(s.alpha, 6));
        t.row(row);
    }
    t.print(out, "  ");
}

int cmd_suggest(const Options& o, std::ostream& out)
{
    const fs::path path = campaign_path(o);
    Campaign campaign = load_campaign(path);
    const auto before = campaign.state_version();
    campaign.suggest();
    if (campaign.state_version() != before) {
        save_campaign(campaign, path);
    }
    const auto& event = campaign.history().back();
    if (machine(o)) {
        Json pending = Json::array();
        for (const auto& s : campaign.pending()) {
            pending.push_back(suggestion_json(campaign.space(), s));
        }
        out << Json{{"round", event.round}, {"state_version", campaign.state_version()}, {"pending", pending}}.dump()
            << '\n';
    } else {
        out << "Suggested batch (round " << event.round + 1 << ", " << campaign.pending().size() << " pending, "
            << campaign.experiments_used() << " of " << campaign.settings().budget << " experiments used)\n";
        print_batch(campaign, out);
    }
    return ok;
}

Outcome parse_outcome(const std::string& text)
{
    if (text == "1" || text == "success") {
        return Outcome::success;
    }
    if (text == "0" || text == "failure") {
        return Outcome::failure;
    }
    throw Error(ErrorKind::invalid_argument, "outcome '" + text + "' must be 0, 1, success or failure");
}

int cmd_record(const Options& o, std::ostream& out)
{
    const fs::path path = campaign_path(o);
    Campaign campaign = load_campaign(path);
    const ParameterSpace& space = campaign.space();
    const int given = (o.index >= 0 ? 1 : 0) + (o.set.empty() ? 0 : 1) + (o.values.empty() ? 0 : 1);
    if (given != 1) {
        throw UsageError("identify the experiment with exactly one of --index, --set or --values");
    }
    GridIndex index = 0;
    if (o.index >= 0) {
        index = static_cast<GridIndex>(o.index);
    } else {
        std::vector<double> values = o.values;
        if (!o.set.empty()) {
            values.assign(space.dimensions(), 0);
            std::vector<bool> seen(space.dimensions(), false);
            for (const auto& s : o.set) {
                const auto [name, value] = assignment(s);
                const std::size_t a = space.axis_position(name);
                values[a] = value;
                seen[a] = true;
            }
            for (std::size_t a = 0; a < space.dimensions(); ++a) {
                if (!seen[a]) {
                    throw Error(ErrorKind::invalid_argument, "--set is missing axis '" + space.axis(a).name() + "'");
                }
            }
        }
        if (values.size() != space.dimensions()) {
            throw Error(ErrorKind::invalid_argument, "--values needs " + std::to_string(space.dimensions()) +
                                                         " numbers in axis order");
        }
        index = space.encode(values).index;
    }
    const Outcome outcome = parse_outcome(o.outcome);
    campaign.record(index, outcome, o.manual ? RecordMode::manual : RecordMode::pending, utc_timestamp());
    save_campaign(campaign, path);
    const auto& obs = campaign.dataset()[campaign.dataset().size() - 1];
    if (machine(o)) {
        Json j = configuration_json(space, obs.config);
        j["outcome"] = outcome == Outcome::success ? 1 : 0;
        j["origin"] = std::string(to_string(obs.origin));
        j["experiments_used"] = campaign.experiments_used();
        j["remaining_budget"] = campaign.remaining_budget();
        j["pending_count"] = campaign.pending().size();
        j["state_version"] = campaign.state_version();
        out << j.dump() << '\n';
    } else {
        out << "Recorded " << (outcome == Outcome::success ? "success" : "failure") << " for configuration "
            << obs.config.index << " (" << to_string(obs.origin) << "); " << campaign.experiments_used() << " of "
            << campaign.settings().budget << " experiments used, " << campaign.pending().size() << " pending\n";
    }
    return ok;
}

int cmd_status(const Options& o, std::ostream& out)
{
    const Campaign campaign = load_campaign(campaign_path(o));
    const CampaignMetrics m = campaign.metrics();
    const std::size_t seeds = campaign.dataset().count(Origin::seed_import);
    if (machine(o)) {
        Json j;
        j["space_size"] = m.space_size;
        j["budget"] = m.budget;
        j["experiments_used"] = m.experiments_used;
        j["discovery_rate"] = m.discovery_rate;
        j["fraction_explored"] = m.fraction_explored;
        j["manual_experiments"] = m.manual_experiments;
        j["manual_discoveries"] = m.manual_discoveries;
        j["observations"] = campaign.dataset().size();
        j["seed_observations"] = seeds;
        j["discovered_total"] = campaign.dataset().successes();
        j["pending"] = campaign.pending().size();
        j["policy"] = std::string(to_string(campaign.settings().policy));
        j["state_version"] = campaign.state_version();
        out << j.dump() << '\n';
        return ok;
    }
    Table t;
    t.row({"Budget", std::to_string(m.budget)});
    t.row({"Experiments used", std::to_string(m.experiments_used)});
    t.row({"Discovery rate", std::to_string(m.discovery_rate)});
    t.row({"Space size", std::to_string(m.space_size)});
    t.row({"Fraction of explored space", num(m.fraction_explored, 3)});
    t.row({"Observations", std::to_string(campaign.dataset().size()) + " (" + std::to_string(seeds) + " seed, " +
                               std::to_string(m.manual_experiments) + " manual)"});
    t.row({"Pending", std::to_string(campaign.pending().size())});
    t.row({"Policy", std::string(to_string(campaign.settings().policy))});
    t.print(out);
    const auto found = campaign.discovered();
    if (!found.empty()) {
        out << "Feasible configurations:\n";
        Table f;
        std::vector<std::string> header{"index"};
        for (const auto& a : campaign.space().axes()) {
            header.push_back(a.name());
        }
        f.row(header);
        for (const auto& c : found) {
            std::vector<std::string> row{std::to_string(c.index)};
            for (double v : c.values) {
                row.push_back(num(v));
            }
            f.row(row);
        }
        f.print(out, "  ");
    }
    return ok;
}

int cmd_slice(const Options& o, std::ostream& out)
{
    const Campaign campaign = load_campaign(campaign_path(o));
    std::map<std::string, double> pins;
    for (const auto& a : o.at) {
        pins.insert(assignment(a));
    }
    const PosteriorSlice slice = posterior_slice(campaign, o.rows, o.cols, pins);
    if (machine(o)) {
        out << slice_json(campaign.space(), slice, campaign.state_version()).dump() << '\n';
        return ok;
    }
    const ParameterSpace& space = campaign.space();
    out << "p(feasible) with rows " << space.axis(slice.row_axis).name() << ", columns "
        << space.axis(slice.col_axis).name();
    for (const auto& e : slice.pinned) {
        out << ", " << e.name << "=" << num(e.value);
    }
    out << '\n';
    Table t;
    std::vector<std::string> header{""};
    for (double v : slice.col_values) {
        header.push_back(num(v));
    }
    t.row(header);
    for (std::size_t i = 0; i < slice.row_values.size(); ++i) {
        std::vector<std::string> row{num(slice.row_values[i])};
        for (std::size_t j = 0; j < slice.col_values.size(); ++j) {
            row.push_back(num(slice.p[i * slice.col_values.size() + j], 4));
        }
        t.row(row);
    }
    t.print(out);
    return ok;
}

ParameterSpace sim_space(const Options& o)
{
    if (o.axes.empty()) {
        return ParameterSpace({AxisSpec("x", 0, 99, 1), AxisSpec("y", 0, 99, 1)});
    }
    return space_from(o);
}

int cmd_simulate(const Options& o, std::ostream& out)
{
    const ParameterSpace space = sim_space(o);
    if (o.oracles.size() != 1 || o.strategies.size() != 1) {
        throw UsageError("simulate takes exactly one --oracle and one --strategy");
    }
    const SyntheticOracle oracle(space, OracleSpec{oracle_kind_from_string(o.oracles[0]), o.fraction, o.clusters,
                                                   derive_seed(o.seed, 0x0AC1E)});
    SimulationSettings sim;
    sim.policy = policy_from_string(o.strategies[0]);
    sim.budget = o.budget;
    sim.batch_size = o.batch;
    sim.surrogate.k = o.k;
    sim.surrogate.gamma = o.gamma;
    sim.surrogate.neighborhood = neighborhood_from_string(o.neighborhood);
    sim.pool.cap = o.pool_cap;
    sim.seed = o.seed;
    sim.seed_failures = o.seed_failures;
    sim.execution = Execution::parallel;
    const SimulationTrace trace = run_simulated_campaign(space, {}, oracle, sim);
    if (machine(o)) {
        out << Json{{"space_size", space.cardinality()},
                    {"realized_fraction", oracle.realized_fraction()},
                    {"discoveries", trace.discoveries},
                    {"experiments", trace.experiments},
                    {"cumulative", trace.cumulative}}
                   .dump()
            << '\n';
        return ok;
    }
    out << "Simulated " << to_string(sim.policy) << " on a " << to_string(oracle.spec().kind) << " oracle ("
        << space.cardinality() << " points, " << num(oracle.realized_fraction(), 4) << " feasible)\n";
    Table t;
    t.row({"experiment", "index", "outcome", "discoveries"});
    for (std::size_t e = 0; e < trace.experiments.size(); ++e) {
        const bool hit = e == 0 ? trace.cumulative[0] > 0 : trace.cumulative[e] > trace.cumulative[e - 1];
        t.row({std::to_string(e + 1), std::to_string(trace.experiments[e]), hit ? "1" : "0",
               std::to_string(trace.cumulative[e])});
    }
    t.print(out, "  ");
    out << "Discoveries: " << trace.discoveries << " in " << trace.experiments.size() << " experiments\n";
    return ok;
}

int cmd_bench(const Options& o, std::ostream& out)
{
    BenchConfig config;
    config.space = sim_space(o);
    for (std::size_t i = 0; i < o.oracles.size(); ++i) {
        config.oracles.push_back(
            OracleSpec{oracle_kind_from_string(o.oracles[i]), o.fraction, o.clusters, derive_seed(o.seed, 0x0AC1E + i)});
    }
    config.strategies.clear();
    for (const auto& s : o.strategies) {
        config.strategies.push_back(policy_from_string(s));
    }
    config.budget = o.budget;
    config.batch_size = o.batch;
    config.repetitions = o.repetitions;
    config.seed_failures = o.seed_failures;
    config.surrogate.k = o.k;
    config.surrogate.gamma = o.gamma;
    config.surrogate.neighborhood = neighborhood_from_string(o.neighborhood);
    config.pool.cap = o.pool_cap;
    config.seed = o.seed;
    const BenchReport report = run_bench(config);

    if (!o.out_dir.empty()) {
        const fs::path dir(o.out_dir);
        std::error_code ec;
        fs::create_directories(dir, ec);
        const auto write = [&](const char* name, auto&& emit) {
            std::ofstream f(dir / name);
            if (!f) {
                throw Error(ErrorKind::io, "cannot write '" + (dir / name).string() + "'");
            }
            emit(f);
        };
        write("runs.csv", [&](std::ostream& f) { write_runs_csv(report, f); });
        write("curves.csv", [&](std::ostream& f) { write_curves_csv(report, f); });
        write("report.json", [&](std::ostream& f) { f << bench_json(report).dump(2) << '\n'; });
    }
    if (machine(o)) {
        out << bench_json(report)["aggregates"].dump() << '\n';
        return ok;
    }
    out << "Bench: " << config.space.cardinality() << " points, T=" << config.budget << ", B=" << config.batch_size
        << ", " << config.repetitions << " paired seeds\n";
    Table t;
    t.row({"oracle", "strategy", "runs", "mean", "stddev", "min", "max"});
    for (const auto& a : report.aggregates) {
        t.row({std::to_string(a.oracle) + ":" + std::string(to_string(a.oracle_kind)),
               std::string(to_string(a.strategy)), std::to_string(a.runs), num(a.mean, 4), num(a.stddev, 4),
               std::to_string(a.min), std::to_string(a.max)});
    }
    t.print(out, "  ");
    return ok;
}

HttpServer* active_server = nullptr;

extern "C" void on_signal(int)
{
    if (active_server != nullptr) {
        active_server->stop();
    }
}

int cmd_serve(const Options& o, std::ostream& out)
{
    CampaignService service(campaign_path(o));
    HttpServer server(service, ServeOptions{o.host, o.port, o.static_dir});
    const int port = server.bind();
    if (machine(o)) {
        out << Json{{"host", o.host}, {"port", port}}.dump() << std::endl;
    } else {
        out << "Serving " << service.path().string() << " on http://" << o.host << ":" << port << std::endl;
    }
    active_server = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    server.listen();
    active_server = nullptr;
    return ok;
}

int cmd_extend(const Options& o, std::ostream& out)
{
    if (!o.yes) {
        throw UsageError("extending the budget commits more experiments; confirm with --yes");
    }
    const fs::path path = campaign_path(o);
    Campaign campaign = load_campaign(path);
    campaign.extend_budget(o.by);
    save_campaign(campaign, path);
    if (machine(o)) {
        out << Json{{"budget", campaign.settings().budget},
                    {"remaining_budget", campaign.remaining_budget()},
                    {"state_version", campaign.state_version()}}
                   .dump()
            << '\n';
    } else {
        out << "Budget extended by " << o.by << " to " << campaign.settings().budget << " ("
            << campaign.remaining_budget() << " remaining)\n";
    }
    return ok;
}

void report_error(const Options& o, std::ostream& err, std::string_view kind, const std::string& message, int code)
{
    if (machine(o)) {
        err << Json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
    } else {
        err << "error: " << message << '\n';
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    Options o;
    CLI::App app{"Budget-aware active search over discrete process-parameter grids", "beam"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("-c,--campaign", o.campaign, "Campaign file (default: $BEAM_CAMPAIGN)");
    app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"plain", "machine"}));

    const auto add_model = [&](CLI::App* c) {
        c->add_option("--budget", o.budget, "Experiment budget T")->check(CLI::NonNegativeNumber);
        c->add_option("--batch", o.batch, "Batch size B")->check(CLI::PositiveNumber);
        c->add_option("--seed", o.seed, "Random seed");
        c->add_option("--neighborhood", o.neighborhood, "k-NN neighborhood: space or observed");
        c->add_option("--k", o.k, "Neighbors in the surrogate");
        c->add_option("--gamma", o.gamma, "Pseudo-count prior");
        c->add_option("--pool-cap", o.pool_cap, "Candidates scored per round");
    };
    const auto add_axes = [&](CLI::App* c) {
        c->add_option("--axis", o.axes, "Axis as name:low:high:step (repeatable)");
        c->add_option("--context", o.context, "Fixed context as name=value (repeatable)");
    };

    auto* init = app.add_subcommand("init", "Create a campaign file");
    init->add_option("--preset", o.preset, "Built-in space: ded");
    init->add_option("--laser-power", o.laser_power, "Laser power context for the ded preset (W)");
    add_axes(init);
    init->add_option("--constraint", o.constraints, "interval:A:MIN:MAX, exclude:A:V1,V2 or ratio:A:B:MIN:MAX");
    init->add_option("--policy", o.policy, "nonmyopic (alias beam), greedy or random");
    init->add_flag("--force", o.force, "Overwrite an existing file");
    add_model(init);

    auto* import = app.add_subcommand("import", "Import seed observations (budget-free)");
    import->add_option("table", o.table, "Delimited file: axis columns plus outcome")->required();

    auto* suggest = app.add_subcommand("suggest", "Suggest the next batch (repeats the pending one)");

    auto* record = app.add_subcommand("record", "Record an experiment outcome");
    record->add_option("--index", o.index, "Grid index of the configuration")->check(CLI::NonNegativeNumber);
    record->add_option("--set", o.set, "Axis value as name=value (repeatable)");
    record->add_option("--values", o.values, "All axis values in axis order")->delimiter(',');
    record->add_option("--outcome", o.outcome, "0|1|failure|success")->required();
    record->add_flag("--manual", o.manual, "Experiment chosen outside the suggestions (consumes budget)");

    auto* status = app.add_subcommand("status", "Campaign summary and metrics");

    auto* slice = app.add_subcommand("slice", "Posterior over two axes, the rest pinned");
    slice->add_option("--rows", o.rows, "Row axis")->required();
    slice->add_option("--cols", o.cols, "Column axis")->required();
    slice->add_option("--at", o.at, "Pinned axis as name=value (repeatable)");

    const auto add_sim = [&](CLI::App* c) {
        add_axes(c);
        add_model(c);
        c->add_option("--oracle", o.oracles, "clustered, scattered or shell");
        c->add_option("--fraction", o.fraction, "Feasible fraction in (0, 0.05]");
        c->add_option("--clusters", o.clusters, "Clusters for the clustered oracle");
        c->add_option("--strategy", o.strategies, "nonmyopic (alias beam), greedy or random");
        c->add_option("--seed-failures", o.seed_failures, "Infeasible points imported before the first round");
    };
    auto* simulate = app.add_subcommand("simulate", "Run one campaign against a synthetic oracle");
    add_sim(simulate);
    auto* bench = app.add_subcommand("bench", "Compare strategies over paired seeds");
    add_sim(bench);
    bench->add_option("--reps", o.repetitions, "Repetitions per oracle and strategy")->check(CLI::PositiveNumber);
    bench->add_option("--out-dir", o.out_dir, "Write runs.csv, curves.csv and report.json here");

    auto* serve = app.add_subcommand("serve", "Serve the campaign over HTTP");
    serve->add_option("--host", o.host, "Bind address");
    serve->add_option("--port", o.port, "Port (0 picks a free one)");
    serve->add_option("--static", o.static_dir, "Directory served at /");

    auto* extend = app.add_subcommand("extend", "Extend the experiment budget");
    extend->add_option("--by", o.by, "Additional experiments")->check(CLI::PositiveNumber);
    extend->add_flag("--yes", o.yes, "Confirm the extension");

    // simulate and bench default to the desk-scale instance.
    simulate->preparse_callback([&](std::size_t) {
        o.budget = 50;
        o.strategies = {"nonmyopic"};
    });
    bench->preparse_callback([&](std::size_t) { o.budget = 50; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(o, err, "usage", e.what(), usage);
        return usage;
    }

    try {
        if (init->parsed()) {
            return cmd_init(o, out);
        }
        if (import->parsed()) {
            return cmd_import(o, out);
        }
        if (suggest->parsed()) {
            return cmd_suggest(o, out);
        }
        if (record->parsed()) {
            return cmd_record(o, out);
        }
        if (status->parsed()) {
            return cmd_status(o, out);
        }
        if (slice->parsed()) {
            return cmd_slice(o, out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(o, out);
        }
        if (bench->parsed()) {
            return cmd_bench(o, out);
        }
        if (serve->parsed()) {
            return cmd_serve(o, out);
        }
        if (extend->parsed()) {
            return cmd_extend(o, out);
        }
    } catch (const UsageError& e) {
        report_error(o, err, "usage", e.what(), usage);
        return usage;
    } catch (const Error& e) {
        const int code = exit_code(e.kind());
        report_error(o, err, to_string(e.kind()), e.what(), code);
        return code;
    } catch (const std::exception& e) {
        report_error(o, err, "internal", e.what(), internal);
        return internal;
    }
    return usage;
}

}  // namespace beam::cli
