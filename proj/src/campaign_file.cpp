#include "beam/campaign_file.hpp"

#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>

#include "beam/error.hpp"

namespace beam {

namespace {

[[noreturn]] void bad(const std::string& what)
{
    throw Error(ErrorKind::format, "malformed campaign file: " + what);
}

const Json& field(const Json& j, const char* key, const std::string& where)
{
    if (!j.is_object()) {
        bad(where + " is not an object");
    }
    const auto it = j.find(key);
    if (it == j.end()) {
        bad(where + " is missing '" + key + "'");
    }
    return *it;
}

template <class T>
T get(const Json& j, const char* key, const std::string& where)
{
    const Json& v = field(j, key, where);
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        bad(where + "." + key + " has the wrong type");
    }
}

const Json& array(const Json& j, const char* key, const std::string& where)
{
    const Json& v = field(j, key, where);
    if (!v.is_array()) {
        bad(where + "." + key + " is not an array");
    }
    return v;
}

// null stands for an unbounded side.
Json bound(double v)
{
    return std::isfinite(v) ? Json(v) : Json(nullptr);
}

double bound_from(const Json& j, const char* key, double unbounded, const std::string& where)
{
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return unbounded;
    }
    if (!it->is_number()) {
        bad(where + "." + key + " is not a number");
    }
    return it->get<double>();
}

Json values_json(const Configuration& config)
{
    Json v = Json::array();
    for (double x : config.values) {
        v.push_back(x);
    }
    return v;
}

Configuration configuration_from(const ParameterSpace& space, const Json& j, const std::string& where)
{
    const auto index = get<std::uint64_t>(j, "index", where);
    if (index >= space.cardinality()) {
        bad(where + ".index " + std::to_string(index) + " is outside the space");
    }
    const auto values = get<std::vector<double>>(j, "values", where);
    Configuration config = space.decode(index);
    if (values != config.values) {
        bad(where + ".values do not match grid index " + std::to_string(index));
    }
    return config;
}

Json suggestion_json(const PendingSuggestion& s)
{
    Json j;
    j["index"] = s.config.index;
    j["values"] = values_json(s.config);
    j["p"] = s.p;
    j["alpha"] = s.alpha;
    return j;
}

PendingSuggestion suggestion_from(const ParameterSpace& space, const Json& j, const std::string& where)
{
    return {configuration_from(space, j, where), get<double>(j, "p", where), get<double>(j, "alpha", where)};
}

}  // namespace

Json space_to_json(const ParameterSpace& space)
{
    Json axes = Json::array();
    for (const auto& a : space.axes()) {
        axes.push_back(Json{{"name", a.name()}, {"low", a.low()}, {"high", a.high()}, {"step", a.step()}});
    }
    Json context = Json::array();
    for (const auto& c : space.fixed_context()) {
        context.push_back(Json{{"name", c.name}, {"value", c.value}});
    }
    return Json{{"axes", axes}, {"fixed_context", context}};
}

ParameterSpace space_from_json(const Json& j)
{
    std::vector<AxisSpec> axes;
    const Json& list = array(j, "axes", "space");
    for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "space.axes[" + std::to_string(i) + "]";
        axes.emplace_back(get<std::string>(list[i], "name", where), get<double>(list[i], "low", where),
                          get<double>(list[i], "high", where), get<double>(list[i], "step", where));
    }
    std::vector<ContextEntry> context;
    if (j.contains("fixed_context")) {
        const Json& ctx = array(j, "fixed_context", "space");
        for (std::size_t i = 0; i < ctx.size(); ++i) {
            const std::string where = "space.fixed_context[" + std::to_string(i) + "]";
            context.push_back({get<std::string>(ctx[i], "name", where), get<double>(ctx[i], "value", where)});
        }
    }
    return ParameterSpace(std::move(axes), std::move(context));
}

Json constraint_to_json(const Constraint& constraint)
{
    return std::visit(
        [](const auto& c) -> Json {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, IntervalBound>) {
                return Json{{"type", "interval"}, {"axis", c.axis}, {"min", bound(c.min)}, {"max", bound(c.max)}};
            } else if constexpr (std::is_same_v<T, Exclusion>) {
                return Json{{"type", "exclusion"}, {"axis", c.axis}, {"values", c.values}};
            } else {
                return Json{{"type", "ratio"},
                            {"numerator", c.numerator},
                            {"denominator", c.denominator},
                            {"min", bound(c.min_ratio)},
                            {"max", bound(c.max_ratio)}};
            }
        },
        constraint);
}

Constraint constraint_from_json(const Json& j)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    const std::string where = "constraint";
    const auto type = get<std::string>(j, "type", where);
    if (type == "interval") {
        return IntervalBound{get<std::string>(j, "axis", where), bound_from(j, "min", -inf, where),
                             bound_from(j, "max", inf, where)};
    }
    if (type == "exclusion") {
        return Exclusion{get<std::string>(j, "axis", where), get<std::vector<double>>(j, "values", where)};
    }
    if (type == "ratio") {
        return PairRatio{get<std::string>(j, "numerator", where), get<std::string>(j, "denominator", where),
                         bound_from(j, "min", -inf, where), bound_from(j, "max", inf, where)};
    }
    bad("constraint type '" + type + "' is not one of interval, exclusion, ratio");
}

Json settings_to_json(const CampaignSettings& s)
{
    Json j;
    j["budget"] = s.budget;
    j["batch_size"] = s.batch_size;
    j["policy"] = std::string(to_string(s.policy));
    j["surrogate"] = Json{{"k", s.surrogate.k},
                          {"gamma", s.surrogate.gamma},
                          {"neighborhood", std::string(to_string(s.surrogate.neighborhood))}};
    j["pool"] = Json{{"cap", s.pool.cap}, {"enumeration_limit", s.pool.enumeration_limit}};
    j["seed"] = s.seed;
    return j;
}

CampaignSettings settings_from_json(const Json& j)
{
    const std::string where = "settings";
    CampaignSettings s;
    s.budget = get<int>(j, "budget", where);
    s.batch_size = get<int>(j, "batch_size", where);
    try {
        s.policy = policy_from_string(get<std::string>(j, "policy", where));
        const Json& sur = field(j, "surrogate", where);
        s.surrogate.k = get<int>(sur, "k", "settings.surrogate");
        s.surrogate.gamma = get<double>(sur, "gamma", "settings.surrogate");
        s.surrogate.neighborhood =
            neighborhood_from_string(get<std::string>(sur, "neighborhood", "settings.surrogate"));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::format) {
            throw;
        }
        bad(e.what());
    }
    const Json& pool = field(j, "pool", where);
    s.pool.cap = get<std::uint64_t>(pool, "cap", "settings.pool");
    s.pool.enumeration_limit = get<std::uint64_t>(pool, "enumeration_limit", "settings.pool");
    s.seed = get<std::uint64_t>(j, "seed", where);
    return s;
}

Json campaign_to_json(const Campaign& campaign)
{
    const ParameterSpace& space = campaign.space();
    Json doc;
    doc["format"] = campaign_format;
    doc["version"] = campaign_format_version;
    doc["space"] = space_to_json(space);
    Json constraints = Json::array();
    for (const auto& c : campaign.constraints().constraints()) {
        constraints.push_back(constraint_to_json(c));
    }
    doc["constraints"] = constraints;
    doc["settings"] = settings_to_json(campaign.settings());
    doc["state_version"] = campaign.state_version();
    doc["experiments_used"] = campaign.experiments_used();

    Json observations = Json::array();
    for (const auto& o : campaign.dataset().observations()) {
        Json j;
        j["index"] = o.config.index;
        j["values"] = values_json(o.config);
        j["outcome"] = o.outcome == Outcome::success ? 1 : 0;
        j["origin"] = std::string(to_string(o.origin));
        j["recorded_at"] = o.recorded_at;
        observations.push_back(std::move(j));
    }
    doc["observations"] = observations;

    Json pending = Json::array();
    for (const auto& s : campaign.pending()) {
        pending.push_back(suggestion_json(s));
    }
    doc["pending"] = pending;

    Json history = Json::array();
    for (const auto& e : campaign.history()) {
        Json j;
        j["round"] = e.round;
        j["experiments_used"] = e.experiments_used;
        j["dataset_size"] = e.dataset_size;
        j["budget"] = e.budget;
        Json batch = Json::array();
        for (const auto& s : e.batch) {
            batch.push_back(suggestion_json(s));
        }
        j["batch"] = batch;
        history.push_back(std::move(j));
    }
    doc["suggestions"] = history;
    return doc;
}

Campaign campaign_from_json(const Json& doc)
{
    if (!doc.is_object()) {
        bad("top level is not an object");
    }
    if (!doc.contains("format") || doc["format"] != campaign_format) {
        bad("format is not '" + std::string(campaign_format) + "'");
    }
    const auto version = get<int>(doc, "version", "file");
    if (version != campaign_format_version) {
        throw Error(ErrorKind::version, "campaign file version " + std::to_string(version) +
                                            " is not supported (this build reads version " +
                                            std::to_string(campaign_format_version) + "); migrate the file first");
    }
    try {
        ParameterSpace space = space_from_json(field(doc, "space", "file"));
        std::vector<Constraint> constraints;
        for (const auto& c : array(doc, "constraints", "file")) {
            constraints.push_back(constraint_from_json(c));
        }
        CampaignSettings settings = settings_from_json(field(doc, "settings", "file"));

        Dataset dataset;
        const Json& obs = array(doc, "observations", "file");
        for (std::size_t i = 0; i < obs.size(); ++i) {
            const std::string where = "observations[" + std::to_string(i) + "]";
            const auto outcome = get<int>(obs[i], "outcome", where);
            if (outcome != 0 && outcome != 1) {
                bad(where + ".outcome must be 0 or 1");
            }
            Observation o{configuration_from(space, obs[i], where),
                          outcome == 1 ? Outcome::success : Outcome::failure,
                          origin_from_string(get<std::string>(obs[i], "origin", where)),
                          get<std::string>(obs[i], "recorded_at", where)};
            dataset.append(std::move(o));
        }

        std::vector<PendingSuggestion> pending;
        const Json& pend = array(doc, "pending", "file");
        for (std::size_t i = 0; i < pend.size(); ++i) {
            pending.push_back(suggestion_from(space, pend[i], "pending[" + std::to_string(i) + "]"));
        }

        std::vector<SuggestionEvent> history;
        const Json& hist = array(doc, "suggestions", "file");
        for (std::size_t i = 0; i < hist.size(); ++i) {
            const std::string where = "suggestions[" + std::to_string(i) + "]";
            SuggestionEvent e{get<int>(hist[i], "round", where), get<int>(hist[i], "experiments_used", where),
                              get<std::size_t>(hist[i], "dataset_size", where), get<int>(hist[i], "budget", where),
                              {}};
            const Json& batch = array(hist[i], "batch", where);
            for (std::size_t b = 0; b < batch.size(); ++b) {
                e.batch.push_back(suggestion_from(space, batch[b], where + ".batch[" + std::to_string(b) + "]"));
            }
            history.push_back(std::move(e));
        }

        Campaign campaign = Campaign::restore(std::move(space), std::move(constraints), std::move(settings),
                                              std::move(dataset), std::move(pending), std::move(history),
                                              get<std::uint64_t>(doc, "state_version", "file"));
        const auto used = get<int>(doc, "experiments_used", "file");
        if (used != campaign.experiments_used()) {
            bad("experiments_used is " + std::to_string(used) + " but the observations account for " +
                std::to_string(campaign.experiments_used()));
        }
        return campaign;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::format || e.kind() == ErrorKind::version) {
            throw;
        }
        bad(e.what());
    }
}

void save_campaign(const Campaign& campaign, const std::filesystem::path& path)
{
    const std::string text = campaign_to_json(campaign).dump(2) + "\n";
    auto tmp = path;
    tmp += ".tmp-" + std::to_string(::getpid());
    {
        std::FILE* f = std::fopen(tmp.c_str(), "wb");
        if (f == nullptr) {
            throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "': " + std::strerror(errno));
        }
        const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() && std::fflush(f) == 0 &&
                        ::fsync(::fileno(f)) == 0;
        const int saved = errno;
        std::fclose(f);
        if (!ok) {
            std::filesystem::remove(tmp);
            throw Error(ErrorKind::io, "cannot write '" + tmp.string() + "': " + std::strerror(saved));
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorKind::io, "cannot replace '" + path.string() + "': " + ec.message());
    }
}

Campaign load_campaign(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::io, "cannot open campaign file '" + path.string() + "'");
    }
    Json doc;
    try {
        doc = Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::format, "campaign file '" + path.string() + "' is not valid JSON: " + e.what());
    }
    try {
        return campaign_from_json(doc);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

Json configuration_json(const ParameterSpace& space, const Configuration& config)
{
    Json values;
    for (std::size_t a = 0; a < space.dimensions(); ++a) {
        values[space.axis(a).name()] = config.values[a];
    }
    return Json{{"index", config.index}, {"values", values}};
}

Json metrics_json(const CampaignMetrics& m)
{
    Json trace = Json::array();
    for (const auto& t : m.trace) {
        trace.push_back(Json{{"index", t.config.index},
                             {"outcome", t.outcome == Outcome::success ? 1 : 0},
                             {"origin", std::string(to_string(t.origin))},
                             {"p_at_suggestion", t.p_at_suggestion ? Json(*t.p_at_suggestion) : Json(nullptr)},
                             {"discoveries", t.discoveries}});
    }
    Json j;
    j["discovery_rate"] = m.discovery_rate;
    j["experiments_used"] = m.experiments_used;
    j["budget"] = m.budget;
    j["space_size"] = m.space_size;
    j["fraction_explored"] = m.fraction_explored;
    j["manual_experiments"] = m.manual_experiments;
    j["manual_discoveries"] = m.manual_discoveries;
    j["trace"] = trace;
    return j;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace beam
