#include "beam/service.hpp"

#include <httplib.h>

#include <mutex>
#include <sstream>

#include "beam/error.hpp"

namespace beam {

namespace {

ApiResponse error_response(int status, std::string_view kind, const std::string& message)
{
    return {status, Json{{"error", kind}, {"message", message}}};
}

ApiResponse error_response(const Error& e)
{
    return error_response(http_status(e.kind()), to_string(e.kind()), e.what());
}

Json parse_body(const std::string& body)
{
    if (body.empty()) {
        return Json::object();
    }
    Json j;
    try {
        j = Json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::invalid_argument, std::string("request body is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
        throw Error(ErrorKind::invalid_argument, "request body must be a JSON object");
    }
    return j;
}

Json suggestion_json(const ParameterSpace& space, const PendingSuggestion& s)
{
    Json j = configuration_json(space, s.config);
    j["p"] = s.p;
    j["alpha"] = s.alpha;
    return j;
}

Json observation_json(const ParameterSpace& space, const Observation& o)
{
    Json j = configuration_json(space, o.config);
    j["outcome"] = o.outcome == Outcome::success ? 1 : 0;
    j["origin"] = std::string(to_string(o.origin));
    j["recorded_at"] = o.recorded_at;
    return j;
}

Json pending_json(const Campaign& c)
{
    Json list = Json::array();
    for (const auto& s : c.pending()) {
        list.push_back(suggestion_json(c.space(), s));
    }
    return Json{{"state_version", c.state_version()}, {"complete", c.complete() && c.pending().empty()},
                {"pending", list}};
}

// Accepts {"axis": value, ...} naming every axis, or an array in axis order.
std::vector<double> values_from(const ParameterSpace& space, const Json& j)
{
    std::vector<double> values(space.dimensions());
    if (j.is_array()) {
        if (j.size() != space.dimensions()) {
            throw Error(ErrorKind::invalid_argument, "values has " + std::to_string(j.size()) + " entries, the space has " +
                                                         std::to_string(space.dimensions()) + " axes");
        }
        for (std::size_t a = 0; a < j.size(); ++a) {
            if (!j[a].is_number()) {
                throw Error(ErrorKind::invalid_argument, "values[" + std::to_string(a) + "] is not a number");
            }
            values[a] = j[a].get<double>();
        }
        return values;
    }
    if (!j.is_object()) {
        throw Error(ErrorKind::invalid_argument, "values must be an object keyed by axis name or an array");
    }
    for (const auto& [name, v] : j.items()) {
        const std::size_t a = space.axis_position(name);
        if (!v.is_number()) {
            throw Error(ErrorKind::invalid_argument, "value for axis '" + name + "' is not a number");
        }
        values[a] = v.get<double>();
    }
    if (j.size() != space.dimensions()) {
        throw Error(ErrorKind::invalid_argument, "values must name all " + std::to_string(space.dimensions()) + " axes");
    }
    return values;
}

Outcome outcome_from(const Json& j)
{
    if (j.is_boolean()) {
        return j.get<bool>() ? Outcome::success : Outcome::failure;
    }
    if (j.is_number_integer() && (j.get<int>() == 0 || j.get<int>() == 1)) {
        return j.get<int>() == 1 ? Outcome::success : Outcome::failure;
    }
    throw Error(ErrorKind::invalid_argument, "outcome must be 0 or 1");
}

}  // namespace

Json slice_json(const ParameterSpace& space, const PosteriorSlice& slice, std::uint64_t state_version)
{
    Json fixed = Json::object();
    for (const auto& e : slice.pinned) {
        fixed[e.name] = e.value;
    }
    Json matrix = Json::array();
    const std::size_t cols = slice.col_values.size();
    for (std::size_t i = 0; i < slice.row_values.size(); ++i) {
        matrix.push_back(std::vector<double>(slice.p.begin() + static_cast<std::ptrdiff_t>(i * cols),
                                             slice.p.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols)));
    }
    Json body;
    body["state_version"] = state_version;
    body["row_axis"] = space.axis(slice.row_axis).name();
    body["col_axis"] = space.axis(slice.col_axis).name();
    body["row_values"] = slice.row_values;
    body["col_values"] = slice.col_values;
    body["fixed"] = fixed;
    body["p"] = matrix;
    return body;
}

int http_status(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::budget_exhausted:
    case ErrorKind::conflict: return 409;
    case ErrorKind::io:
    case ErrorKind::format:
    case ErrorKind::version: return 500;
    default: return 422;
    }
}

CampaignService::CampaignService(std::filesystem::path campaign_path, Execution execution)
    : path_(std::move(campaign_path)), execution_(execution), campaign_(load_campaign(path_))
{
}

Campaign CampaignService::snapshot() const
{
    std::shared_lock lock(mutex_);
    return campaign_;
}

ApiResponse CampaignService::get_status() const
{
    std::shared_lock lock(mutex_);
    const Campaign& c = campaign_;
    Json axes = Json::array();
    for (const auto& a : c.space().axes()) {
        axes.push_back(Json{{"name", a.name()},
                            {"low", a.low()},
                            {"high", a.high()},
                            {"step", a.step()},
                            {"cardinality", a.cardinality()}});
    }
    Json context = Json::object();
    for (const auto& e : c.space().fixed_context()) {
        context[e.name] = e.value;
    }
    Json observations = Json::array();
    for (const auto& o : c.dataset().observations()) {
        observations.push_back(observation_json(c.space(), o));
    }
    Json body;
    body["state_version"] = c.state_version();
    body["space"] = Json{{"axes", axes}, {"fixed_context", context}, {"size", c.space().cardinality()}};
    body["settings"] = settings_to_json(c.settings());
    body["metrics"] = metrics_json(c.metrics());
    body["remaining_budget"] = c.remaining_budget();
    body["pending_count"] = c.pending().size();
    body["complete"] = c.complete() && c.pending().empty();
    body["observations"] = observations;
    return {200, body};
}

ApiResponse CampaignService::get_suggestions() const
{
    std::shared_lock lock(mutex_);
    return {200, pending_json(campaign_)};
}

ApiResponse CampaignService::get_posterior_slice(const std::map<std::string, std::string>& query) const
{
    std::shared_lock lock(mutex_);
    const Campaign& c = campaign_;
    const ParameterSpace& space = c.space();
    try {
        const auto need = [&](const char* key) {
            const auto it = query.find(key);
            if (it == query.end() || it->second.empty()) {
                throw Error(ErrorKind::invalid_argument, std::string("missing query parameter '") + key + "'");
            }
            return it->second;
        };
        std::map<std::string, double> pins;
        for (const auto& [key, text] : query) {
            if (key == "row_axis" || key == "col_axis") {
                continue;
            }
            std::size_t used = 0;
            double v = 0;
            try {
                v = std::stod(text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != text.size()) {
                throw Error(ErrorKind::invalid_argument, "value '" + text + "' for axis '" + key + "' is not a number");
            }
            pins[key] = v;
        }
        const PosteriorSlice slice = posterior_slice(c, need("row_axis"), need("col_axis"), pins);
        return {200, slice_json(space, slice, c.state_version())};
    } catch (const Error& e) {
        return error_response(e);
    }
}

template <class F>
ApiResponse CampaignService::mutate(const std::string& body, F&& apply)
{
    std::unique_lock lock(mutex_);
    try {
        const Json request = parse_body(body);
        if (request.contains("state_version")) {
            const Json& v = request["state_version"];
            if (!v.is_number_unsigned() && !v.is_number_integer()) {
                throw Error(ErrorKind::invalid_argument, "state_version must be an integer");
            }
            if (v.get<std::uint64_t>() != campaign_.state_version()) {
                throw Error(ErrorKind::conflict, "state_version " + v.dump() + " is stale; the campaign is at " +
                                                     std::to_string(campaign_.state_version()));
            }
        }
        Campaign next = campaign_;
        Json reply = apply(next, request);
        if (next.state_version() != campaign_.state_version()) {
            save_campaign(next, path_);
            campaign_ = std::move(next);
        }
        reply["state_version"] = campaign_.state_version();
        return {200, reply};
    } catch (const Error& e) {
        return error_response(e);
    }
}

ApiResponse CampaignService::post_suggestions(const std::string& body)
{
    return mutate(body, [&](Campaign& c, const Json&) {
        c.suggest(execution_);
        return pending_json(c);
    });
}

ApiResponse CampaignService::post_observation(const std::string& body)
{
    return mutate(body, [&](Campaign& c, const Json& req) {
        if (!req.contains("outcome")) {
            throw Error(ErrorKind::invalid_argument, "missing field 'outcome'");
        }
        const Outcome outcome = outcome_from(req["outcome"]);
        const bool manual = req.value("manual", false);
        const RecordMode mode = manual ? RecordMode::manual : RecordMode::pending;
        GridIndex index = 0;
        if (req.contains("index")) {
            if (!req["index"].is_number_unsigned()) {
                throw Error(ErrorKind::invalid_argument, "index must be a non-negative integer");
            }
            index = req["index"].get<GridIndex>();
        } else if (req.contains("values")) {
            index = c.space().encode(values_from(c.space(), req["values"])).index;
        } else {
            throw Error(ErrorKind::invalid_argument, "give either 'index' or 'values'");
        }
        c.record(index, outcome, mode, utc_timestamp());
        Json reply = pending_json(c);
        reply["observation"] = observation_json(c.space(), c.dataset()[c.dataset().size() - 1]);
        reply["experiments_used"] = c.experiments_used();
        return reply;
    });
}

ApiResponse CampaignService::post_seed_import(const std::string& body)
{
    return mutate(body, [&](Campaign& c, const Json& req) {
        std::vector<SeedRecord> records;
        if (req.contains("table")) {
            if (!req["table"].is_string()) {
                throw Error(ErrorKind::invalid_argument, "table must be a string of delimited text");
            }
            std::istringstream in(req["table"].get<std::string>());
            records = parse_seed_table(in, c.space());
        } else if (req.contains("records") && req["records"].is_array()) {
            for (const auto& r : req["records"]) {
                if (!r.is_object() || !r.contains("values") || !r.contains("outcome")) {
                    throw Error(ErrorKind::invalid_argument, "each record needs 'values' and 'outcome'");
                }
                records.push_back({values_from(c.space(), r["values"]), outcome_from(r["outcome"])});
            }
        } else {
            throw Error(ErrorKind::invalid_argument, "give 'records' (array) or 'table' (delimited text)");
        }
        c.import_seed_data(records, utc_timestamp());
        return Json{{"imported", records.size()}, {"observations", c.dataset().size()}};
    });
}

ApiResponse CampaignService::post_extend_budget(const std::string& body)
{
    return mutate(body, [&](Campaign& c, const Json& req) {
        if (!req.contains("by") || !req["by"].is_number_integer()) {
            throw Error(ErrorKind::invalid_argument, "missing integer field 'by'");
        }
        c.extend_budget(req["by"].get<int>());
        return Json{{"budget", c.settings().budget}, {"remaining_budget", c.remaining_budget()}};
    });
}

struct HttpServer::Impl {
    Impl(CampaignService& s, ServeOptions o) : service(s), options(std::move(o)) {}

    CampaignService& service;
    ServeOptions options;
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r)
{
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
}

}  // namespace

HttpServer::HttpServer(CampaignService& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options)))
{
    auto& s = impl_->server;
    auto& svc = impl_->service;
    s.Get("/status", [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.get_status()); });
    s.Get("/suggestions",
          [&svc](const httplib::Request&, httplib::Response& res) { reply(res, svc.get_suggestions()); });
    s.Post("/suggestions", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.post_suggestions(req.body));
    });
    s.Post("/observations", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.post_observation(req.body));
    });
    s.Post("/seed-import", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.post_seed_import(req.body));
    });
    s.Post("/extend-budget", [&svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc.post_extend_budget(req.body));
    });
    s.Get("/posterior-slice", [&svc](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> query;
        for (const auto& [k, v] : req.params) {
            query[k] = v;
        }
        reply(res, svc.get_posterior_slice(query));
    });
    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "unknown error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        reply(res, error_response(500, "internal", message));
    });
    if (!impl_->options.static_dir.empty() && !s.set_mount_point("/", impl_->options.static_dir.string())) {
        throw Error(ErrorKind::io, "static directory '" + impl_->options.static_dir.string() + "' does not exist");
    }
}

HttpServer::~HttpServer()
{
    stop();
}

int HttpServer::bind()
{
    int port = impl_->options.port;
    if (port == 0) {
        port = impl_->server.bind_to_any_port(impl_->options.host);
    } else if (!impl_->server.bind_to_port(impl_->options.host, port)) {
        port = -1;
    }
    if (port < 0) {
        throw Error(ErrorKind::io, "cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
    }
    return port;
}

void HttpServer::listen()
{
    impl_->server.listen_after_bind();
}

void HttpServer::stop()
{
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
}

void HttpServer::wait_until_ready() const
{
    impl_->server.wait_until_ready();
}

}  // namespace beam
