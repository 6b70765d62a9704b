#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <shared_mutex>
#include <string>

#include "beam/campaign_file.hpp"
#include "beam/error.hpp"

namespace beam {

struct ApiResponse {
    int status = 200;
    Json body;
};

Json slice_json(const ParameterSpace& space, const PosteriorSlice& slice, std::uint64_t state_version);

/// HTTP status for a library error: 409 for budget and state conflicts, 422
/// for requests that break the campaign contract, 500 for storage problems.
int http_status(ErrorKind kind);

/// Endpoint logic over one campaign file, independent of the transport.
///
/// Reads work on the in-memory snapshot under a shared lock. Mutations are
/// serialized: each one runs on a copy, the copy is saved to disk, and only
/// then does it replace the snapshot and the response go out. A mutation
/// carrying a `state_version` other than the current one is refused with 409.
class CampaignService {
public:
    explicit CampaignService(std::filesystem::path campaign_path, Execution execution = Execution::parallel);

    const std::filesystem::path& path() const noexcept { return path_; }
    Campaign snapshot() const;

    ApiResponse get_status() const;
    ApiResponse get_suggestions() const;
    ApiResponse get_posterior_slice(const std::map<std::string, std::string>& query) const;

    ApiResponse post_suggestions(const std::string& body);
    ApiResponse post_observation(const std::string& body);
    ApiResponse post_seed_import(const std::string& body);
    ApiResponse post_extend_budget(const std::string& body);

private:
    template <class F>
    ApiResponse mutate(const std::string& body, F&& apply);

    std::filesystem::path path_;
    Execution execution_;
    mutable std::shared_mutex mutex_;
    Campaign campaign_;
};

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    std::filesystem::path static_dir;  // served at / when set
};

/// cpp-httplib front end for CampaignService.
class HttpServer {
public:
    HttpServer(CampaignService& service, ServeOptions options);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds the socket and returns the bound port; throws io on failure.
    int bind();
    /// Blocks until stop().
    void listen();
    void stop();
    void wait_until_ready() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace beam
