#pragma once

#include "normcase/service/case_service.hpp"

#include <filesystem>

namespace httplib {
class Server;
}

namespace normcase::service {

struct ServiceConfig {
    std::filesystem::path store_dir = "normcase-store";
    std::string listen = "127.0.0.1:8080";
    std::optional<std::filesystem::path> bootstrap_model; // registered and activated at startup
    std::optional<std::string> admin_token;
    bool eager_start = true; // start a reasoner for every stored case at boot

    /// NORMCASE_STORE, NORMCASE_LISTEN, NORMCASE_MODEL, NORMCASE_ADMIN_TOKEN.
    static ServiceConfig from_env();
};

/// Everything a running service owns.
class Application {
public:
    explicit Application(const ServiceConfig& config, Clock clock = system_clock_ms);

    /// Registers and activates the bootstrap model, then optionally starts
    /// every stored case. Returns the number of cases that failed to start.
    std::size_t boot();

    FileStore& store() { return store_; }
    ModelRegistry& models() { return models_; }
    Directory& directory() { return directory_; }
    CaseService& cases() { return cases_; }

private:
    ServiceConfig config_;
    FileStore store_;
    ModelRegistry models_;
    Directory directory_;
    CaseService cases_;
};

/// Installs the JSON API routes on `server`.
void install_routes(httplib::Server& server, Application& app);

int http_status(ServiceError::Code code);

} // namespace normcase::service
