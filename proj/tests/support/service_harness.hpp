#pragma once

#include "normcase/service/http_api.hpp"

#include "fixtures.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <memory>

namespace normcase::testing {

class TempDir {
public:
    TempDir() {
        std::string tmpl = (std::filesystem::temp_directory_path() / "normcase-XXXXXX").string();
        if (!::mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// Deterministic clock; advances one second per reading unless frozen.
struct ManualClock {
    std::shared_ptr<std::atomic<std::int64_t>> now = std::make_shared<std::atomic<std::int64_t>>(1'700'000'000'000);
    std::shared_ptr<std::atomic<std::int64_t>> step = std::make_shared<std::atomic<std::int64_t>>(1000);

    std::int64_t operator()() const { return now->fetch_add(step->load()); }
};

inline std::string quittance_source() { return fixture("quittance.norm"); }

/// Same model with a different income threshold.
inline std::string quittance_with_threshold(int threshold) {
    std::string s = quittance_source();
    const std::string from = "=income-threshold(1500).";
    s.replace(s.find(from), from.size(), "=income-threshold(" + std::to_string(threshold) + ").");
    return s;
}

/// Same model with one more physical act.
inline std::string quittance_with_extra_button() {
    return quittance_source() +
           "\nPhysical Act send-reminder\n  Actor civil-servant\n  Recipient applicant\n"
           "  Syncs with process-application.\n";
}

inline const char* const kAdminToken = "admin-secret";

/// One in-process service over a temporary store, restartable.
class ServiceHarness {
public:
    ServiceHarness() {
        config_.store_dir = dir_.path();
        config_.admin_token = kAdminToken;
        start();
    }

    service::Application& app() { return *app_; }
    service::CaseService& cases() { return app_->cases(); }
    const service::ServiceConfig& config() const { return config_; }
    ManualClock& clock() { return clock_; }

    service::User admin() { return *app_->directory().authenticate(kAdminToken); }

    /// Drops all in-memory state and boots a new Application on the same store.
    void restart(bool eager = true) {
        app_.reset();
        config_.eager_start = eager;
        start();
    }

    std::string activate(const std::string& source) {
        const auto id = app_->models().register_model(source).version.version_id;
        app_->models().set_active(id);
        return id;
    }

    /// Standard roles for the fixture: clerks run the office acts and enter
    /// data, the desk submits applications.
    void install_roles() {
        auto& d = app_->directory();
        d.set_permissions("clerk", {{"record-processing", "send-grant-letter", "send-denial-letter", "send-reminder"}, true});
        d.set_permissions("desk", {{"submit-application"}, false});
    }

    service::User user(const std::string& id, std::set<std::string> roles) {
        return app_->directory().create_user(id, id, roles, "token-" + id);
    }

private:
    TempDir dir_;
    service::ServiceConfig config_;
    ManualClock clock_;
    std::unique_ptr<service::Application> app_;

    void start() {
        app_ = std::make_unique<service::Application>(config_, clock_);
        app_->boot();
    }
};

} // namespace normcase::testing
