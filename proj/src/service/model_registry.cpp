#include "normcase/service/model_registry.hpp"

#include "normcase/service/sha256.hpp"

#include <json.hpp>

#include <ctime>

namespace normcase::service {

using nlohmann::json;

std::string format_timestamp(std::int64_t ms) {
    const std::time_t secs = static_cast<std::time_t>(ms / 1000);
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms % 1000));
    return out;
}

std::string_view to_string(ServiceError::Code code) {
    using C = ServiceError::Code;
    switch (code) {
    case C::BadRequest: return "bad_request";
    case C::Unauthenticated: return "unauthenticated";
    case C::PermissionDenied: return "permission_denied";
    case C::NotFound: return "not_found";
    case C::Conflict: return "conflict";
    case C::NoActiveModel: return "no_active_model";
    case C::InvalidModel: return "invalid_model";
    case C::Unavailable: return "unavailable";
    }
    return "error";
}

namespace {

bool is_version_id(const std::string& id) {
    return id.size() == 64 && id.find_first_not_of("0123456789abcdef") == std::string::npos;
}

std::string source_key(const std::string& id) { return "models/" + id + ".norm"; }
std::string meta_key(const std::string& id) { return "models/" + id + ".json"; }

} // namespace

ModelRegistry::ModelRegistry(FileStore& store, Clock clock) : store_(store), clock_(std::move(clock)) {}

ModelRegistry::Registered ModelRegistry::register_model(std::string_view source) {
    auto compiled = reasoner::Model::compile(source);
    if (!compiled.model)
        throw ServiceError(ServiceError::Code::InvalidModel, "model does not validate", compiled.diagnostics);
    const std::string id = sha256_hex(source);
    std::lock_guard lock(mutex_);
    if (auto meta = store_.read(meta_key(id)); meta && store_.exists(source_key(id))) {
        cache_.try_emplace(id, compiled.model);
        return {{id, json::parse(*meta).at("registeredAt").get<std::int64_t>()}, false};
    }
    const std::int64_t now = clock_();
    store_.write_atomic(source_key(id), source);
    store_.write_atomic(meta_key(id), json{{"versionId", id}, {"registeredAt", now}}.dump());
    cache_[id] = compiled.model;
    return {{id, now}, true};
}

std::vector<ModelVersion> ModelRegistry::list() const {
    std::vector<ModelVersion> out;
    for (const auto& file : store_.list_files("models")) {
        if (file.size() != 64 + 5 || file.substr(64) != ".json") continue;
        if (auto v = find(file.substr(0, 64))) out.push_back(*v);
    }
    std::sort(out.begin(), out.end(), [](const ModelVersion& a, const ModelVersion& b) {
        return std::tie(a.registered_at, a.version_id) < std::tie(b.registered_at, b.version_id);
    });
    return out;
}

std::optional<ModelVersion> ModelRegistry::find(const std::string& version_id) const {
    if (!is_version_id(version_id)) return std::nullopt;
    const auto meta = store_.read(meta_key(version_id));
    if (!meta) return std::nullopt;
    try {
        return ModelVersion{version_id, json::parse(*meta).at("registeredAt").get<std::int64_t>()};
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

std::optional<std::string> ModelRegistry::source(const std::string& version_id) const {
    if (!is_version_id(version_id)) return std::nullopt;
    return store_.read(source_key(version_id));
}

std::shared_ptr<const reasoner::Model> ModelRegistry::model(const std::string& version_id) {
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(version_id); it != cache_.end()) return it->second;
    }
    const auto src = source(version_id);
    if (!src) throw ServiceError(ServiceError::Code::NotFound, "unknown model version '" + version_id + "'");
    auto compiled = reasoner::Model::compile(*src);
    if (!compiled.model)
        throw ServiceError(ServiceError::Code::Unavailable, "stored model no longer compiles", compiled.diagnostics);
    std::lock_guard lock(mutex_);
    return cache_.try_emplace(version_id, compiled.model).first->second;
}

void ModelRegistry::set_active(const std::string& version_id) {
    if (!find(version_id)) throw ServiceError(ServiceError::Code::NotFound, "unknown model version '" + version_id + "'");
    std::lock_guard lock(mutex_);
    store_.write_atomic("config/active-model", version_id);
}

std::optional<std::string> ModelRegistry::active() const {
    std::lock_guard lock(mutex_);
    auto v = store_.read("config/active-model");
    if (!v || v->empty()) return std::nullopt;
    return v;
}

} // namespace normcase::service
