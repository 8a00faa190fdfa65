#pragma once

#include "normcase/reasoner/model.hpp"
#include "normcase/service/errors.hpp"
#include "normcase/service/file_store.hpp"

#include <map>
#include <mutex>
#include <optional>

namespace normcase::service {

struct ModelVersion {
    std::string version_id; // SHA-256 of the source bytes
    std::int64_t registered_at = 0;
};

/// Content-addressed model sources plus the active-model pointer.
class ModelRegistry {
public:
    ModelRegistry(FileStore& store, Clock clock);

    struct Registered {
        ModelVersion version;
        bool created = false;
    };
    /// Throws ServiceError(InvalidModel) with diagnostics; nothing is stored then.
    Registered register_model(std::string_view source);

    std::vector<ModelVersion> list() const;
    std::optional<ModelVersion> find(const std::string& version_id) const;
    std::optional<std::string> source(const std::string& version_id) const;

    /// Compiled model, cached. Throws NotFound for unknown ids.
    std::shared_ptr<const reasoner::Model> model(const std::string& version_id);

    void set_active(const std::string& version_id);
    std::optional<std::string> active() const;

private:
    FileStore& store_;
    Clock clock_;
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const reasoner::Model>> cache_;
};

} // namespace normcase::service
