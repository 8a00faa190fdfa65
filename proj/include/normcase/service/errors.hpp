#pragma once

#include "normcase/lang/diagnostic.hpp"

#include <chrono>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace normcase::service {

/// Milliseconds since the Unix epoch.
using Clock = std::function<std::int64_t()>;

inline std::int64_t system_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

/// ISO-8601 UTC with millisecond precision; sorts lexicographically.
std::string format_timestamp(std::int64_t ms);

class ServiceError : public std::runtime_error {
public:
    enum class Code {
        BadRequest,
        Unauthenticated,
        PermissionDenied,
        NotFound,
        Conflict,
        NoActiveModel,
        InvalidModel,
        Unavailable,
    };

    ServiceError(Code code, const std::string& message, lang::Diagnostics diagnostics = {})
        : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

    Code code() const { return code_; }
    const lang::Diagnostics& diagnostics() const { return diagnostics_; }

private:
    Code code_;
    lang::Diagnostics diagnostics_;
};

std::string_view to_string(ServiceError::Code code);

} // namespace normcase::service
