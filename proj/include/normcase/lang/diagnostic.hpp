#pragma once

#include <string>
#include <vector>

namespace normcase::lang {

struct SourceLoc {
    int line = 1;
    int column = 1;

    friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

struct SourceSpan {
    SourceLoc begin;
    SourceLoc end;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string message;
    SourceSpan span;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& diags) {
    for (const auto& d : diags)
        if (d.severity == Severity::Error) return true;
    return false;
}

/// "3:14: error: message"
std::string format(const Diagnostic& diag);

} // namespace normcase::lang
