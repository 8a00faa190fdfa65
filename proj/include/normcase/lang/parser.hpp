#pragma once

#include "normcase/lang/ast.hpp"

#include <string_view>

namespace normcase::lang {

struct ParseResult {
    Specification spec;
    Diagnostics diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Parses a model source. On a syntax error the parser resynchronises at
/// the next top-level `.` so several errors can be reported in one pass;
/// `spec` then holds every form that parsed cleanly.
ParseResult parse(std::string_view source);

} // namespace normcase::lang
