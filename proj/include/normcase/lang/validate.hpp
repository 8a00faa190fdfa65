#pragma once

#include "normcase/lang/ast.hpp"

#include <optional>
#include <string_view>

namespace normcase::lang {

struct FlattenResult {
    Specification spec;
    Diagnostics diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
};

/// Merges every `Extends` declaration into the root of its extension chain.
/// List clauses concatenate base-first, boolean clauses combine with `&&`,
/// extensions apply in file order. The result contains no extension
/// declarations. Unknown bases and cycles are reported as errors.
FlattenResult flatten_extensions(const Specification& spec);

/// Full static check: extension structure, name uniqueness and resolution,
/// clause placement, template arity, expression typing, derived-fact rules.
/// Checks other than extension structure run on the flattened form.
Diagnostics validate(const Specification& spec);

struct LoadResult {
    std::optional<Specification> spec; // flattened, set only when valid
    Diagnostics diagnostics;

    bool ok() const { return spec.has_value(); }
};

/// parse + validate + flatten.
LoadResult load(std::string_view source);

} // namespace normcase::lang
