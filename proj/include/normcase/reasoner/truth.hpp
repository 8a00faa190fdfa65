#pragma once

#include <optional>
#include <string_view>

namespace normcase::reasoner {

/// Three-valued truth under strong Kleene semantics.
enum class TruthValue { False, True, Unknown };

constexpr TruthValue kleene_not(TruthValue a) {
    switch (a) {
    case TruthValue::False: return TruthValue::True;
    case TruthValue::True: return TruthValue::False;
    case TruthValue::Unknown: return TruthValue::Unknown;
    }
    return TruthValue::Unknown;
}

constexpr TruthValue kleene_and(TruthValue a, TruthValue b) {
    if (a == TruthValue::False || b == TruthValue::False) return TruthValue::False;
    if (a == TruthValue::True && b == TruthValue::True) return TruthValue::True;
    return TruthValue::Unknown;
}

constexpr TruthValue kleene_or(TruthValue a, TruthValue b) {
    if (a == TruthValue::True || b == TruthValue::True) return TruthValue::True;
    if (a == TruthValue::False && b == TruthValue::False) return TruthValue::False;
    return TruthValue::Unknown;
}

constexpr TruthValue from_bool(bool b) { return b ? TruthValue::True : TruthValue::False; }

std::string_view to_string(TruthValue v);
std::optional<TruthValue> parse_truth(std::string_view text);

} // namespace normcase::reasoner
