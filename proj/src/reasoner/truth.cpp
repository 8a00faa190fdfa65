#include "normcase/reasoner/truth.hpp"

#include "normcase/lang/printer.hpp"
#include "normcase/reasoner/state.hpp"

namespace normcase::reasoner {

std::string_view to_string(TruthValue v) {
    switch (v) {
    case TruthValue::False: return "false";
    case TruthValue::True: return "true";
    case TruthValue::Unknown: return "unknown";
    }
    return "?";
}

std::optional<TruthValue> parse_truth(std::string_view text) {
    if (text == "true") return TruthValue::True;
    if (text == "false") return TruthValue::False;
    if (text == "unknown") return TruthValue::Unknown;
    return std::nullopt;
}

std::string_view to_string(ViolationKind kind) {
    return kind == ViolationKind::NonCompliantAct ? "NonCompliantAct" : "DutyViolation";
}

std::string_view to_string(TraceKind kind) {
    switch (kind) {
    case TraceKind::InitStatement: return "InitStatement";
    case TraceKind::FactSet: return "FactSet";
    case TraceKind::ActExecuted: return "ActExecuted";
    case TraceKind::DutyCreated: return "DutyCreated";
    case TraceKind::DutyTerminated: return "DutyTerminated";
    case TraceKind::ViolationRaised: return "ViolationRaised";
    }
    return "?";
}

std::string to_display(const Literal& lit) { return lang::to_source(lit); }

std::string to_display(const Instance& inst) {
    return inst.arg ? inst.type + "(" + to_display(*inst.arg) + ")" : inst.type;
}

} // namespace normcase::reasoner
