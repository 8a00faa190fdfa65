#include "normcase/reasoner/explain.hpp"

namespace normcase::reasoner {

namespace {

std::string stored(const std::optional<TruthValue>& v) {
    return v ? std::string(to_string(*v)) : std::string("unassigned");
}

std::string parties(const TraceEvent& e, std::string_view first_role, std::string_view second_role) {
    std::string out;
    if (e.first) out += " " + std::string(first_role) + " " + to_display(*e.first);
    if (e.second) out += " " + std::string(second_role) + " " + to_display(*e.second);
    return out;
}

std::string summarize(const TraceEvent& e) {
    switch (e.kind) {
    case TraceKind::InitStatement: return "initial statement " + e.note;
    case TraceKind::FactSet: {
        const Instance inst{e.subject, e.first};
        return "set " + to_display(inst) + " to " + e.note;
    }
    case TraceKind::ActExecuted: return "executed " + e.subject + parties(e, "by", "for") + " (" + e.note + ")";
    case TraceKind::DutyCreated: return "duty " + e.subject + " created" + parties(e, "holder", "claimant");
    case TraceKind::DutyTerminated:
        return "duty " + e.subject + " terminated by " + e.note + parties(e, "holder", "claimant");
    case TraceKind::ViolationRaised: return e.note + " on " + e.subject + parties(e, "party", "counterparty");
    }
    return e.subject;
}

} // namespace

std::vector<ExplanationEntry> explain(const ReasonerState& state) {
    std::vector<ExplanationEntry> out;
    out.reserve(state.trace.size());
    for (const auto& e : state.trace) {
        ExplanationEntry entry{e.seq, e.kind, summarize(e), {}};
        for (const auto& c : e.changes)
            entry.details.push_back(to_display(c.instance) + ": " + stored(c.before) + " -> " + stored(c.after));
        out.push_back(std::move(entry));
    }
    return out;
}

} // namespace normcase::reasoner
