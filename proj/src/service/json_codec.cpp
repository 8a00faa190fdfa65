#include "normcase/reasoner/snapshot.hpp"
#include "normcase/service/case_service.hpp"

namespace normcase::service {

using nlohmann::json;
using reasoner::TruthValue;

std::string_view to_string(CaseStatus s) { return s == CaseStatus::Open ? "Open" : "Closed"; }

std::optional<CaseStatus> parse_case_status(std::string_view s) {
    if (s == "Open" || s == "open") return CaseStatus::Open;
    if (s == "Closed" || s == "closed") return CaseStatus::Closed;
    return std::nullopt;
}

std::string_view to_string(EventKind k) {
    switch (k) {
    case EventKind::FactSet: return "FactSet";
    case EventKind::ActExecuted: return "ActExecuted";
    case EventKind::CaseClosed: return "CaseClosed";
    }
    return "?";
}

namespace {

EventKind event_kind_from(const std::string& s) {
    for (auto k : {EventKind::FactSet, EventKind::ActExecuted, EventKind::CaseClosed})
        if (to_string(k) == s) return k;
    throw std::runtime_error("unknown event kind '" + s + "'");
}

json optional_time(const std::optional<std::int64_t>& t) { return t ? json(format_timestamp(*t)) : json(nullptr); }

const char* widget_hint(const lang::Declaration& d) {
    if (d.kind == lang::DeclKind::Bool) return "triStateRadio";
    return d.domain == lang::Domain::Int ? "numberBox" : "textBox";
}

json slot_value(const reasoner::ReasonerState& state, const lang::Declaration& d) {
    if (d.kind == lang::DeclKind::Bool)
        return reasoner::truth_to_json(reasoner::truth_of(state, {d.name, std::nullopt}));
    auto it = state.base_facts.lower_bound(reasoner::Instance{d.name, std::nullopt});
    for (; it != state.base_facts.end() && it->first.type == d.name; ++it)
        if (it->second == TruthValue::True && it->first.arg) return reasoner::literal_to_json(*it->first.arg);
    return "unknown";
}

} // namespace

json record_to_json(const CaseRecord& r) {
    return {{"caseId", r.id},
            {"clientRef", r.client_ref},
            {"modelVersionId", r.model_version},
            {"status", to_string(r.status)},
            {"createdAt", format_timestamp(r.created_at)},
            {"createdAtMs", r.created_at},
            {"closedAt", optional_time(r.closed_at)},
            {"closedAtMs", r.closed_at ? json(*r.closed_at) : json(nullptr)},
            {"eventCount", r.event_count},
            {"snapshotRef", r.snapshot_ref}};
}

CaseRecord record_from_json(const json& j) {
    CaseRecord r;
    r.id = j.at("caseId").get<std::string>();
    r.client_ref = j.at("clientRef").get<std::string>();
    r.model_version = j.at("modelVersionId").get<std::string>();
    r.status = parse_case_status(j.at("status").get<std::string>()).value_or(CaseStatus::Open);
    r.created_at = j.at("createdAtMs").get<std::int64_t>();
    if (!j.at("closedAtMs").is_null()) r.closed_at = j.at("closedAtMs").get<std::int64_t>();
    r.event_count = j.at("eventCount").get<std::uint64_t>();
    r.snapshot_ref = j.at("snapshotRef").get<std::string>();
    return r;
}

json event_to_json(const CaseEvent& e) {
    return {{"caseId", e.case_id}, {"seq", e.seq},        {"kind", to_string(e.kind)}, {"userId", e.user_id},
            {"payload", e.payload}, {"at", e.at}, {"traceSeq", e.trace_seq}};
}

CaseEvent event_from_json(const json& j) {
    return {j.at("caseId").get<std::string>(),    j.at("seq").get<std::uint64_t>(),
            event_kind_from(j.at("kind").get<std::string>()), j.at("userId").get<std::string>(),
            j.at("payload"),                      j.at("at").get<std::int64_t>(),
            j.at("traceSeq").get<std::uint64_t>()};
}

json trace_entry_to_json(const TraceEntry& e) {
    json j = {{"seq", e.entry.seq},
              {"kind", reasoner::to_string(e.entry.kind)},
              {"summary", e.entry.summary},
              {"details", e.entry.details},
              {"userId", e.user_id ? json(*e.user_id) : json(nullptr)},
              {"at", optional_time(e.at)}};
    return j;
}

json case_view(const CaseRecord& record, const reasoner::ReasonerState& state, const Directory& directory,
               const User& user) {
    const auto& model = *state.model;
    json slots = json::array(), facts = json::array(), derived = json::array();
    for (const auto& d : model.spec().declarations) {
        if (d.is_derived()) {
            if (d.domain == lang::Domain::NoArg)
                derived.push_back({{"typeName", d.name},
                                   {"value", reasoner::truth_to_json(reasoner::truth_of(state, {d.name, std::nullopt}))}});
            continue;
        }
        if (!d.is_single_instance()) continue;
        slots.push_back({{"typeName", d.name},
                         {"kind", lang::to_string(d.kind)},
                         {"domain", lang::to_string(d.domain)},
                         {"openness", d.openness == lang::Openness::Open ? "Open" : "Closed"},
                         {"value", slot_value(state, d)},
                         {"widgetHint", widget_hint(d)}});
    }
    for (const auto& [inst, value] : state.base_facts) {
        const auto* d = model.find(inst.type);
        if (!d || d->is_single_instance()) continue;
        json f = reasoner::instance_to_json(inst);
        f["value"] = reasoner::truth_to_json(value);
        facts.push_back(std::move(f));
    }

    const bool open = record.status == CaseStatus::Open;
    json actions = json::array();
    for (const auto& status : reasoner::act_statuses(state)) {
        json a = reasoner::act_status_to_json(status);
        const bool permitted = directory.may_perform(user, status.act, status.institutional);
        a["permitted"] = permitted;
        a["executable"] = open && permitted;
        a["fourEyes"] = directory.requires_four_eyes(status.act, status.institutional);
        a["takesRecipient"] = model.takes_recipient(*model.find(status.act));
        actions.push_back(std::move(a));
    }
    json duties = json::array(), violations = json::array();
    for (const auto& d : reasoner::active_duties(state)) duties.push_back(reasoner::duty_to_json(d));
    for (const auto& v : state.violations) violations.push_back(reasoner::violation_to_json(v));

    return {{"case", record_to_json(record)},
            {"modelVersionId", state.model_version},
            {"factSlots", std::move(slots)},
            {"facts", std::move(facts)},
            {"derivedFacts", std::move(derived)},
            {"actions", std::move(actions)},
            {"duties", std::move(duties)},
            {"violations", std::move(violations)},
            {"traceLength", state.seq()},
            {"canEnterData", open && directory.may_enter_data(user)}};
}

} // namespace normcase::service
