#include "normcase/reasoner/snapshot.hpp"

namespace normcase::reasoner {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string& what) {
    throw ReasonerError(ReasonerError::Kind::Malformed, "malformed snapshot: " + what);
}

[[noreturn]] void incompatible(const std::string& what) {
    throw ReasonerError(ReasonerError::Kind::IncompatibleVersion, "incompatible snapshot: " + what);
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) malformed(std::string("missing '") + key + "'");
    return j.at(key);
}

std::optional<Literal> optional_literal(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return literal_from_json(j.at(key));
}

json optional_to_json(const std::optional<Literal>& lit) { return lit ? literal_to_json(*lit) : json(nullptr); }

json stored_to_json(const std::optional<TruthValue>& v) { return v ? truth_to_json(*v) : json(nullptr); }

std::optional<TruthValue> stored_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return truth_from_json(j);
}

json change_to_json(const FactChange& c) {
    return {{"instance", instance_to_json(c.instance)},
            {"before", stored_to_json(c.before)},
            {"after", stored_to_json(c.after)}};
}

FactChange change_from_json(const json& j) {
    return {instance_from_json(field(j, "instance")), stored_from_json(field(j, "before")),
            stored_from_json(field(j, "after"))};
}

TraceKind trace_kind_from(const std::string& s) {
    for (auto k : {TraceKind::InitStatement, TraceKind::FactSet, TraceKind::ActExecuted, TraceKind::DutyCreated,
                   TraceKind::DutyTerminated, TraceKind::ViolationRaised})
        if (to_string(k) == s) return k;
    malformed("unknown trace kind '" + s + "'");
}

ViolationKind violation_kind_from(const std::string& s) {
    if (s == to_string(ViolationKind::NonCompliantAct)) return ViolationKind::NonCompliantAct;
    if (s == to_string(ViolationKind::DutyViolation)) return ViolationKind::DutyViolation;
    malformed("unknown violation kind '" + s + "'");
}

json trace_to_json(const TraceEvent& e) {
    json changes = json::array();
    for (const auto& c : e.changes) changes.push_back(change_to_json(c));
    return {{"seq", e.seq},
            {"kind", to_string(e.kind)},
            {"subject", e.subject},
            {"first", optional_to_json(e.first)},
            {"second", optional_to_json(e.second)},
            {"note", e.note},
            {"changes", std::move(changes)}};
}

TraceEvent trace_from_json(const json& j) {
    TraceEvent e;
    e.seq = field(j, "seq").get<std::uint64_t>();
    e.kind = trace_kind_from(field(j, "kind").get<std::string>());
    e.subject = field(j, "subject").get<std::string>();
    e.first = optional_literal(j, "first");
    e.second = optional_literal(j, "second");
    e.note = field(j, "note").get<std::string>();
    for (const auto& c : field(j, "changes")) e.changes.push_back(change_from_json(c));
    return e;
}

DutyInstance duty_from_json(const json& j) {
    return {field(j, "type").get<std::string>(), literal_from_json(field(j, "holder")), optional_literal(j, "claimant"),
            field(j, "createdAt").get<std::uint64_t>(), field(j, "violated").get<bool>()};
}

Violation violation_from_json(const json& j) {
    return {violation_kind_from(field(j, "kind").get<std::string>()), field(j, "subject").get<std::string>(),
            literal_from_json(field(j, "party")), optional_literal(j, "counterparty"),
            field(j, "atSeq").get<std::uint64_t>()};
}

json clause_to_json(const ClauseStatus& c) { return {{"clause", c.clause}, {"value", truth_to_json(c.value)}}; }

void check_fact_shape(const Model& model, const Instance& inst) {
    const lang::Declaration* d = model.find(inst.type);
    if (!d) incompatible("type '" + inst.type + "' is not in the model");
    if (!d->is_fact_type() || d->is_derived()) incompatible("'" + inst.type + "' is not a stored fact type");
    const bool shape_ok = d->domain == lang::Domain::NoArg ? !inst.arg
                          : d->domain == lang::Domain::Int
                              ? inst.arg && std::holds_alternative<std::int64_t>(*inst.arg)
                              : inst.arg && std::holds_alternative<std::string>(*inst.arg);
    if (!shape_ok) incompatible("'" + to_display(inst) + "' does not match its declaration");
}

} // namespace

json literal_to_json(const Literal& lit) {
    if (const auto* i = std::get_if<std::int64_t>(&lit)) return *i;
    return std::get<std::string>(lit);
}

Literal literal_from_json(const json& j) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) return j.get<std::string>();
    malformed("literal must be an integer or string");
}

json instance_to_json(const Instance& inst) {
    json j = {{"type", inst.type}};
    if (inst.arg) j["arg"] = literal_to_json(*inst.arg);
    return j;
}

Instance instance_from_json(const json& j) {
    const json& type = field(j, "type");
    if (!type.is_string()) malformed("type must be a string");
    return {type.get<std::string>(), optional_literal(j, "arg")};
}

json truth_to_json(TruthValue v) {
    switch (v) {
    case TruthValue::True: return true;
    case TruthValue::False: return false;
    case TruthValue::Unknown: return "unknown";
    }
    return nullptr;
}

TruthValue truth_from_json(const json& j) {
    if (j.is_boolean()) return from_bool(j.get<bool>());
    if (j.is_string() && j.get<std::string>() == "unknown") return TruthValue::Unknown;
    malformed("truth value must be true, false or \"unknown\"");
}

json duty_to_json(const DutyInstance& d) {
    return {{"type", d.type},
            {"holder", literal_to_json(d.holder)},
            {"claimant", optional_to_json(d.claimant)},
            {"createdAt", d.created_at},
            {"violated", d.violated}};
}

json violation_to_json(const Violation& v) {
    return {{"kind", to_string(v.kind)},
            {"subject", v.subject},
            {"party", literal_to_json(v.party)},
            {"counterparty", optional_to_json(v.counterparty)},
            {"atSeq", v.at_seq}};
}

json act_status_to_json(const ActStatus& s) {
    json reasons = json::array();
    for (const auto& c : s.reasons) reasons.push_back(clause_to_json(c));
    return {{"act", s.act},
            {"institutional", s.institutional},
            {"status", to_string(s.status)},
            {"reasons", std::move(reasons)}};
}

json report_to_json(const ExecutionReport& r) {
    json changes = json::array(), created = json::array(), terminated = json::array(), violations = json::array(),
         after = json::array();
    for (const auto& c : r.fact_changes) changes.push_back(change_to_json(c));
    for (const auto& d : r.duties_created) created.push_back(duty_to_json(d));
    for (const auto& d : r.duties_terminated) terminated.push_back(duty_to_json(d));
    for (const auto& v : r.violations) violations.push_back(violation_to_json(v));
    for (const auto& s : r.statuses_after) after.push_back(act_status_to_json(s));
    json j = {{"act", r.invocation.act},
              {"actor", literal_to_json(r.invocation.actor)},
              {"recipient", optional_to_json(r.invocation.recipient)},
              {"institutional", r.institutional},
              {"executed", r.executed},
              {"requiresConfirmation", r.requires_confirmation},
              {"status", act_status_to_json(r.status)},
              {"factChanges", std::move(changes)},
              {"dutiesCreated", std::move(created)},
              {"dutiesTerminated", std::move(terminated)},
              {"violations", std::move(violations)}};
    if (!after.empty()) j["statusesAfter"] = std::move(after);
    return j;
}

json input_to_json(const InputEvent& e) {
    if (const auto* f = std::get_if<FactInput>(&e))
        return {{"kind", "fact"}, {"instance", instance_to_json(f->instance)}, {"value", truth_to_json(f->value)}};
    const auto& a = std::get<ActInput>(e);
    return {{"kind", "act"},
            {"act", a.invocation.act},
            {"actor", literal_to_json(a.invocation.actor)},
            {"recipient", optional_to_json(a.invocation.recipient)},
            {"confirmed", a.confirmed}};
}

InputEvent input_from_json(const json& j) {
    try {
        const std::string kind = field(j, "kind").get<std::string>();
        if (kind == "fact") return FactInput{instance_from_json(field(j, "instance")), truth_from_json(field(j, "value"))};
        if (kind == "act")
            return ActInput{{field(j, "act").get<std::string>(), literal_from_json(field(j, "actor")),
                             optional_literal(j, "recipient")},
                            j.value("confirmed", false)};
        malformed("unknown input kind '" + kind + "'");
    } catch (const json::exception& e) {
        malformed(e.what());
    }
}

std::string snapshot(const ReasonerState& state) {
    json facts = json::array(), duties = json::array(), violations = json::array(), trace = json::array();
    for (const auto& [inst, value] : state.base_facts) {
        json f = instance_to_json(inst);
        f["value"] = truth_to_json(value);
        facts.push_back(std::move(f));
    }
    for (const auto& d : active_duties(state)) duties.push_back(duty_to_json(d));
    for (const auto& v : state.violations) violations.push_back(violation_to_json(v));
    for (const auto& e : state.trace) trace.push_back(trace_to_json(e));
    const json doc = {{"modelVersion", state.model_version},
                      {"seq", state.seq()},
                      {"baseFacts", std::move(facts)},
                      {"duties", std::move(duties)},
                      {"violations", std::move(violations)},
                      {"trace", std::move(trace)}};
    return doc.dump();
}

ReasonerState restore(std::shared_ptr<const Model> model, std::string_view serialized) {
    json doc;
    try {
        doc = json::parse(serialized);
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    ReasonerState state;
    state.model = std::move(model);
    try {
        state.model_version = field(doc, "modelVersion").get<std::string>();
        for (const auto& f : field(doc, "baseFacts")) {
            Instance inst = instance_from_json(f);
            check_fact_shape(*state.model, inst);
            if (!state.base_facts.emplace(inst, truth_from_json(field(f, "value"))).second)
                malformed("duplicate base fact '" + to_display(inst) + "'");
        }
        for (const auto& d : field(doc, "duties")) {
            DutyInstance duty = duty_from_json(d);
            const lang::Declaration* decl = state.model->find(duty.type);
            if (!decl || decl->kind != lang::DeclKind::Duty) incompatible("'" + duty.type + "' is not a duty type");
            state.duties.push_back(std::move(duty));
        }
        for (const auto& v : field(doc, "violations")) state.violations.push_back(violation_from_json(v));
        for (const auto& e : field(doc, "trace")) state.trace.push_back(trace_from_json(e));
        if (field(doc, "seq").get<std::uint64_t>() != state.trace.size()) malformed("seq does not match trace");
        for (std::size_t i = 0; i < state.trace.size(); ++i)
            if (state.trace[i].seq != i + 1) malformed("trace sequence numbers are not contiguous");
    } catch (const json::exception& e) {
        malformed(e.what());
    }
    return state;
}

} // namespace normcase::reasoner
