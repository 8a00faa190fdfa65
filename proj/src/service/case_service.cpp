#include "normcase/service/case_service.hpp"

#include "normcase/reasoner/snapshot.hpp"

#include <algorithm>
#include <cctype>
#include <random>

namespace normcase::service {

using nlohmann::json;
using reasoner::ReasonerError;
using reasoner::ReasonerState;
using reasoner::TruthValue;

namespace {

std::string case_dir(const std::string& id) { return "cases/" + id; }
std::string record_key(const std::string& id) { return case_dir(id) + "/record.json"; }
std::string events_key(const std::string& id) { return case_dir(id) + "/events.log"; }
std::string snapshot_key(const std::string& id) { return case_dir(id) + "/snapshot.json"; }
std::string approvals_key(const std::string& id) { return case_dir(id) + "/approvals.json"; }

bool valid_case_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-'; });
}

std::string new_case_id() {
    static std::mt19937_64 rng{std::random_device{}()};
    static std::mutex m;
    std::lock_guard lock(m);
    static constexpr char hex[] = "0123456789abcdef";
    std::string id = "case-";
    for (int i = 0; i < 16; ++i) id.push_back(hex[rng() % 16]);
    return id;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void bad_request(const std::string& message) { throw ServiceError(ServiceError::Code::BadRequest, message); }

ServiceError from_reasoner(const ReasonerError& e) {
    using K = ReasonerError::Kind;
    if (e.kind() == K::UnknownAct || e.kind() == K::UnknownType)
        return ServiceError(ServiceError::Code::NotFound, e.what());
    return ServiceError(ServiceError::Code::BadRequest, e.what());
}

TruthValue truth_value(const json& v) {
    try {
        return reasoner::truth_from_json(v);
    } catch (const ReasonerError&) {
        bad_request("value must be true, false or \"unknown\"");
    }
}

// Maps a PATCH body onto a reasoner assignment for the declared type.
std::pair<reasoner::Instance, TruthValue> fact_input(const reasoner::Model& model, const FactUpdate& u) {
    const auto* d = model.find(u.type);
    if (!d) throw ServiceError(ServiceError::Code::NotFound, "unknown type '" + u.type + "'");
    const auto literal = [&](const json& j) -> reasoner::Literal {
        if (d->domain == lang::Domain::Int && j.is_number_integer()) return j.get<std::int64_t>();
        if (d->domain == lang::Domain::String && j.is_string()) return j.get<std::string>();
        bad_request("value for '" + u.type + "' must be " + std::string(lang::to_string(d->domain)));
    };
    if (d->kind == lang::DeclKind::Var) {
        if (u.value.is_null() || u.value == "unknown") return {{u.type, std::nullopt}, TruthValue::Unknown};
        return {{u.type, literal(u.value)}, TruthValue::True};
    }
    std::optional<reasoner::Literal> arg;
    if (!u.arg.is_null()) arg = literal(u.arg);
    return {{u.type, arg}, truth_value(u.value)};
}

} // namespace

CaseService::CaseService(FileStore& store, ModelRegistry& models, Directory& directory, Clock clock)
    : store_(store), models_(models), directory_(directory), clock_(std::move(clock)) {}

std::shared_ptr<CaseService::Slot> CaseService::slot(const std::string& id) {
    if (!valid_case_id(id)) throw ServiceError(ServiceError::Code::NotFound, "unknown case '" + id + "'");
    std::lock_guard lock(slots_mutex_);
    if (auto it = slots_.find(id); it != slots_.end()) return it->second;
    if (!store_.exists(record_key(id))) throw ServiceError(ServiceError::Code::NotFound, "unknown case '" + id + "'");
    return slots_.emplace(id, std::make_shared<Slot>()).first->second;
}

ReasonerState& CaseService::ensure(const std::string& id, Slot& slot) {
    if (slot.state) return *slot.state;
    const auto raw = store_.read(record_key(id));
    if (!raw) throw ServiceError(ServiceError::Code::NotFound, "unknown case '" + id + "'");
    CaseRecord record = record_from_json(json::parse(*raw));

    store_.truncate_torn_tail(events_key(id));
    std::vector<reasoner::InputEvent> inputs;
    std::uint64_t event_count = 0;
    bool closed = false;
    std::optional<std::int64_t> closed_at;
    try {
        for (const auto& text : store_.read_records(events_key(id))) {
            const CaseEvent e = event_from_json(json::parse(text));
            ++event_count;
            if (e.kind == EventKind::CaseClosed) {
                closed = true;
                closed_at = e.at;
            } else {
                inputs.push_back(reasoner::input_from_json(e.payload));
            }
        }
    } catch (const std::exception& e) {
        throw ServiceError(ServiceError::Code::Unavailable, "case '" + id + "' has an unreadable event log: " + e.what());
    }

    std::shared_ptr<const reasoner::Model> model;
    try {
        model = models_.model(record.model_version);
    } catch (const ServiceError& e) {
        throw ServiceError(ServiceError::Code::Unavailable, "case '" + id + "' model unavailable: " + e.what());
    }

    std::optional<ReasonerState> state;
    if (const auto snap = store_.read(snapshot_key(id))) {
        try {
            ReasonerState restored = reasoner::restore(model, *snap);
            const auto inputs_seen = std::count_if(restored.trace.begin(), restored.trace.end(), [](const auto& t) {
                return t.kind == reasoner::TraceKind::FactSet || t.kind == reasoner::TraceKind::ActExecuted;
            });
            if (restored.model_version == record.model_version &&
                static_cast<std::size_t>(inputs_seen) == inputs.size())
                state = std::move(restored);
        } catch (const ReasonerError&) {
        }
    }
    if (!state) {
        try {
            state = reasoner::replay(model, inputs, record.model_version);
        } catch (const ReasonerError& e) {
            throw ServiceError(ServiceError::Code::Unavailable, "case '" + id + "' cannot be recovered: " + e.what());
        }
        store_.write_atomic(snapshot_key(id), reasoner::snapshot(*state));
    }

    // The log is authoritative for the counters a crash may have left stale.
    if (record.event_count != event_count || (closed && record.status != CaseStatus::Closed)) {
        record.event_count = event_count;
        if (closed) {
            record.status = CaseStatus::Closed;
            record.closed_at = closed_at;
        }
        store_.write_atomic(record_key(id), record_to_json(record).dump());
    }
    slot.record = record;
    slot.state = std::move(state);
    return *slot.state;
}

void CaseService::append(Slot& slot, EventKind kind, const User& user, json payload, std::uint64_t trace_seq) {
    CaseRecord& record = *slot.record;
    const CaseEvent event{record.id, record.event_count + 1, kind, user.id, std::move(payload), clock_(), trace_seq};
    store_.append_record(events_key(record.id), event_to_json(event).dump());
    record.event_count = event.seq;
}

void CaseService::commit(Slot& slot, ReasonerState next) {
    slot.state = std::move(next);
    store_.write_atomic(record_key(slot.record->id), record_to_json(*slot.record).dump());
    store_.write_atomic(snapshot_key(slot.record->id), reasoner::snapshot(*slot.state));
}

json CaseService::view_locked(Slot& slot, const User& user) {
    return case_view(*slot.record, *slot.state, directory_, user);
}

CaseRecord CaseService::create_case(const std::string& client_ref, const User&) {
    const auto active = models_.active();
    if (!active) throw ServiceError(ServiceError::Code::NoActiveModel, "no active model");
    const auto model = models_.model(*active);

    CaseRecord record;
    do {
        record.id = new_case_id();
    } while (store_.exists(record_key(record.id)));
    record.client_ref = client_ref;
    record.model_version = *active;
    record.created_at = clock_();
    record.snapshot_ref = snapshot_key(record.id);

    ReasonerState state = reasoner::init_state(model, *active);
    store_.write_atomic(snapshot_key(record.id), reasoner::snapshot(state));
    store_.write_atomic(record_key(record.id), record_to_json(record).dump());

    auto s = std::make_shared<Slot>();
    s->record = record;
    s->state = std::move(state);
    std::lock_guard lock(slots_mutex_);
    slots_[record.id] = std::move(s);
    return record;
}

std::vector<CaseRecord> CaseService::list_cases(const CaseFilter& filter, const CaseSort& sort) const {
    std::vector<CaseRecord> out;
    const auto needle = filter.text ? lower(*filter.text) : std::string();
    for (const auto& id : store_.list_dirs("cases")) {
        const auto raw = store_.read(record_key(id));
        if (!raw) continue;
        CaseRecord r;
        try {
            r = record_from_json(json::parse(*raw));
        } catch (const std::exception&) {
            continue;
        }
        if (filter.status && r.status != *filter.status) continue;
        if (filter.client_ref && r.client_ref != *filter.client_ref) continue;
        if (filter.text && lower(r.id).find(needle) == std::string::npos &&
            lower(r.client_ref).find(needle) == std::string::npos)
            continue;
        out.push_back(std::move(r));
    }
    const auto key = [&](const CaseRecord& r) {
        return sort.field == CaseSort::Field::CreatedAt ? r.created_at : static_cast<std::int64_t>(r.status);
    };
    std::sort(out.begin(), out.end(), [&](const CaseRecord& a, const CaseRecord& b) {
        if (key(a) != key(b)) return sort.descending ? key(a) > key(b) : key(a) < key(b);
        if (sort.field == CaseSort::Field::Status && a.created_at != b.created_at) return a.created_at < b.created_at;
        return a.id < b.id;
    });
    return out;
}

CaseRecord CaseService::record(const std::string& id) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    ensure(id, *s);
    return *s->record;
}

json CaseService::view(const std::string& id, const User& user) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    ensure(id, *s);
    return view_locked(*s, user);
}

json CaseService::update_fact(const std::string& id, const FactUpdate& update, const User& user) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    ReasonerState& state = ensure(id, *s);
    if (s->record->status != CaseStatus::Open) throw ServiceError(ServiceError::Code::Conflict, "case is closed");
    if (!directory_.may_enter_data(user))
        throw ServiceError(ServiceError::Code::PermissionDenied, "user '" + user.id + "' may not enter data");

    const auto [instance, value] = fact_input(*state.model, update);
    ReasonerState next;
    try {
        next = reasoner::set_fact(state, instance, value);
    } catch (const ReasonerError& e) {
        throw from_reasoner(e);
    }
    append(*s, EventKind::FactSet, user, reasoner::input_to_json(reasoner::FactInput{instance, value}), state.seq() + 1);
    commit(*s, std::move(next));
    return view_locked(*s, user);
}

ActOutcome CaseService::perform_act(const std::string& id, const ActRequest& request, const User& user) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    ReasonerState& state = ensure(id, *s);
    if (s->record->status != CaseStatus::Open) throw ServiceError(ServiceError::Code::Conflict, "case is closed");

    const auto* physical = state.model->resolve_executable(request.act);
    if (!physical) throw ServiceError(ServiceError::Code::NotFound, "unknown act '" + request.act + "'");
    const std::string& institutional = *physical->syncs_with;
    if (!directory_.may_perform(user, physical->name, institutional))
        throw ServiceError(ServiceError::Code::PermissionDenied,
                           "user '" + user.id + "' may not perform '" + physical->name + "'");

    const reasoner::ActInvocation invocation{physical->name, request.actor, request.recipient};
    reasoner::ExecutionResult result;
    try {
        result = reasoner::execute_act(state, invocation, request.confirm);
    } catch (const ReasonerError& e) {
        throw from_reasoner(e);
    }

    ActOutcome outcome;
    if (result.report.requires_confirmation) {
        outcome.kind = ActOutcome::Kind::RequiresConfirmation;
        outcome.report = std::move(result.report);
        outcome.view = view_locked(*s, user);
        return outcome;
    }

    json payload = reasoner::input_to_json(reasoner::ActInput{invocation, request.confirm});
    if (directory_.requires_four_eyes(physical->name, institutional)) {
        json approvals = json::array();
        if (auto raw = store_.read(approvals_key(id))) approvals = json::parse(*raw);
        const json key = {{"act", invocation.act},
                          {"actor", reasoner::literal_to_json(invocation.actor)},
                          {"recipient", invocation.recipient ? reasoner::literal_to_json(*invocation.recipient)
                                                             : json(nullptr)}};
        auto pending = std::find_if(approvals.begin(), approvals.end(), [&](const json& a) { return a.at("key") == key; });
        if (pending == approvals.end()) {
            approvals.push_back({{"key", key}, {"requestedBy", user.id}, {"at", clock_()}});
            store_.write_atomic(approvals_key(id), approvals.dump());
            outcome.kind = ActOutcome::Kind::PendingApproval;
            outcome.report = std::move(result.report);
            outcome.report.executed = false;
            outcome.report.fact_changes.clear();
            outcome.report.duties_created.clear();
            outcome.report.duties_terminated.clear();
            outcome.report.violations.clear();
            outcome.view = view_locked(*s, user);
            return outcome;
        }
        const std::string first = pending->at("requestedBy").get<std::string>();
        if (first == user.id)
            throw ServiceError(ServiceError::Code::Conflict,
                               "four-eyes act needs a second, different user; '" + user.id + "' already approved");
        approvals.erase(pending);
        store_.write_atomic(approvals_key(id), approvals.dump());
        payload["requestedBy"] = first;
        payload["approvedBy"] = user.id;
        outcome.approved_by = user.id;
    }

    append(*s, EventKind::ActExecuted, user, std::move(payload), state.seq() + 1);
    commit(*s, std::move(result.state));
    outcome.kind = ActOutcome::Kind::Executed;
    outcome.report = std::move(result.report);
    outcome.view = view_locked(*s, user);
    return outcome;
}

reasoner::ExecutionReport CaseService::simulate(const std::string& id, const ActRequest& request) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    const ReasonerState& state = ensure(id, *s);
    try {
        return reasoner::what_if(state, {request.act, request.actor, request.recipient});
    } catch (const ReasonerError& e) {
        throw from_reasoner(e);
    }
}

std::vector<TraceEntry> CaseService::trace(const std::string& id) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    const ReasonerState& state = ensure(id, *s);
    std::map<std::uint64_t, CaseEvent> by_trace;
    for (auto& e : events(id))
        if (e.trace_seq) by_trace.emplace(e.trace_seq, std::move(e));
    std::vector<TraceEntry> out;
    for (auto& entry : reasoner::explain(state)) {
        TraceEntry t{std::move(entry), std::nullopt, std::nullopt};
        if (auto it = by_trace.find(t.entry.seq); it != by_trace.end()) {
            t.user_id = it->second.user_id;
            t.at = it->second.at;
        }
        out.push_back(std::move(t));
    }
    return out;
}

CaseRecord CaseService::close_case(const std::string& id, const User& user) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    ensure(id, *s);
    if (s->record->status != CaseStatus::Open) throw ServiceError(ServiceError::Code::Conflict, "case is already closed");
    if (!directory_.may_enter_data(user))
        throw ServiceError(ServiceError::Code::PermissionDenied, "user '" + user.id + "' may not close cases");
    append(*s, EventKind::CaseClosed, user, json::object(), 0);
    s->record->status = CaseStatus::Closed;
    s->record->closed_at = clock_();
    store_.write_atomic(record_key(id), record_to_json(*s->record).dump());
    return *s->record;
}

std::vector<CaseEvent> CaseService::events(const std::string& id) const {
    std::vector<CaseEvent> out;
    for (const auto& text : store_.read_records(events_key(id))) out.push_back(event_from_json(json::parse(text)));
    return out;
}

ReasonerState CaseService::state(const std::string& id) {
    auto s = slot(id);
    std::lock_guard lock(s->mutex);
    return ensure(id, *s);
}

std::size_t CaseService::start_all() {
    std::size_t failed = 0;
    for (const auto& id : store_.list_dirs("cases")) {
        if (!store_.exists(record_key(id))) continue;
        try {
            auto s = slot(id);
            std::lock_guard lock(s->mutex);
            ensure(id, *s);
        } catch (const std::exception&) {
            ++failed;
        }
    }
    return failed;
}

bool CaseService::is_live(const std::string& id) const {
    std::lock_guard lock(slots_mutex_);
    auto it = slots_.find(id);
    if (it == slots_.end()) return false;
    std::lock_guard slot_lock(it->second->mutex);
    return it->second->state.has_value();
}

void CaseService::drop_reasoner(const std::string& id) {
    std::shared_ptr<Slot> s;
    {
        std::lock_guard lock(slots_mutex_);
        auto it = slots_.find(id);
        if (it == slots_.end()) return;
        s = it->second;
    }
    std::lock_guard lock(s->mutex);
    s->state.reset();
    s->record.reset();
}

} // namespace normcase::service
