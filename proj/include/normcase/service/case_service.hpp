#pragma once

#include "normcase/reasoner/engine.hpp"
#include "normcase/reasoner/explain.hpp"
#include "normcase/service/directory.hpp"
#include "normcase/service/model_registry.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <mutex>

namespace normcase::service {

enum class CaseStatus { Open, Closed };
std::string_view to_string(CaseStatus s);
std::optional<CaseStatus> parse_case_status(std::string_view s);

struct CaseRecord {
    std::string id;
    std::string client_ref;
    std::string model_version;
    CaseStatus status = CaseStatus::Open;
    std::int64_t created_at = 0;
    std::optional<std::int64_t> closed_at;
    std::uint64_t event_count = 0;
    std::string snapshot_ref;
};

enum class EventKind { FactSet, ActExecuted, CaseClosed };
std::string_view to_string(EventKind k);

struct CaseEvent {
    std::string case_id;
    std::uint64_t seq = 0; // 1-based, gapless per case
    EventKind kind = EventKind::FactSet;
    std::string user_id;
    nlohmann::json payload; // reasoner input encoding, plus approvedBy for four-eyes acts
    std::int64_t at = 0;
    std::uint64_t trace_seq = 0; // reasoner trace event this input produced; 0 for CaseClosed
};

struct CaseFilter {
    std::optional<CaseStatus> status;
    std::optional<std::string> client_ref;
    std::optional<std::string> text; // case-insensitive substring of caseId or clientRef
};

struct CaseSort {
    enum class Field { CreatedAt, Status } field = Field::CreatedAt;
    bool descending = false;
};

struct FactUpdate {
    std::string type;
    nlohmann::json arg;   // null when the type takes none (or for Var, where value carries it)
    nlohmann::json value; // Var: literal or "unknown"; Bool/Fact: true, false or "unknown"
};

struct ActRequest {
    std::string act;
    reasoner::Literal actor;
    std::optional<reasoner::Literal> recipient;
    bool confirm = false;
};

struct ActOutcome {
    enum class Kind { Executed, RequiresConfirmation, PendingApproval } kind = Kind::Executed;
    reasoner::ExecutionReport report;
    std::optional<std::string> approved_by;
    nlohmann::json view;
};

struct TraceEntry {
    reasoner::ExplanationEntry entry;
    std::optional<std::string> user_id;
    std::optional<std::int64_t> at;
};

/// Cases over the reasoner with event-sourced persistence. Each case has an
/// exclusive lock; distinct cases proceed concurrently. The event log is the
/// source of truth, the snapshot is a cache of its replay.
class CaseService {
public:
    CaseService(FileStore& store, ModelRegistry& models, Directory& directory, Clock clock);

    CaseRecord create_case(const std::string& client_ref, const User& user);
    std::vector<CaseRecord> list_cases(const CaseFilter& filter, const CaseSort& sort) const;
    CaseRecord record(const std::string& id);
    nlohmann::json view(const std::string& id, const User& user);
    nlohmann::json update_fact(const std::string& id, const FactUpdate& update, const User& user);
    ActOutcome perform_act(const std::string& id, const ActRequest& request, const User& user);
    reasoner::ExecutionReport simulate(const std::string& id, const ActRequest& request);
    std::vector<TraceEntry> trace(const std::string& id);
    CaseRecord close_case(const std::string& id, const User& user);

    std::vector<CaseEvent> events(const std::string& id) const;
    reasoner::ReasonerState state(const std::string& id);

    /// Starts a reasoner for every stored case; returns how many failed.
    std::size_t start_all();
    bool is_live(const std::string& id) const;
    /// Discards the in-memory reasoner, as if it had crashed.
    void drop_reasoner(const std::string& id);

private:
    struct Slot {
        std::mutex mutex;
        std::optional<CaseRecord> record;
        std::optional<reasoner::ReasonerState> state;
    };

    FileStore& store_;
    ModelRegistry& models_;
    Directory& directory_;
    Clock clock_;
    mutable std::mutex slots_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;

    std::shared_ptr<Slot> slot(const std::string& id);
    reasoner::ReasonerState& ensure(const std::string& id, Slot& slot);
    void append(Slot& slot, EventKind kind, const User& user, nlohmann::json payload, std::uint64_t trace_seq);
    void commit(Slot& slot, reasoner::ReasonerState next);
    nlohmann::json view_locked(Slot& slot, const User& user);
};

nlohmann::json record_to_json(const CaseRecord& r);
CaseRecord record_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const CaseEvent& e);
CaseEvent event_from_json(const nlohmann::json& j);
nlohmann::json trace_entry_to_json(const TraceEntry& e);

/// Render-ready projection of a case for one user.
nlohmann::json case_view(const CaseRecord& record, const reasoner::ReasonerState& state,
                         const Directory& directory, const User& user);

} // namespace normcase::service
