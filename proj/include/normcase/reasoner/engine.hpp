#pragma once

#include "normcase/reasoner/state.hpp"

#include <span>

namespace normcase::reasoner {

/// Values bound to the `Actor` / `Recipient` placeholders.
struct Binding {
    std::optional<Literal> actor;
    std::optional<Literal> recipient;
};

/// Marks an integer or string subexpression whose inputs are not known.
struct UnknownScalar {
    friend bool operator==(UnknownScalar, UnknownScalar) { return true; }
};

using Value = std::variant<TruthValue, std::int64_t, std::string, UnknownScalar>;

enum class Enablement { Enabled, Disabled, Undetermined };

struct ClauseStatus {
    std::string clause; // pretty-printed conjunct
    TruthValue value = TruthValue::Unknown;

    friend bool operator==(const ClauseStatus&, const ClauseStatus&) = default;
};

struct ActStatus {
    std::string act;           // physical act
    std::string institutional; // synced institutional act
    bool physical = true;
    Enablement status = Enablement::Enabled;
    std::vector<ClauseStatus> reasons;

    friend bool operator==(const ActStatus&, const ActStatus&) = default;
};

struct ExecutionReport {
    ActInvocation invocation;
    std::string institutional;
    bool executed = false;
    bool requires_confirmation = false;
    ActStatus status; // before execution
    std::vector<FactChange> fact_changes;
    std::vector<DutyInstance> duties_created;
    std::vector<DutyInstance> duties_terminated;
    std::vector<Violation> violations;    // raised by this execution
    std::vector<ActStatus> statuses_after; // filled by what_if
};

struct ExecutionResult {
    ReasonerState state;
    ExecutionReport report;
};

ReasonerState init_state(std::shared_ptr<const Model> model, std::string model_version = {});

Value eval_expr(const ReasonerState& state, const lang::Expr& expr, const Binding& binding = {});
TruthValue eval_truth(const ReasonerState& state, const lang::Expr& expr, const Binding& binding = {});

/// Truth of one instance under the open/closed and single-instance rules.
TruthValue truth_of(const ReasonerState& state, const Instance& instance);

/// Status of every physical act, in declaration order. Without a binding,
/// clauses that mention Actor/Recipient evaluate to Unknown.
std::vector<ActStatus> act_statuses(const ReasonerState& state, const Binding& binding = {});
ActStatus act_status(const ReasonerState& state, std::string_view act, const Binding& binding = {});

/// Assigns a base fact. For Var/Bool, Unknown clears the type's assignment
/// (the instance argument may then be omitted).
ReasonerState set_fact(ReasonerState state, const Instance& instance, TruthValue value);

/// Executes a physical act (or an institutional act with a unique physical
/// counterpart). A non-enabled act is only performed when `confirm_violation`
/// is set; otherwise the state is returned unchanged with
/// `report.requires_confirmation`.
ExecutionResult execute_act(ReasonerState state, const ActInvocation& invocation, bool confirm_violation);

/// execute_act with confirmation on a copy; the input state is untouched.
ExecutionReport what_if(const ReasonerState& state, const ActInvocation& invocation);

/// Active duties ordered by creation.
std::vector<DutyInstance> active_duties(const ReasonerState& state);

ReasonerState apply_input(ReasonerState state, const InputEvent& event);
ReasonerState replay(std::shared_ptr<const Model> model, std::span<const InputEvent> events,
                     std::string model_version = {});

std::string_view to_string(Enablement e);

} // namespace normcase::reasoner
