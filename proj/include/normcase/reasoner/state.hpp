#pragma once

#include "normcase/lang/ast.hpp"
#include "normcase/reasoner/model.hpp"
#include "normcase/reasoner/truth.hpp"

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace normcase::reasoner {

using lang::Literal;

/// A ground fact: type name plus optional identifier argument.
struct Instance {
    std::string type;
    std::optional<Literal> arg;

    friend auto operator<=>(const Instance&, const Instance&) = default;
    friend bool operator==(const Instance&, const Instance&) = default;
};

struct DutyInstance {
    std::string type;
    Literal holder;
    std::optional<Literal> claimant;
    std::uint64_t created_at = 0; // seq of the DutyCreated event
    bool violated = false;

    friend bool operator==(const DutyInstance&, const DutyInstance&) = default;
};

enum class ViolationKind { NonCompliantAct, DutyViolation };

struct Violation {
    ViolationKind kind = ViolationKind::NonCompliantAct;
    std::string subject;                // act name or duty type
    Literal party;                      // actor, or duty holder
    std::optional<Literal> counterparty; // recipient, or duty claimant
    std::uint64_t at_seq = 0;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// A stored assignment before and after a transition; nullopt = unassigned.
struct FactChange {
    Instance instance;
    std::optional<TruthValue> before;
    std::optional<TruthValue> after;

    friend bool operator==(const FactChange&, const FactChange&) = default;
};

enum class TraceKind { InitStatement, FactSet, ActExecuted, DutyCreated, DutyTerminated, ViolationRaised };

struct TraceEvent {
    std::uint64_t seq = 0;
    TraceKind kind = TraceKind::InitStatement;
    std::string subject;          // fact type, act, duty type or violation subject
    std::optional<Literal> first;  // instance argument, actor, or holder
    std::optional<Literal> second; // recipient or claimant
    std::string note;             // statement text, assigned value, act status, violation kind
    std::vector<FactChange> changes;

    friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct ActInvocation {
    std::string act;
    Literal actor;
    std::optional<Literal> recipient;

    friend bool operator==(const ActInvocation&, const ActInvocation&) = default;
};

/// Replayable inputs. Institutional effects are recomputed on replay.
struct FactInput {
    Instance instance;
    TruthValue value = TruthValue::True;

    friend bool operator==(const FactInput&, const FactInput&) = default;
};
struct ActInput {
    ActInvocation invocation;
    bool confirmed = false;

    friend bool operator==(const ActInput&, const ActInput&) = default;
};
using InputEvent = std::variant<FactInput, ActInput>;

/// Per-case world. Copyable value; the model is shared and immutable.
struct ReasonerState {
    std::shared_ptr<const Model> model;
    std::string model_version;
    std::map<Instance, TruthValue> base_facts;
    std::vector<DutyInstance> duties; // active duties, creation order
    std::vector<Violation> violations;
    std::vector<TraceEvent> trace;

    std::uint64_t seq() const { return trace.size(); }

    /// Structural equality; the model pointer is not compared.
    friend bool operator==(const ReasonerState& a, const ReasonerState& b) {
        return a.model_version == b.model_version && a.base_facts == b.base_facts &&
               a.duties == b.duties && a.violations == b.violations && a.trace == b.trace;
    }
};

class ReasonerError : public std::runtime_error {
public:
    enum class Kind {
        UnknownType,
        NotAFact,
        DerivedFact,
        Arity,
        UnknownAct,
        MissingRecipient,
        UnexpectedRecipient,
        UnboundPlaceholder,
        IncompatibleVersion,
        Malformed,
    };

    ReasonerError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

std::string_view to_string(ViolationKind kind);
std::string_view to_string(TraceKind kind);
std::string to_display(const Literal& lit);
std::string to_display(const Instance& inst);

} // namespace normcase::reasoner
