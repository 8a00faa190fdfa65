#include "normcase/reasoner/engine.hpp"

#include "normcase/lang/printer.hpp"

#include <algorithm>

namespace normcase::reasoner {

using lang::DeclKind;
using lang::Declaration;
using lang::Openness;

namespace {

const Declaration& require_fact_type(const Model& model, const std::string& type) {
    const Declaration* d = model.find(type);
    if (!d) throw ReasonerError(ReasonerError::Kind::UnknownType, "unknown type '" + type + "'");
    if (d->is_derived())
        throw ReasonerError(ReasonerError::Kind::DerivedFact, "derived fact not storable: '" + type + "'");
    if (!d->is_fact_type())
        throw ReasonerError(ReasonerError::Kind::NotAFact, "'" + type + "' is not a fact type");
    return *d;
}

void check_arity(const Declaration& d, const std::optional<Literal>& arg, bool allow_missing) {
    const auto fail = [&](const std::string& why) {
        throw ReasonerError(ReasonerError::Kind::Arity, "arity mismatch for '" + d.name + "': " + why);
    };
    switch (d.domain) {
    case lang::Domain::NoArg:
        if (arg) fail("takes no argument");
        return;
    case lang::Domain::Int:
        if (!arg) {
            if (!allow_missing) fail("needs an Int argument");
            return;
        }
        if (!std::holds_alternative<std::int64_t>(*arg)) fail("argument must be Int");
        return;
    case lang::Domain::String:
        if (!arg) {
            if (!allow_missing) fail("needs a String argument");
            return;
        }
        if (!std::holds_alternative<std::string>(*arg)) fail("argument must be String");
        return;
    }
}

bool is_party(const Literal& who, const ActInvocation& inv) {
    return who == inv.actor || (inv.recipient && who == *inv.recipient);
}

// A duty is discharged by an act whose parties include the duty's holder
// and, when the duty has one, its claimant.
bool parties_cover(const DutyInstance& duty, const ActInvocation& inv) {
    return is_party(duty.holder, inv) && (!duty.claimant || is_party(*duty.claimant, inv));
}

/// Applies transition rules to a state in place, appending trace events.
class Transition {
public:
    explicit Transition(ReasonerState& state) : s_(state) {}

    TraceEvent& push(TraceEvent ev) {
        ev.seq = s_.trace.size() + 1;
        s_.trace.push_back(std::move(ev));
        return s_.trace.back();
    }

    std::optional<TruthValue> stored(const Instance& inst) const {
        auto it = s_.base_facts.find(inst);
        if (it == s_.base_facts.end()) return std::nullopt;
        return it->second;
    }

    void write(const Instance& inst, std::optional<TruthValue> value, std::vector<FactChange>& changes) {
        const auto before = stored(inst);
        if (before == value) return;
        if (value) s_.base_facts[inst] = *value;
        else s_.base_facts.erase(inst);
        changes.push_back({inst, before, value});
    }

    /// Stores a definite or unknown value under the single-instance and
    /// closed-world normalisation rules.
    void assign(const Declaration& d, const Instance& inst, TruthValue value, std::vector<FactChange>& changes) {
        if (d.is_single_instance()) {
            std::vector<Instance> others;
            auto it = s_.base_facts.lower_bound(Instance{d.name, std::nullopt});
            for (; it != s_.base_facts.end() && it->first.type == d.name; ++it)
                if (value == TruthValue::Unknown || it->first != inst) others.push_back(it->first);
            for (const auto& o : others) write(o, std::nullopt, changes);
            if (value == TruthValue::Unknown) return;
        }
        std::optional<TruthValue> target = value;
        if (value == TruthValue::Unknown || (value == TruthValue::False && d.openness == Openness::Closed))
            target = std::nullopt;
        write(inst, target, changes);
    }

    /// Removes a held instance. Not held is a no-op.
    void terminate_fact(const Declaration& d, const Instance& inst, std::vector<FactChange>& changes) {
        if (stored(inst) != TruthValue::True) return;
        write(inst, d.openness == Openness::Closed ? std::nullopt : std::optional{TruthValue::False}, changes);
    }

    void create_duty(const std::string& type, const ActInvocation& inv, ExecutionReport* report) {
        const auto same = [&](const DutyInstance& d) {
            return d.type == type && d.holder == inv.actor && d.claimant == inv.recipient;
        };
        if (std::any_of(s_.duties.begin(), s_.duties.end(), same)) return;
        TraceEvent& ev = push({0, TraceKind::DutyCreated, type, inv.actor, inv.recipient, inv.act, {}});
        DutyInstance duty{type, inv.actor, inv.recipient, ev.seq, false};
        s_.duties.push_back(duty);
        if (report) report->duties_created.push_back(duty);
    }

    void terminate_duty(std::size_t index, const std::string& cause, ExecutionReport* report) {
        DutyInstance duty = s_.duties[index];
        s_.duties.erase(s_.duties.begin() + static_cast<std::ptrdiff_t>(index));
        push({0, TraceKind::DutyTerminated, duty.type, duty.holder, duty.claimant, cause, {}});
        if (report) report->duties_terminated.push_back(std::move(duty));
    }

    void raise(Violation v, ExecutionReport* report) {
        TraceEvent& ev = push({0, TraceKind::ViolationRaised, v.subject, v.party, v.counterparty,
                               std::string(to_string(v.kind)), {}});
        v.at_seq = ev.seq;
        s_.violations.push_back(v);
        if (report) report->violations.push_back(std::move(v));
    }

    /// Edge-triggered: each duty instance is flagged and reported once.
    void check_duty_violations(ExecutionReport* report) {
        for (std::size_t i = 0; i < s_.duties.size(); ++i) {
            if (s_.duties[i].violated) continue;
            const Declaration* d = s_.model->find(s_.duties[i].type);
            if (!d || !d->violated_when) continue;
            const Binding binding{s_.duties[i].holder, s_.duties[i].claimant};
            if (eval_truth(s_, *d->violated_when, binding) != TruthValue::True) continue;
            s_.duties[i].violated = true;
            const DutyInstance duty = s_.duties[i];
            raise({ViolationKind::DutyViolation, duty.type, duty.holder, duty.claimant, 0}, report);
        }
    }

    void apply_statement(const lang::Statement& stmt) {
        const Declaration& d = require_fact_type(*s_.model, stmt.type_name);
        TraceEvent ev{0, TraceKind::InitStatement, stmt.type_name, std::nullopt, std::nullopt,
                      lang::to_source(stmt), {}};
        std::vector<FactChange> changes;
        switch (stmt.kind) {
        case lang::StatementKind::Assign: {
            if (!d.is_single_instance())
                throw ReasonerError(ReasonerError::Kind::NotAFact,
                                    "assignment target '" + stmt.type_name + "' is not a Var or Bool");
            const lang::AssignValue& v = *stmt.value;
            if (const auto* b = std::get_if<bool>(&v)) {
                assign(d, Instance{d.name, std::nullopt}, from_bool(*b), changes);
            } else {
                Literal lit = std::holds_alternative<std::int64_t>(v) ? Literal{std::get<std::int64_t>(v)}
                                                                      : Literal{std::get<std::string>(v)};
                check_arity(d, lit, false);
                ev.first = lit;
                assign(d, Instance{d.name, lit}, TruthValue::True, changes);
            }
            break;
        }
        case lang::StatementKind::Create:
        case lang::StatementKind::Terminate: {
            std::optional<Literal> arg;
            if (stmt.value) {
                if (const auto* i = std::get_if<std::int64_t>(&*stmt.value)) arg = *i;
                else if (const auto* str = std::get_if<std::string>(&*stmt.value)) arg = *str;
            }
            check_arity(d, arg, false);
            ev.first = arg;
            const Instance inst{d.name, arg};
            if (stmt.kind == lang::StatementKind::Create) assign(d, inst, TruthValue::True, changes);
            else terminate_fact(d, inst, changes);
            break;
        }
        }
        ev.changes = std::move(changes);
        push(std::move(ev));
    }

    void set_fact(const Instance& instance, TruthValue value) {
        const Declaration& d = require_fact_type(*s_.model, instance.type);
        check_arity(d, instance.arg, d.is_single_instance() && value == TruthValue::Unknown);
        std::vector<FactChange> changes;
        assign(d, instance, value, changes);
        push({0, TraceKind::FactSet, instance.type, instance.arg, std::nullopt, std::string(to_string(value)),
              std::move(changes)});
        check_duty_violations(nullptr);
    }

    void execute(const Declaration& physical, const ActInvocation& inv, const ActStatus& status,
                 ExecutionReport& report) {
        const Declaration& inst = s_.model->institutional_of(physical);
        const Binding binding{inv.actor, inv.recipient};

        const std::size_t act_index = s_.trace.size();
        push({0, TraceKind::ActExecuted, physical.name, inv.actor, inv.recipient,
              std::string(to_string(status.status)), {}});
        std::vector<FactChange> changes;

        for (const auto& t : inst.terminates) {
            const Declaration& target = *s_.model->find(t.type_name);
            if (target.kind == DeclKind::Duty) {
                for (std::size_t i = s_.duties.size(); i-- > 0;)
                    if (s_.duties[i].type == target.name && parties_cover(s_.duties[i], inv))
                        terminate_duty(i, inst.name, &report);
                continue;
            }
            std::optional<Literal> arg;
            if (!t.args.empty()) arg = bind_arg(t.args.front(), binding);
            terminate_fact(target, Instance{target.name, arg}, changes);
        }

        const std::size_t first_new_duty = s_.duties.size();
        for (const auto& t : inst.creates) {
            const Declaration& target = *s_.model->find(t.type_name);
            if (target.kind == DeclKind::Duty) {
                create_duty(target.name, inv, &report);
                continue;
            }
            std::optional<Literal> arg;
            if (!t.args.empty()) arg = bind_arg(t.args.front(), binding);
            check_arity(target, arg, false);
            assign(target, Instance{target.name, arg}, TruthValue::True, changes);
        }

        s_.trace[act_index].changes = changes;
        report.fact_changes = std::move(changes);

        if (status.status != Enablement::Enabled)
            raise({ViolationKind::NonCompliantAct, physical.name, inv.actor, inv.recipient, 0}, &report);

        // Duties naming this act in `Terminated by`; duties created by this
        // very execution are left alone.
        for (std::size_t i = first_new_duty; i-- > 0;) {
            const Declaration* dd = s_.model->find(s_.duties[i].type);
            const auto& names = dd->terminated_by;
            const bool listed = std::find(names.begin(), names.end(), inst.name) != names.end() ||
                                std::find(names.begin(), names.end(), physical.name) != names.end();
            if (listed && parties_cover(s_.duties[i], inv)) terminate_duty(i, physical.name, &report);
        }

        check_duty_violations(&report);
    }

private:
    ReasonerState& s_;

    static Literal bind_arg(const lang::TemplateArg& arg, const Binding& binding) {
        if (const auto* lit = std::get_if<Literal>(&arg)) return *lit;
        const auto which = std::get<lang::Placeholder>(arg);
        const auto& slot = which == lang::Placeholder::Actor ? binding.actor : binding.recipient;
        if (!slot) throw ReasonerError(ReasonerError::Kind::UnboundPlaceholder, "placeholder not bound");
        return *slot;
    }
};

} // namespace

ReasonerState init_state(std::shared_ptr<const Model> model, std::string model_version) {
    ReasonerState state;
    state.model = std::move(model);
    state.model_version = std::move(model_version);
    Transition t(state);
    for (const auto& stmt : state.model->spec().statements) t.apply_statement(stmt);
    return state;
}

ReasonerState set_fact(ReasonerState state, const Instance& instance, TruthValue value) {
    Transition(state).set_fact(instance, value);
    return state;
}

ExecutionResult execute_act(ReasonerState state, const ActInvocation& invocation, bool confirm_violation) {
    const Declaration* physical = state.model->resolve_executable(invocation.act);
    if (!physical)
        throw ReasonerError(ReasonerError::Kind::UnknownAct,
                            "unknown or ambiguous physical act '" + invocation.act + "'");
    const bool wants_recipient = state.model->takes_recipient(*physical);
    if (wants_recipient && !invocation.recipient)
        throw ReasonerError(ReasonerError::Kind::MissingRecipient,
                            "act '" + physical->name + "' requires a recipient");
    if (!wants_recipient && invocation.recipient)
        throw ReasonerError(ReasonerError::Kind::UnexpectedRecipient,
                            "act '" + physical->name + "' declares no Recipient");

    ActInvocation inv = invocation;
    inv.act = physical->name;

    ExecutionReport report;
    report.invocation = inv;
    report.institutional = *physical->syncs_with;
    report.status = act_status(state, physical->name, Binding{inv.actor, inv.recipient});

    if (report.status.status != Enablement::Enabled && !confirm_violation) {
        report.requires_confirmation = true;
        return {std::move(state), std::move(report)};
    }
    Transition(state).execute(*physical, inv, report.status, report);
    report.executed = true;
    return {std::move(state), std::move(report)};
}

ExecutionReport what_if(const ReasonerState& state, const ActInvocation& invocation) {
    ExecutionResult r = execute_act(state, invocation, true);
    r.report.statuses_after = act_statuses(r.state);
    return std::move(r.report);
}

std::vector<DutyInstance> active_duties(const ReasonerState& state) {
    std::vector<DutyInstance> out = state.duties;
    std::stable_sort(out.begin(), out.end(),
                     [](const DutyInstance& a, const DutyInstance& b) { return a.created_at < b.created_at; });
    return out;
}

ReasonerState apply_input(ReasonerState state, const InputEvent& event) {
    if (const auto* f = std::get_if<FactInput>(&event)) return set_fact(std::move(state), f->instance, f->value);
    const auto& a = std::get<ActInput>(event);
    // Logged executions already happened, so replay always confirms.
    return execute_act(std::move(state), a.invocation, true).state;
}

ReasonerState replay(std::shared_ptr<const Model> model, std::span<const InputEvent> events,
                     std::string model_version) {
    ReasonerState state = init_state(std::move(model), std::move(model_version));
    for (const auto& e : events) {
        try {
            state = apply_input(std::move(state), e);
        } catch (const ReasonerError& err) {
            if (err.kind() == ReasonerError::Kind::UnknownType || err.kind() == ReasonerError::Kind::UnknownAct)
                throw ReasonerError(ReasonerError::Kind::IncompatibleVersion,
                                    std::string("incompatible model version: ") + err.what());
            throw;
        }
    }
    return state;
}

} // namespace normcase::reasoner
