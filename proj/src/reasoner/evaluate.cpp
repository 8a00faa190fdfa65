#include "normcase/reasoner/engine.hpp"

#include "normcase/lang/printer.hpp"

namespace normcase::reasoner {

using lang::DeclKind;
using lang::Declaration;
using lang::Openness;

namespace {

const Declaration& require_decl(const ReasonerState& state, const std::string& type) {
    const Declaration* d = state.model->find(type);
    if (!d) throw ReasonerError(ReasonerError::Kind::UnknownType, "unknown type '" + type + "'");
    return *d;
}

TruthValue absent_truth(const Declaration& d) {
    return d.openness == Openness::Open ? TruthValue::Unknown : TruthValue::False;
}

bool duty_active(const ReasonerState& state, const std::string& type, const std::optional<Literal>& holder) {
    for (const auto& d : state.duties)
        if (d.type == type && (!holder || d.holder == *holder)) return true;
    return false;
}

// Truth of "some instance of this type holds".
TruthValue any_holds(const ReasonerState& state, const Declaration& d) {
    if (d.kind == DeclKind::Duty) return from_bool(duty_active(state, d.name, std::nullopt));
    auto it = state.base_facts.lower_bound(Instance{d.name, std::nullopt});
    for (; it != state.base_facts.end() && it->first.type == d.name; ++it)
        if (it->second == TruthValue::True) return TruthValue::True;
    return absent_truth(d);
}

Value scalar_of_var(const ReasonerState& state, const Declaration& d) {
    auto it = state.base_facts.lower_bound(Instance{d.name, std::nullopt});
    for (; it != state.base_facts.end() && it->first.type == d.name; ++it) {
        if (it->second != TruthValue::True || !it->first.arg) continue;
        if (const auto* i = std::get_if<std::int64_t>(&*it->first.arg)) return *i;
        return std::get<std::string>(*it->first.arg);
    }
    return UnknownScalar{};
}

Literal bind(const lang::TemplateArg& arg, const Binding& binding) {
    if (const auto* lit = std::get_if<Literal>(&arg)) return *lit;
    const auto which = std::get<lang::Placeholder>(arg);
    const auto& slot = which == lang::Placeholder::Actor ? binding.actor : binding.recipient;
    if (!slot)
        throw ReasonerError(ReasonerError::Kind::UnboundPlaceholder,
                            which == lang::Placeholder::Actor ? "no Actor bound" : "no Recipient bound");
    return *slot;
}

Value from_literal(const Literal& lit) {
    if (const auto* i = std::get_if<std::int64_t>(&lit)) return *i;
    return std::get<std::string>(lit);
}

TruthValue as_truth(const Value& v) {
    if (const auto* t = std::get_if<TruthValue>(&v)) return *t;
    throw ReasonerError(ReasonerError::Kind::Malformed, "expected a truth value");
}

struct Evaluator {
    const ReasonerState& state;
    const Binding& binding;

    Value operator()(const lang::IntLiteral& x) const { return x.value; }
    Value operator()(const lang::StringLiteral& x) const { return x.value; }
    Value operator()(const lang::BoolLiteral& x) const { return from_bool(x.value); }

    Value operator()(const lang::PlaceholderRef& p) const {
        return from_literal(bind(lang::TemplateArg{p.which}, binding));
    }

    Value reference(const std::string& name, const std::vector<lang::TemplateArg>& args, bool holds) const {
        const Declaration& d = require_decl(state, name);
        if (args.empty()) {
            if (d.kind == DeclKind::Var && !holds) return scalar_of_var(state, d);
            if (d.is_derived()) return truth_of(state, Instance{name, std::nullopt});
            if (d.kind == DeclKind::Duty || d.domain != lang::Domain::NoArg) return any_holds(state, d);
            return truth_of(state, Instance{name, std::nullopt});
        }
        return truth_of(state, Instance{name, bind(args.front(), binding)});
    }

    Value operator()(const lang::FactRef& r) const { return reference(r.name, r.args, false); }
    Value operator()(const lang::HoldsRef& h) const {
        return reference(h.instance.type_name, h.instance.args, true);
    }

    Value operator()(const lang::NotExpr& n) const { return kleene_not(as_truth(eval(*n.operand))); }

    Value operator()(const lang::BinaryExpr& b) const {
        using lang::BinaryOp;
        const Value l = eval(*b.lhs);
        const Value r = eval(*b.rhs);
        switch (b.op) {
        case BinaryOp::And: return kleene_and(as_truth(l), as_truth(r));
        case BinaryOp::Or: return kleene_or(as_truth(l), as_truth(r));
        default: break;
        }
        const bool unknown = std::holds_alternative<UnknownScalar>(l) || std::holds_alternative<UnknownScalar>(r);
        if (b.op == BinaryOp::Add || b.op == BinaryOp::Sub || b.op == BinaryOp::Mul) {
            if (unknown) return UnknownScalar{};
            const auto x = std::get<std::int64_t>(l);
            const auto y = std::get<std::int64_t>(r);
            std::int64_t out = 0;
            bool overflow = false;
            if (b.op == BinaryOp::Add) overflow = __builtin_add_overflow(x, y, &out);
            else if (b.op == BinaryOp::Sub) overflow = __builtin_sub_overflow(x, y, &out);
            else overflow = __builtin_mul_overflow(x, y, &out);
            if (overflow) return UnknownScalar{};
            return out;
        }
        if (unknown) return TruthValue::Unknown;
        if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
            // Mixed int/string only arises through Actor/Recipient and is simply unequal.
            const bool eq = l == r;
            return from_bool(b.op == BinaryOp::Eq ? eq : !eq);
        }
        const auto* x = std::get_if<std::int64_t>(&l);
        const auto* y = std::get_if<std::int64_t>(&r);
        if (!x || !y) return TruthValue::False;
        switch (b.op) {
        case BinaryOp::Lt: return from_bool(*x < *y);
        case BinaryOp::Le: return from_bool(*x <= *y);
        case BinaryOp::Ge: return from_bool(*x >= *y);
        case BinaryOp::Gt: return from_bool(*x > *y);
        default: return TruthValue::Unknown;
        }
    }

    Value eval(const lang::Expr& e) const { return std::visit(*this, e.node); }
};

void split_conjuncts(const lang::ExprPtr& e, std::vector<lang::ExprPtr>& out) {
    if (!e) return;
    if (const auto* b = std::get_if<lang::BinaryExpr>(&e->node); b && b->op == lang::BinaryOp::And) {
        split_conjuncts(b->lhs, out);
        split_conjuncts(b->rhs, out);
        return;
    }
    out.push_back(e);
}

ActStatus status_of(const ReasonerState& state, const Declaration& physical, const Binding& binding) {
    const Declaration& inst = state.model->institutional_of(physical);
    ActStatus status;
    status.act = physical.name;
    status.institutional = inst.name;

    std::vector<lang::ExprPtr> clauses;
    split_conjuncts(physical.holds_when, clauses);
    split_conjuncts(physical.conditioned_by, clauses);
    split_conjuncts(inst.holds_when, clauses);
    split_conjuncts(inst.conditioned_by, clauses);

    bool any_false = false;
    bool all_true = true;
    for (const auto& c : clauses) {
        TruthValue v;
        try {
            v = eval_truth(state, *c, binding);
        } catch (const ReasonerError& e) {
            if (e.kind() != ReasonerError::Kind::UnboundPlaceholder) throw;
            v = TruthValue::Unknown;
        }
        any_false = any_false || v == TruthValue::False;
        all_true = all_true && v == TruthValue::True;
        status.reasons.push_back({lang::to_source(*c), v});
    }
    status.status = any_false ? Enablement::Disabled : all_true ? Enablement::Enabled : Enablement::Undetermined;
    return status;
}

} // namespace

TruthValue truth_of(const ReasonerState& state, const Instance& instance) {
    const Declaration& d = require_decl(state, instance.type);
    if (d.is_derived()) return eval_truth(state, *d.holds_when);
    if (d.kind == DeclKind::Duty) return from_bool(duty_active(state, d.name, instance.arg));
    if (auto it = state.base_facts.find(instance); it != state.base_facts.end()) return it->second;
    if (d.is_single_instance()) {
        auto it = state.base_facts.lower_bound(Instance{d.name, std::nullopt});
        for (; it != state.base_facts.end() && it->first.type == d.name; ++it)
            if (it->second == TruthValue::True) return TruthValue::False;
    }
    return absent_truth(d);
}

Value eval_expr(const ReasonerState& state, const lang::Expr& expr, const Binding& binding) {
    return Evaluator{state, binding}.eval(expr);
}

TruthValue eval_truth(const ReasonerState& state, const lang::Expr& expr, const Binding& binding) {
    return as_truth(eval_expr(state, expr, binding));
}

std::vector<ActStatus> act_statuses(const ReasonerState& state, const Binding& binding) {
    std::vector<ActStatus> out;
    for (const auto* p : state.model->physical_acts()) out.push_back(status_of(state, *p, binding));
    return out;
}

ActStatus act_status(const ReasonerState& state, std::string_view act, const Binding& binding) {
    const Declaration* p = state.model->resolve_executable(act);
    if (!p) throw ReasonerError(ReasonerError::Kind::UnknownAct, "unknown act '" + std::string(act) + "'");
    return status_of(state, *p, binding);
}

std::string_view to_string(Enablement e) {
    switch (e) {
    case Enablement::Enabled: return "enabled";
    case Enablement::Disabled: return "disabled";
    case Enablement::Undetermined: return "undetermined";
    }
    return "?";
}

} // namespace normcase::reasoner
