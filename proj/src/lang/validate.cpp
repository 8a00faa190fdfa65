#include "normcase/lang/validate.hpp"

#include "normcase/lang/parser.hpp"

#include <functional>
#include <map>
#include <set>

namespace normcase::lang {

namespace {

using DeclIndex = std::map<std::string, const Declaration*, std::less<>>;

DeclIndex index_first(const Specification& spec) {
    DeclIndex index;
    for (const auto& d : spec.declarations) index.emplace(d.name, &d);
    return index;
}

void error(Diagnostics& out, SourceSpan span, std::string message) {
    out.push_back({Severity::Error, std::move(message), span});
}

// Follows `extends` links to the chain root. Returns nullptr on a cycle or
// an unknown base and reports it once for the starting declaration.
const Declaration* chain_root(const Declaration& start, const DeclIndex& index, Diagnostics& diags) {
    std::set<std::string> seen{start.name};
    const Declaration* cur = &start;
    while (cur->extends) {
        auto it = index.find(*cur->extends);
        if (it == index.end()) {
            error(diags, start.span,
                  "'" + cur->name + "' extends unknown declaration '" + *cur->extends + "'");
            return nullptr;
        }
        cur = it->second;
        if (!seen.insert(cur->name).second) {
            error(diags, start.span, "extension cycle involving '" + start.name + "'");
            return nullptr;
        }
    }
    return cur;
}

} // namespace

FlattenResult flatten_extensions(const Specification& spec) {
    FlattenResult out;
    const DeclIndex index = index_first(spec);

    std::map<std::string, Declaration> merged;
    for (const auto& d : spec.declarations)
        if (!d.extends) merged.emplace(d.name, d);

    for (const auto& ext : spec.declarations) {
        if (!ext.extends) continue;
        const Declaration* root = chain_root(ext, index, out.diagnostics);
        if (!root) continue;
        Declaration& base = merged.at(root->name);
        base.creates.insert(base.creates.end(), ext.creates.begin(), ext.creates.end());
        base.terminates.insert(base.terminates.end(), ext.terminates.begin(), ext.terminates.end());
        base.terminated_by.insert(base.terminated_by.end(), ext.terminated_by.begin(),
                                  ext.terminated_by.end());
        base.holds_when = make_and(base.holds_when, ext.holds_when);
        base.conditioned_by = make_and(base.conditioned_by, ext.conditioned_by);
        base.violated_when = make_and(base.violated_when, ext.violated_when);
    }

    std::set<std::string> emitted;
    for (const auto& d : spec.declarations) {
        if (d.extends || !emitted.insert(d.name).second) continue;
        out.spec.declarations.push_back(merged.at(d.name));
    }
    // Duplicate roots are kept verbatim; validate() reports them.
    for (const auto& d : spec.declarations) {
        if (d.extends) continue;
        if (index.at(d.name) != &d) out.spec.declarations.push_back(d);
    }
    out.spec.statements = spec.statements;
    return out;
}

namespace {

enum class Type { Int, String, Bool, Party, Error };

std::string_view type_name(Type t) {
    switch (t) {
    case Type::Int: return "Int";
    case Type::String: return "String";
    case Type::Bool: return "truth value";
    case Type::Party: return "party";
    case Type::Error: return "<error>";
    }
    return "?";
}

struct ExprContext {
    const Declaration* owner = nullptr;
    bool allow_actor = false;
    bool allow_recipient = false;
};

class Checker {
public:
    Checker(const Specification& spec, Diagnostics& diags) : spec_(spec), diags_(diags) {
        index_ = index_first(spec);
    }

    void run() {
        for (const auto& d : spec_.declarations) check_declaration(d);
        for (const auto& s : spec_.statements) check_statement(s);
        check_derived_cycles();
    }

private:
    const Specification& spec_;
    Diagnostics& diags_;
    DeclIndex index_;

    const Declaration* lookup(const std::string& name) const {
        auto it = index_.find(name);
        return it == index_.end() ? nullptr : it->second;
    }

    void err(SourceSpan span, const Declaration* owner, const std::string& message) {
        error(diags_, span, owner ? "in " + owner->name + ": " + message : message);
    }

    void forbid(const Declaration& d, bool present, std::string_view clause) {
        if (present)
            err(d.span, &d,
                "'" + std::string(clause) + "' is not allowed on " + std::string(to_string(d.kind)));
    }

    void check_declaration(const Declaration& d) {
        const bool is_act = d.is_act();
        const bool is_duty = d.kind == DeclKind::Duty;

        forbid(d, d.actor && !is_act, "Actor");
        forbid(d, d.recipient && !is_act, "Recipient");
        forbid(d, d.holder && !is_duty, "Holder");
        forbid(d, d.claimant && !is_duty, "Claimant");
        forbid(d, d.syncs_with && d.kind != DeclKind::PhysicalAct, "Syncs with");
        forbid(d, d.holds_when && !(is_act || d.kind == DeclKind::Fact), "Holds when");
        forbid(d, d.conditioned_by && !is_act, "Conditioned by");
        forbid(d, d.violated_when && !is_duty, "Violated when");
        forbid(d, !d.creates.empty() && d.kind != DeclKind::Act, "Creates");
        forbid(d, !d.terminates.empty() && d.kind != DeclKind::Act, "Terminates");
        forbid(d, !d.terminated_by.empty() && !is_duty, "Terminated by");
        forbid(d, d.domain != Domain::NoArg && (is_act || is_duty), "Identified by");
        forbid(d, d.openness_explicit && (is_act || is_duty), "Open/Closed");

        switch (d.kind) {
        case DeclKind::Var:
            if (d.domain == Domain::NoArg)
                err(d.span, &d, "Var must be Identified by Int or String");
            break;
        case DeclKind::Bool:
            if (d.domain != Domain::NoArg) err(d.span, &d, "Bool cannot carry 'Identified by'");
            break;
        case DeclKind::Fact:
            if (d.holds_when && d.domain != Domain::NoArg)
                err(d.span, &d, "derived facts cannot carry 'Identified by'");
            break;
        case DeclKind::PhysicalAct:
            if (!d.syncs_with) {
                err(d.span, &d, "Physical Act requires 'Syncs with' naming an Act");
            } else {
                const Declaration* target = lookup(*d.syncs_with);
                if (!target) err(d.span, &d, "unresolved name '" + *d.syncs_with + "' in 'Syncs with'");
                else if (target->kind != DeclKind::Act)
                    err(d.span, &d, "'Syncs with' target '" + target->name + "' is not an Act");
            }
            break;
        case DeclKind::Duty:
            for (const auto& name : d.terminated_by) {
                const Declaration* target = lookup(name);
                if (!target) err(d.span, &d, "unresolved name '" + name + "' in 'Terminated by'");
                else if (!target->is_act())
                    err(d.span, &d, "'Terminated by' target '" + name + "' is not an act");
            }
            break;
        case DeclKind::Act: break;
        }

        ExprContext ctx{&d, false, false};
        if (is_act) {
            ctx.allow_actor = true;
            ctx.allow_recipient = act_has_recipient(d);
        } else if (is_duty) {
            ctx.allow_actor = ctx.allow_recipient = true;
        }
        check_bool_clause(d.holds_when, ctx, "Holds when");
        check_bool_clause(d.conditioned_by, ctx, "Conditioned by");
        check_bool_clause(d.violated_when, ctx, "Violated when");

        for (const auto& t : d.creates) check_effect_template(t, ctx, "Creates");
        for (const auto& t : d.terminates) check_effect_template(t, ctx, "Terminates");
    }

    bool act_has_recipient(const Declaration& d) const {
        if (d.recipient) return true;
        if (d.kind == DeclKind::PhysicalAct && d.syncs_with) {
            const Declaration* inst = lookup(*d.syncs_with);
            return inst && inst->recipient;
        }
        // An institutional act also sees Recipient when a physical counterpart declares one.
        for (const auto& other : spec_.declarations)
            if (other.kind == DeclKind::PhysicalAct && other.syncs_with == d.name && other.recipient)
                return true;
        return false;
    }

    void check_bool_clause(const ExprPtr& e, const ExprContext& ctx, std::string_view clause) {
        if (!e) return;
        const Type t = check_expr(*e, ctx);
        if (t != Type::Bool && t != Type::Error)
            err(e->span, ctx.owner,
                "'" + std::string(clause) + "' needs a truth value, found " + std::string(type_name(t)));
    }

    bool literal_fits(const Literal& lit, Domain domain) const {
        return domain == Domain::Int ? std::holds_alternative<std::int64_t>(lit)
                                     : std::holds_alternative<std::string>(lit);
    }

    // Arity and argument typing shared by effects and Holds references.
    void check_args(const std::string& type, const std::vector<TemplateArg>& args, SourceSpan span,
                    const Declaration& target, const ExprContext& ctx, bool allow_zero_for_domain) {
        for (const auto& a : args) {
            if (const auto* p = std::get_if<Placeholder>(&a)) {
                if (*p == Placeholder::Actor && !ctx.allow_actor)
                    err(span, ctx.owner, "'Actor' is only available inside acts and duties");
                if (*p == Placeholder::Recipient && !ctx.allow_recipient)
                    err(span, ctx.owner, "'Recipient' used but no Recipient is declared");
            }
        }
        if (target.kind == DeclKind::Duty) {
            if (args.size() > 1) err(span, ctx.owner, "duty reference '" + type + "' takes at most one argument (holder)");
            return;
        }
        if (target.domain == Domain::NoArg) {
            if (!args.empty()) err(span, ctx.owner, "'" + type + "' takes no arguments");
            return;
        }
        if (args.empty()) {
            if (!allow_zero_for_domain)
                err(span, ctx.owner, "arity mismatch: '" + type + "' needs one argument");
            return;
        }
        if (args.size() > 1) {
            err(span, ctx.owner, "arity mismatch: '" + type + "' takes one argument");
            return;
        }
        if (const auto* lit = std::get_if<Literal>(&args[0]); lit && !literal_fits(*lit, target.domain))
            err(span, ctx.owner,
                "argument of '" + type + "' must be " + std::string(to_string(target.domain)));
    }

    void check_effect_template(const InstanceTemplate& t, const ExprContext& ctx, std::string_view clause) {
        const Declaration* target = lookup(t.type_name);
        if (!target) {
            err(t.span, ctx.owner, "unresolved name '" + t.type_name + "' in '" + std::string(clause) + "'");
            return;
        }
        if (target->is_act()) {
            err(t.span, ctx.owner, "'" + t.type_name + "' is an act and cannot be created or terminated");
            return;
        }
        if (target->is_derived()) {
            err(t.span, ctx.owner, "derived fact not storable: '" + t.type_name + "'");
            return;
        }
        if (target->kind == DeclKind::Duty) {
            if (!t.args.empty())
                err(t.span, ctx.owner,
                    "duty '" + t.type_name + "' takes its Holder and Claimant from the act's Actor and Recipient");
            return;
        }
        check_args(t.type_name, t.args, t.span, *target, ctx, false);
    }

    Type check_expr(const Expr& e, const ExprContext& ctx) {
        return std::visit([&](const auto& n) { return check_node(n, e.span, ctx); }, e.node);
    }

    Type check_node(const IntLiteral&, SourceSpan, const ExprContext&) { return Type::Int; }
    Type check_node(const StringLiteral&, SourceSpan, const ExprContext&) { return Type::String; }
    Type check_node(const BoolLiteral&, SourceSpan, const ExprContext&) { return Type::Bool; }

    Type check_node(const PlaceholderRef& p, SourceSpan span, const ExprContext& ctx) {
        if (p.which == Placeholder::Actor && !ctx.allow_actor) {
            err(span, ctx.owner, "'Actor' is only available inside acts and duties");
            return Type::Error;
        }
        if (p.which == Placeholder::Recipient && !ctx.allow_recipient) {
            err(span, ctx.owner, "'Recipient' used but no Recipient is declared");
            return Type::Error;
        }
        return Type::Party;
    }

    const Declaration* resolve_ref(const std::string& name, SourceSpan span, const ExprContext& ctx) {
        const Declaration* target = lookup(name);
        if (!target) {
            err(span, ctx.owner, "unresolved name '" + name + "'");
            return nullptr;
        }
        if (target->is_act()) {
            err(span, ctx.owner, "act '" + name + "' cannot be referenced in an expression");
            return nullptr;
        }
        return target;
    }

    Type check_node(const FactRef& r, SourceSpan span, const ExprContext& ctx) {
        const Declaration* target = resolve_ref(r.name, span, ctx);
        if (!target) return Type::Error;
        if (r.args.empty() && target->kind == DeclKind::Var)
            return target->domain == Domain::Int ? Type::Int : Type::String;
        check_args(r.name, r.args, span, *target, ctx, true);
        return Type::Bool;
    }

    Type check_node(const HoldsRef& h, SourceSpan span, const ExprContext& ctx) {
        const Declaration* target = resolve_ref(h.instance.type_name, span, ctx);
        if (!target) return Type::Error;
        check_args(h.instance.type_name, h.instance.args, span, *target, ctx, true);
        return Type::Bool;
    }

    Type check_node(const NotExpr& n, SourceSpan span, const ExprContext& ctx) {
        const Type t = check_expr(*n.operand, ctx);
        if (t == Type::Error) return Type::Error;
        if (t != Type::Bool) {
            err(span, ctx.owner, "'Not' needs a truth value, found " + std::string(type_name(t)));
            return Type::Error;
        }
        return Type::Bool;
    }

    Type check_node(const BinaryExpr& b, SourceSpan span, const ExprContext& ctx) {
        const Type l = check_expr(*b.lhs, ctx);
        const Type r = check_expr(*b.rhs, ctx);
        if (l == Type::Error || r == Type::Error) return Type::Error;
        const std::string op(to_string(b.op));
        auto mismatch = [&](std::string_view want) {
            err(span, ctx.owner,
                "type error: '" + op + "' takes " + std::string(want) + ", found " +
                    std::string(type_name(l)) + " and " + std::string(type_name(r)));
            return Type::Error;
        };
        auto intlike = [](Type t) { return t == Type::Int || t == Type::Party; };
        switch (b.op) {
        case BinaryOp::Or:
        case BinaryOp::And:
            return (l == Type::Bool && r == Type::Bool) ? Type::Bool : mismatch("truth values");
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Ge:
        case BinaryOp::Gt:
            return (intlike(l) && intlike(r)) ? Type::Bool : mismatch("integers");
        case BinaryOp::Eq:
        case BinaryOp::Ne: {
            const bool ok = (l == r && l != Type::Bool) || (l == Type::Party && r != Type::Bool) ||
                            (r == Type::Party && l != Type::Bool);
            return ok ? Type::Bool : mismatch("two integers or two strings");
        }
        case BinaryOp::Add:
        case BinaryOp::Sub:
        case BinaryOp::Mul:
            return (l == Type::Int && r == Type::Int) ? Type::Int : mismatch("integers");
        }
        return Type::Error;
    }

    void check_statement(const Statement& s) {
        const Declaration* target = lookup(s.type_name);
        if (!target) {
            err(s.span, nullptr, "unresolved name '" + s.type_name + "'");
            return;
        }
        if (target->is_derived()) {
            err(s.span, nullptr, "derived fact not storable: '" + s.type_name + "'");
            return;
        }
        if (s.kind == StatementKind::Assign) {
            if (!target->is_single_instance()) {
                err(s.span, nullptr, "'=' can only assign Var or Bool types, '" + s.type_name + "' is a " +
                                         std::string(to_string(target->kind)));
                return;
            }
            const AssignValue& v = *s.value;
            const bool ok = target->kind == DeclKind::Bool ? std::holds_alternative<bool>(v)
                          : target->domain == Domain::Int  ? std::holds_alternative<std::int64_t>(v)
                                                           : std::holds_alternative<std::string>(v);
            if (!ok) err(s.span, nullptr, "type mismatch in assignment to '" + s.type_name + "'");
            return;
        }
        if (!target->is_fact_type()) {
            err(s.span, nullptr, "'" + s.type_name + "' is not a fact type; only facts can be created or terminated");
            return;
        }
        if (target->domain == Domain::NoArg) {
            if (s.value) err(s.span, nullptr, "'" + s.type_name + "' takes no arguments");
            return;
        }
        if (!s.value) {
            err(s.span, nullptr, "arity mismatch: '" + s.type_name + "' needs one argument");
            return;
        }
        const bool ok = target->domain == Domain::Int ? std::holds_alternative<std::int64_t>(*s.value)
                                                      : std::holds_alternative<std::string>(*s.value);
        if (!ok)
            err(s.span, nullptr,
                "argument of '" + s.type_name + "' must be " + std::string(to_string(target->domain)));
    }

    static void collect_refs(const Expr& e, std::set<std::string>& out) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, FactRef>) out.insert(n.name);
                else if constexpr (std::is_same_v<T, HoldsRef>) out.insert(n.instance.type_name);
                else if constexpr (std::is_same_v<T, NotExpr>) collect_refs(*n.operand, out);
                else if constexpr (std::is_same_v<T, BinaryExpr>) {
                    collect_refs(*n.lhs, out);
                    collect_refs(*n.rhs, out);
                }
            },
            e.node);
    }

    void check_derived_cycles() {
        std::map<std::string, std::set<std::string>> deps;
        for (const auto& d : spec_.declarations) {
            if (!d.is_derived()) continue;
            std::set<std::string> refs;
            collect_refs(*d.holds_when, refs);
            auto& edges = deps[d.name];
            for (const auto& r : refs) {
                const Declaration* t = lookup(r);
                if (t && t->is_derived()) edges.insert(r);
            }
        }
        enum class Mark { None, Active, Done };
        std::map<std::string, Mark> mark;
        std::set<std::string> reported;
        std::function<bool(const std::string&)> visit = [&](const std::string& n) {
            if (mark[n] == Mark::Active) return true;
            if (mark[n] == Mark::Done) return false;
            mark[n] = Mark::Active;
            bool cycle = false;
            for (const auto& m : deps[n]) cycle = visit(m) || cycle;
            mark[n] = Mark::Done;
            return cycle;
        };
        for (const auto& [name, _] : deps) {
            if (mark[name] != Mark::None) continue;
            if (visit(name) && reported.insert(name).second)
                err(lookup(name)->span, lookup(name), "derived fact depends on itself");
        }
    }
};

} // namespace

Diagnostics validate(const Specification& spec) {
    Diagnostics diags;

    std::map<std::string, const Declaration*> seen;
    for (const auto& d : spec.declarations) {
        auto [it, fresh] = seen.emplace(d.name, &d);
        if (!fresh) error(diags, d.span, "duplicate declaration name '" + d.name + "'");
    }

    const DeclIndex index = index_first(spec);
    Diagnostics chain_diags;
    for (const auto& ext : spec.declarations) {
        if (!ext.extends) continue;
        const Declaration* root = chain_root(ext, index, chain_diags);
        if (!root) continue;
        if (root->kind != ext.kind)
            error(diags, ext.span,
                  "in " + ext.name + ": extension kind " + std::string(to_string(ext.kind)) +
                      " differs from base kind " + std::string(to_string(root->kind)));
        auto redefines = [&](bool present, std::string_view clause) {
            if (present)
                error(diags, ext.span,
                      "in " + ext.name + ": an extension may not redefine '" + std::string(clause) + "'");
        };
        redefines(ext.openness_explicit, "Open/Closed");
        redefines(ext.domain != Domain::NoArg, "Identified by");
        redefines(ext.actor.has_value(), "Actor");
        redefines(ext.recipient.has_value(), "Recipient");
        redefines(ext.holder.has_value(), "Holder");
        redefines(ext.claimant.has_value(), "Claimant");
        redefines(ext.syncs_with.has_value(), "Syncs with");
        if (root->kind == DeclKind::Fact && !root->holds_when && ext.holds_when)
            error(diags, ext.span,
                  "in " + ext.name + ": an extension cannot turn stored fact '" + root->name +
                      "' into a derived fact");
    }

    FlattenResult flat = flatten_extensions(spec);
    diags.insert(diags.end(), flat.diagnostics.begin(), flat.diagnostics.end());
    Checker(flat.spec, diags).run();
    return diags;
}

LoadResult load(std::string_view source) {
    LoadResult out;
    ParseResult parsed = parse(source);
    out.diagnostics = std::move(parsed.diagnostics);
    if (has_errors(out.diagnostics)) return out;
    Diagnostics diags = validate(parsed.spec);
    out.diagnostics.insert(out.diagnostics.end(), diags.begin(), diags.end());
    if (has_errors(out.diagnostics)) return out;
    out.spec = flatten_extensions(parsed.spec).spec;
    return out;
}

} // namespace normcase::lang
