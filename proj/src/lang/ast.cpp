#include "normcase/lang/ast.hpp"

namespace normcase::lang {

ExprPtr make_expr(Expr::Node node, SourceSpan span) {
    return std::make_shared<const Expr>(Expr{std::move(node), span});
}

ExprPtr make_and(ExprPtr lhs, ExprPtr rhs) {
    if (!lhs) return rhs;
    if (!rhs) return lhs;
    const SourceSpan span{lhs->span.begin, rhs->span.end};
    return make_expr(BinaryExpr{BinaryOp::And, std::move(lhs), std::move(rhs)}, span);
}

const Declaration* Specification::find(std::string_view name) const {
    for (const auto& d : declarations)
        if (d.name == name) return &d;
    return nullptr;
}

Openness default_openness(DeclKind kind) {
    return (kind == DeclKind::Var || kind == DeclKind::Bool) ? Openness::Open : Openness::Closed;
}

std::string_view to_string(DeclKind kind) {
    switch (kind) {
    case DeclKind::Fact: return "Fact";
    case DeclKind::Var: return "Var";
    case DeclKind::Bool: return "Bool";
    case DeclKind::Act: return "Act";
    case DeclKind::PhysicalAct: return "Physical Act";
    case DeclKind::Duty: return "Duty";
    }
    return "?";
}

std::string_view to_string(Domain domain) {
    switch (domain) {
    case Domain::NoArg: return "None";
    case Domain::Int: return "Int";
    case Domain::String: return "String";
    }
    return "?";
}

std::string_view to_string(BinaryOp op) {
    switch (op) {
    case BinaryOp::Or: return "||";
    case BinaryOp::And: return "&&";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Eq: return "==";
    case BinaryOp::Ne: return "!=";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    }
    return "?";
}

bool same_expr(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

namespace {

struct NodeEq {
    const Expr::Node& other;

    bool operator()(const IntLiteral& x) const { return std::get<IntLiteral>(other).value == x.value; }
    bool operator()(const StringLiteral& x) const {
        return std::get<StringLiteral>(other).value == x.value;
    }
    bool operator()(const BoolLiteral& x) const { return std::get<BoolLiteral>(other).value == x.value; }
    bool operator()(const FactRef& x) const {
        const auto& y = std::get<FactRef>(other);
        return x.name == y.name && x.args == y.args;
    }
    bool operator()(const HoldsRef& x) const { return x.instance == std::get<HoldsRef>(other).instance; }
    bool operator()(const PlaceholderRef& x) const {
        return x.which == std::get<PlaceholderRef>(other).which;
    }
    bool operator()(const NotExpr& x) const { return same_expr(x.operand, std::get<NotExpr>(other).operand); }
    bool operator()(const BinaryExpr& x) const {
        const auto& y = std::get<BinaryExpr>(other);
        return x.op == y.op && same_expr(x.lhs, y.lhs) && same_expr(x.rhs, y.rhs);
    }
};

} // namespace

bool operator==(const Expr& a, const Expr& b) {
    if (a.node.index() != b.node.index()) return false;
    return std::visit(NodeEq{b.node}, a.node);
}

bool operator==(const InstanceTemplate& a, const InstanceTemplate& b) {
    return a.type_name == b.type_name && a.args == b.args;
}

bool operator==(const Declaration& a, const Declaration& b) {
    return a.kind == b.kind && a.name == b.name && a.openness == b.openness &&
           a.openness_explicit == b.openness_explicit && a.domain == b.domain &&
           a.actor == b.actor && a.recipient == b.recipient && a.holder == b.holder &&
           a.claimant == b.claimant && a.syncs_with == b.syncs_with && a.extends == b.extends &&
           same_expr(a.holds_when, b.holds_when) && same_expr(a.conditioned_by, b.conditioned_by) &&
           same_expr(a.violated_when, b.violated_when) && a.creates == b.creates &&
           a.terminates == b.terminates && a.terminated_by == b.terminated_by;
}

bool operator==(const Statement& a, const Statement& b) {
    return a.kind == b.kind && a.type_name == b.type_name && a.value == b.value;
}

bool operator==(const Specification& a, const Specification& b) {
    return a.declarations == b.declarations && a.statements == b.statements;
}

} // namespace normcase::lang
