#include "normcase/lang/printer.hpp"

#include <sstream>

namespace normcase::lang {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default: out.push_back(c);
        }
    }
    out.push_back('"');
    return out;
}

std::string args_source(const std::vector<TemplateArg>& args) {
    if (args.empty()) return {};
    std::string out = "(";
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += to_source(args[i]);
    }
    return out + ")";
}

std::string template_list(const std::vector<InstanceTemplate>& list) {
    std::string out;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (i) out += ", ";
        out += to_source(list[i]);
    }
    return out;
}

struct ExprPrinter {
    std::string operator()(const IntLiteral& x) const { return std::to_string(x.value); }
    std::string operator()(const StringLiteral& x) const { return quote(x.value); }
    std::string operator()(const BoolLiteral& x) const { return x.value ? "True" : "False"; }
    std::string operator()(const FactRef& x) const { return x.name + args_source(x.args); }
    std::string operator()(const HoldsRef& x) const { return "Holds(" + to_source(x.instance) + ")"; }
    std::string operator()(const PlaceholderRef& x) const {
        return x.which == Placeholder::Actor ? "Actor" : "Recipient";
    }
    std::string operator()(const NotExpr& x) const { return "Not " + to_source(*x.operand); }
    std::string operator()(const BinaryExpr& x) const {
        return "(" + operand(*x.lhs) + " " + std::string(to_string(x.op)) + " " + operand(*x.rhs) + ")";
    }
    // `Not` binds looser than comparisons and arithmetic.
    static std::string operand(const Expr& e) {
        if (std::holds_alternative<NotExpr>(e.node)) return "(" + to_source(e) + ")";
        return to_source(e);
    }
};

} // namespace

std::string to_source(const Literal& lit) {
    if (const auto* i = std::get_if<std::int64_t>(&lit)) return std::to_string(*i);
    return quote(std::get<std::string>(lit));
}

std::string to_source(const AssignValue& value) {
    if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
    if (const auto* b = std::get_if<bool>(&value)) return *b ? "True" : "False";
    return quote(std::get<std::string>(value));
}

std::string to_source(const TemplateArg& arg) {
    if (const auto* p = std::get_if<Placeholder>(&arg))
        return *p == Placeholder::Actor ? "Actor" : "Recipient";
    return to_source(std::get<Literal>(arg));
}

std::string to_source(const InstanceTemplate& tmpl) { return tmpl.type_name + args_source(tmpl.args); }

std::string to_source(const Expr& expr) { return std::visit(ExprPrinter{}, expr.node); }

std::string to_source(const Declaration& decl) {
    std::ostringstream out;
    if (decl.openness_explicit) out << (decl.openness == Openness::Open ? "Open " : "Closed ");
    out << to_string(decl.kind) << ' ' << decl.name;
    if (decl.domain != Domain::NoArg) out << " Identified by " << to_string(decl.domain);

    auto line = [&](std::string_view keyword, const std::string& rest) {
        out << "\n  " << keyword << ' ' << rest;
    };
    if (decl.extends) line("Extends", *decl.extends);
    if (decl.actor) line("Actor", *decl.actor);
    if (decl.recipient) line("Recipient", *decl.recipient);
    if (decl.holder) line("Holder", *decl.holder);
    if (decl.claimant) line("Claimant", *decl.claimant);
    if (decl.syncs_with) line("Syncs with", *decl.syncs_with);
    if (decl.holds_when) line("Holds when", to_source(*decl.holds_when));
    if (decl.conditioned_by) line("Conditioned by", to_source(*decl.conditioned_by));
    if (decl.violated_when) line("Violated when", to_source(*decl.violated_when));
    if (!decl.creates.empty()) line("Creates", template_list(decl.creates));
    if (!decl.terminates.empty()) line("Terminates", template_list(decl.terminates));
    if (!decl.terminated_by.empty()) {
        std::string names;
        for (std::size_t i = 0; i < decl.terminated_by.size(); ++i) {
            if (i) names += ", ";
            names += decl.terminated_by[i];
        }
        line("Terminated by", names);
    }
    out << '.';
    return out.str();
}

std::string to_source(const Statement& stmt) {
    std::string out;
    switch (stmt.kind) {
    case StatementKind::Create: out = "+"; break;
    case StatementKind::Terminate: out = "-"; break;
    case StatementKind::Assign: out = "="; break;
    }
    out += stmt.type_name;
    if (stmt.value) out += "(" + to_source(*stmt.value) + ")";
    return out + ".";
}

std::string to_source(const Specification& spec) {
    std::string out;
    for (const auto& d : spec.declarations) out += to_source(d) + "\n";
    if (!spec.declarations.empty() && !spec.statements.empty()) out += "\n";
    for (const auto& s : spec.statements) out += to_source(s) + "\n";
    return out;
}

} // namespace normcase::lang
