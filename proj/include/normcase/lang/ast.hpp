#pragma once

#include "normcase/lang/diagnostic.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace normcase::lang {

/// Identifier argument of an instance: an integer or a string.
using Literal = std::variant<std::int64_t, std::string>;

/// Right-hand side of an `=name(value).` statement; booleans target Bool types.
using AssignValue = std::variant<std::int64_t, std::string, bool>;

enum class Placeholder { Actor, Recipient };

using TemplateArg = std::variant<Literal, Placeholder>;

struct InstanceTemplate {
    std::string type_name;
    std::vector<TemplateArg> args;
    SourceSpan span;
};

// ── Expressions ──────────────────────────────────────────────────────────

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class BinaryOp { Or, And, Lt, Le, Eq, Ne, Ge, Gt, Add, Sub, Mul };

struct IntLiteral { std::int64_t value; };
struct StringLiteral { std::string value; };
struct BoolLiteral { bool value; };
/// `name` or `name(args)`. A bare Var name denotes the Var's current value.
struct FactRef { std::string name; std::vector<TemplateArg> args; };
/// `Holds(template)`
struct HoldsRef { InstanceTemplate instance; };
struct PlaceholderRef { Placeholder which; };
struct NotExpr { ExprPtr operand; };
struct BinaryExpr { BinaryOp op; ExprPtr lhs; ExprPtr rhs; };

struct Expr {
    using Node = std::variant<IntLiteral, StringLiteral, BoolLiteral, FactRef, HoldsRef,
                              PlaceholderRef, NotExpr, BinaryExpr>;
    Node node;
    SourceSpan span;
};

ExprPtr make_expr(Expr::Node node, SourceSpan span = {});
ExprPtr make_and(ExprPtr lhs, ExprPtr rhs);

// ── Declarations and statements ──────────────────────────────────────────

enum class DeclKind { Fact, Var, Bool, Act, PhysicalAct, Duty };
enum class Openness { Open, Closed };
enum class Domain { NoArg, Int, String };

struct Declaration {
    DeclKind kind = DeclKind::Fact;
    std::string name;
    Openness openness = Openness::Closed;
    bool openness_explicit = false;
    Domain domain = Domain::NoArg;

    std::optional<std::string> actor;
    std::optional<std::string> recipient;
    std::optional<std::string> holder;
    std::optional<std::string> claimant;
    std::optional<std::string> syncs_with;
    std::optional<std::string> extends;

    ExprPtr holds_when;
    ExprPtr conditioned_by;
    ExprPtr violated_when;

    std::vector<InstanceTemplate> creates;
    std::vector<InstanceTemplate> terminates;
    std::vector<std::string> terminated_by;

    SourceSpan span;

    bool is_act() const { return kind == DeclKind::Act || kind == DeclKind::PhysicalAct; }
    bool is_fact_type() const {
        return kind == DeclKind::Fact || kind == DeclKind::Var || kind == DeclKind::Bool;
    }
    bool is_single_instance() const { return kind == DeclKind::Var || kind == DeclKind::Bool; }
    bool is_derived() const { return kind == DeclKind::Fact && holds_when != nullptr; }
};

enum class StatementKind { Create, Terminate, Assign };

struct Statement {
    StatementKind kind = StatementKind::Create;
    std::string type_name;
    /// Instance argument for Create/Terminate, assigned value for Assign.
    std::optional<AssignValue> value;
    SourceSpan span;
};

struct Specification {
    std::vector<Declaration> declarations;
    std::vector<Statement> statements;

    const Declaration* find(std::string_view name) const;
};

/// Default openness when no `Open`/`Closed` keyword is given.
Openness default_openness(DeclKind kind);

std::string_view to_string(DeclKind kind);
std::string_view to_string(Domain domain);
std::string_view to_string(BinaryOp op);

// Structural equality. Source locations do not participate.
bool operator==(const Expr& a, const Expr& b);
bool same_expr(const ExprPtr& a, const ExprPtr& b);
bool operator==(const InstanceTemplate& a, const InstanceTemplate& b);
bool operator==(const Declaration& a, const Declaration& b);
bool operator==(const Statement& a, const Statement& b);
bool operator==(const Specification& a, const Specification& b);

} // namespace normcase::lang
