#include "normcase/lang/parser.hpp"

#include "normcase/lang/lexer.hpp"

#include <stdexcept>

namespace normcase::lang {

namespace {

struct SyntaxError {
    std::string message;
    SourceSpan span;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {
        end_.kind = TokenKind::End;
        if (!toks_.empty()) end_.span = {toks_.back().span.end, toks_.back().span.end};
    }

    void run(ParseResult& out) {
        while (!at_end()) {
            try {
                parse_form(out.spec);
            } catch (const SyntaxError& err) {
                out.diagnostics.push_back({Severity::Error, err.message, err.span});
                recover();
            }
        }
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Token end_;

    bool at_end() const { return pos_ >= toks_.size(); }
    const Token& peek(std::size_t ahead = 0) const {
        return pos_ + ahead < toks_.size() ? toks_[pos_ + ahead] : end_;
    }
    const Token& take() {
        const Token& t = peek();
        if (!at_end()) ++pos_;
        return t;
    }
    SourceLoc prev_end() const { return pos_ > 0 ? toks_[pos_ - 1].span.end : SourceLoc{}; }

    [[noreturn]] void fail(const std::string& message) const { throw SyntaxError{message, peek().span}; }
    [[noreturn]] static void fail_at(const std::string& message, SourceSpan span) {
        throw SyntaxError{message, span};
    }

    std::string describe(const Token& t) const {
        switch (t.kind) {
        case TokenKind::End: return "end of input";
        case TokenKind::String: return "string literal";
        case TokenKind::Integer: return "integer " + t.text;
        default: return "'" + t.text + "'";
        }
    }

    bool accept_punct(std::string_view p) {
        if (!peek().is_punct(p)) return false;
        take();
        return true;
    }
    bool accept_keyword(std::string_view k) {
        if (!peek().is_keyword(k)) return false;
        take();
        return true;
    }
    void expect_punct(std::string_view p) {
        if (!accept_punct(p)) fail("expected '" + std::string(p) + "' but found " + describe(peek()));
    }
    std::string expect_name(std::string_view what) {
        if (peek().kind != TokenKind::Identifier)
            fail("expected " + std::string(what) + " but found " + describe(peek()));
        return take().text;
    }

    // Skip to just past the next `.` outside parentheses.
    void recover() {
        int depth = 0;
        while (!at_end()) {
            const Token& t = take();
            if (t.is_punct("(")) ++depth;
            else if (t.is_punct(")") && depth > 0) --depth;
            else if (t.is_punct(".") && depth == 0) return;
        }
    }

    void parse_form(Specification& spec) {
        const Token& t = peek();
        if (t.kind == TokenKind::Punct && (t.text == "+" || t.text == "-" || t.text == "=")) {
            spec.statements.push_back(parse_statement());
            return;
        }
        if (t.kind == TokenKind::Keyword) {
            if (t.text == "Event") fail("Event declarations are not supported; declare an Act instead");
            if (t.text == "Open" || t.text == "Closed" || t.text == "Fact" || t.text == "Var" ||
                t.text == "Bool" || t.text == "Act" || t.text == "Physical" || t.text == "Duty") {
                spec.declarations.push_back(parse_declaration());
                return;
            }
        }
        fail("expected a declaration or statement but found " + describe(t));
    }

    // ── statements ──────────────────────────────────────────────────────

    AssignValue parse_literal_value() {
        const Token& t = peek();
        if (t.is_punct("-") && peek(1).kind == TokenKind::Integer) {
            take();
            return -take().int_value;
        }
        switch (t.kind) {
        case TokenKind::Integer: return take().int_value;
        case TokenKind::String: return take().text;
        case TokenKind::Keyword:
            if (t.text == "True" || t.text == "False") return take().text == "True";
            [[fallthrough]];
        default: fail("expected a literal but found " + describe(t));
        }
    }

    Statement parse_statement() {
        const SourceLoc begin = peek().span.begin;
        Statement stmt;
        const std::string op = take().text;
        stmt.kind = op == "+" ? StatementKind::Create
                  : op == "-" ? StatementKind::Terminate
                              : StatementKind::Assign;
        stmt.type_name = expect_name("a type name");
        if (accept_punct("(")) {
            stmt.value = parse_literal_value();
            expect_punct(")");
        } else if (stmt.kind == StatementKind::Assign) {
            fail("expected '(' value ')' after assignment target");
        }
        expect_punct(".");
        stmt.span = {begin, prev_end()};
        return stmt;
    }

    // ── declarations ────────────────────────────────────────────────────

    Declaration parse_declaration() {
        Declaration decl;
        const SourceLoc begin = peek().span.begin;

        if (peek().is_keyword("Open") || peek().is_keyword("Closed")) {
            decl.openness = take().text == "Open" ? Openness::Open : Openness::Closed;
            decl.openness_explicit = true;
        }

        const Token& k = take();
        if (k.is_keyword("Fact")) decl.kind = DeclKind::Fact;
        else if (k.is_keyword("Var")) decl.kind = DeclKind::Var;
        else if (k.is_keyword("Bool")) decl.kind = DeclKind::Bool;
        else if (k.is_keyword("Act")) decl.kind = DeclKind::Act;
        else if (k.is_keyword("Duty")) decl.kind = DeclKind::Duty;
        else if (k.is_keyword("Physical")) {
            if (!accept_keyword("Act")) fail("expected 'Act' after 'Physical'");
            decl.kind = DeclKind::PhysicalAct;
        } else {
            fail_at("expected a declaration kind but found " + describe(k), k.span);
        }
        if (!decl.openness_explicit) decl.openness = default_openness(decl.kind);

        decl.name = expect_name("a declaration name");

        if (accept_keyword("Identified by")) {
            if (accept_keyword("Int")) decl.domain = Domain::Int;
            else if (accept_keyword("String")) decl.domain = Domain::String;
            else fail("expected 'Int' or 'String' after 'Identified by'");
        }

        while (!peek().is_punct(".")) {
            if (at_end()) fail("expected '.' to end declaration of " + decl.name);
            parse_clause(decl);
        }
        take();
        decl.span = {begin, prev_end()};

        if (decl.kind == DeclKind::Duty && !decl.extends && (!decl.holder || !decl.claimant))
            fail_at("Duty " + decl.name + " requires Holder and Claimant", decl.span);
        return decl;
    }

    void set_once(std::optional<std::string>& slot, std::string_view clause) {
        const SourceSpan at = peek().span;
        std::string value = expect_name("a name after '" + std::string(clause) + "'");
        if (slot) fail_at("duplicate '" + std::string(clause) + "' clause", at);
        slot = std::move(value);
    }

    void set_expr_once(ExprPtr& slot, std::string_view clause, SourceSpan at) {
        ExprPtr e = parse_expr();
        if (slot) fail_at("duplicate '" + std::string(clause) + "' clause", at);
        slot = std::move(e);
    }

    void parse_clause(Declaration& decl) {
        const Token& t = peek();
        const SourceSpan at = t.span;
        if (t.kind != TokenKind::Keyword) fail("expected a clause keyword but found " + describe(t));
        const std::string kw = take().text;

        if (kw == "Actor") set_once(decl.actor, kw);
        else if (kw == "Recipient") set_once(decl.recipient, kw);
        else if (kw == "Holder") set_once(decl.holder, kw);
        else if (kw == "Claimant") set_once(decl.claimant, kw);
        else if (kw == "Syncs with") set_once(decl.syncs_with, kw);
        else if (kw == "Extends") set_once(decl.extends, kw);
        else if (kw == "Holds when") set_expr_once(decl.holds_when, kw, at);
        else if (kw == "Conditioned by") set_expr_once(decl.conditioned_by, kw, at);
        else if (kw == "Violated when") set_expr_once(decl.violated_when, kw, at);
        else if (kw == "Creates") parse_template_list(decl.creates);
        else if (kw == "Terminates") parse_template_list(decl.terminates);
        else if (kw == "Terminated by") {
            do {
                decl.terminated_by.push_back(expect_name("an act name"));
            } while (accept_punct(","));
        } else if (kw == "Identified by") {
            fail_at("'Identified by' must directly follow the declaration name", at);
        } else {
            fail_at("unexpected '" + kw + "' in declaration", at);
        }
    }

    TemplateArg parse_template_arg() {
        if (accept_keyword("Actor")) return Placeholder::Actor;
        if (accept_keyword("Recipient")) return Placeholder::Recipient;
        const Token& t = peek();
        if (t.is_punct("-") && peek(1).kind == TokenKind::Integer) {
            take();
            return Literal{-take().int_value};
        }
        if (t.kind == TokenKind::Integer) return Literal{take().int_value};
        if (t.kind == TokenKind::String) return Literal{take().text};
        fail("expected a literal, 'Actor' or 'Recipient' but found " + describe(t));
    }

    std::vector<TemplateArg> parse_arg_list() {
        std::vector<TemplateArg> args;
        expect_punct("(");
        do {
            args.push_back(parse_template_arg());
        } while (accept_punct(","));
        expect_punct(")");
        return args;
    }

    InstanceTemplate parse_template() {
        InstanceTemplate tmpl;
        const SourceLoc begin = peek().span.begin;
        tmpl.type_name = expect_name("a type name");
        if (peek().is_punct("(")) tmpl.args = parse_arg_list();
        tmpl.span = {begin, prev_end()};
        return tmpl;
    }

    void parse_template_list(std::vector<InstanceTemplate>& out) {
        do {
            out.push_back(parse_template());
        } while (accept_punct(","));
    }

    // ── expressions ─────────────────────────────────────────────────────

    ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
        const SourceSpan span{lhs->span.begin, rhs->span.end};
        return make_expr(BinaryExpr{op, std::move(lhs), std::move(rhs)}, span);
    }

    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr lhs = parse_and();
        while (accept_punct("||")) lhs = binary(BinaryOp::Or, lhs, parse_and());
        return lhs;
    }

    ExprPtr parse_and() {
        ExprPtr lhs = parse_not();
        while (accept_punct("&&")) lhs = binary(BinaryOp::And, lhs, parse_not());
        return lhs;
    }

    ExprPtr parse_not() {
        if (peek().is_keyword("Not")) {
            const SourceLoc begin = take().span.begin;
            ExprPtr operand = parse_not();
            const SourceSpan span{begin, operand->span.end};
            return make_expr(NotExpr{std::move(operand)}, span);
        }
        return parse_comparison();
    }

    std::optional<BinaryOp> comparison_op() const {
        const Token& t = peek();
        if (t.kind != TokenKind::Punct) return std::nullopt;
        if (t.text == "<") return BinaryOp::Lt;
        if (t.text == "<=") return BinaryOp::Le;
        if (t.text == "==") return BinaryOp::Eq;
        if (t.text == "!=") return BinaryOp::Ne;
        if (t.text == ">=") return BinaryOp::Ge;
        if (t.text == ">") return BinaryOp::Gt;
        return std::nullopt;
    }

    ExprPtr parse_comparison() {
        ExprPtr lhs = parse_additive();
        if (auto op = comparison_op()) {
            take();
            lhs = binary(*op, lhs, parse_additive());
            if (comparison_op()) fail("comparison operators do not chain; add parentheses");
        }
        return lhs;
    }

    ExprPtr parse_additive() {
        ExprPtr lhs = parse_multiplicative();
        while (true) {
            if (accept_punct("+")) lhs = binary(BinaryOp::Add, lhs, parse_multiplicative());
            else if (accept_punct("-")) lhs = binary(BinaryOp::Sub, lhs, parse_multiplicative());
            else return lhs;
        }
    }

    ExprPtr parse_multiplicative() {
        ExprPtr lhs = parse_atom();
        while (accept_punct("*")) lhs = binary(BinaryOp::Mul, lhs, parse_atom());
        return lhs;
    }

    ExprPtr parse_atom() {
        const Token& t = peek();
        const SourceSpan span = t.span;
        if (t.is_punct("-") && peek(1).kind == TokenKind::Integer) {
            take();
            const std::int64_t v = take().int_value;
            return make_expr(IntLiteral{-v}, {span.begin, prev_end()});
        }
        switch (t.kind) {
        case TokenKind::Integer: return make_expr(IntLiteral{take().int_value}, span);
        case TokenKind::String: return make_expr(StringLiteral{take().text}, span);
        case TokenKind::Identifier: {
            FactRef ref{take().text, {}};
            if (peek().is_punct("(")) ref.args = parse_arg_list();
            return make_expr(std::move(ref), {span.begin, prev_end()});
        }
        case TokenKind::Keyword:
            if (t.text == "True" || t.text == "False") {
                const bool v = take().text == "True";
                return make_expr(BoolLiteral{v}, span);
            }
            if (t.text == "Actor") {
                take();
                return make_expr(PlaceholderRef{Placeholder::Actor}, span);
            }
            if (t.text == "Recipient") {
                take();
                return make_expr(PlaceholderRef{Placeholder::Recipient}, span);
            }
            if (t.text == "Holds") {
                take();
                expect_punct("(");
                InstanceTemplate tmpl = parse_template();
                expect_punct(")");
                return make_expr(HoldsRef{std::move(tmpl)}, {span.begin, prev_end()});
            }
            break;
        case TokenKind::Punct:
            if (t.text == "(") {
                take();
                ExprPtr inner = parse_expr();
                expect_punct(")");
                return inner;
            }
            break;
        default: break;
        }
        fail("expected an expression but found " + describe(t));
    }
};

} // namespace

ParseResult parse(std::string_view source) {
    TokenizeResult lexed = tokenize(source);
    ParseResult out;
    out.diagnostics = std::move(lexed.diagnostics);
    Parser(std::move(lexed.tokens)).run(out);
    return out;
}

} // namespace normcase::lang
