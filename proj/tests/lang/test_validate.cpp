#include <doctest.h>

#include "normcase/lang/parser.hpp"
#include "normcase/lang/printer.hpp"
#include "normcase/lang/validate.hpp"

#include "../support/fixtures.hpp"

#include <map>

using namespace normcase::lang;

namespace {

Specification parse_ok(std::string_view src) {
    auto r = parse(src);
    for (const auto& d : r.diagnostics) INFO(format(d));
    REQUIRE(r.ok());
    return r.spec;
}

Diagnostics check(std::string_view src) { return validate(parse_ok(src)); }

bool mentions(const Diagnostics& diags, std::string_view text) {
    for (const auto& d : diags)
        if (d.message.find(text) != std::string::npos) return true;
    return false;
}

// Independent boolean evaluator over literal-free propositional trees,
// used to check the extension conjunction rule.
bool eval_prop(const Expr& e, const std::map<std::string, bool>& env) {
    if (const auto* r = std::get_if<FactRef>(&e.node)) return env.at(r->name);
    if (const auto* b = std::get_if<BoolLiteral>(&e.node)) return b->value;
    if (const auto* n = std::get_if<NotExpr>(&e.node)) return !eval_prop(*n->operand, env);
    const auto& bin = std::get<BinaryExpr>(e.node);
    const bool l = eval_prop(*bin.lhs, env);
    const bool r = eval_prop(*bin.rhs, env);
    return bin.op == BinaryOp::And ? (l && r) : (l || r);
}

} // namespace

TEST_CASE("the quittance fixture validates") {
    auto diags = check(normcase::testing::fixture("quittance.norm"));
    for (const auto& d : diags) INFO(format(d));
    CHECK(diags.empty());
}

TEST_CASE("unresolved duty in Creates") {
    auto diags = check("Act a Actor x Creates unknown-duty.");
    CHECK(mentions(diags, "unresolved name 'unknown-duty'"));
}

TEST_CASE("derived fact cannot be created by a statement") {
    auto diags = check("Bool b. Fact f Holds when b. +f.");
    CHECK(mentions(diags, "derived fact not storable"));
}

TEST_CASE("derived fact cannot be created by an act") {
    auto diags = check("Bool b. Fact f Holds when b. Act a Creates f.");
    CHECK(mentions(diags, "derived fact not storable"));
}

TEST_CASE("clause placement rules") {
    CHECK(mentions(check("Fact f Violated when True."), "'Violated when' is not allowed on Fact"));
    CHECK(mentions(check("Act a Terminated by a."), "'Terminated by' is not allowed on Act"));
    CHECK(mentions(check("Bool b Actor x."), "'Actor' is not allowed on Bool"));
    CHECK(mentions(check("Duty d Holder h Claimant c Conditioned by True."),
                   "'Conditioned by' is not allowed on Duty"));
    CHECK(mentions(check("Act i. Physical Act p Syncs with i Creates x. Bool x."),
                   "'Creates' is not allowed on Physical Act"));
    CHECK(mentions(check("Act a Syncs with a."), "'Syncs with' is not allowed on Act"));
}

TEST_CASE("Syncs with must name an institutional Act") {
    CHECK(mentions(check("Physical Act p."), "requires 'Syncs with'"));
    CHECK(mentions(check("Physical Act p Syncs with nope."), "unresolved name 'nope'"));
    CHECK(mentions(check("Bool b. Physical Act p Syncs with b."), "is not an Act"));
    CHECK(mentions(check("Act i. Physical Act q Syncs with i. Physical Act p Syncs with q."), "is not an Act"));
}

TEST_CASE("Terminated by must name acts") {
    CHECK(mentions(check("Bool b. Duty d Holder h Claimant c Terminated by b."), "is not an act"));
    CHECK(mentions(check("Duty d Holder h Claimant c Terminated by z."), "unresolved name 'z'"));
}

TEST_CASE("domains of single-instance types") {
    CHECK(mentions(check("Var v."), "Var must be Identified by Int or String"));
    CHECK(mentions(check("Bool b Identified by Int."), "Bool cannot carry"));
}

TEST_CASE("assignments target Var and Bool with matching values") {
    CHECK(mentions(check("Fact f Identified by Int. =f(1)."), "'=' can only assign Var or Bool"));
    CHECK(mentions(check("Var v Identified by Int. =v(\"x\")."), "type mismatch"));
    CHECK(mentions(check("Bool b. =b(1)."), "type mismatch"));
    CHECK(check("Var v Identified by String. Bool b. =v(\"x\"). =b(False).").empty());
}

TEST_CASE("arity checks") {
    CHECK(mentions(check("Var v Identified by Int. +v."), "arity mismatch"));
    CHECK(mentions(check("Bool b. +b(1)."), "takes no arguments"));
    CHECK(mentions(check("Var v Identified by Int. Act a Creates v."), "arity mismatch"));
    CHECK(mentions(check("Fact f Identified by Int. Act a Creates f(\"s\")."), "must be Int"));
    CHECK(mentions(check("Duty d Holder h Claimant c. Act a Creates d(1)."), "takes its Holder and Claimant"));
}

TEST_CASE("expression typing") {
    CHECK(mentions(check("Var v Identified by Int. Act a Holds when v."), "needs a truth value"));
    CHECK(mentions(check("Bool b. Act a Holds when b < 3."), "takes integers"));
    CHECK(mentions(check("Var s Identified by String. Act a Holds when s < 3."), "takes integers"));
    CHECK(check("Var s Identified by String. Act a Holds when s == \"x\".").empty());
    CHECK(mentions(check("Bool b. Act a Holds when Not 3."), "'Not' needs a truth value"));
    CHECK(mentions(check("Act a. Act b Holds when a."), "cannot be referenced"));
    CHECK(mentions(check("Act a Holds when zz."), "unresolved name 'zz'"));
}

TEST_CASE("placeholders are scoped") {
    CHECK(mentions(check("Fact f Holds when Actor == 1."), "only available inside acts"));
    CHECK(mentions(check("Bool r Identified by String. Act a Holds when Holds(r(Recipient))."),
                   "no Recipient is declared"));
    CHECK(check("Fact r Identified by String. Act a Recipient c Holds when Holds(r(Recipient)).").empty());
    // A physical counterpart's Recipient is visible to its institutional act.
    CHECK(check("Fact r Identified by String. Act a Holds when r(Recipient). "
                "Physical Act p Recipient c Syncs with a.")
              .empty());
}

TEST_CASE("duplicate names and derived cycles") {
    CHECK(mentions(check("Bool a. Fact a."), "duplicate declaration name 'a'"));
    CHECK(mentions(check("Fact x Holds when y. Fact y Holds when x."), "depends on itself"));
}

TEST_CASE("every validation diagnostic has a location") {
    auto diags = check("Var v. Bool b Identified by Int. Act a Holds when zz. +q.");
    REQUIRE(diags.size() >= 4);
    for (const auto& d : diags) CHECK(d.span.begin.line >= 1);
}

// ── extensions ──────────────────────────────────────────────────────────

TEST_CASE("flatten is the identity without extensions") {
    auto spec = parse_ok(normcase::testing::fixture("quittance.norm"));
    auto flat = flatten_extensions(spec);
    CHECK(flat.ok());
    CHECK(flat.spec == spec);
}

TEST_CASE("extension conjoins Holds when") {
    auto spec = parse_ok("Bool a. Bool b. Act x Holds when a. Act x2 Extends x Holds when b.");
    auto flat = flatten_extensions(spec);
    REQUIRE(flat.ok());
    REQUIRE(flat.spec.declarations.size() == 3);
    const Declaration* x = flat.spec.find("x");
    REQUIRE(x);
    CHECK(flat.spec.find("x2") == nullptr);
    CHECK_FALSE(x->extends.has_value());
    for (bool a : {false, true})
        for (bool b : {false, true})
            CHECK(eval_prop(*x->holds_when, {{"a", a}, {"b", b}}) == (a && b));
}

TEST_CASE("extension concatenates lists base first, in file order, through chains") {
    auto spec = parse_ok(
        "Bool p. Bool q. Bool r. Act i. Act j. "
        "Act x Creates p. Act y Extends x Creates q. Act z Extends y Creates r Terminates p. "
        "Duty d Holder h Claimant c Terminated by i. Duty e Extends d Terminated by j.");
    auto flat = flatten_extensions(spec);
    REQUIRE(flat.ok());
    const Declaration* x = flat.spec.find("x");
    REQUIRE(x->creates.size() == 3);
    CHECK(x->creates[0].type_name == "p");
    CHECK(x->creates[1].type_name == "q");
    CHECK(x->creates[2].type_name == "r");
    CHECK(x->terminates.size() == 1);
    CHECK(flat.spec.find("d")->terminated_by == std::vector<std::string>{"i", "j"});
    CHECK(validate(spec).empty());
}

TEST_CASE("extension merge is associative") {
    // (base + e1) + e2 written as a chain equals e1 and e2 both extending base.
    auto chained = parse_ok("Bool a. Bool b. Bool c. Act x Holds when a. Act e1 Extends x Holds when b. "
                            "Act e2 Extends e1 Holds when c.");
    auto flat_chain = flatten_extensions(chained);
    auto star = parse_ok("Bool a. Bool b. Bool c. Act x Holds when a. Act e1 Extends x Holds when b. "
                         "Act e2 Extends x Holds when c.");
    auto flat_star = flatten_extensions(star);
    CHECK(flat_chain.spec == flat_star.spec);
}

TEST_CASE("extension cycles and unknown bases") {
    auto cyc = flatten_extensions(parse_ok("Act x Extends y. Act y Extends x."));
    CHECK(mentions(cyc.diagnostics, "extension cycle"));
    auto unk = flatten_extensions(parse_ok("Act x Extends nothing."));
    CHECK(mentions(unk.diagnostics, "unknown declaration 'nothing'"));
    CHECK(mentions(validate(parse_ok("Act x Extends y. Act y Extends x.")), "extension cycle"));
}

TEST_CASE("extensions may only add behaviour") {
    CHECK(mentions(check("Act x. Bool y Extends x."), "differs from base kind"));
    CHECK(mentions(check("Act x. Act y Extends x Actor z."), "may not redefine 'Actor'"));
    CHECK(mentions(check("Bool b. Fact f. Fact g Extends f Holds when b."), "cannot turn stored fact"));
}

TEST_CASE("flatten is idempotent") {
    auto spec = parse_ok("Bool a. Bool b. Act x Holds when a Creates a. Act x2 Extends x Holds when b Creates b.");
    auto once = flatten_extensions(spec).spec;
    auto twice = flatten_extensions(once).spec;
    CHECK(once == twice);
}

TEST_CASE("load runs the whole pipeline") {
    auto ok = load("Bool a. Act x Holds when a. Act y Extends x Holds when True.");
    REQUIRE(ok.ok());
    CHECK(ok.spec->declarations.size() == 2);
    auto bad = load("Act x Holds when nope.");
    CHECK_FALSE(bad.ok());
    CHECK(has_errors(bad.diagnostics));
}
