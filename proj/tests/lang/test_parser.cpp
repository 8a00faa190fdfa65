#include <doctest.h>

#include "normcase/lang/parser.hpp"
#include "normcase/lang/printer.hpp"

using namespace normcase::lang;

namespace {

bool mentions(const Diagnostics& diags, std::string_view text) {
    for (const auto& d : diags)
        if (d.message.find(text) != std::string::npos) return true;
    return false;
}

} // namespace

TEST_CASE("empty source parses to an empty specification") {
    auto r = parse("");
    CHECK(r.ok());
    CHECK(r.spec.declarations.empty());
    CHECK(r.spec.statements.empty());
}

TEST_CASE("Var declaration with an assignment") {
    auto r = parse("Var income-threshold Identified by Int. =income-threshold(1500).");
    REQUIRE(r.ok());
    REQUIRE(r.spec.declarations.size() == 1);
    const auto& d = r.spec.declarations[0];
    CHECK(d.kind == DeclKind::Var);
    CHECK(d.name == "income-threshold");
    CHECK(d.domain == Domain::Int);
    CHECK(d.openness == Openness::Open);
    REQUIRE(r.spec.statements.size() == 1);
    const auto& s = r.spec.statements[0];
    CHECK(s.kind == StatementKind::Assign);
    CHECK(s.type_name == "income-threshold");
    CHECK(*s.value == AssignValue{std::int64_t{1500}});
}

TEST_CASE("Duty without Claimant is rejected") {
    auto r = parse("Duty d Holder h.");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "Duty d requires Holder and Claimant"));
}

TEST_CASE("default and explicit openness") {
    auto r = parse("Fact f. Bool b. Closed Bool c. Open Fact g.");
    REQUIRE(r.ok());
    CHECK(r.spec.declarations[0].openness == Openness::Closed);
    CHECK(r.spec.declarations[1].openness == Openness::Open);
    CHECK(r.spec.declarations[2].openness == Openness::Closed);
    CHECK(r.spec.declarations[3].openness == Openness::Open);
}

TEST_CASE("act clauses and physical counterpart") {
    auto r = parse(R"(
        Act grant Actor officer Recipient client
          Holds when income < threshold && Not decided
          Conditioned by Holds(registered(Recipient))
          Creates decided, granted(Recipient)
          Terminates pending.
        Physical Act press-grant Syncs with grant.
    )");
    REQUIRE(r.ok());
    const auto& act = r.spec.declarations[0];
    CHECK(act.kind == DeclKind::Act);
    CHECK(*act.actor == "officer");
    CHECK(*act.recipient == "client");
    REQUIRE(act.holds_when);
    CHECK(to_source(*act.holds_when) == "((income < threshold) && (Not decided))");
    CHECK(to_source(*act.conditioned_by) == "Holds(registered(Recipient))");
    REQUIRE(act.creates.size() == 2);
    CHECK(act.creates[1].type_name == "granted");
    CHECK(std::get<Placeholder>(act.creates[1].args[0]) == Placeholder::Recipient);
    CHECK(act.terminates.size() == 1);
    const auto& phys = r.spec.declarations[1];
    CHECK(phys.kind == DeclKind::PhysicalAct);
    CHECK(*phys.syncs_with == "grant");
}

TEST_CASE("operator precedence") {
    auto r = parse("Fact f Holds when a || b && Not c < 1 + 2 * 3.");
    REQUIRE(r.ok());
    CHECK(to_source(*r.spec.declarations[0].holds_when) == "(a || (b && (Not (c < (1 + (2 * 3))))))");
}

TEST_CASE("negative literals in expressions and statements") {
    auto r = parse("Fact f Holds when x > -3 - 2. =x(-7).");
    REQUIRE(r.ok());
    CHECK(to_source(*r.spec.declarations[0].holds_when) == "(x > (-3 - 2))");
    CHECK(*r.spec.statements[0].value == AssignValue{std::int64_t{-7}});
}

TEST_CASE("comparisons do not chain") {
    auto r = parse("Fact f Holds when 1 < 2 < 3.");
    CHECK_FALSE(r.ok());
    CHECK(mentions(r.diagnostics, "do not chain"));
}

TEST_CASE("statements") {
    auto r = parse("+a. -b(3). +c(\"x\"). =d(True).");
    REQUIRE(r.ok());
    REQUIRE(r.spec.statements.size() == 4);
    CHECK(r.spec.statements[0].kind == StatementKind::Create);
    CHECK_FALSE(r.spec.statements[0].value.has_value());
    CHECK(r.spec.statements[1].kind == StatementKind::Terminate);
    CHECK(*r.spec.statements[2].value == AssignValue{std::string("x")});
    CHECK(*r.spec.statements[3].value == AssignValue{true});
}

TEST_CASE("errors recover at the next full stop") {
    auto r = parse("Fact a. Var . Bool b. Act x Holds when (1 +. Fact c.");
    CHECK(r.diagnostics.size() == 2);
    REQUIRE(r.spec.declarations.size() == 3);
    CHECK(r.spec.declarations[0].name == "a");
    CHECK(r.spec.declarations[1].name == "b");
    CHECK(r.spec.declarations[2].name == "c");
}

TEST_CASE("duplicate single clause is an error") {
    auto r = parse("Act a Holds when True Holds when False.");
    CHECK(mentions(r.diagnostics, "duplicate 'Holds when'"));
}

TEST_CASE("Event declarations are not supported") {
    auto r = parse("Event e.");
    CHECK(mentions(r.diagnostics, "Event declarations are not supported"));
}

TEST_CASE("missing final full stop") {
    auto r = parse("Bool b");
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].span.begin.line == 1);
}

TEST_CASE("Duty extension need not repeat Holder and Claimant") {
    auto r = parse("Duty d Holder h Claimant c. Duty d2 Extends d Violated when True.");
    CHECK(r.ok());
}
