// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "normcase/reasoner/engine.hpp"
#include "normcase/reasoner/snapshot.hpp"

#include "../support/monotonicity.hpp"
#include "../support/oracles.hpp"
#include "../support/service_harness.hpp"

#include <httplib.h>

#include <chrono>
#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <spawn.h>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

using namespace normcase;
using namespace normcase::testing;
using nlohmann::json;

namespace {

// Wall-clock budgets per criterion.
constexpr double kKleeneBudgetS = 5.0;
constexpr double kWalkthroughBudgetS = 10.0;
constexpr double kOracleBudgetS = 60.0;
constexpr double kLawBudgetS = 60.0;

constexpr int kMonotonicityRounds = 1500;
constexpr int kMinMonotonicityPairs = 1000;
constexpr std::size_t kOracleMaxLength = 4;
constexpr std::size_t kLawSequences = 200;

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond && ok) detail << "failed: " << what;
        ok = ok && cond;
    }
};

int failures = 0;

void criterion(const std::string& name, double budget_s, const std::function<void(Outcome&)>& body) {
    Outcome out;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(out);
    } catch (const std::exception& e) {
        out.ok = false;
        out.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (budget_s > 0 && secs >= budget_s) {
        if (out.ok) out.detail << "over budget";
        out.ok = false;
    }
    if (!out.ok) ++failures;
    std::printf("%s  %-28s %8.2fs", out.ok ? "PASS" : "FAIL", name.c_str(), secs);
    if (budget_s > 0) std::printf(" (limit %.0fs)", budget_s);
    const std::string detail = out.detail.str();
    if (!detail.empty()) std::printf("  %s", detail.c_str());
    std::printf("\n");
    std::fflush(stdout);
}

reasoner::ActInvocation invoke(const char* act, const char* actor, const char* recipient) {
    return {act, reasoner::Literal{std::string(actor)}, reasoner::Literal{std::string(recipient)}};
}

// Kleene tables written out independently of the engine.
void kleene(Outcome& out) {
    using reasoner::TruthValue;
    constexpr auto F = TruthValue::False, T = TruthValue::True, U = TruthValue::Unknown;
    const TruthValue vals[] = {F, T, U};
    // Encoding: F=0, U=1, T=2. And is min, Or is max, Not is 2-x.
    const auto rank = [](TruthValue v) { return v == F ? 0 : v == U ? 1 : 2; };
    int cases = 0, wrong = 0;
    for (auto a : vals)
        for (auto b : vals) {
            wrong += rank(reasoner::kleene_and(a, b)) != std::min(rank(a), rank(b));
            wrong += rank(reasoner::kleene_or(a, b)) != std::max(rank(a), rank(b));
            cases += 2;
        }
    for (auto a : vals) {
        wrong += rank(reasoner::kleene_not(a)) != 2 - rank(a);
        ++cases;
    }
    out.require(cases == 21 && wrong == 0, std::to_string(wrong) + " of 21 connective cases");
    const auto run = knowledge_monotonicity(kMonotonicityRounds, 7);
    out.require(run.flips == 0, "monotonicity " + run.first_flip);
    out.require(run.pairs >= kMinMonotonicityPairs, "only " + std::to_string(run.pairs) + " pairs");
    out.detail << "21 cases, " << run.pairs << " pairs (" << run.determined << " determined)";
}

void walkthrough(Outcome& out) {
    using namespace reasoner;
    auto compiled = Model::compile(fixture("quittance.norm"));
    out.require(compiled.model != nullptr, "fixture compiles");
    if (!compiled.model) return;
    ReasonerState s = init_state(compiled.model, "v1");

    auto r = execute_act(s, invoke("submit-application", "alice", "clerk"), false);
    out.require(r.report.executed && r.report.violations.empty(), "submit-application executes cleanly");
    s = r.state;
    auto duties = active_duties(s);
    out.require(duties.size() == 1 && duties[0].type == "process-duty", "process-duty created on application");

    out.require(act_status(s, "send-grant-letter").status == Enablement::Undetermined,
                "grant undetermined before income");
    r = execute_act(s, invoke("record-processing", "clerk", "alice"), false);
    out.require(r.report.executed && r.report.duties_terminated.size() == 1, "process-application ends the duty");
    s = r.state;
    out.require(active_duties(s).empty(), "no active duties after processing");

    s = set_fact(s, Instance{"applicant-income", Literal{std::int64_t{1000}}}, TruthValue::True);
    out.require(act_status(s, "send-grant-letter").status == Enablement::Enabled, "grant enabled below threshold");

    const auto before = snapshot(s);
    r = execute_act(s, invoke("send-denial-letter", "clerk", "alice"), false);
    out.require(!r.report.executed && r.report.requires_confirmation && snapshot(r.state) == before,
                "disabled act rejected without confirmation");
    r = execute_act(s, invoke("send-denial-letter", "clerk", "alice"), true);
    s = r.state;
    std::size_t non_compliant = 0;
    for (const auto& v : s.violations) non_compliant += v.kind == ViolationKind::NonCompliantAct;
    out.require(r.report.executed && s.violations.size() == 1 && non_compliant == 1,
                "confirmed disabled act records one NonCompliantAct");
}

void oracle(Outcome& out) {
    const auto run = brute_force_micro(kOracleMaxLength);
    out.require(run.mismatches == 0, run.first_mismatch);
    // 12 invocations, lengths 0..4.
    out.require(run.sequences == 1 + 12 + 144 + 1728 + 20736, "sequence count");
    out.detail << run.sequences << " sequences, " << run.mismatches << " mismatches";
}

void law(Outcome& out) {
    auto compiled = reasoner::Model::compile(fixture("quittance.norm"));
    out.require(compiled.model != nullptr, "fixture compiles");
    if (!compiled.model) return;
    const auto run = replay_snapshot_law(compiled.model, kLawSequences, 2024);
    out.require(run.sequences == kLawSequences && run.failures == 0, run.first_failure);
    out.detail << run.sequences << " sequences, " << run.failures << " failures";
}

const json& action(const json& view, const std::string& act) {
    for (const auto& a : view.at("actions"))
        if (a.at("act") == act) return a;
    throw std::runtime_error("no action " + act);
}

void adaptability(Outcome& out) {
    ServiceHarness h;
    h.activate(quittance_source());
    const auto admin = h.admin();
    const service::FactUpdate income{"applicant-income", nullptr, 1800};

    const auto v1_case = h.cases().create_case("v1", admin);
    h.cases().update_fact(v1_case.id, income, admin);
    const std::string v1_actions = h.cases().view(v1_case.id, admin).at("actions").dump();

    h.activate(quittance_with_threshold(2000));
    out.require(h.cases().view(v1_case.id, admin).at("actions").dump() == v1_actions, "v1 case unchanged by v2");
    const auto v2_case = h.cases().create_case("v2", admin);
    const json v2_view = h.cases().update_fact(v2_case.id, income, admin);
    // income < threshold: 1800 < 1500 is false, 1800 < 2000 is true.
    out.require(action(h.cases().view(v1_case.id, admin), "send-grant-letter").at("status") == "disabled",
                "v1 grant disabled at 1800");
    out.require(action(v2_view, "send-grant-letter").at("status") == "enabled", "v2 grant enabled at 1800");

    h.activate(quittance_with_extra_button());
    const auto v3_case = h.cases().create_case("v3", admin);
    const auto n2 = v2_view.at("actions").size();
    const auto n3 = h.cases().view(v3_case.id, admin).at("actions").size();
    out.require(n3 == n2 + 1, "v3 adds exactly one action");
    out.require(h.cases().view(v1_case.id, admin).at("actions").dump() == v1_actions, "v1 case unchanged by v3");
    out.detail << "actions v2=" << n2 << " v3=" << n3;
}

// Runs `normcase serve` as a child process.
class ServerProcess {
public:
    ServerProcess(const std::filesystem::path& store) {
        int fds[2];
        if (::pipe(fds) != 0) throw std::runtime_error("pipe failed");
        posix_spawn_file_actions_t actions;
        posix_spawn_file_actions_init(&actions);
        posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
        posix_spawn_file_actions_addclose(&actions, fds[0]);
        const std::string store_arg = store.string();
        std::vector<std::string> args = {NORMCASE_CLI, "serve",         "--store", store_arg,
                                         "--listen",   "127.0.0.1:0",   "--admin-token", kAdminToken,
                                         "--lazy"};
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        argv.push_back(nullptr);
        const int rc = posix_spawn(&pid_, NORMCASE_CLI, &actions, nullptr, argv.data(), environ);
        posix_spawn_file_actions_destroy(&actions);
        ::close(fds[1]);
        if (rc != 0) {
            ::close(fds[0]);
            throw std::runtime_error("cannot start " NORMCASE_CLI);
        }
        FILE* in = ::fdopen(fds[0], "r");
        char line[256] = {};
        const bool got = std::fgets(line, sizeof line, in) != nullptr;
        std::fclose(in);
        const std::string text = line;
        const auto colon = text.rfind(':');
        if (!got || text.rfind("listening on ", 0) != 0 || colon == std::string::npos) {
            kill();
            throw std::runtime_error("server did not start: " + text);
        }
        port_ = std::stoi(text.substr(colon + 1));
    }
    ~ServerProcess() { kill(); }

    void kill() {
        if (pid_ <= 0) return;
        ::kill(pid_, SIGKILL);
        ::waitpid(pid_, nullptr, 0);
        pid_ = -1;
    }

    json call(const std::string& method, const std::string& path, const json& body = json::object()) const {
        httplib::Client cli("127.0.0.1", port_);
        const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + kAdminToken}};
        httplib::Result r = method == "GET"     ? cli.Get(path, headers)
                            : method == "PUT"   ? cli.Put(path, headers, body.dump(), "application/json")
                            : method == "PATCH" ? cli.Patch(path, headers, body.dump(), "application/json")
                                                : cli.Post(path, headers, body.dump(), "application/json");
        if (!r) throw std::runtime_error(method + " " + path + ": no response");
        if (r->status >= 300)
            throw std::runtime_error(method + " " + path + ": HTTP " + std::to_string(r->status) + " " + r->body);
        return json::parse(r->body);
    }

private:
    pid_t pid_ = -1;
    int port_ = 0;
};

void crash_recovery(Outcome& out) {
    TempDir store;
    std::vector<std::string> ids;
    std::vector<json> before;
    {
        ServerProcess server(store.path());
        const std::string vid = server.call("POST", "/models", {{"source", quittance_source()}}).at("versionId");
        server.call("PUT", "/config/active-model", {{"versionId", vid}});
        for (int i = 0; i < 3; ++i) {
            const std::string id = server.call("POST", "/cases", {{"clientRef", "c" + std::to_string(i)}}).at("caseId");
            ids.push_back(id);
            server.call("POST", "/cases/" + id + "/acts",
                        {{"act", "submit-application"}, {"actor", "alice"}, {"recipient", "clerk"}});
            server.call("PATCH", "/cases/" + id + "/facts", {{"type", "applicant-income"}, {"value", 1000 + 400 * i}});
            server.call("POST", "/cases/" + id + "/acts",
                        {{"act", "send-grant-letter"}, {"actor", "clerk"}, {"recipient", "alice"}, {"confirm", true}});
        }
        for (const auto& id : ids) before.push_back(server.call("GET", "/cases/" + id));
        server.kill();
    }
    ServerProcess restarted(store.path());
    std::size_t identical = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const json after = restarted.call("GET", "/cases/" + ids[i]);
        identical += after == before[i];
        out.require(after.at("case").at("eventCount") == 3, "3 events on " + ids[i]);
    }
    out.require(identical == ids.size(), "views identical after restart");
    // Third case crossed the threshold, so its grant was non-compliant.
    out.require(before[2].at("violations").size() == 1, "case 3 carries its violation");
    out.detail << identical << "/" << ids.size() << " views identical after SIGKILL";
}

void authorization(Outcome& out) {
    ServiceHarness h;
    h.activate(quittance_source());
    h.install_roles();
    const auto carol = h.user("carol", {"clerk"});
    const auto cleo = h.user("cleo", {"clerk"});
    const auto dan = h.user("dan", {"desk"});
    const auto c = h.cases().create_case("x", carol);
    h.cases().update_fact(c.id, {"applicant-income", nullptr, 1000}, carol);

    const service::ActRequest grant{"send-grant-letter", reasoner::Literal{std::string("clerk")},
                                    reasoner::Literal{std::string("alice")}, false};
    const auto events = h.cases().events(c.id).size();
    bool denied = false;
    try {
        h.cases().perform_act(c.id, grant, dan);
    } catch (const service::ServiceError& e) {
        denied = e.code() == service::ServiceError::Code::PermissionDenied;
    }
    out.require(denied, "user without the role is denied");
    out.require(h.cases().events(c.id).size() == events, "event log unchanged after denial");

    h.app().directory().set_four_eyes({"grant-quittance"});
    const auto first = h.cases().perform_act(c.id, grant, carol);
    out.require(first.kind == service::ActOutcome::Kind::PendingApproval, "first approval is pending");
    out.require(h.cases().events(c.id).size() == events, "pending approval writes no event");
    bool same_user_rejected = false;
    try {
        h.cases().perform_act(c.id, grant, carol);
    } catch (const service::ServiceError& e) {
        same_user_rejected = e.code() == service::ServiceError::Code::Conflict;
    }
    out.require(same_user_rejected, "same-user second approval rejected");
    const auto second = h.cases().perform_act(c.id, grant, cleo);
    out.require(second.kind == service::ActOutcome::Kind::Executed && second.approved_by == "cleo",
                "second distinct user executes");
    const auto log = h.cases().events(c.id);
    out.require(log.size() == events + 1 && log.back().payload.at("requestedBy") == "carol" &&
                    log.back().payload.at("approvedBy") == "cleo",
                "event records both users");
}

} // namespace

int main() {
    criterion("kleene-logic", kKleeneBudgetS, kleene);
    criterion("fixture-walkthrough", kWalkthroughBudgetS, walkthrough);
    criterion("brute-force-oracle", kOracleBudgetS, oracle);
    criterion("replay-snapshot-law", kLawBudgetS, law);
    criterion("adaptability", 0, adaptability);
    criterion("crash-recovery", 0, crash_recovery);
    criterion("authorization", 0, authorization);
    std::printf("%d criteria failed\n", failures);
    return failures;
}
