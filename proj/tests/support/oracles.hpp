#pragma once

// Independent reference implementations used by the unit and acceptance
// suites. Nothing here calls the engine's evaluator.

#include "normcase/reasoner/engine.hpp"
#include "normcase/reasoner/snapshot.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace normcase::testing {

// Three acts over one closed flag, one closed token per party, and a duty.
inline const char* const kMicroModel = R"(
Closed Bool open-flag.
Fact token Identified by String.
Act open-case Actor x Recipient y Holds when Not open-flag Creates open-flag, token(Actor), follow-up.
Act consume Actor x Recipient y Holds when open-flag && token(Recipient) Terminates token(Recipient).
Act close-case Actor x Recipient y Conditioned by open-flag Terminates open-flag.
Physical Act p-open Syncs with open-case.
Physical Act p-consume Syncs with consume.
Physical Act p-close Syncs with close-case.
Duty follow-up Holder x Claimant y Terminated by consume Violated when Not open-flag.
)";

inline const std::vector<std::string> kMicroActs = {"p-open", "p-consume", "p-close"};
inline const std::vector<std::string> kMicroParties = {"ann", "bob"};

/// Hand-written interpretation of kMicroModel.
class NaiveMicro {
public:
    struct Duty {
        std::string holder, claimant;
        bool violated = false;
        bool operator==(const Duty&) const = default;
    };
    struct Viol {
        std::string kind, subject, party, counterparty;
        bool operator==(const Viol&) const = default;
    };
    enum class St { Enabled, Disabled };

    St status(const std::string& act, const std::string&, const std::string& y) const {
        if (act == "p-open") return open_ ? St::Disabled : St::Enabled;
        if (act == "p-consume") return open_ && tokens_.count(y) ? St::Enabled : St::Disabled;
        return open_ ? St::Enabled : St::Disabled;
    }

    void execute(const std::string& act, const std::string& x, const std::string& y) {
        const St before = status(act, x, y);
        const std::size_t existing = duties_.size();
        if (act == "p-open") {
            open_ = true;
            tokens_.insert(x);
            const bool dup = std::any_of(duties_.begin(), duties_.end(),
                                         [&](const Duty& d) { return d.holder == x && d.claimant == y; });
            if (!dup) duties_.push_back({x, y, false});
        } else if (act == "p-consume") {
            tokens_.erase(y);
        } else {
            open_ = false;
        }
        if (before != St::Enabled) violations_.push_back({"NonCompliantAct", act, x, y});
        if (act == "p-consume") {
            const auto party = [&](const std::string& p) { return p == x || p == y; };
            std::vector<Duty> kept;
            for (std::size_t i = 0; i < duties_.size(); ++i)
                if (i >= existing || !(party(duties_[i].holder) && party(duties_[i].claimant)))
                    kept.push_back(duties_[i]);
            duties_ = kept;
        }
        for (auto& d : duties_) {
            if (d.violated || open_) continue;
            d.violated = true;
            violations_.push_back({"DutyViolation", "follow-up", d.holder, d.claimant});
        }
    }

    const std::vector<Duty>& duties() const { return duties_; }
    const std::vector<Viol>& violations() const { return violations_; }

private:
    bool open_ = false;
    std::set<std::string> tokens_;
    std::vector<Duty> duties_;
    std::vector<Viol> violations_;
};

struct OracleRun {
    std::size_t sequences = 0;
    std::size_t mismatches = 0;
    std::string first_mismatch;
};

/// Compares engine and NaiveMicro on every act sequence up to `max_len`
/// steps, checking all statuses, duties and violations after each step.
inline OracleRun brute_force_micro(std::size_t max_len) {
    using namespace reasoner;
    const auto compiled = Model::compile(kMicroModel);
    OracleRun run;
    if (!compiled.model) {
        run.mismatches = 1;
        run.first_mismatch = "micro model does not compile";
        return run;
    }
    struct Step {
        std::string act, x, y;
    };
    std::vector<Step> alphabet;
    for (const auto& a : kMicroActs)
        for (const auto& x : kMicroParties)
            for (const auto& y : kMicroParties) alphabet.push_back({a, x, y});

    const auto lit = [](const std::string& s) { return Literal{s}; };

    const auto compare = [&](const ReasonerState& s, const NaiveMicro& n, const std::string& where) {
        std::ostringstream why;
        for (const auto& a : kMicroActs)
            for (const auto& x : kMicroParties)
                for (const auto& y : kMicroParties) {
                    const auto got = act_status(s, a, Binding{lit(x), lit(y)}).status;
                    const auto want = n.status(a, x, y) == NaiveMicro::St::Enabled ? Enablement::Enabled
                                                                                    : Enablement::Disabled;
                    if (got != want) why << " status " << a << "(" << x << "," << y << ")";
                }
        const auto duties = active_duties(s);
        bool same_duties = duties.size() == n.duties().size();
        for (std::size_t i = 0; same_duties && i < duties.size(); ++i)
            same_duties = duties[i].holder == lit(n.duties()[i].holder) &&
                          duties[i].claimant == lit(n.duties()[i].claimant) &&
                          duties[i].violated == n.duties()[i].violated;
        if (!same_duties) why << " duties";
        bool same_viol = s.violations.size() == n.violations().size();
        for (std::size_t i = 0; same_viol && i < s.violations.size(); ++i) {
            const auto& v = s.violations[i];
            const auto& w = n.violations()[i];
            same_viol = to_string(v.kind) == w.kind && v.subject == w.subject && v.party == lit(w.party) &&
                        v.counterparty == lit(w.counterparty);
        }
        if (!same_viol) why << " violations";
        if (why.str().empty()) return;
        if (run.mismatches++ == 0) run.first_mismatch = where + ":" + why.str();
    };

    std::vector<std::size_t> digits;
    for (std::size_t len = 0; len <= max_len; ++len) {
        digits.assign(len, 0);
        while (true) {
            ReasonerState s = init_state(compiled.model);
            NaiveMicro n;
            std::string where = "[]";
            compare(s, n, where);
            for (std::size_t d : digits) {
                const Step& st = alphabet[d];
                s = execute_act(std::move(s), ActInvocation{st.act, lit(st.x), lit(st.y)}, true).state;
                n.execute(st.act, st.x, st.y);
                where += " " + st.act + "(" + st.x + "," + st.y + ")";
                compare(s, n, where);
            }
            ++run.sequences;
            std::size_t i = 0;
            while (i < len && ++digits[i] == alphabet.size()) digits[i++] = 0;
            if (i == len) break;
        }
    }
    return run;
}

struct LawRun {
    std::size_t sequences = 0;
    std::size_t failures = 0;
    std::string first_failure;
};

/// Random sequences of inputs on `model`. Live state, replay of the accepted
/// inputs, and restore of the snapshot must serialize identically.
inline LawRun replay_snapshot_law(std::shared_ptr<const reasoner::Model> model, std::size_t rounds,
                                  std::uint32_t seed) {
    using namespace reasoner;
    std::mt19937 rng(seed);
    const auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

    std::vector<std::string> vars, bools, acts;
    for (const auto& d : model->spec().declarations) {
        if (d.is_derived()) continue;
        if (d.kind == lang::DeclKind::Var) vars.push_back(d.name);
        if (d.kind == lang::DeclKind::Bool) bools.push_back(d.name);
    }
    for (const auto* p : model->physical_acts()) acts.push_back(p->name);
    const std::vector<std::string> parties = {"alice", "bob", "clerk"};
    const TruthValue truths[] = {TruthValue::True, TruthValue::False, TruthValue::Unknown};

    LawRun run;
    for (std::size_t round = 0; round < rounds; ++round) {
        ReasonerState live = init_state(model, "v1");
        std::vector<InputEvent> log;
        const std::size_t steps = 1 + pick(12);
        for (std::size_t k = 0; k < steps; ++k) {
            const std::size_t kind = pick(3);
            if (kind == 0 && !vars.empty()) {
                const auto& v = vars[pick(vars.size())];
                const auto* d = model->find(v);
                Instance i{v, d->domain == lang::Domain::Int
                                  ? Literal{static_cast<std::int64_t>(pick(40000))}
                                  : Literal{parties[pick(parties.size())]}};
                if (pick(8) == 0) {
                    live = set_fact(std::move(live), Instance{v, std::nullopt}, TruthValue::Unknown);
                    log.push_back(FactInput{Instance{v, std::nullopt}, TruthValue::Unknown});
                } else {
                    live = set_fact(std::move(live), i, TruthValue::True);
                    log.push_back(FactInput{i, TruthValue::True});
                }
            } else if (kind == 1 && !bools.empty()) {
                Instance i{bools[pick(bools.size())], std::nullopt};
                const TruthValue v = truths[pick(3)];
                live = set_fact(std::move(live), i, v);
                log.push_back(FactInput{i, v});
            } else {
                const auto& a = acts[pick(acts.size())];
                ActInvocation inv{a, Literal{parties[pick(parties.size())]}, std::nullopt};
                if (model->takes_recipient(*model->find(a))) inv.recipient = Literal{parties[pick(parties.size())]};
                const bool confirm = pick(2) == 0;
                auto r = execute_act(std::move(live), inv, confirm);
                live = std::move(r.state);
                if (r.report.executed) log.push_back(ActInput{inv, confirm});
            }
        }
        const std::string want = snapshot(live);
        const std::string via_replay = snapshot(replay(model, log, "v1"));
        const std::string via_restore = snapshot(restore(model, want));
        ++run.sequences;
        if (via_replay != want || via_restore != want || !(restore(model, want) == live)) {
            if (run.failures++ == 0) run.first_failure = "round " + std::to_string(round);
        }
    }
    return run;
}

} // namespace normcase::testing
