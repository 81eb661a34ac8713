#include <doctest.h>

#include "support.hpp"

using namespace msr;

namespace {

PlanningScenario parse(std::string_view text) {
    auto r = parse_scenario(text);
    if (!r.ok())
        for (const auto& d : r.diagnostics)
            MESSAGE(d.str());
    REQUIRE(r.ok());
    return *r.scenario;
}

const char* kTickets = R"(
scenario tickets;
types { id, who }
consts { ann, bob : who; }
predicates { Req(who) : system; Ticket(who, id) : system; P : system; Q : system; }
init { Time@0, Req(ann)@0, Req(bob)@0, P@0 }
rule system issue {
  consume: Req(x)@T1;
  create: Ticket(x, k)@(T+1);
}
rule system pair {
  consume: P@T1, P@T2;
  create: Q@T, Q@T;
}
rule system bump {
  consume: P@T1;
  create: P@(T+1);
}
)";

std::set<std::string> rendered(const std::vector<RuleInstance>& xs, const Rule& r) {
    std::set<std::string> out;
    for (auto inst : xs) {
        for (const auto& v : r.fresh_vars())
            inst.sigma.fo.erase(v.name);
        out.insert(render(inst.sigma));
    }
    return out;
}

}  // namespace

TEST_CASE("boarding rule is blocked until the flight departs") {
    auto a = load_scenario(testing::scenario_path("worked_example.msr"));
    const Rule& board = *a.find_rule("board");
    CHECK(find_matches(board, a.initial).empty());
    Configuration s = a.initial;
    for (int i = 0; i < 43; ++i)
        s = tick(s);
    CHECK(s.time() == 5245);
    auto m = find_matches(board, s);
    REQUIRE(m.size() == 1);
    CHECK(render(m[0].sigma.fo.at("a")) == "id14");
    CHECK(render(m[0].sigma.fo.at("x")) == "FRA");
    CHECK(render(m[0].sigma.fo.at("y")) == "DBV");
    auto after = apply_instance(board, s, m[0]);
    CHECK(after.time() == s.time());
    CHECK(after.size() == s.size());
    // Stale once consumed.
    CHECK(instance_problem(board, after, m[0]).has_value());
    CHECK_THROWS_AS(apply_instance(board, after, m[0]), Error);
}

TEST_CASE("multiplicity matters when matching") {
    auto a = parse(kTickets);
    const Rule& pair = *a.find_rule("pair");
    CHECK(find_matches(pair, a.initial).empty());
    Configuration two({TimedFact{Fact{"Time", {}}, 0}, TimedFact{Fact{"P", {}}, 0}, TimedFact{Fact{"P", {}}, 0}});
    CHECK(find_matches(pair, two).size() == 1);
}

TEST_CASE("consuming and recreating shifts the timestamp") {
    auto a = parse(kTickets);
    const Rule& bump = *a.find_rule("bump");
    Configuration s({TimedFact{Fact{"Time", {}}, 0}, TimedFact{Fact{"P", {}}, 0}});
    auto m = find_matches(bump, s);
    REQUIRE(m.size() == 1);
    CHECK(render(apply_instance(bump, s, m[0])) == "{ Time@0, P@1 }");
}

TEST_CASE("fresh constants are distinct across applications") {
    auto a = parse(kTickets);
    const Rule& issue = *a.find_rule("issue");
    Configuration s = a.initial;
    auto m1 = find_matches(issue, s);
    REQUIRE(m1.size() == 2);
    s = apply_instance(issue, s, m1[0]);
    auto m2 = find_matches(issue, s);
    REQUIRE(m2.size() == 1);
    s = apply_instance(issue, s, m2[0]);
    auto fv = s.fresh_values();
    CHECK(fv["id"] == std::set<std::int64_t>{0, 1});
    CHECK(render(s).find("#id:0") != std::string::npos);
    CHECK(render(s).find("#id:1") != std::string::npos);
}

TEST_CASE("reusing a fresh constant already present is rejected") {
    auto a = parse(kTickets);
    const Rule& issue = *a.find_rule("issue");
    Configuration s = a.initial;
    auto m = find_matches(issue, s);
    s = apply_instance(issue, s, m[0]);
    RuleInstance stale = find_matches(issue, s).at(0);
    stale.sigma.fo["k"] = Term::fresh("id", 0);
    CHECK(instance_problem(issue, s, stale).has_value());
}

TEST_CASE("classification examples") {
    auto w = load_scenario(testing::scenario_path("worked_example.msr"));
    auto board = classify_rule(*w.find_rule("board"), w.sig);
    CHECK(board.balanced);
    CHECK(board.progressing);
    CHECK(board.role_valid);
    auto delay = classify_rule(*w.find_rule("delay"), w.sig);
    CHECK(delay.balanced);
    CHECK(delay.progressing);
    CHECK(delay.role_valid);

    Rule future = *w.find_rule("delay");
    future.name = "future";
    future.implicit_cr = false;
    future.guard = {{"T", Rel::Lt, "T1", 0}};
    auto c = classify_rule(future, w.sig);
    CHECK(c.balanced);
    CHECK_FALSE(c.progressing);
    REQUIRE_FALSE(c.violations.empty());
    bool names_clause = false;
    for (const auto& v : c.violations)
        names_clause = names_clause || v.find("(ii)") != std::string::npos;
    CHECK(names_clause);

    auto t = parse(kTickets);
    auto pair = classify_rule(*t.find_rule("pair"), t.sig);
    CHECK(pair.balanced);
    CHECK_FALSE(pair.progressing);
}

TEST_CASE("update rules must respect fact roles") {
    auto w = load_scenario(testing::scenario_path("worked_example.msr"));
    Rule sur = *w.find_rule("delay");
    sur.consumed.push_back({Fact{"Event", {Term::var("n", "name"), Term::var("e", "id")}}, "T2"});
    sur.created.push_back({Fact{"Event", {Term::var("n", "name"), Term::var("e", "id")}}, 5});
    CHECK_FALSE(classify_rule(sur, w.sig).role_valid);
    Rule gur = *w.find_rule("reschedule");
    gur.consumed = {{Fact{"At", {Term::var("x", "city"), Term::var("l", "loc")}}, "T1"}};
    gur.created = {{Fact{"At", {Term::var("x", "city"), Term::var("l", "loc")}}, 5}};
    CHECK_FALSE(classify_rule(gur, w.sig).role_valid);
}

TEST_CASE("well-formedness restrictions") {
    auto w = load_scenario(testing::scenario_path("worked_example.msr"));
    Rule r = *w.find_rule("board");
    Rule time_consumer = r;
    time_consumer.consumed.push_back({Fact{"Time", {}}, "T9"});
    CHECK_THROWS_AS(check_rule(time_consumer, w.sig), Error);
    Rule time_creator = r;
    time_creator.created.push_back({Fact{"Time", {}}, 1});
    CHECK_THROWS_AS(check_rule(time_creator, w.sig), Error);
    Rule scoped = r;
    scoped.guard.push_back({"T7", Rel::Gt, "T", 0});
    CHECK_THROWS_AS(check_rule(scoped, w.sig), Error);
    Rule noop = r;
    noop.consumed = {{Fact{"At", {Term::var("x", "city"), Term::constant("airport")}}, "T"}};
    noop.created = {{Fact{"At", {Term::var("x", "city"), Term::constant("airport")}}, 0}};
    CHECK_THROWS_AS(check_rule(noop, w.sig), Error);
}

TEST_CASE("guard normalization is equivalent over naturals") {
    for (auto rel : {Rel::Gt, Rel::Ge, Rel::Eq, Rel::Le, Rel::Lt})
        for (Time off = -3; off <= 3; ++off) {
            TimeConstraint c{"A", rel, "B", off};
            auto n = c.normalized();
            CHECK((n.rel == Rel::Gt || n.rel == Rel::Eq));
            for (Time va = 0; va < 8; ++va)
                for (Time vb = 0; vb < 8; ++vb) {
                    auto val = [&](const std::string& v) { return v == "A" ? va : vb; };
                    CHECK(c.holds(va, vb) == n.holds(val(n.lhs), val(n.rhs)));
                }
        }
}

TEST_CASE("constraint satisfiability") {
    CHECK(constraints_satisfiable({{"A", Rel::Gt, "B", 2}}));
    CHECK_FALSE(constraints_satisfiable({{"A", Rel::Gt, "B", 0}, {"B", Rel::Gt, "A", 0}}));
    CHECK_FALSE(constraints_satisfiable({{"A", Rel::Eq, "B", 1}, {"A", Rel::Eq, "B", 2}}));
    CHECK(constraints_satisfiable({{"A", Rel::Eq, "B", -1}, {"B", Rel::Le, "C", 0}}));
}

TEST_CASE("find_matches agrees with brute-force enumeration") {
    testing::Rng rng(20261015);
    for (int round = 0; round < 60; ++round) {
        testing::GenOptions o;
        o.progressing = rng.coin();
        o.fresh = true;
        auto a = testing::gen_scenario(rng, o);
        for (const auto& s : testing::reachable(a, 4, RuleSet::System, 60))
            for (const auto& r : a.system_rules) {
                auto got = find_matches(r, s);
                CHECK(rendered(got, r) == testing::brute_force_rule_matches(a.sig, r, s));
                auto fv = s.fresh_values();
                for (const auto& inst : got) {
                    CHECK_FALSE(instance_problem(r, s, inst).has_value());
                    for (const auto& v : r.fresh_vars()) {
                        const auto& t = inst.sigma.fo.at(v.name);
                        CHECK(t.kind == Term::Kind::Fresh);
                        CHECK(fv[t.name].count(t.index) == 0);
                    }
                }
            }
    }
}

TEST_CASE("balanced rules preserve configuration size") {
    testing::Rng rng(99);
    for (int round = 0; round < 40; ++round) {
        testing::GenOptions o;
        o.progressing = rng.coin();
        auto a = testing::gen_scenario(rng, o);
        for (const auto& s : testing::reachable(a, 6, RuleSet::Both, 200))
            CHECK(s.size() == a.initial.size());
    }
}

TEST_CASE("ticks leave every other fact in place") {
    auto a = load_scenario(testing::scenario_path("worked_example.msr"));
    Configuration s = a.initial;
    for (int k = 0; k < 10; ++k)
        s = tick(s);
    CHECK(s.time() == a.initial.time() + 10);
    auto before = a.initial.facts();
    auto after = s.facts();
    REQUIRE(before.size() == after.size());
    std::erase_if(before, [](const TimedFact& f) { return f.fact.is_time(); });
    std::erase_if(after, [](const TimedFact& f) { return f.fact.is_time(); });
    CHECK(before == after);
}
