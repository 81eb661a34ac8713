#include <doctest.h>

#include "support.hpp"

using namespace msr;

namespace {

Signature letters() {
    Signature sig;
    sig.add_type("t");
    sig.add_constant("c", "t");
    for (const char* p : {"P", "Q", "R"})
        sig.add_predicate(p, {{}, PredRole::System});
    sig.add_predicate("S", {{"t"}, PredRole::System});
    return sig;
}

Configuration cfg(std::string_view text) {
    static const Signature sig = letters();
    return parse_configuration(sig, text);
}

DeltaRep rep(std::vector<std::string> names, std::vector<Time> gaps, Time dmax) {
    DeltaRep d;
    for (auto& n : names)
        d.facts.push_back(Fact{n, {}});
    d.gaps = std::move(gaps);
    d.dmax = dmax;
    return d;
}

// Random future-bounded configuration whose gaps often sit on or around dmax.
Configuration random_config(testing::Rng& rng, Time dmax) {
    Time now = rng.range(0, 3 * dmax + 3);
    std::vector<TimedFact> facts{{Fact{"Time", {}}, now}};
    std::vector<std::string> preds{"P", "Q", "R"};
    for (int i = 0, n = static_cast<int>(rng.range(0, 6)); i < n; ++i) {
        Time ts;
        switch (rng.range(0, 4)) {
        case 0: ts = now; break;
        case 1: ts = now + rng.range(0, dmax); break;
        case 2: ts = std::max<Time>(0, now - dmax + rng.range(-1, 1)); break;
        case 3: ts = now + dmax - rng.range(0, 1); break;
        default: ts = rng.range(0, now); break;
        }
        facts.push_back({Fact{rng.pick(preds), {}}, std::max<Time>(0, ts)});
    }
    return Configuration(facts);
}

}  // namespace

TEST_CASE("abstraction examples") {
    auto s = cfg("{ Time@5, P@3, Q@9 }");
    CHECK(render(abstract(s, 4)) == "[P |2| Time |4| Q]");
    CHECK(render(abstract(s, 3)) == "[P |2| Time |inf| Q]");
    auto shifted = cfg("{ Time@105, P@103, Q@109 }");
    CHECK(abstract(shifted, 4) == abstract(s, 4));
    CHECK(delta_key(abstract(shifted, 4)) == delta_key(abstract(s, 4)));
    CHECK(delta_key(abstract(cfg("{ Time@5, P@3, P@3, Q@9 }"), 4)) != delta_key(abstract(s, 4)));
    CHECK(delta_key(abstract(cfg("{ Time@5, P@2, Q@9 }"), 4)) != delta_key(abstract(s, 4)));
    CHECK(delta_key(abstract(s, 4)) != delta_key(abstract(s, 5)));
    CHECK_FALSE(abstract(s, 3).future_bounded());
    CHECK(abstract(s, 4).future_bounded());
    CHECK(abstract(s, 4).time_index() == 1);
}

TEST_CASE("Tock examples") {
    CHECK(render(tock(rep({"Time", "P"}, {2}, 5))) == "[Time |1| P]");
    CHECK(render(tock(rep({"P", "Time"}, {1}, 5))) == "[P |2| Time]");
    CHECK(render(tock(rep({"P", "Time"}, {5}, 5))) == "[P |inf| Time]");
    CHECK(render(tock(rep({"P", "Time"}, {kInf}, 5))) == "[P |inf| Time]");
    CHECK(render(tock(rep({"Time", "P", "Q", "R"}, {0, 0, 2}, 3))) == "[P |0| Q |1| Time |1| R]");
    CHECK_THROWS_AS(tock(rep({"Time", "P"}, {kInf}, 5)), Error);
}

TEST_CASE("lift is a section of abstract") {
    testing::Rng rng(17);
    for (int i = 0; i < 2000; ++i) {
        Time dmax = rng.range(1, 6);
        auto d = abstract(random_config(rng, dmax), dmax);
        auto s = lift(d);
        CHECK(abstract(s, dmax) == d);
        Time later = rng.range(0, 50);
        CHECK(lift(d, later).time() >= later);
        CHECK(abstract(lift(d, later), dmax) == d);
    }
}

TEST_CASE("Tock fast path agrees with the concrete oracle") {
    testing::Rng rng(23);
    std::size_t boundary = 0;
    for (int i = 0; i < 3000; ++i) {
        Time dmax = rng.range(1, 6);
        auto s = random_config(rng, dmax);
        auto d = abstract(s, dmax);
        for (auto g : d.gaps)
            boundary += g == dmax;
        CHECK(tock(d) == testing::tock_oracle(d));
        CHECK(tock(d) == abstract(tick(s), dmax));
    }
    CHECK(boundary > 100);
}

TEST_CASE("progressing checks over abstractions") {
    auto d = rep({"P", "Time", "Q"}, {1, 2}, 5);
    CHECK(is_progressing_delta(d, tock(d)));
    CHECK_FALSE(is_progressing_delta(d, rep({"Time", "Q"}, {2}, 5)));
    CHECK_FALSE(is_progressing_delta(d, d));
    // Consuming the present P and creating it in the future.
    CHECK(is_progressing_delta(rep({"Time", "P"}, {0}, 5), rep({"Time", "P"}, {3}, 5)));
    // Consuming a future fact.
    CHECK_FALSE(is_progressing_delta(rep({"Time", "P", "Q"}, {0, 2}, 5), rep({"Time", "P", "R"}, {0, 3}, 5)));

    auto a = load_scenario(testing::scenario_path("worked_example.msr"));
    Time dmax = infer_dmax(a);
    Configuration s = a.initial;
    for (int i = 0; i < 43; ++i)
        s = tick(s);
    const Rule& board = *a.find_rule("board");
    auto inst = find_matches(board, s).at(0);
    CHECK(is_progressing_delta(abstract(s, dmax), abstract(apply_instance(board, s, inst), dmax)));
}

TEST_CASE("progressing rule applications are progressing over abstractions") {
    testing::Rng rng(31);
    for (int round = 0; round < 40; ++round) {
        auto a = testing::gen_scenario(rng, {});
        Time dmax = infer_dmax(a);
        for (const auto& s : testing::reachable(a, 6, RuleSet::System, 150)) {
            auto d = abstract(s, dmax);
            if (!d.future_bounded())
                continue;
            for (const auto& succ : successors(a, s, RuleSet::System))
                CHECK(is_progressing_delta(d, abstract(succ.result, dmax)));
        }
    }
}

TEST_CASE("δ-successors match concrete successors") {
    testing::Rng rng(37);
    for (int round = 0; round < 40; ++round) {
        testing::GenOptions o;
        o.updates = true;
        auto a = testing::gen_scenario(rng, o);
        Time dmax = infer_dmax(a);
        for (const auto& s : testing::reachable(a, 6, RuleSet::Both, 150)) {
            auto d = abstract(s, dmax);
            REQUIRE(d.future_bounded());
            for (auto which : {RuleSet::System, RuleSet::Updates, RuleSet::Both}) {
                std::multiset<std::string> concrete, symbolic;
                for (const auto& succ : successors(a, s, which))
                    concrete.insert(delta_key(abstract(succ.result, dmax)));
                for (const auto& e : delta_successors(a, d, which))
                    symbolic.insert(delta_key(e));
                CHECK(concrete == symbolic);
            }
        }
    }
}

TEST_CASE("equivalent configurations satisfy the same specifications") {
    testing::Rng rng(41);
    for (int round = 0; round < 40; ++round) {
        auto a = testing::gen_scenario(rng, {});
        Time dmax = infer_dmax(a);
        for (const auto& s : testing::reachable(a, 5, RuleSet::System, 100)) {
            auto d = abstract(s, dmax);
            auto other = lift(d, rng.range(0, 40));
            CHECK(match_spec(a.goal, s).has_value() == match_spec(a.goal, other).has_value());
            CHECK(match_spec(a.critical, s).has_value() == match_spec(a.critical, other).has_value());
        }
    }
}

TEST_CASE("travel initial abstraction") {
    auto a = load_scenario(testing::scenario_path("travel.msr"));
    auto d = abstract(a.initial, infer_dmax(a));
    CHECK(d.future_bounded());
    CHECK(d.facts.size() == a.initial.size());
    CHECK(abstract(lift(d), d.dmax) == d);
}
