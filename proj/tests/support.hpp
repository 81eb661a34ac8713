// Independent oracles and seeded generators shared by the test binaries.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "msr/reductions.hpp"
#include "msr/resilience.hpp"

namespace testing {

using namespace msr;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    bool coin(int percent = 50) { return range(0, 99) < percent; }
    template <class T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(range(0, static_cast<std::int64_t>(xs.size()) - 1))];
    }

private:
    std::mt19937_64 gen_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string scenario_path(const std::string& name) {
    return std::string(MSR_SOURCE_DIR) + "/scenarios/" + name;
}

inline std::string data_path(const std::string& name) {
    return std::string(MSR_SOURCE_DIR) + "/tests/data/" + name;
}

// ---------------------------------------------------------------- matching

inline void collect_subterms(const Signature& sig, const Term& t, std::map<std::string, std::set<std::string>>& seen,
                             std::map<std::string, std::vector<Term>>& out) {
    auto type = term_type(sig, t);
    if (seen[type].insert(render(t)).second)
        out[type].push_back(t);
    for (const auto& a : t.args)
        collect_subterms(sig, a, seen, out);
}

// Every ground term of each type occurring in s.
inline std::map<std::string, std::vector<Term>> values_by_type(const Signature& sig, const Configuration& s) {
    std::map<std::string, std::set<std::string>> seen;
    std::map<std::string, std::vector<Term>> out;
    for (const auto& f : s.facts())
        for (const auto& t : f.fact.args)
            collect_subterms(sig, t, seen, out);
    return out;
}

inline void term_vars(const Term& t, std::map<std::string, std::string>& out) {
    if (t.kind == Term::Kind::Var)
        out.emplace(t.name, t.type);
    for (const auto& a : t.args)
        term_vars(a, out);
}

inline bool multiset_subset(std::vector<TimedFact> need, std::vector<TimedFact> have) {
    auto less = [](const TimedFact& a, const TimedFact& b) { return render(a) < render(b); };
    std::sort(need.begin(), need.end(), less);
    std::sort(have.begin(), have.end(), less);
    return std::includes(have.begin(), have.end(), need.begin(), need.end(), less);
}

// All σ over the pattern's variables with pattern·σ ⊆ s and every constraint true,
// found by trying every assignment into the values and timestamps present in s.
inline std::set<std::string> brute_force_matches(const Signature& sig, const std::vector<TimedAtom>& pattern,
                                                 const std::vector<TimeConstraint>& constraints,
                                                 const Configuration& s) {
    std::map<std::string, std::string> fo;
    std::set<std::string> tvs;
    for (const auto& a : pattern) {
        for (const auto& t : a.atom.args)
            term_vars(t, fo);
        tvs.insert(a.tvar);
    }
    auto values = values_by_type(sig, s);
    std::set<Time> stamps;
    for (const auto& f : s.facts())
        stamps.insert(f.ts);
    std::vector<std::pair<std::string, std::string>> fov(fo.begin(), fo.end());
    std::vector<std::string> tvv(tvs.begin(), tvs.end());
    std::set<std::string> out;
    Binding b;
    std::function<void(std::size_t)> assign_time = [&](std::size_t i) {
        if (i == tvv.size()) {
            for (const auto& c : constraints)
                if (!c.holds(b.tv.at(c.lhs), b.tv.at(c.rhs)))
                    return;
            std::vector<TimedFact> need;
            for (const auto& a : pattern)
                need.push_back({substitute(a.atom, b), b.tv.at(a.tvar)});
            if (multiset_subset(need, s.facts()))
                out.insert(render(b));
            return;
        }
        for (Time t : stamps) {
            b.tv[tvv[i]] = t;
            assign_time(i + 1);
        }
        b.tv.erase(tvv[i]);
    };
    std::function<void(std::size_t)> assign_fo = [&](std::size_t i) {
        if (i == fov.size()) {
            assign_time(0);
            return;
        }
        for (const auto& v : values[fov[i].second]) {
            b.fo[fov[i].first] = v;
            assign_fo(i + 1);
        }
        b.fo.erase(fov[i].first);
    };
    assign_fo(0);
    return out;
}

// Instances of r at s by brute force; fresh variables are left out of each σ.
inline std::set<std::string> brute_force_rule_matches(const Signature& sig, const Rule& r, const Configuration& s) {
    std::vector<TimedAtom> pattern{{Fact{"Time", {}}, r.time_var}};
    pattern.insert(pattern.end(), r.side.begin(), r.side.end());
    pattern.insert(pattern.end(), r.consumed.begin(), r.consumed.end());
    return brute_force_matches(sig, pattern, r.effective_guard(), s);
}

// ---------------------------------------------------------------- δ

inline DeltaRep tock_oracle(const DeltaRep& d) {
    return abstract(tick(lift(d)), d.dmax);
}

// ---------------------------------------------------------------- graphs

inline bool brute_force_homomorphism(const Graph& g, const Graph& k) {
    std::set<std::pair<int, int>> target(k.edges.begin(), k.edges.end());
    std::vector<int> map(static_cast<std::size_t>(g.vertices), 0);
    std::function<bool(int)> go = [&](int u) {
        if (u == g.vertices) {
            for (const auto& [a, b] : g.edges)
                if (!target.count({map[a], map[b]}))
                    return false;
            return true;
        }
        for (int v = 0; v < k.vertices; ++v) {
            map[u] = v;
            if (go(u + 1))
                return true;
        }
        return false;
    };
    return go(0);
}

// One representative per isomorphism class of loop-free digraphs on 1..max_vertices vertices.
inline std::vector<Graph> nonisomorphic_digraphs(int max_vertices) {
    std::vector<Graph> out;
    for (int n = 1; n <= max_vertices; ++n) {
        std::vector<std::pair<int, int>> slots;
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (u != v)
                    slots.push_back({u, v});
        std::vector<int> perm(static_cast<std::size_t>(n));
        std::set<std::uint32_t> classes;
        for (std::uint32_t mask = 0; mask < (1u << slots.size()); ++mask) {
            std::iota(perm.begin(), perm.end(), 0);
            std::uint32_t best = ~0u;
            do {
                std::uint32_t img = 0;
                for (std::size_t i = 0; i < slots.size(); ++i)
                    if (mask >> i & 1) {
                        auto [u, v] = slots[i];
                        std::pair<int, int> e{perm[u], perm[v]};
                        img |= 1u << (std::find(slots.begin(), slots.end(), e) - slots.begin());
                    }
                best = std::min(best, img);
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (!classes.insert(best).second)
                continue;
            Graph g{n, {}};
            for (std::size_t i = 0; i < slots.size(); ++i)
                if (mask >> i & 1)
                    g.edges.push_back(slots[i]);
            out.push_back(g);
        }
    }
    return out;
}

inline Graph random_graph(Rng& rng, int max_vertices, bool loops) {
    Graph g{static_cast<int>(rng.range(1, max_vertices)), {}};
    for (int u = 0; u < g.vertices; ++u)
        for (int v = 0; v < g.vertices; ++v)
            if ((loops || u != v) && rng.coin(35))
                g.edges.push_back({u, v});
    return g;
}

// ---------------------------------------------------------------- QBF

// Truth value by folding quantifier blocks over a full truth table, innermost first.
inline bool truth_table_qbf(const Qbf& q) {
    std::vector<int> order;
    for (const auto& b : q.blocks)
        order.insert(order.end(), b.vars.begin(), b.vars.end());
    std::size_t k = order.size();
    std::vector<char> table(std::size_t{1} << k);
    for (std::size_t a = 0; a < table.size(); ++a) {
        bool all = true;
        for (const auto& c : q.clauses) {
            bool any = false;
            for (const auto& l : c) {
                auto pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), l.var) - order.begin());
                bool val = (a >> (k - 1 - pos)) & 1;
                any = any || val == l.positive;
            }
            all = all && any;
        }
        table[a] = all;
    }
    for (std::size_t bi = q.blocks.size(); bi-- > 0;) {
        std::size_t width = q.blocks[bi].vars.size();
        std::vector<char> next(table.size() >> width);
        for (std::size_t p = 0; p < next.size(); ++p) {
            bool acc = !q.blocks[bi].exists;
            for (std::size_t s = 0; s < (std::size_t{1} << width); ++s) {
                bool v = table[(p << width) | s];
                acc = q.blocks[bi].exists ? (acc || v) : (acc && v);
            }
            next[p] = acc;
        }
        table = std::move(next);
    }
    return table[0];
}

inline Qbf random_qbf(Rng& rng, int n, int max_per_block, int max_clauses) {
    Qbf q;
    int next = 1;
    for (int i = 0; i < 2 * n + 1; ++i) {
        QbfBlock b{i % 2 == 0, {}};
        for (int j = 0, w = static_cast<int>(rng.range(1, max_per_block)); j < w; ++j)
            b.vars.push_back(next++);
        q.blocks.push_back(b);
    }
    for (int c = 0, m = static_cast<int>(rng.range(0, max_clauses)); c < m; ++c) {
        std::array<Literal, 3> cl;
        for (auto& l : cl)
            l = Literal{static_cast<int>(rng.range(1, next - 1)), rng.coin()};
        q.clauses.push_back(cl);
    }
    return q;
}

// ∃x∀y∃z with every set of at most three distinct clauses (clauses as literal multisets).
inline std::vector<Qbf> exhaustive_xyz_formulas() {
    std::vector<Literal> lits;
    for (int v = 1; v <= 3; ++v) {
        lits.push_back({v, true});
        lits.push_back({v, false});
    }
    std::vector<std::array<Literal, 3>> clauses;
    for (std::size_t i = 0; i < lits.size(); ++i)
        for (std::size_t j = i; j < lits.size(); ++j)
            for (std::size_t k = j; k < lits.size(); ++k)
                clauses.push_back({lits[i], lits[j], lits[k]});
    Qbf base;
    base.blocks = {{true, {1}}, {false, {2}}, {true, {3}}};
    std::vector<Qbf> out;
    out.push_back(base);
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        Qbf q1 = base;
        q1.clauses = {clauses[i]};
        out.push_back(q1);
        for (std::size_t j = i + 1; j < clauses.size(); ++j) {
            Qbf q2 = q1;
            q2.clauses.push_back(clauses[j]);
            out.push_back(q2);
            for (std::size_t k = j + 1; k < clauses.size(); ++k) {
                Qbf q3 = q2;
                q3.clauses.push_back(clauses[k]);
                out.push_back(std::move(q3));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- random scenarios

struct GenOptions {
    // Every rule creates a future fact and only consumes past or present ones.
    bool progressing = true;
    bool updates = false;
    bool critical = true;
    bool fresh = false;
};

inline Term gen_arg(Rng& rng, const std::vector<std::string>& vars) {
    if (!vars.empty() && rng.coin(75))
        return Term::var(rng.pick(vars), "t");
    return Term::constant(rng.coin() ? "c0" : "c1");
}

inline Fact gen_atom(Rng& rng, const std::vector<std::string>& vars) {
    switch (rng.range(0, 3)) {
    case 0: return Fact{"P", {gen_arg(rng, vars)}};
    case 1: return Fact{"Q", {gen_arg(rng, vars), gen_arg(rng, vars)}};
    case 2: return Fact{"R", {}};
    default: return Fact{"S", {gen_arg(rng, vars)}};
    }
}

inline void atom_vars(const Fact& f, std::vector<std::string>& out) {
    for (const auto& t : f.args)
        if (t.kind == Term::Kind::Var && std::find(out.begin(), out.end(), t.name) == out.end())
            out.push_back(t.name);
}

inline Rule gen_rule(Rng& rng, const std::string& name, const GenOptions& o) {
    Rule r;
    r.name = name;
    std::vector<std::string> pool{"x", "y"};
    std::vector<std::string> vars;
    int k = static_cast<int>(rng.range(1, 2));
    for (int i = 1; i <= k; ++i) {
        Fact f = gen_atom(rng, pool);
        atom_vars(f, vars);
        r.consumed.push_back({f, "T" + std::to_string(i)});
    }
    if (rng.coin(40)) {
        Fact f = gen_atom(rng, pool);
        atom_vars(f, vars);
        r.side.push_back({f, "Ts"});
    }
    std::vector<std::string> out_vars = vars;
    if (o.fresh && rng.coin(30))
        out_vars.push_back("z");
    bool future = false;
    for (int i = 0; i < k; ++i) {
        Time d = o.progressing ? rng.range(0, 2) : rng.range(0, 1);
        if (!o.progressing && rng.coin(50))
            d = 0;
        future = future || d > 0;
        r.created.push_back({gen_atom(rng, out_vars), d});
    }
    if (o.progressing && !future)
        r.created.back().delay = 1;
    if (rng.coin(50)) {
        const auto& tv = r.consumed[static_cast<std::size_t>(rng.range(0, k - 1))].tvar;
        switch (rng.range(0, 2)) {
        case 0: r.guard.push_back({tv, Rel::Eq, "T", 0}); break;
        case 1: r.guard.push_back({tv, Rel::Le, "T", -rng.range(1, 2)}); break;
        default: r.guard.push_back({tv, Rel::Lt, "T", 0}); break;
        }
    }
    if (!o.progressing && rng.coin(30))
        r.guard.push_back({r.consumed[0].tvar, Rel::Ge, "T", 0});
    return r;
}

inline PlanningScenario gen_scenario(Rng& rng, const GenOptions& o) {
    for (;;) {
        PlanningScenario a;
        a.name = "random";
        a.sig.add_type("t");
        a.sig.add_constant("c0", "t");
        a.sig.add_constant("c1", "t");
        a.sig.add_predicate("P", {{"t"}, PredRole::System});
        a.sig.add_predicate("Q", {{"t", "t"}, PredRole::System});
        a.sig.add_predicate("R", {{}, PredRole::System});
        a.sig.add_predicate("S", {{"t"}, PredRole::System});
        a.sig.add_predicate("G", {{"t"}, PredRole::Goal});
        a.sig.add_predicate("K", {{}, PredRole::Critical});
        int nrules = static_cast<int>(rng.range(1, 3));
        for (int i = 0; i < nrules; ++i) {
            Rule r = gen_rule(rng, "r" + std::to_string(i), o);
            a.system_rules.push_back(r);
        }
        if (o.updates) {
            if (rng.coin(60)) {
                Rule u;
                u.name = "sur";
                u.role = RuleRole::SystemUpdate;
                Fact f = gen_atom(rng, {"x"});
                u.consumed.push_back({f, "T1"});
                u.created.push_back({f, rng.range(1, 2)});
                if (rng.coin(50))
                    u.guard.push_back({"T1", Rel::Eq, "T", 0});
                a.update_rules.push_back(u);
            }
            if (rng.coin(40)) {
                Rule u;
                u.name = "gur";
                u.role = RuleRole::GoalUpdate;
                u.consumed.push_back({Fact{"G", {Term::var("x", "t")}}, "T1"});
                u.created.push_back({Fact{"G", {Term::var("x", "t")}}, rng.range(1, 3)});
                a.update_rules.push_back(u);
            }
        }
        Time t0 = rng.range(0, 3);
        std::vector<TimedFact> init{{Fact{"Time", {}}, t0}, {Fact{"G", {Term::constant("c0")}}, 0}};
        if (o.critical)
            init.push_back({Fact{"K", {}}, 0});
        for (int i = 0, n = static_cast<int>(rng.range(2, 5)); i < n; ++i)
            init.push_back({gen_atom(rng, {}), rng.range(0, t0 + 2)});
        a.initial = Configuration(init);
        SpecPair goal{"g", {{Fact{"G", {Term::var("x", "t")}}, "T1"}}, {}};
        goal.pattern.push_back({gen_atom(rng, {"x"}), "T2"});
        if (rng.coin(30))
            goal.constraints.push_back({"T2", Rel::Ge, "T1", rng.range(0, 3)});
        a.goal.pairs = {goal};
        if (o.critical && rng.coin(70)) {
            SpecPair bad{"k", {{Fact{"K", {}}, "T1"}, {Fact{"Time", {}}, "T"}}, {}};
            bad.pattern.push_back({gen_atom(rng, {"y"}), "T2"});
            bad.constraints.push_back({"T", Rel::Gt, "T2", rng.range(2, 4)});
            a.critical.pairs = {bad};
        }
        try {
            a.finalize();
        } catch (const Error&) {
            continue;
        }
        if (o.progressing && !a.progressing)
            continue;
        bool balanced = true;
        for (const auto* rs : {&a.system_rules, &a.update_rules})
            for (const auto& r : *rs)
                balanced = balanced && r.consumed.size() == r.created.size();
        if (!balanced)
            continue;
        return a;
    }
}

// Configurations reachable in at most `depth` steps of the selected rules and Tick.
inline std::vector<Configuration> reachable(const PlanningScenario& a, std::size_t depth, RuleSet which,
                                            std::size_t limit = 4000) {
    std::vector<Configuration> out{a.initial};
    std::set<std::string> seen{render(a.initial)};
    std::size_t frontier_begin = 0;
    for (std::size_t d = 0; d < depth && out.size() < limit; ++d) {
        std::size_t frontier_end = out.size();
        for (std::size_t i = frontier_begin; i < frontier_end && out.size() < limit; ++i)
            for (auto& s : successors(a, out[i], which))
                if (seen.insert(render(s.result)).second)
                    out.push_back(std::move(s.result));
        frontier_begin = frontier_end;
    }
    return out;
}

// Mutations of a witness that the verifier must reject, each with the clause it should name.
struct Mutation {
    std::string what;
    WitnessTree tree;
    std::string clause;
};

inline std::vector<Mutation> mutate_witness(const PlanningScenario& a, const WitnessTree& w) {
    std::vector<Mutation> out;
    {
        WitnessTree m = w;
        Time budget = w.query.a + w.query.b;
        while (static_cast<Time>(m.trace.ticks()) <= budget)
            m.trace.steps.push_back({std::nullopt, tick(m.trace.last())});
        out.push_back({"inflated tick count", m, "tick budget"});
    }
    if (!w.children.empty()) {
        for (std::size_t i = 0; i < w.children.size(); ++i) {
            WitnessTree m = w;
            m.children.erase(m.children.begin() + static_cast<std::ptrdiff_t>(i));
            out.push_back({"dropped child " + std::to_string(i), m, "uncovered update point"});
        }
        WitnessTree m = w;
        auto& inst = m.children[0].instance;
        if (!inst.sigma.tv.empty())
            inst.sigma.tv.begin()->second += 1000;
        else
            inst.rule = a.system_rules.front().name;
        out.push_back({"wrong instance", m, "invalid update instance"});
    }
    return out;
}

}  // namespace testing
