#include "msr/reductions.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace msr {

void check_qbf(const Qbf& q) {
    if (q.blocks.empty() || q.blocks.size() % 2 == 0)
        throw Error("prefix must have an odd number of blocks");
    std::set<int> quantified;
    for (std::size_t i = 0; i < q.blocks.size(); ++i) {
        const auto& b = q.blocks[i];
        if (b.exists != (i % 2 == 0))
            throw Error("prefix must alternate starting and ending with an existential block");
        if (b.vars.empty())
            throw Error("block " + std::to_string(i + 1) + " is empty");
        for (int v : b.vars) {
            if (v <= 0)
                throw Error("variables must be positive integers");
            if (!quantified.insert(v).second)
                throw Error("variable " + std::to_string(v) + " is quantified twice");
        }
    }
    for (const auto& c : q.clauses)
        for (const auto& l : c)
            if (!quantified.count(l.var))
                throw Error("clause variable " + std::to_string(l.var) + " is not quantified");
}

Qbf parse_qdimacs(std::string_view text) {
    Qbf q;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head == "c")
            continue;
        auto where = "line " + std::to_string(lineno) + ": ";
        if (head == "p") {
            std::string fmt;
            ls >> fmt;
            if (fmt != "cnf")
                throw Error(where + "expected 'p cnf'");
            header = true;
            continue;
        }
        if (!header)
            throw Error(where + "missing 'p cnf' header");
        if (head == "e" || head == "a") {
            if (!q.clauses.empty())
                throw Error(where + "quantifier line after clauses");
            QbfBlock b{head == "e", {}};
            int v;
            while (ls >> v && v != 0)
                b.vars.push_back(v);
            if (!q.blocks.empty() && q.blocks.back().exists == b.exists)
                q.blocks.back().vars.insert(q.blocks.back().vars.end(), b.vars.begin(), b.vars.end());
            else
                q.blocks.push_back(std::move(b));
            continue;
        }
        std::vector<int> lits;
        try {
            lits.push_back(std::stoi(head));
        } catch (const std::exception&) {
            throw Error(where + "unexpected token '" + head + "'");
        }
        int v;
        while (ls >> v)
            lits.push_back(v);
        if (lits.empty() || lits.back() != 0)
            throw Error(where + "clause must end with 0");
        lits.pop_back();
        if (lits.size() != 3)
            throw Error(where + "clauses must have exactly 3 literals");
        std::array<Literal, 3> c;
        for (int i = 0; i < 3; ++i) {
            if (lits[i] == 0)
                throw Error(where + "literal 0 inside a clause");
            c[i] = Literal{std::abs(lits[i]), lits[i] > 0};
        }
        q.clauses.push_back(c);
    }
    check_qbf(q);
    return q;
}

std::string print_qdimacs(const Qbf& q) {
    int maxv = 0;
    for (const auto& b : q.blocks)
        for (int v : b.vars)
            maxv = std::max(maxv, v);
    std::ostringstream out;
    out << "p cnf " << maxv << " " << q.clauses.size() << "\n";
    for (const auto& b : q.blocks) {
        out << (b.exists ? "e" : "a");
        for (int v : b.vars)
            out << " " << v;
        out << " 0\n";
    }
    for (const auto& c : q.clauses) {
        for (const auto& l : c)
            out << (l.positive ? l.var : -l.var) << " ";
        out << "0\n";
    }
    return out.str();
}

bool evaluate_qbf(const Qbf& q, std::size_t max_vars) {
    check_qbf(q);
    std::map<int, int> bit;
    for (const auto& b : q.blocks)
        for (int v : b.vars)
            bit.emplace(v, static_cast<int>(bit.size()));
    if (bit.size() > max_vars || bit.size() > 62)
        throw Error("formula has " + std::to_string(bit.size()) + " variables, above the limit of " +
                    std::to_string(std::min<std::size_t>(max_vars, 62)));
    auto satisfied = [&](std::uint64_t assign) {
        for (const auto& c : q.clauses) {
            bool any = false;
            for (const auto& l : c)
                any = any || (((assign >> bit.at(l.var)) & 1) != 0) == l.positive;
            if (!any)
                return false;
        }
        return true;
    };
    std::function<bool(std::size_t, std::uint64_t)> play = [&](std::size_t i, std::uint64_t assign) {
        if (i == q.blocks.size())
            return satisfied(assign);
        const auto& vars = q.blocks[i].vars;
        for (std::uint64_t choice = 0; choice < (std::uint64_t{1} << vars.size()); ++choice) {
            std::uint64_t next = assign;
            for (std::size_t j = 0; j < vars.size(); ++j)
                if ((choice >> j) & 1)
                    next |= std::uint64_t{1} << bit.at(vars[j]);
            bool r = play(i + 1, next);
            if (r == q.blocks[i].exists)
                return r;
        }
        return !q.blocks[i].exists;
    };
    return play(0, 0);
}

namespace {

std::string idx(const std::string& base, std::size_t i) {
    return base + "_" + std::to_string(i);
}

Fact fact(std::string pred, std::vector<Term> args = {}) {
    return Fact{std::move(pred), std::move(args)};
}

std::vector<TimeConstraint> all_now(const std::vector<std::string>& tvars) {
    std::vector<TimeConstraint> out;
    for (const auto& v : tvars)
        out.push_back({v, Rel::Eq, "T", 0});
    return out;
}

// assign∃_i and assign∀_i share their shape and differ in role and guard.
Rule assign_rule(std::size_t i, std::size_t k, bool exists) {
    Rule r;
    r.name = idx(exists ? "assignE" : "assignA", i);
    r.role = exists ? RuleRole::System : RuleRole::SystemUpdate;
    std::vector<Term> ys;
    std::vector<std::string> tvars;
    for (std::size_t j = 1; j <= k; ++j) {
        ys.push_back(Term::var(idx("y", j), "bool"));
        tvars.push_back(idx("T", j));
        r.side.push_back({fact("B", {ys.back()}), tvars.back()});
    }
    r.consumed = {{fact(idx("Rnd", i - 1)), idx("T", k + 1)},
                  {fact(idx("Unk", i)), idx("T", k + 2)},
                  {fact("Junk"), idx("T", k + 3)}};
    r.created = {{fact(idx("Rnd", i)), 0}, {fact(idx("Val", i), ys), 0}, {fact("Junk"), 1}};
    if (exists) {
        for (std::size_t j = k + 1; j <= k + 3; ++j)
            tvars.push_back(idx("T", j));
        r.guard = all_now(tvars);
    } else {
        r.guard = {{idx("T", k + 3), Rel::Le, "T", 0}};
    }
    return r;
}

}  // namespace

PlanningScenario qbf_to_scenario(const Qbf& q) {
    check_qbf(q);
    const std::size_t rounds = q.blocks.size();
    const std::size_t m = q.clauses.size();
    std::size_t k = 0;
    std::map<int, std::pair<std::size_t, std::size_t>> where;  // variable → (block i, position j), 1-based
    for (std::size_t i = 0; i < rounds; ++i) {
        k += q.blocks[i].vars.size();
        for (std::size_t j = 0; j < q.blocks[i].vars.size(); ++j)
            where[q.blocks[i].vars[j]] = {i + 1, j + 1};
    }

    PlanningScenario a;
    a.name = "qbf";
    a.sig.add_type("bool");
    a.sig.add_constant("true", "bool");
    a.sig.add_constant("false", "bool");
    a.sig.add_predicate("B", {{"bool"}, PredRole::System});
    a.sig.add_predicate("T", {{"bool"}, PredRole::Goal});
    a.sig.add_predicate("F", {{"bool"}, PredRole::System});
    a.sig.add_predicate("W", {{}, PredRole::System});
    a.sig.add_predicate("Junk", {{}, PredRole::System});
    for (std::size_t i = 0; i <= rounds; ++i)
        a.sig.add_predicate(idx("Rnd", i), {{}, PredRole::System});
    for (std::size_t i = 1; i <= rounds; ++i) {
        a.sig.add_predicate(idx("Unk", i), {{}, PredRole::System});
        a.sig.add_predicate(idx("Val", i),
                            {std::vector<std::string>(q.blocks[i - 1].vars.size(), "bool"), PredRole::System});
    }
    for (std::size_t l = 1; l <= m; ++l) {
        a.sig.add_predicate(idx("IC", l), {{}, PredRole::System});
        a.sig.add_predicate(idx("Sat", l), {{}, PredRole::System});
    }

    for (std::size_t i = 1; i <= rounds; i += 2)
        a.system_rules.push_back(assign_rule(i, q.blocks[i - 1].vars.size(), true));
    for (std::size_t i = 2; i <= rounds; i += 2) {
        Rule r;
        r.name = idx("rwin", i);
        r.consumed = {{fact(idx("Rnd", i - 1)), "T1"}, {fact(idx("Unk", i)), "T2"}, {fact("Junk"), "T3"}};
        r.created = {{fact("W"), 0}, {fact("Junk"), 0}, {fact("Junk"), 1}};
        r.guard = all_now({"T1", "T2", "T3"});
        a.system_rules.push_back(std::move(r));
    }
    for (std::size_t l = 1; l <= m; ++l)
        for (std::size_t p = 0; p < 3; ++p) {
            const auto& lit = q.clauses[l - 1][p];
            auto [i, j] = where.at(lit.var);
            std::size_t ki = q.blocks[i - 1].vars.size();
            Rule r;
            r.name = (lit.positive ? "posElim_" : "negElim_") + std::to_string(i) + "_" + std::to_string(j) + "_" +
                     std::to_string(l) + "_" + std::to_string(p + 1);
            std::vector<Term> args;
            for (std::size_t x = 1; x <= ki; ++x)
                args.push_back(x == j ? Term::var("b", "bool") : Term::var(idx("y", x), "bool"));
            r.side = {{fact(idx("Val", i), args), "T1"},
                      {fact(lit.positive ? "T" : "F", {Term::var("b", "bool")}), "T2"},
                      {fact(idx("Rnd", rounds)), "T3"}};
            r.consumed = {{fact(idx("IC", l)), "T4"}, {fact("Junk"), "T5"}};
            r.created = {{fact(idx("Sat", l)), 0}, {fact("Junk"), 1}};
            r.guard = all_now({"T1", "T2", "T3", "T4", "T5"});
            a.system_rules.push_back(std::move(r));
        }
    for (std::size_t i = 2; i <= rounds; i += 2)
        a.update_rules.push_back(assign_rule(i, q.blocks[i - 1].vars.size(), false));

    SpecPair win{"win", {{fact("W"), "T1"}, {fact("T", {Term::constant("true")}), "T0"}}, {}};
    SpecPair sat{"sat", {{fact("T", {Term::constant("true")}), "T0"}}, {}};
    for (std::size_t l = 1; l <= m; ++l)
        sat.pattern.push_back({fact(idx("Sat", l)), idx("T", l)});
    a.goal.pairs = {win, sat};

    std::vector<TimedFact> s0{{fact(std::string(kTimePredicate)), 0},
                              {fact("Rnd_0"), 0},
                              {fact("T", {Term::constant("true")}), 0},
                              {fact("F", {Term::constant("false")}), 0}};
    for (std::size_t i = 1; i <= rounds; ++i)
        s0.push_back({fact(idx("Unk", i)), 0});
    for (std::size_t l = 1; l <= m; ++l)
        s0.push_back({fact(idx("IC", l)), 0});
    for (std::size_t c = 0; c < 2 * k; ++c) {
        s0.push_back({fact("B", {Term::constant("true")}), 0});
        s0.push_back({fact("B", {Term::constant("false")}), 0});
    }
    for (std::size_t c = 0; c < rounds + m; ++c)
        s0.push_back({fact("Junk"), 0});
    a.initial = Configuration(std::move(s0));
    a.finalize();
    return a;
}

Graph parse_graph(std::string_view text) {
    Graph g;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = false;
    int lineno = 0;
    std::set<std::pair<int, int>> edges;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head) || head == "c")
            continue;
        auto where = "line " + std::to_string(lineno) + ": ";
        if (head == "p") {
            std::string fmt;
            if (!(ls >> fmt >> g.vertices) || fmt != "digraph" || g.vertices < 1)
                throw Error(where + "expected 'p digraph N' with N >= 1");
            header = true;
        } else if (head == "e") {
            if (!header)
                throw Error(where + "edge before the 'p digraph' header");
            int u, v;
            if (!(ls >> u >> v) || u < 1 || v < 1 || u > g.vertices || v > g.vertices)
                throw Error(where + "edge endpoints must lie in 1.." + std::to_string(g.vertices));
            edges.insert({u - 1, v - 1});
        } else {
            throw Error(where + "unexpected token '" + head + "'");
        }
    }
    if (!header)
        throw Error("missing 'p digraph' header");
    g.edges.assign(edges.begin(), edges.end());
    return g;
}

std::pair<PlanningScenario, Configuration> graph_to_goal_instance(const Graph& g, const Graph& k) {
    if (g.vertices < 1 || k.vertices < 1)
        throw Error("graphs must be nonempty");
    PlanningScenario a;
    a.name = "homomorphism";
    a.sig.add_type("vertex");
    for (int v = 0; v < k.vertices; ++v)
        a.sig.add_constant(idx("k", v), "vertex");
    a.sig.add_predicate("V", {{"vertex"}, PredRole::Goal});
    a.sig.add_predicate("R", {{"vertex", "vertex"}, PredRole::Goal});
    auto x = [](int u) { return Term::var(idx("x", u), "vertex"); };
    SpecPair p{"hom", {}, {}};
    for (int u = 0; u < g.vertices; ++u)
        p.pattern.push_back({fact("V", {x(u)}), idx("Tv", u)});
    for (const auto& [u, v] : g.edges)
        p.pattern.push_back({fact("R", {x(u), x(v)}), "Te_" + std::to_string(u) + "_" + std::to_string(v)});
    a.goal.pairs = {p};
    // Copies let distinct pattern atoms land on the same target vertex or edge.
    std::vector<TimedFact> facts{{fact(std::string(kTimePredicate)), 0}};
    for (int v = 0; v < k.vertices; ++v)
        for (int c = 0; c < g.vertices; ++c)
            facts.push_back({fact("V", {Term::constant(idx("k", v))}), 0});
    for (const auto& [u, v] : k.edges)
        for (std::size_t c = 0; c < g.edges.size(); ++c)
            facts.push_back({fact("R", {Term::constant(idx("k", u)), Term::constant(idx("k", v))}), 0});
    a.initial = Configuration(std::move(facts));
    a.finalize();
    return {a, a.initial};
}

}  // namespace msr
