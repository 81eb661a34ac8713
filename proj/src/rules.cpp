#include "msr/rules.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace msr {

std::string_view to_string(RuleRole role) {
    switch (role) {
    case RuleRole::System: return "system";
    case RuleRole::SystemUpdate: return "system_update";
    case RuleRole::GoalUpdate: return "goal_update";
    }
    return "?";
}

std::string_view to_string(Rel rel) {
    switch (rel) {
    case Rel::Gt: return ">";
    case Rel::Ge: return ">=";
    case Rel::Eq: return "=";
    case Rel::Le: return "<=";
    case Rel::Lt: return "<";
    }
    return "?";
}

bool TimeConstraint::holds(Time l, Time r) const {
    // Work in wider arithmetic so large offsets cannot overflow.
    __int128 rr = static_cast<__int128>(r) + offset;
    __int128 ll = l;
    switch (rel) {
    case Rel::Gt: return ll > rr;
    case Rel::Ge: return ll >= rr;
    case Rel::Eq: return ll == rr;
    case Rel::Le: return ll <= rr;
    case Rel::Lt: return ll < rr;
    }
    return false;
}

TimeConstraint TimeConstraint::normalized() const {
    switch (rel) {
    case Rel::Gt:
    case Rel::Eq: return *this;
    case Rel::Ge: return {lhs, Rel::Gt, rhs, offset - 1};
    // l <= r + N  <=>  r >= l - N  <=>  r > l - N - 1
    case Rel::Le: return {rhs, Rel::Gt, lhs, -offset - 1};
    // l < r + N  <=>  r > l - N
    case Rel::Lt: return {rhs, Rel::Gt, lhs, -offset};
    }
    return *this;
}

std::string render(const TimeConstraint& c) {
    std::string out = c.lhs + " " + std::string(to_string(c.rel)) + " " + c.rhs;
    if (c.offset > 0)
        out += " + " + std::to_string(c.offset);
    else if (c.offset < 0)
        out += " - " + std::to_string(-c.offset);
    return out;
}

namespace {

void collect_vars(const Term& t, std::vector<Term>& out, std::set<std::string>& seen) {
    if (t.kind == Term::Kind::Var) {
        if (seen.insert(t.name).second)
            out.push_back(t);
        return;
    }
    for (const auto& a : t.args)
        collect_vars(a, out, seen);
}

void collect_vars(const Fact& f, std::vector<Term>& out, std::set<std::string>& seen) {
    for (const auto& a : f.args)
        collect_vars(a, out, seen);
}

}  // namespace

std::vector<Term> Rule::fresh_vars() const {
    std::vector<Term> pre;
    std::set<std::string> seen;
    for (const auto& a : side)
        collect_vars(a.atom, pre, seen);
    for (const auto& a : consumed)
        collect_vars(a.atom, pre, seen);
    std::vector<Term> out;
    for (const auto& c : created)
        collect_vars(c.atom, out, seen);
    return out;
}

std::vector<std::string> Rule::pre_time_vars() const {
    std::vector<std::string> out{time_var};
    auto add = [&](const std::string& v) {
        if (std::find(out.begin(), out.end(), v) == out.end())
            out.push_back(v);
    };
    for (const auto& a : side)
        add(a.tvar);
    for (const auto& a : consumed)
        add(a.tvar);
    return out;
}

std::vector<TimeConstraint> Rule::effective_guard() const {
    auto out = guard;
    if (implicit_cr)
        for (const auto& a : consumed)
            out.push_back({time_var, Rel::Ge, a.tvar, 0});
    return out;
}

std::string render(const Binding& b) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, v] : b.fo) {
        out += (first ? "" : ", ") + k + "=" + render(v);
        first = false;
    }
    for (const auto& [k, v] : b.tv) {
        out += (first ? "" : ", ") + k + "=" + std::to_string(v);
        first = false;
    }
    return out + "}";
}

std::string render(const RuleInstance& inst) {
    return inst.rule + " σ=" + render(inst.sigma);
}

Term substitute(const Term& t, const Binding& b) {
    if (t.kind == Term::Kind::Var) {
        auto it = b.fo.find(t.name);
        if (it == b.fo.end())
            throw Error("unbound variable '" + t.name + "'");
        return it->second;
    }
    if (t.args.empty())
        return t;
    Term out = t;
    for (auto& a : out.args)
        a = substitute(a, b);
    return out;
}

Fact substitute(const Fact& f, const Binding& b) {
    Fact out;
    out.pred = f.pred;
    out.args.reserve(f.args.size());
    for (const auto& a : f.args)
        out.args.push_back(substitute(a, b));
    return out;
}

namespace {

struct CTerm {
    Term::Kind kind = Term::Kind::Const;
    const Term* src = nullptr;
    int slot = -1;
    std::vector<CTerm> args;
};

struct CAtom {
    const std::string* pred = nullptr;
    std::vector<CTerm> args;
    int tslot = -1;
};

struct CCons {
    int l = 0;
    int r = 0;
    const TimeConstraint* c = nullptr;
};

struct Group {
    const TimedFact* fact = nullptr;
    int count = 0;
};

class Matcher {
public:
    Matcher(const std::vector<TimedAtom>& pattern, const std::vector<TimeConstraint>& constraints) {
        for (const auto& a : pattern) {
            CAtom ca;
            ca.pred = &a.atom.pred;
            for (const auto& t : a.atom.args)
                ca.args.push_back(compile(t));
            ca.tslot = tslot(a.tvar);
            atoms_.push_back(std::move(ca));
        }
        // Each constraint is checked right after the atom binding its later variable.
        std::vector<int> first_depth(tv_names_.size(), -1);
        for (std::size_t i = 0; i < atoms_.size(); ++i)
            if (first_depth[atoms_[i].tslot] < 0)
                first_depth[atoms_[i].tslot] = static_cast<int>(i);
        checks_.resize(atoms_.size() + 1);
        for (const auto& c : constraints) {
            auto li = tv_index_.find(c.lhs), ri = tv_index_.find(c.rhs);
            if (li == tv_index_.end() || ri == tv_index_.end())
                throw Error("constraint " + render(c) + " mentions a time variable outside the pattern");
            int depth = std::max(first_depth[li->second], first_depth[ri->second]);
            checks_[depth].push_back({li->second, ri->second, &c});
        }
    }

    void run(const Configuration& s, const std::function<bool(const Binding&)>& on_match) {
        const auto& facts = s.facts();
        for (std::size_t i = 0; i < facts.size();) {
            std::size_t j = i + 1;
            while (j < facts.size() && facts[j] == facts[i])
                ++j;
            by_pred_[facts[i].fact.pred].push_back(static_cast<int>(groups_.size()));
            groups_.push_back({&facts[i], static_cast<int>(j - i)});
            i = j;
        }
        used_.assign(groups_.size(), 0);
        fo_.assign(fo_names_.size(), nullptr);
        tv_.assign(tv_names_.size(), 0);
        tv_bound_.assign(tv_names_.size(), false);
        on_match_ = &on_match;
        if (atoms_.empty()) {
            emit();
            return;
        }
        search(0);
    }

private:
    int fo_slot(const std::string& name) {
        auto [it, inserted] = fo_index_.emplace(name, static_cast<int>(fo_names_.size()));
        if (inserted)
            fo_names_.push_back(name);
        return it->second;
    }

    int tslot(const std::string& name) {
        auto [it, inserted] = tv_index_.emplace(name, static_cast<int>(tv_names_.size()));
        if (inserted)
            tv_names_.push_back(name);
        return it->second;
    }

    CTerm compile(const Term& t) {
        CTerm c;
        c.kind = t.kind;
        c.src = &t;
        if (t.kind == Term::Kind::Var)
            c.slot = fo_slot(t.name);
        for (const auto& a : t.args)
            c.args.push_back(compile(a));
        return c;
    }

    bool unify(const CTerm& p, const Term& g) {
        switch (p.kind) {
        case Term::Kind::Var:
            if (fo_[p.slot])
                return *fo_[p.slot] == g;
            fo_[p.slot] = &g;
            trail_.push_back(p.slot);
            return true;
        case Term::Kind::Const: return g.kind == Term::Kind::Const && g.name == p.src->name;
        case Term::Kind::Fresh: return g == *p.src;
        case Term::Kind::App:
            if (g.kind != Term::Kind::App || g.name != p.src->name || g.args.size() != p.args.size())
                return false;
            for (std::size_t i = 0; i < p.args.size(); ++i)
                if (!unify(p.args[i], g.args[i]))
                    return false;
            return true;
        }
        return false;
    }

    bool search(std::size_t depth) {
        const CAtom& atom = atoms_[depth];
        auto it = by_pred_.find(*atom.pred);
        if (it == by_pred_.end())
            return true;
        for (int gi : it->second) {
            Group& g = groups_[gi];
            if (used_[gi] >= g.count)
                continue;
            const Fact& f = g.fact->fact;
            if (f.args.size() != atom.args.size())
                continue;
            std::size_t mark = trail_.size();
            bool ok = true;
            for (std::size_t k = 0; ok && k < atom.args.size(); ++k)
                ok = unify(atom.args[k], f.args[k]);
            bool bound_time = false;
            if (ok) {
                if (tv_bound_[atom.tslot]) {
                    ok = tv_[atom.tslot] == g.fact->ts;
                } else {
                    tv_bound_[atom.tslot] = true;
                    tv_[atom.tslot] = g.fact->ts;
                    bound_time = true;
                }
            }
            if (ok)
                for (const auto& c : checks_[depth])
                    if (!c.c->holds(tv_[c.l], tv_[c.r])) {
                        ok = false;
                        break;
                    }
            bool keep_going = true;
            if (ok) {
                ++used_[gi];
                keep_going = depth + 1 == atoms_.size() ? emit() : search(depth + 1);
                --used_[gi];
            }
            if (bound_time)
                tv_bound_[atom.tslot] = false;
            while (trail_.size() > mark) {
                fo_[trail_.back()] = nullptr;
                trail_.pop_back();
            }
            if (!keep_going)
                return false;
        }
        return true;
    }

    bool emit() {
        Binding b;
        for (std::size_t i = 0; i < fo_names_.size(); ++i)
            b.fo.emplace(fo_names_[i], *fo_[i]);
        for (std::size_t i = 0; i < tv_names_.size(); ++i)
            b.tv.emplace(tv_names_[i], tv_[i]);
        return (*on_match_)(b);
    }

    std::vector<CAtom> atoms_;
    std::vector<std::vector<CCons>> checks_;
    std::vector<std::string> fo_names_, tv_names_;
    std::unordered_map<std::string, int> fo_index_, tv_index_;

    std::vector<Group> groups_;
    std::unordered_map<std::string, std::vector<int>> by_pred_;
    std::vector<int> used_;
    std::vector<const Term*> fo_;
    std::vector<Time> tv_;
    std::vector<bool> tv_bound_;
    std::vector<int> trail_;
    const std::function<bool(const Binding&)>* on_match_ = nullptr;
};

std::vector<TimedAtom> rule_pattern(const Rule& r) {
    std::vector<TimedAtom> p;
    p.reserve(1 + r.side.size() + r.consumed.size());
    p.push_back({Fact{std::string(kTimePredicate), {}}, r.time_var});
    p.insert(p.end(), r.side.begin(), r.side.end());
    p.insert(p.end(), r.consumed.begin(), r.consumed.end());
    return p;
}

std::map<std::string, int> formula_counts(const std::vector<TimedAtom>& consumed) {
    std::map<std::string, int> out;
    for (const auto& a : consumed)
        ++out[render(a.atom) + "@" + a.tvar];
    return out;
}

}  // namespace

void match_pattern(const std::vector<TimedAtom>& pattern, const std::vector<TimeConstraint>& constraints,
                   const Configuration& s, const std::function<bool(const Binding&)>& on_match) {
    Matcher m(pattern, constraints);
    m.run(s, on_match);
}

void check_rule(const Rule& r, const Signature& sig) {
    auto where = "rule '" + r.name + "': ";
    for (const auto& a : r.consumed)
        if (a.atom.is_time())
            throw Error(where + "the Time predicate may not be consumed by an instantaneous rule");
    for (const auto& c : r.created)
        if (c.atom.is_time())
            throw Error(where + "the Time predicate may not be created by an instantaneous rule");
    for (const auto& a : r.side)
        if (a.atom.is_time())
            throw Error(where + "the Time predicate may only appear as the rule's clock");
    for (const auto& c : r.created)
        if (c.delay < 0)
            throw Error(where + "negative delay");
    try {
        for (const auto& a : r.side)
            check_fact(sig, a.atom);
        for (const auto& a : r.consumed)
            check_fact(sig, a.atom);
        for (const auto& c : r.created)
            check_fact(sig, c.atom);
    } catch (const Error& e) {
        throw Error(where + e.what());
    }
    auto tvars = r.pre_time_vars();
    for (const auto& c : r.guard)
        for (const auto* v : {&c.lhs, &c.rhs})
            if (std::find(tvars.begin(), tvars.end(), *v) == tvars.end())
                throw Error(where + "guard variable '" + *v + "' does not occur in the precondition");
    // A consumed formula F@T reappearing as F@(T+0) with equal multiplicity is a no-op rewrite.
    std::map<std::string, int> created_counts;
    for (const auto& c : r.created)
        if (c.delay == 0)
            ++created_counts[render(c.atom) + "@" + r.time_var];
    for (const auto& [formula, n] : formula_counts(r.consumed)) {
        auto it = created_counts.find(formula);
        if (it != created_counts.end() && it->second == n)
            throw Error(where + "formula " + formula + " is consumed and created with equal multiplicity");
    }
}

std::vector<RuleInstance> find_matches(const Rule& r, const Configuration& s) {
    std::vector<RuleInstance> out;
    auto fresh = r.fresh_vars();
    std::map<std::string, std::set<std::int64_t>> taken;
    if (!fresh.empty())
        taken = s.fresh_values();
    // Least unused indices per type: instances differing only in fresh names collapse to one.
    std::vector<Term> fresh_terms;
    {
        auto avail = taken;
        for (const auto& v : fresh) {
            auto& used = avail[v.type];
            std::int64_t k = 0;
            while (used.count(k))
                ++k;
            used.insert(k);
            fresh_terms.push_back(Term::fresh(v.type, k));
        }
    }
    match_pattern(rule_pattern(r), r.effective_guard(), s, [&](const Binding& b) {
        RuleInstance inst{r.name, b};
        for (std::size_t i = 0; i < fresh.size(); ++i)
            inst.sigma.fo.emplace(fresh[i].name, fresh_terms[i]);
        out.push_back(std::move(inst));
        return true;
    });
    return out;
}

std::optional<std::string> instance_problem(const Rule& r, const Configuration& s, const RuleInstance& inst) {
    if (inst.rule != r.name)
        return "instance names rule '" + inst.rule + "', expected '" + r.name + "'";
    const auto& sig = inst.sigma;
    auto tv = sig.tv.find(r.time_var);
    if (tv == sig.tv.end() || tv->second != s.time())
        return std::string("global time variable does not match the configuration's time");
    for (const auto& v : r.pre_time_vars())
        if (!sig.tv.count(v))
            return "time variable '" + v + "' is unbound";
    if (sig.tv.size() != r.pre_time_vars().size())
        return std::string("substitution binds extra time variables");
    std::set<std::string> fo_vars;
    {
        std::vector<Term> vars;
        std::set<std::string> seen;
        for (const auto& a : r.side)
            collect_vars(a.atom, vars, seen);
        for (const auto& a : r.consumed)
            collect_vars(a.atom, vars, seen);
        for (const auto& c : r.created)
            collect_vars(c.atom, vars, seen);
        for (const auto& v : vars)
            fo_vars.insert(v.name);
    }
    for (const auto& v : fo_vars)
        if (!sig.fo.count(v))
            return "variable '" + v + "' is unbound";
    if (sig.fo.size() != fo_vars.size())
        return std::string("substitution binds extra variables");
    for (const auto& [k, t] : sig.fo)
        if (!t.ground())
            return "binding of '" + k + "' is not ground";

    std::vector<TimedFact> need;
    try {
        for (const auto& a : r.side)
            need.push_back({substitute(a.atom, sig), sig.tv.at(a.tvar)});
        for (const auto& a : r.consumed)
            need.push_back({substitute(a.atom, sig), sig.tv.at(a.tvar)});
    } catch (const Error& e) {
        return std::string(e.what());
    }
    std::map<std::size_t, int> used;
    for (const auto& f : need) {
        auto it = std::lower_bound(s.facts().begin(), s.facts().end(), f, canonical_less);
        auto pos = static_cast<std::size_t>(it - s.facts().begin());
        if (it == s.facts().end() || !(*it == f))
            return "fact " + render(f) + " is not present";
        if (static_cast<std::size_t>(++used[pos]) > s.count(f))
            return "fact " + render(f) + " is required more often than present";
    }
    for (const auto& c : r.effective_guard())
        if (!c.holds(sig.tv.at(c.lhs), sig.tv.at(c.rhs)))
            return "constraint " + render(c) + " fails";
    auto taken = s.fresh_values();
    std::set<std::pair<std::string, std::int64_t>> assigned;
    for (const auto& v : r.fresh_vars()) {
        const auto& t = sig.fo.at(v.name);
        if (t.kind != Term::Kind::Fresh || t.name != v.type)
            return "fresh variable '" + v.name + "' must map to a fresh constant of type " + v.type;
        if (taken[t.name].count(t.index))
            return "fresh constant " + render(t) + " already occurs in the configuration";
        if (!assigned.insert({t.name, t.index}).second)
            return "fresh constant " + render(t) + " assigned twice";
    }
    return std::nullopt;
}

Configuration apply_instance(const Rule& r, const Configuration& s, const RuleInstance& inst) {
    if (auto problem = instance_problem(r, s, inst))
        throw Error("stale instance of '" + r.name + "': " + *problem);
    return apply_matched(r, s, inst);
}

Configuration apply_matched(const Rule& r, const Configuration& s, const RuleInstance& inst) {
    const auto& sig = inst.sigma;
    std::vector<TimedFact> facts = s.facts();
    for (const auto& a : r.consumed) {
        TimedFact f{substitute(a.atom, sig), sig.tv.at(a.tvar)};
        auto it = std::find(facts.begin(), facts.end(), f);
        facts.erase(it);
    }
    Time now = s.time();
    for (const auto& c : r.created)
        facts.push_back({substitute(c.atom, sig), checked_add(now, c.delay)});
    return Configuration(std::move(facts));
}

Configuration tick(const Configuration& s) {
    return s.with_time(checked_add(s.time(), 1));
}

bool constraints_satisfiable(const std::vector<TimeConstraint>& cs) {
    // Bellman-Ford on the difference graph; node 0 is the constant zero.
    std::map<std::string, int> id;
    auto node = [&](const std::string& v) {
        auto [it, inserted] = id.emplace(v, static_cast<int>(id.size()) + 1);
        return it->second;
    };
    struct Edge {
        int from, to;
        __int128 w;
    };
    std::vector<Edge> edges;
    // x - y <= w  becomes edge y -> x with weight w.
    auto le = [&](int x, int y, __int128 w) { edges.push_back({y, x, w}); };
    for (const auto& c : cs) {
        auto n = c.normalized();
        int l = node(n.lhs), r = node(n.rhs);
        if (n.rel == Rel::Gt) {
            le(r, l, -static_cast<__int128>(n.offset) - 1);
        } else {
            le(l, r, n.offset);
            le(r, l, -static_cast<__int128>(n.offset));
        }
    }
    int nodes = static_cast<int>(id.size()) + 1;
    for (int v = 1; v < nodes; ++v)
        le(0, v, 0);
    std::vector<__int128> dist(nodes, 0);
    for (int round = 0; round < nodes; ++round) {
        bool changed = false;
        for (const auto& e : edges)
            if (dist[e.from] + e.w < dist[e.to]) {
                dist[e.to] = dist[e.from] + e.w;
                changed = true;
            }
        if (!changed)
            return true;
    }
    return false;
}

RuleClass classify_rule(const Rule& r, const Signature& sig) {
    RuleClass out;
    out.balanced = r.consumed.size() == r.created.size();
    if (!out.balanced)
        out.violations.push_back("(i) unbalanced: consumes " + std::to_string(r.consumed.size()) +
                                 " facts, creates " + std::to_string(r.created.size()));
    auto guard = r.effective_guard();
    bool past_only = true;
    if (!constraints_satisfiable(guard)) {
        past_only = false;
        out.violations.push_back("(ii) guard is unsatisfiable together with the implicit constraints");
    } else {
        for (const auto& a : r.consumed) {
            auto probe = guard;
            probe.push_back({a.tvar, Rel::Gt, r.time_var, 0});
            if (constraints_satisfiable(probe)) {
                past_only = false;
                out.violations.push_back("(ii) consumed fact " + render(a.atom) + "@" + a.tvar +
                                         " may lie in the future");
            }
        }
    }
    bool creates_future = std::any_of(r.created.begin(), r.created.end(),
                                      [](const CreatedAtom& c) { return c.delay >= 1; });
    if (!creates_future)
        out.violations.push_back("(iii) creates no future fact");
    out.progressing = out.balanced && past_only && creates_future;

    auto role_of = [&](const Fact& f) { return sig.role(f.pred); };
    bool role_ok = true;
    auto planning = [](PredRole r) { return r == PredRole::Goal || r == PredRole::Critical; };
    if (r.role == RuleRole::System || r.role == RuleRole::SystemUpdate) {
        std::string tag = r.role == RuleRole::System ? "(system)" : "(SUR)";
        for (const auto& a : r.consumed)
            if (planning(role_of(a.atom))) {
                role_ok = false;
                out.violations.push_back(tag + " consumes planning fact " + render(a.atom));
            }
        for (const auto& c : r.created)
            if (planning(role_of(c.atom))) {
                role_ok = false;
                out.violations.push_back(tag + " creates planning fact " + render(c.atom));
            }
    } else {
        bool touches_goal = false;
        for (const auto& a : r.consumed) {
            auto role = role_of(a.atom);
            touches_goal |= role == PredRole::Goal;
            if (role == PredRole::Critical) {
                role_ok = false;
                out.violations.push_back("(GUR) consumes critical fact " + render(a.atom));
            }
        }
        for (const auto& c : r.created) {
            auto role = role_of(c.atom);
            touches_goal |= role == PredRole::Goal;
            if (role == PredRole::Critical) {
                role_ok = false;
                out.violations.push_back("(GUR) creates critical fact " + render(c.atom));
            }
        }
        if (!touches_goal) {
            role_ok = false;
            out.violations.push_back("(GUR) neither consumes nor creates a goal fact");
        }
    }
    out.role_valid = role_ok;
    return out;
}

}  // namespace msr
