#include "msr/kernel.hpp"

#include <algorithm>
#include <limits>

namespace msr {

Time checked_add(Time a, Time b) {
    Time out = 0;
    if (__builtin_add_overflow(a, b, &out))
        throw Error("timestamp overflow");
    if (out < 0)
        throw Error("negative timestamp");
    return out;
}

std::string_view to_string(PredRole role) {
    switch (role) {
    case PredRole::System: return "system";
    case PredRole::Goal: return "goal";
    case PredRole::Critical: return "critical";
    case PredRole::Time: return "time";
    }
    return "?";
}

Signature::Signature() {
    predicates_.emplace(std::string(kTimePredicate), PredicateType{{}, PredRole::Time});
}

void Signature::claim_symbol(const std::string& name) const {
    if (constants_.count(name) || functions_.count(name))
        throw Error("symbol '" + name + "' is already declared");
}

void Signature::add_type(const std::string& name) {
    types_.insert(name);
}

void Signature::add_constant(const std::string& name, const std::string& type) {
    claim_symbol(name);
    if (!types_.count(type))
        throw Error("constant '" + name + "' has undeclared type '" + type + "'");
    constants_.emplace(name, type);
}

void Signature::add_function(const std::string& name, FunctionType type) {
    claim_symbol(name);
    for (const auto& t : type.args)
        if (!types_.count(t))
            throw Error("function '" + name + "' uses undeclared type '" + t + "'");
    if (!types_.count(type.result))
        throw Error("function '" + name + "' uses undeclared type '" + type.result + "'");
    functions_.emplace(name, std::move(type));
}

void Signature::add_predicate(const std::string& name, PredicateType type) {
    if (name == kTimePredicate)
        throw Error("predicate 'Time' is reserved for the global clock");
    if (type.role == PredRole::Time)
        throw Error("only 'Time' may have the time role");
    if (predicates_.count(name))
        throw Error("predicate '" + name + "' is already declared");
    for (const auto& t : type.args)
        if (!types_.count(t))
            throw Error("predicate '" + name + "' uses undeclared type '" + t + "'");
    predicates_.emplace(name, std::move(type));
}

const std::string& Signature::constant_type(const std::string& name) const {
    auto it = constants_.find(name);
    if (it == constants_.end())
        throw Error("unknown constant '" + name + "'");
    return it->second;
}

const FunctionType& Signature::function(const std::string& name) const {
    auto it = functions_.find(name);
    if (it == functions_.end())
        throw Error("unknown function '" + name + "'");
    return it->second;
}

const PredicateType& Signature::predicate(const std::string& name) const {
    auto it = predicates_.find(name);
    if (it == predicates_.end())
        throw Error("unknown predicate '" + name + "'");
    return it->second;
}

void Signature::check() const {
    std::size_t time_preds = 0;
    for (const auto& [name, p] : predicates_) {
        if (p.role == PredRole::Time) {
            ++time_preds;
            if (name != kTimePredicate || !p.args.empty())
                throw Error("malformed time predicate '" + name + "'");
        }
        for (const auto& t : p.args)
            if (!types_.count(t))
                throw Error("predicate '" + name + "' uses undeclared type '" + t + "'");
    }
    if (time_preds != 1)
        throw Error("signature must have exactly one time predicate");
    for (const auto& [name, t] : constants_)
        if (!types_.count(t))
            throw Error("constant '" + name + "' has undeclared type '" + t + "'");
}

Term Term::constant(std::string name) {
    Term t;
    t.kind = Kind::Const;
    t.name = std::move(name);
    return t;
}

Term Term::fresh(std::string type, std::int64_t index) {
    Term t;
    t.kind = Kind::Fresh;
    t.name = std::move(type);
    t.index = index;
    return t;
}

Term Term::var(std::string name, std::string type) {
    Term t;
    t.kind = Kind::Var;
    t.name = std::move(name);
    t.type = std::move(type);
    return t;
}

Term Term::app(std::string function, std::vector<Term> args) {
    Term t;
    t.kind = Kind::App;
    t.name = std::move(function);
    t.args = std::move(args);
    return t;
}

bool Term::ground() const {
    if (kind == Kind::Var)
        return false;
    return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.ground(); });
}

namespace {

int rank(Term::Kind k) {
    switch (k) {
    case Term::Kind::Const:
    case Term::Kind::App: return 0;
    case Term::Kind::Fresh: return 1;
    case Term::Kind::Var: return 2;
    }
    return 3;
}

int cmp(const std::string& a, const std::string& b) {
    int c = a.compare(b);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

template <class T>
int compare_lists(const std::vector<T>& a, const std::vector<T>& b) {
    std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (int c = compare(a[i], b[i]))
            return c;
    if (a.size() != b.size())
        return a.size() < b.size() ? -1 : 1;
    return 0;
}

}  // namespace

int compare(const Term& a, const Term& b) {
    int ra = rank(a.kind), rb = rank(b.kind);
    if (ra != rb)
        return ra < rb ? -1 : 1;
    if (a.kind == Term::Kind::Fresh) {
        if (int c = cmp(a.name, b.name))
            return c;
        if (a.index != b.index)
            return a.index < b.index ? -1 : 1;
        return 0;
    }
    if (int c = cmp(a.name, b.name))
        return c;
    return compare_lists(a.args, b.args);
}

bool Fact::ground() const {
    return std::all_of(args.begin(), args.end(), [](const Term& a) { return a.ground(); });
}

int compare(const Fact& a, const Fact& b) {
    bool ta = a.is_time(), tb = b.is_time();
    if (ta != tb)
        return ta ? -1 : 1;
    if (int c = cmp(a.pred, b.pred))
        return c;
    return compare_lists(a.args, b.args);
}

bool canonical_less(const TimedFact& a, const TimedFact& b) {
    if (a.ts != b.ts)
        return a.ts < b.ts;
    return compare(a.fact, b.fact) < 0;
}

std::string render(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Fresh: return "#" + t.name + ":" + std::to_string(t.index);
    case Term::Kind::Const:
    case Term::Kind::Var: return t.name;
    case Term::Kind::App: {
        std::string out = t.name + "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            if (i)
                out += ",";
            out += render(t.args[i]);
        }
        return out + ")";
    }
    }
    return "?";
}

std::string render(const Fact& f) {
    if (f.args.empty())
        return f.pred;
    std::string out = f.pred + "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i)
            out += ",";
        out += render(f.args[i]);
    }
    return out + ")";
}

std::string render(const TimedFact& f) {
    return render(f.fact) + "@" + std::to_string(f.ts);
}

std::size_t term_size(const Term& t) {
    std::size_t n = 1;
    for (const auto& a : t.args)
        n += term_size(a);
    return n;
}

std::size_t fact_size(const Fact& f) {
    std::size_t n = 1;
    for (const auto& a : f.args)
        n += term_size(a);
    return n;
}

std::string term_type(const Signature& sig, const Term& t) {
    switch (t.kind) {
    case Term::Kind::Const: return sig.constant_type(t.name);
    case Term::Kind::Fresh:
        if (!sig.has_type(t.name))
            throw Error("fresh constant of undeclared type '" + t.name + "'");
        return t.name;
    case Term::Kind::Var: return t.type;
    case Term::Kind::App: {
        const auto& ft = sig.function(t.name);
        if (ft.args.size() != t.args.size())
            throw Error("function '" + t.name + "' expects " + std::to_string(ft.args.size()) +
                        " arguments");
        for (std::size_t i = 0; i < t.args.size(); ++i) {
            auto at = term_type(sig, t.args[i]);
            if (at != ft.args[i])
                throw Error("argument " + std::to_string(i + 1) + " of '" + t.name + "' has type '" +
                            at + "', expected '" + ft.args[i] + "'");
        }
        return ft.result;
    }
    }
    throw Error("bad term");
}

void check_fact(const Signature& sig, const Fact& f) {
    const auto& pt = sig.predicate(f.pred);
    if (pt.args.size() != f.args.size())
        throw Error("predicate '" + f.pred + "' expects " + std::to_string(pt.args.size()) +
                    " arguments, got " + std::to_string(f.args.size()));
    for (std::size_t i = 0; i < f.args.size(); ++i) {
        auto at = term_type(sig, f.args[i]);
        if (at != pt.args[i])
            throw Error("argument " + std::to_string(i + 1) + " of '" + f.pred + "' has type '" + at +
                        "', expected '" + pt.args[i] + "'");
    }
}

Configuration::Configuration() : facts_{TimedFact{Fact{std::string(kTimePredicate), {}}, 0}} {}

Configuration::Configuration(std::vector<TimedFact> facts) : facts_(canonical_order(std::move(facts))) {
    std::size_t found = 0;
    for (std::size_t i = 0; i < facts_.size(); ++i) {
        if (facts_[i].fact.is_time()) {
            ++found;
            time_pos_ = i;
        }
        if (facts_[i].ts < 0)
            throw Error("negative timestamp in " + render(facts_[i]));
        if (!facts_[i].fact.ground())
            throw Error("configuration fact " + render(facts_[i]) + " is not ground");
    }
    if (found != 1)
        throw Error("configuration must contain exactly one Time fact, found " + std::to_string(found));
    if (!facts_[time_pos_].fact.args.empty())
        throw Error("Time fact takes no arguments");
}

std::size_t Configuration::count(const TimedFact& f) const {
    auto [lo, hi] = std::equal_range(facts_.begin(), facts_.end(), f, canonical_less);
    return static_cast<std::size_t>(hi - lo);
}

namespace {

void collect_fresh(const Term& t, std::map<std::string, std::set<std::int64_t>>& out) {
    if (t.kind == Term::Kind::Fresh)
        out[t.name].insert(t.index);
    for (const auto& a : t.args)
        collect_fresh(a, out);
}

}  // namespace

std::map<std::string, std::set<std::int64_t>> Configuration::fresh_values() const {
    std::map<std::string, std::set<std::int64_t>> out;
    for (const auto& f : facts_)
        for (const auto& a : f.fact.args)
            collect_fresh(a, out);
    return out;
}

Configuration Configuration::with_time(Time t) const {
    if (t < 0)
        throw Error("negative global time");
    auto facts = facts_;
    facts[time_pos_].ts = t;
    return Configuration(std::move(facts));
}

std::vector<TimedFact> canonical_order(std::vector<TimedFact> facts) {
    std::stable_sort(facts.begin(), facts.end(), canonical_less);
    return facts;
}

std::vector<TimedFact> canonical_order(const Configuration& s) {
    return s.facts();
}

std::string render(const Configuration& s) {
    std::string out = "{ ";
    for (std::size_t i = 0; i < s.facts().size(); ++i) {
        if (i)
            out += ", ";
        out += render(s.facts()[i]);
    }
    return out + " }";
}

void check_configuration(const Signature& sig, const Configuration& s) {
    for (const auto& f : s.facts())
        check_fact(sig, f.fact);
}

Time clock_convert(Time days, Time hours, Time minutes) {
    if (days < 0 || hours < 0 || minutes < 0)
        throw Error("clock fields must be non-negative");
    if (hours >= 24)
        throw Error("hours out of range: " + std::to_string(hours));
    if (minutes >= 60)
        throw Error("minutes out of range: " + std::to_string(minutes));
    if (days > std::numeric_limits<Time>::max() / 1440 - 1)
        throw Error("timestamp overflow");
    return days * 1440 + hours * 60 + minutes;
}

ClockTime clock_split(Time t) {
    if (t < 0)
        throw Error("negative timestamp");
    return ClockTime{t / 1440, (t % 1440) / 60, t % 60};
}

std::string clock_format(Time t) {
    auto c = clock_split(t);
    std::string hh = (c.hours < 10 ? "0" : "") + std::to_string(c.hours);
    std::string mm = (c.minutes < 10 ? "0" : "") + std::to_string(c.minutes);
    return std::to_string(c.days) + "d" + hh + ":" + mm;
}

}  // namespace msr
