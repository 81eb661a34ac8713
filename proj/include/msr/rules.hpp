#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msr/kernel.hpp"

namespace msr {

enum class RuleRole { System, SystemUpdate, GoalUpdate };

std::string_view to_string(RuleRole role);

enum class Rel { Gt, Ge, Eq, Le, Lt };

std::string_view to_string(Rel rel);

// lhs rel rhs + offset, over time variables.
struct TimeConstraint {
    std::string lhs;
    Rel rel = Rel::Eq;
    std::string rhs;
    Time offset = 0;

    bool holds(Time l, Time r) const;
    // Equivalent constraint using only > and =.
    TimeConstraint normalized() const;

    friend bool operator==(const TimeConstraint&, const TimeConstraint&) = default;
};

std::string render(const TimeConstraint& c);

// F@T_i: an atomic formula with its time variable.
struct TimedAtom {
    Fact atom;
    std::string tvar;

    friend bool operator==(const TimedAtom&, const TimedAtom&) = default;
};

// Q@(T+D).
struct CreatedAtom {
    Fact atom;
    Time delay = 0;

    friend bool operator==(const CreatedAtom&, const CreatedAtom&) = default;
};

struct Rule {
    std::string name;
    RuleRole role = RuleRole::System;
    std::string time_var = "T";
    std::vector<TimedAtom> side;
    std::vector<TimedAtom> consumed;
    std::vector<CreatedAtom> created;
    std::vector<TimeConstraint> guard;
    // Adds T >= T_i for every consumed fact when matching.
    bool implicit_cr = false;

    // Variables of created facts that do not occur in the precondition, in order of appearance.
    std::vector<Term> fresh_vars() const;
    // Time variables occurring in the precondition, including the rule's global time variable.
    std::vector<std::string> pre_time_vars() const;
    // Guard plus the implicit constraints when enabled.
    std::vector<TimeConstraint> effective_guard() const;

    friend bool operator==(const Rule&, const Rule&) = default;
};

struct Binding {
    std::map<std::string, Term> fo;
    std::map<std::string, Time> tv;

    friend bool operator==(const Binding&, const Binding&) = default;
};

std::string render(const Binding& b);

struct RuleInstance {
    std::string rule;
    Binding sigma;

    friend bool operator==(const RuleInstance&, const RuleInstance&) = default;
};

std::string render(const RuleInstance& inst);

Term substitute(const Term& t, const Binding& b);
Fact substitute(const Fact& f, const Binding& b);

// Enumerates substitutions σ with pattern·σ ⊆ s (as multisets) satisfying every constraint.
// Order follows the canonical position of the matched facts, first pattern atom outermost.
// The callback returns false to stop the enumeration.
void match_pattern(const std::vector<TimedAtom>& pattern, const std::vector<TimeConstraint>& constraints,
                   const Configuration& s, const std::function<bool(const Binding&)>& on_match);

// Throws Error naming the violated restriction.
void check_rule(const Rule& r, const Signature& sig);

std::vector<RuleInstance> find_matches(const Rule& r, const Configuration& s);

// Empty when the instance applies to s; otherwise the reason it does not.
std::optional<std::string> instance_problem(const Rule& r, const Configuration& s, const RuleInstance& inst);

Configuration apply_instance(const Rule& r, const Configuration& s, const RuleInstance& inst);
// Skips revalidation; inst must come from find_matches(r, s).
Configuration apply_matched(const Rule& r, const Configuration& s, const RuleInstance& inst);

Configuration tick(const Configuration& s);

struct RuleClass {
    bool balanced = false;
    bool progressing = false;
    bool role_valid = false;
    std::vector<std::string> violations;
};

RuleClass classify_rule(const Rule& r, const Signature& sig);

// Difference-constraint satisfiability over natural-valued time variables.
bool constraints_satisfiable(const std::vector<TimeConstraint>& cs);

}  // namespace msr
