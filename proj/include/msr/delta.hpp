#pragma once

#include <string>
#include <vector>

#include "msr/scenario.hpp"

namespace msr {

inline constexpr Time kInf = -1;

// [Q1, δ(Q1,Q2), Q2, …, Qn]: untimed facts in canonical order with truncated gaps.
struct DeltaRep {
    std::vector<Fact> facts;
    // gaps[i] sits between facts[i] and facts[i+1]; kInf when above dmax.
    std::vector<Time> gaps;
    Time dmax = 1;

    std::size_t time_index() const;
    // No ∞ gap after the Time fact.
    bool future_bounded() const;

    friend bool operator==(const DeltaRep&, const DeltaRep&) = default;
};

DeltaRep abstract(const Configuration& s, Time dmax);

// "[P |2| Time |inf| Q]"
std::string render(const DeltaRep& d);
std::string delta_key(const DeltaRep& d);

// Canonical representative: ∞ gaps before Time become dmax+1 and the earliest fact
// sits at timestamp 0 unless the Time fact is asked to be later.
Configuration lift(const DeltaRep& d, Time time_at_least = 0);

// Time advance by one unit over the abstraction. Throws on future-unbounded input.
DeltaRep tock(const DeltaRep& d);

bool is_progressing_delta(const DeltaRep& before, const DeltaRep& after);

enum class RuleSet { System, Updates, Both };

// Abstractions reachable in one step, computed on the canonical lift.
// Tock is included when the set contains the system rules.
std::vector<DeltaRep> delta_successors(const PlanningScenario& a, const DeltaRep& d, RuleSet which);

}  // namespace msr
