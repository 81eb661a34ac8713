#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msr/delta.hpp"

namespace msr {

struct Successor {
    // Empty for Tick.
    std::optional<RuleInstance> instance;
    Configuration result;
};

// Rule instances in declaration order, then Tick when the system rules are selected.
std::vector<Successor> successors(const PlanningScenario& a, const Configuration& s, RuleSet which);

struct SearchOptions {
    // δ-memoization; ignored for scenarios that are not progressing.
    bool memo = true;
};

struct SearchStats {
    std::size_t nodes = 0;
    std::size_t pruned = 0;
};

std::optional<Trace> find_compliant_goal_trace(const PlanningScenario& a, Time tick_budget,
                                               const SearchOptions& opts = {}, SearchStats* stats = nullptr);
std::optional<Trace> find_compliant_goal_trace(const PlanningScenario& a, const Configuration& start,
                                               Time tick_budget, const SearchOptions& opts = {},
                                               SearchStats* stats = nullptr);

// Throws Error if some stretch of instantaneous steps between Ticks exceeds the configuration size.
void check_progress_bound(const Trace& t);

// "k: rule σ={…} ⇒ |S|=m t=N", one line per step.
std::string render_trace(const Trace& t);

}  // namespace msr
