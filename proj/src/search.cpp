#include "msr/search.hpp"

#include <unordered_map>

namespace msr {

std::vector<Successor> successors(const PlanningScenario& a, const Configuration& s, RuleSet which) {
    std::vector<Successor> out;
    auto run = [&](const std::vector<Rule>& rules) {
        for (const auto& r : rules)
            for (auto& inst : find_matches(r, s)) {
                auto next = apply_matched(r, s, inst);
                out.push_back({std::move(inst), std::move(next)});
            }
    };
    if (which != RuleSet::Updates)
        run(a.system_rules);
    if (which != RuleSet::System)
        run(a.update_rules);
    if (which != RuleSet::Updates)
        out.push_back({std::nullopt, tick(s)});
    return out;
}

namespace {

class GoalSearch {
public:
    GoalSearch(const PlanningScenario& a, Time budget, bool memo, SearchStats* stats)
        : a_(a), budget_(budget), memo_(memo && a.progressing), dmax_(infer_dmax(a)), stats_(stats) {}

    std::optional<Trace> run(const Configuration& start) {
        if (budget_ < 0)
            throw Error("negative tick budget");
        depth_cap_ = static_cast<std::size_t>(budget_ + 1) * start.size();
        trace_.initial = start;
        if (!dfs(start, budget_, 0))
            return std::nullopt;
        if (a_.progressing)
            check_progress_bound(trace_);
        return trace_;
    }

private:
    bool dfs(const Configuration& s, Time remaining, std::size_t depth) {
        if (stats_)
            ++stats_->nodes;
        if (match_spec(a_.critical, s))
            return false;
        if (match_spec(a_.goal, s))
            return true;
        if (depth >= depth_cap_)
            return false;
        if (memo_) {
            auto [it, inserted] = seen_.emplace(delta_key(abstract(s, dmax_)), remaining);
            if (!inserted) {
                if (it->second >= remaining) {
                    if (stats_)
                        ++stats_->pruned;
                    return false;
                }
                it->second = remaining;
            }
        }
        for (auto& succ : successors(a_, s, RuleSet::System)) {
            bool is_tick = !succ.instance;
            if (is_tick && remaining == 0)
                continue;
            trace_.steps.push_back({std::move(succ.instance), std::move(succ.result)});
            if (dfs(trace_.steps.back().result, remaining - (is_tick ? 1 : 0), depth + 1))
                return true;
            trace_.steps.pop_back();
        }
        return false;
    }

    const PlanningScenario& a_;
    Time budget_;
    bool memo_;
    Time dmax_;
    SearchStats* stats_;
    std::size_t depth_cap_ = 0;
    Trace trace_;
    std::unordered_map<std::string, Time> seen_;
};

}  // namespace

std::optional<Trace> find_compliant_goal_trace(const PlanningScenario& a, Time tick_budget, const SearchOptions& opts,
                                               SearchStats* stats) {
    return find_compliant_goal_trace(a, a.initial, tick_budget, opts, stats);
}

std::optional<Trace> find_compliant_goal_trace(const PlanningScenario& a, const Configuration& start,
                                               Time tick_budget, const SearchOptions& opts, SearchStats* stats) {
    return GoalSearch(a, tick_budget, opts.memo, stats).run(start);
}

void check_progress_bound(const Trace& t) {
    std::size_t run = 0;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        run = t.steps[i].is_tick() ? 0 : run + 1;
        if (run > t.initial.size())
            throw Error("more than " + std::to_string(t.initial.size()) +
                        " instantaneous steps between Ticks ending at step " + std::to_string(i + 1));
    }
}

std::string render_trace(const Trace& t) {
    std::string out;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& st = t.steps[i];
        out += std::to_string(i + 1) + ": " + (st.is_tick() ? std::string("Tick") : render(*st.instance)) +
               " ⇒ |S|=" + std::to_string(st.result.size()) + " t=" + std::to_string(st.result.time()) + "\n";
    }
    return out;
}

}  // namespace msr
