#include "msr/delta.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace msr {

std::size_t DeltaRep::time_index() const {
    for (std::size_t i = 0; i < facts.size(); ++i)
        if (facts[i].is_time())
            return i;
    throw Error("δ-representation without a Time fact");
}

bool DeltaRep::future_bounded() const {
    for (std::size_t i = time_index(); i < gaps.size(); ++i)
        if (gaps[i] == kInf)
            return false;
    return true;
}

DeltaRep abstract(const Configuration& s, Time dmax) {
    if (dmax < 1)
        throw Error("Dmax must be at least 1");
    DeltaRep d;
    d.dmax = dmax;
    const auto& fs = s.facts();
    for (std::size_t i = 0; i < fs.size(); ++i) {
        d.facts.push_back(fs[i].fact);
        if (i + 1 < fs.size()) {
            Time gap = fs[i + 1].ts - fs[i].ts;
            d.gaps.push_back(gap > dmax ? kInf : gap);
        }
    }
    return d;
}

std::string render(const DeltaRep& d) {
    std::string out = "[";
    for (std::size_t i = 0; i < d.facts.size(); ++i) {
        out += render(d.facts[i]);
        if (i < d.gaps.size())
            out += " |" + (d.gaps[i] == kInf ? std::string("inf") : std::to_string(d.gaps[i])) + "| ";
    }
    return out + "]";
}

std::string delta_key(const DeltaRep& d) {
    return std::to_string(d.dmax) + ":" + render(d);
}

Configuration lift(const DeltaRep& d, Time time_at_least) {
    std::size_t ti = d.time_index();
    if (!d.future_bounded())
        throw Error("cannot lift a δ-representation with an unbounded gap after Time");
    auto width = [&](Time g) { return g == kInf ? d.dmax + 1 : g; };
    Time before = 0;
    for (std::size_t i = 0; i < ti; ++i)
        before = checked_add(before, width(d.gaps[i]));
    Time t = checked_add(std::max(before, time_at_least), 0);
    std::vector<TimedFact> out(d.facts.size());
    out[ti] = TimedFact{d.facts[ti], t};
    Time ts = t;
    for (std::size_t i = ti; i > 0; --i) {
        ts -= width(d.gaps[i - 1]);
        out[i - 1] = TimedFact{d.facts[i - 1], ts};
    }
    ts = t;
    for (std::size_t i = ti + 1; i < d.facts.size(); ++i) {
        ts = checked_add(ts, d.gaps[i - 1]);
        out[i] = TimedFact{d.facts[i], ts};
    }
    return Configuration(std::move(out));
}

DeltaRep tock(const DeltaRep& d) {
    if (!d.future_bounded())
        throw Error("Tock needs a future-bounded δ-representation");
    std::size_t ti = d.time_index();
    std::size_t n = d.facts.size();
    auto grow = [&](Time g) { return g == kInf || g >= d.dmax ? kInf : g + 1; };
    DeltaRep out = d;
    // Facts sharing the global time sort after Time and are overtaken by it.
    std::size_t end = ti;
    while (end + 1 < n && d.gaps[end] == 0)
        ++end;
    if (end == ti) {
        if (ti > 0)
            out.gaps[ti - 1] = grow(d.gaps[ti - 1]);
        if (ti + 1 < n)
            out.gaps[ti] = d.gaps[ti] - 1;
        return out;
    }
    out.facts.clear();
    out.gaps.clear();
    for (std::size_t i = 0; i < ti; ++i) {
        out.facts.push_back(d.facts[i]);
        out.gaps.push_back(d.gaps[i]);
    }
    for (std::size_t i = ti + 1; i <= end; ++i) {
        out.facts.push_back(d.facts[i]);
        out.gaps.push_back(i < end ? 0 : std::min<Time>(1, d.dmax));
    }
    out.facts.push_back(d.facts[ti]);
    if (end + 1 < n) {
        out.gaps.push_back(d.gaps[end] - 1);
        for (std::size_t i = end + 1; i < n; ++i) {
            out.facts.push_back(d.facts[i]);
            if (i < d.gaps.size())
                out.gaps.push_back(d.gaps[i]);
        }
    }
    return out;
}

namespace {

// (fact, distance from Time) for every fact after Time.
std::vector<std::pair<Time, std::string>> after_time(const DeltaRep& d) {
    std::vector<std::pair<Time, std::string>> out;
    Time dist = 0;
    for (std::size_t i = d.time_index() + 1; i < d.facts.size(); ++i) {
        dist += d.gaps[i - 1];
        out.push_back({dist, render(d.facts[i])});
    }
    return out;
}

}  // namespace

bool is_progressing_delta(const DeltaRep& before, const DeltaRep& after) {
    if (before.dmax != after.dmax || !before.future_bounded() || !after.future_bounded())
        return false;
    if (before.facts.size() != after.facts.size())
        return false;
    if (after == tock(before))
        return true;
    auto fb = after_time(before);
    auto fa = after_time(after);
    std::multiset<std::pair<Time, std::string>> pool(fa.begin(), fa.end());
    for (const auto& f : fb) {
        if (f.first == 0)
            continue;
        auto it = pool.find(f);
        if (it == pool.end())
            return false;
        pool.erase(it);
    }
    if (after.time_index() > before.time_index())
        return false;
    Time sb = 0, sa = 0;
    for (const auto& f : fb)
        sb += f.first;
    for (const auto& f : fa)
        sa += f.first;
    return sb < sa;
}

std::vector<DeltaRep> delta_successors(const PlanningScenario& a, const DeltaRep& d, RuleSet which) {
    Configuration s = lift(d);
    std::vector<DeltaRep> out;
    auto run = [&](const std::vector<Rule>& rules) {
        for (const auto& r : rules)
            for (const auto& inst : find_matches(r, s))
                out.push_back(abstract(apply_matched(r, s, inst), d.dmax));
    };
    if (which != RuleSet::Updates)
        run(a.system_rules);
    if (which != RuleSet::System)
        run(a.update_rules);
    if (which != RuleSet::Updates)
        out.push_back(tock(d));
    return out;
}

}  // namespace msr
