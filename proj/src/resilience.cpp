#include "msr/resilience.hpp"

#include <atomic>
#include <future>
#include <mutex>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace msr {

std::string render(const Query& q) {
    return "(" + std::to_string(q.n) + "," + std::to_string(q.a) + "," + std::to_string(q.b) + ")";
}

bool operator==(const WitnessTree& x, const WitnessTree& y) {
    if (!(x.query == y.query && x.trace == y.trace && x.children.size() == y.children.size()))
        return false;
    for (std::size_t i = 0; i < x.children.size(); ++i) {
        const auto& cx = x.children[i];
        const auto& cy = y.children[i];
        if (cx.step != cy.step || !(cx.instance == cy.instance) || !cx.subtree != !cy.subtree)
            return false;
        if (cx.subtree && !(*cx.subtree == *cy.subtree))
            return false;
    }
    return true;
}

std::vector<UpdatePoint> enumerate_update_points(const PlanningScenario& a, const Trace& t, Time window) {
    std::vector<UpdatePoint> out;
    std::set<std::pair<std::string, std::string>> seen;
    Time t0 = t.initial.time();
    for (std::size_t i = 0; i < t.configurations(); ++i) {
        const auto& s = t.at(i);
        if (s.time() - t0 > window)
            continue;
        std::string key = render(s);
        for (const auto& r : a.update_rules)
            for (auto& inst : find_matches(r, s)) {
                if (!seen.insert({key, render(inst)}).second)
                    continue;
                auto next = apply_matched(r, s, inst);
                out.push_back({i, std::move(inst), std::move(next)});
            }
    }
    return out;
}

namespace {

using TreePtr = std::shared_ptr<const WitnessTree>;

class Checker {
public:
    Checker(const PlanningScenario& a, const ResilienceOptions& opts)
        : a_(a), memo_(opts.memo && a.progressing), dmax_(infer_dmax(a)),
          slots_(opts.jobs > 1 ? static_cast<int>(opts.jobs) - 1 : 0) {}

    TreePtr solve(const Configuration& start, const Query& q, std::string* reason) {
        std::string exact, abstract_key;
        if (memo_) {
            std::string qs = render(q);
            exact = render(start) + qs;
            abstract_key = delta_key(abstract(start, dmax_)) + qs;
            std::lock_guard lock(mu_);
            if (auto it = positive_.find(exact); it != positive_.end())
                return it->second;
            if (negative_.count(abstract_key))
                return nullptr;
        }
        Run run;
        run.q = q;
        run.budget = checked_add(q.a, q.b);
        run.reason = reason;
        run.trace.initial = start;
        run.depth_cap = static_cast<std::size_t>(run.budget + 1) * start.size();
        TreePtr out;
        if (dfs(run, start, run.budget, 0)) {
            auto tree = std::make_shared<WitnessTree>();
            tree->query = q;
            tree->trace = std::move(run.trace);
            tree->children = std::move(run.children);
            out = tree;
        }
        if (memo_) {
            std::lock_guard lock(mu_);
            if (out)
                positive_.emplace(exact, out);
            else
                negative_.insert(abstract_key);
        }
        return out;
    }

    std::size_t nodes() const { return nodes_; }

private:
    struct Run {
        Query q;
        Time budget = 0;
        std::string* reason = nullptr;
        Trace trace;
        std::vector<WitnessChild> children;
        std::size_t depth_cap = 0;
        std::set<std::string> path;
    };

    bool acquire_slot() {
        int have = slots_.load();
        while (have > 0)
            if (slots_.compare_exchange_weak(have, have - 1))
                return true;
        return false;
    }

    // All update instances at s must admit a reaction; appends them as children.
    bool updates_ok(Run& run, const Configuration& s, Time elapsed) {
        std::size_t step = run.trace.steps.size();
        std::vector<UpdatePoint> points;
        for (const auto& r : a_.update_rules)
            for (auto& inst : find_matches(r, s)) {
                auto next = apply_matched(r, s, inst);
                points.push_back({step, std::move(inst), std::move(next)});
            }
        if (points.empty())
            return true;
        Query sub{run.q.n - 1, run.q.a - elapsed, run.q.b};
        std::vector<std::future<TreePtr>> pending(points.size());
        std::vector<TreePtr> results(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (i + 1 < points.size() && acquire_slot()) {
                pending[i] = std::async(std::launch::async, [this, &points, i, sub] {
                    auto r = solve(points[i].result, sub, nullptr);
                    slots_.fetch_add(1);
                    return r;
                });
            } else {
                results[i] = solve(points[i].result, sub, nullptr);
            }
        }
        bool ok = true;
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (pending[i].valid())
                results[i] = pending[i].get();
            if (!results[i] && ok) {
                ok = false;
                if (run.reason)
                    *run.reason = "update " + render(points[i].instance) + " at t=" + std::to_string(s.time()) +
                                  " (elapsed " + std::to_string(elapsed) + ") admits no " + render(sub) +
                                  "-resilient reaction";
            }
        }
        if (!ok)
            return false;
        for (std::size_t i = 0; i < points.size(); ++i)
            run.children.push_back({step, std::move(points[i].instance), std::move(results[i])});
        return true;
    }

    bool dfs(Run& run, const Configuration& s, Time remaining, std::size_t depth) {
        ++nodes_;
        if (match_spec(a_.critical, s))
            return false;
        Time elapsed = run.budget - remaining;
        bool exposed = run.q.n > 0 && elapsed <= run.q.a;
        std::string key;
        if (memo_) {
            key = delta_key(abstract(s, dmax_));
            std::lock_guard lock(mu_);
            if (exposed) {
                if (failed_.count(key + render(run.q) + "/" + std::to_string(remaining)))
                    return false;
            } else if (auto it = plain_failed_.find(key); it != plain_failed_.end() && it->second >= remaining) {
                return false;
            }
        }
        std::size_t first_child = run.children.size();
        bool ok = true;
        if (exposed) {
            // A configuration repeated along the path has its update points covered already.
            std::string exact = render(s);
            if (!run.path.count(exact)) {
                ok = updates_ok(run, s, elapsed);
                if (ok)
                    run.path.insert(exact);
                else
                    exact.clear();
            } else {
                exact.clear();
            }
            if (ok) {
                if (match_spec(a_.goal, s) || explore(run, s, remaining, depth))
                    return true;
                ok = false;
            }
            if (!exact.empty())
                run.path.erase(exact);
        } else {
            if (match_spec(a_.goal, s) || explore(run, s, remaining, depth))
                return true;
            ok = false;
        }
        run.children.resize(first_child);
        if (memo_) {
            std::lock_guard lock(mu_);
            if (exposed) {
                failed_.insert(key + render(run.q) + "/" + std::to_string(remaining));
            } else {
                auto& best = plain_failed_[key];
                best = std::max(best, remaining);
            }
        }
        return ok;
    }

    bool explore(Run& run, const Configuration& s, Time remaining, std::size_t depth) {
        if (depth >= run.depth_cap)
            return false;
        for (auto& succ : successors(a_, s, RuleSet::System)) {
            bool is_tick = !succ.instance;
            if (is_tick && remaining == 0)
                continue;
            run.trace.steps.push_back({std::move(succ.instance), std::move(succ.result)});
            if (dfs(run, run.trace.steps.back().result, remaining - (is_tick ? 1 : 0), depth + 1))
                return true;
            run.trace.steps.pop_back();
        }
        return false;
    }

    const PlanningScenario& a_;
    bool memo_;
    Time dmax_;
    std::atomic<int> slots_;
    std::atomic<std::size_t> nodes_{0};
    std::mutex mu_;
    std::unordered_map<std::string, TreePtr> positive_;
    std::unordered_set<std::string> negative_;
    std::unordered_set<std::string> failed_;
    std::unordered_map<std::string, Time> plain_failed_;
};

}  // namespace

ResilienceResult check_resilience(const PlanningScenario& a, const Query& q, const ResilienceOptions& opts) {
    ResilienceResult out;
    if (q.n < 0 || q.a < 1 || q.b < 0) {
        out.reason = "query " + render(q) + " needs n >= 0, a >= 1, b >= 0";
        return out;
    }
    auto rep = validate_scenario(a, opts.eta_cap);
    if (!rep.progressing) {
        out.reason = "not a progressing planning scenario";
        return out;
    }
    if (!rep.roles_valid) {
        out.reason = "rule roles violate the system/update restrictions";
        return out;
    }
    if (!rep.eta_ok) {
        out.reason = "critical specification has measure " + std::to_string(rep.eta) + ", not below the cap " +
                     std::to_string(opts.eta_cap);
        return out;
    }
    Checker checker(a, opts);
    std::string reason;
    out.witness = checker.solve(a.initial, q, &reason);
    out.verdict = out.witness ? Verdict::Resilient : Verdict::NotResilient;
    if (!out.witness)
        out.reason = reason.empty() ? "no compliant goal trace within " + std::to_string(q.a + q.b) + " ticks" : reason;
    out.nodes = checker.nodes();
    return out;
}

std::string WitnessViolation::str() const {
    return clause + " at " + location + (detail.empty() ? "" : ": " + detail);
}

namespace {

std::optional<WitnessViolation> verify_node(const PlanningScenario& a, const Query& q, const WitnessTree& w,
                                            const std::string& where) {
    auto fail = [&](const std::string& clause, const std::string& detail) {
        return WitnessViolation{clause, where, detail};
    };
    if (!(w.query == q))
        return fail("query mismatch", "expected " + render(q) + ", found " + render(w.query));
    const Trace& t = w.trace;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& st = t.steps[i];
        const auto& prev = t.at(i);
        std::string at = "step " + std::to_string(i + 1);
        if (st.is_tick()) {
            if (!(tick(prev) == st.result))
                return fail("annotation mismatch", at + ": Tick does not yield the recorded configuration");
            continue;
        }
        const Rule* r = nullptr;
        for (const auto& cand : a.system_rules)
            if (cand.name == st.instance->rule)
                r = &cand;
        if (!r)
            return fail("annotation mismatch", at + ": '" + st.instance->rule + "' is not a system rule");
        if (auto why = instance_problem(*r, prev, *st.instance))
            return fail("annotation mismatch", at + ": " + *why);
        if (!(apply_instance(*r, prev, *st.instance) == st.result))
            return fail("annotation mismatch", at + ": result differs from the recorded configuration");
    }
    if (static_cast<Time>(t.ticks()) > q.a + q.b)
        return fail("tick budget", std::to_string(t.ticks()) + " ticks exceed " + std::to_string(q.a + q.b));
    if (auto v = check_compliance(t, a.critical))
        return fail("non-compliant", render(*v));
    if (!match_spec(a.goal, t.last()))
        return fail("not goal-terminated", "final configuration matches no goal pair");

    if (q.n == 0) {
        if (!w.children.empty())
            return fail("unexpected child", "a (0,a,b) witness has no update branches");
        return std::nullopt;
    }
    Time t0 = t.initial.time();
    for (std::size_t c = 0; c < w.children.size(); ++c) {
        const auto& ch = w.children[c];
        std::string at = "child " + std::to_string(c);
        if (ch.step >= t.configurations())
            return fail("invalid update instance", at + ": step " + std::to_string(ch.step) + " is outside the trace");
        const auto& s = t.at(ch.step);
        if (s.time() - t0 > q.a)
            return fail("invalid update instance", at + ": step " + std::to_string(ch.step) + " lies past the window");
        const Rule* r = nullptr;
        for (const auto& cand : a.update_rules)
            if (cand.name == ch.instance.rule)
                r = &cand;
        if (!r)
            return fail("invalid update instance", at + ": '" + ch.instance.rule + "' is not an update rule");
        if (auto why = instance_problem(*r, s, ch.instance))
            return fail("invalid update instance", at + ": " + *why);
    }
    auto points = enumerate_update_points(a, t, q.a);
    std::vector<bool> used(w.children.size(), false);
    for (const auto& p : points) {
        std::size_t found = w.children.size();
        for (std::size_t c = 0; c < w.children.size(); ++c)
            if (!used[c] && w.children[c].step == p.step && w.children[c].instance == p.instance) {
                found = c;
                break;
            }
        if (found == w.children.size())
            return fail("uncovered update point", "step " + std::to_string(p.step) + ", " + render(p.instance));
        used[found] = true;
        const auto& ch = w.children[found];
        std::string at = where + "/" + std::to_string(found);
        if (!ch.subtree)
            return WitnessViolation{"child start mismatch", at, "missing subtree"};
        if (!(ch.subtree->trace.initial == p.result))
            return WitnessViolation{"child start mismatch", at, "subtree does not start from the updated configuration"};
        Query sub{q.n - 1, q.a - (t.at(p.step).time() - t0), q.b};
        if (auto v = verify_node(a, sub, *ch.subtree, at))
            return v;
    }
    for (std::size_t c = 0; c < w.children.size(); ++c)
        if (!used[c])
            return fail("unexpected child", "child " + std::to_string(c) + " duplicates another update point");
    return std::nullopt;
}

nlohmann::ordered_json sigma_json(const Binding& b) {
    nlohmann::ordered_json fo = nlohmann::ordered_json::object();
    for (const auto& [k, v] : b.fo)
        fo[k] = render(v);
    nlohmann::ordered_json tv = nlohmann::ordered_json::object();
    for (const auto& [k, v] : b.tv)
        tv[k] = v;
    return {{"fo", fo}, {"tv", tv}};
}

Binding sigma_from(const Signature& sig, const nlohmann::ordered_json& j) {
    Binding b;
    for (const auto& [k, v] : j.at("fo").items())
        b.fo.emplace(k, parse_ground_term(sig, v.get<std::string>()));
    for (const auto& [k, v] : j.at("tv").items())
        b.tv.emplace(k, v.get<Time>());
    return b;
}

WitnessTree tree_from(const Signature& sig, const nlohmann::ordered_json& j) {
    WitnessTree w;
    const auto& q = j.at("query");
    w.query = Query{q.at("n").get<int>(), q.at("a").get<Time>(), q.at("b").get<Time>()};
    w.trace.initial = parse_configuration(sig, j.at("start").get<std::string>());
    for (const auto& st : j.at("trace")) {
        Step step;
        auto rule = st.at("rule").get<std::string>();
        if (rule != "Tick")
            step.instance = RuleInstance{rule, sigma_from(sig, st.at("sigma"))};
        step.result = parse_configuration(sig, st.at("config").get<std::string>());
        w.trace.steps.push_back(std::move(step));
    }
    for (const auto& c : j.at("children")) {
        WitnessChild ch;
        ch.step = c.at("step").get<std::size_t>();
        const auto& inst = c.at("instance");
        ch.instance = RuleInstance{inst.at("rule").get<std::string>(), sigma_from(sig, inst.at("sigma"))};
        ch.subtree = std::make_shared<WitnessTree>(tree_from(sig, c.at("subtree")));
        w.children.push_back(std::move(ch));
    }
    return w;
}

}  // namespace

std::optional<WitnessViolation> verify_witness(const PlanningScenario& a, const Query& q, const WitnessTree& w) {
    if (!(w.trace.initial == a.initial))
        return WitnessViolation{"start mismatch", "root", "trace does not start from the initial configuration"};
    return verify_node(a, q, w, "root");
}

nlohmann::ordered_json witness_to_json(const WitnessTree& w) {
    nlohmann::ordered_json j;
    j["query"] = {{"n", w.query.n}, {"a", w.query.a}, {"b", w.query.b}};
    j["start"] = render(w.trace.initial);
    j["trace"] = nlohmann::ordered_json::array();
    for (const auto& st : w.trace.steps) {
        nlohmann::ordered_json s;
        s["rule"] = st.is_tick() ? std::string("Tick") : st.instance->rule;
        if (!st.is_tick())
            s["sigma"] = sigma_json(st.instance->sigma);
        s["config"] = render(st.result);
        j["trace"].push_back(std::move(s));
    }
    j["children"] = nlohmann::ordered_json::array();
    for (const auto& c : w.children) {
        nlohmann::ordered_json cj;
        cj["step"] = c.step;
        cj["instance"] = {{"rule", c.instance.rule}, {"sigma", sigma_json(c.instance.sigma)}};
        cj["subtree"] = c.subtree ? witness_to_json(*c.subtree) : nlohmann::ordered_json();
        j["children"].push_back(std::move(cj));
    }
    return j;
}

WitnessTree witness_from_json(const Signature& sig, const nlohmann::ordered_json& j) {
    try {
        return tree_from(sig, j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed witness: ") + e.what());
    }
}

}  // namespace msr
