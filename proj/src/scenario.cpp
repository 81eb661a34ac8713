#include <algorithm>
#include <set>
#include <sstream>

#include "msr/scenario.hpp"

namespace msr {

const Rule* PlanningScenario::find_rule(const std::string& rule_name) const {
    for (const auto* rs : {&system_rules, &update_rules})
        for (const auto& r : *rs)
            if (r.name == rule_name)
                return &r;
    return nullptr;
}

namespace {

std::size_t max_fact_size(const PlanningScenario& a) {
    std::size_t m = 0;
    for (const auto& f : a.initial.facts())
        m = std::max(m, fact_size(f));
    for (const auto* rs : {&a.system_rules, &a.update_rules})
        for (const auto& r : *rs)
            for (const auto& c : r.created)
                m = std::max(m, fact_size(c.atom));
    return m;
}

}  // namespace

void PlanningScenario::finalize() {
    sig.check();
    std::set<std::string> names;
    for (const auto* rs : {&system_rules, &update_rules})
        for (const auto& r : *rs) {
            if (!names.insert(r.name).second)
                throw Error("duplicate rule '" + r.name + "'");
            check_rule(r, sig);
        }
    for (const auto& r : system_rules)
        if (r.role != RuleRole::System)
            throw Error("rule '" + r.name + "' is listed as a system rule but has role " +
                        std::string(to_string(r.role)));
    for (const auto& r : update_rules)
        if (r.role == RuleRole::System)
            throw Error("rule '" + r.name + "' is listed as an update rule but has role system");
    if (goal.kind != SpecKind::Goal || critical.kind != SpecKind::Critical)
        throw Error("goal and critical specifications have swapped kinds");
    check_spec(goal, sig);
    check_spec(critical, sig);
    check_configuration(sig, initial);

    progressing = true;
    for (auto* rs : {&system_rules, &update_rules})
        for (auto& r : *rs) {
            r.implicit_cr = true;
            progressing = progressing && classify_rule(r, sig).progressing;
        }
    if (!progressing)
        for (auto* rs : {&system_rules, &update_rules})
            for (auto& r : *rs)
                r.implicit_cr = false;
    if (fact_size_bound == 0)
        fact_size_bound = max_fact_size(*this);
}

Time infer_dmax(const PlanningScenario& a) {
    Time d = 1;
    auto bump = [&](Time v) { d = std::max(d, v < 0 ? -v : v); };
    for (const auto& f : a.initial.facts())
        bump(f.ts);
    for (const auto* rs : {&a.system_rules, &a.update_rules})
        for (const auto& r : *rs) {
            for (const auto& c : r.created)
                bump(c.delay);
            for (const auto& c : r.guard)
                bump(c.offset);
        }
    for (const auto* spec : {&a.goal, &a.critical})
        for (const auto& p : spec->pairs)
            for (const auto& c : p.constraints)
                bump(c.offset);
    return d;
}

ValidationReport validate_scenario(const PlanningScenario& a, std::size_t eta_cap) {
    ValidationReport rep;
    rep.progressing = true;
    rep.roles_valid = true;
    for (const auto* rs : {&a.system_rules, &a.update_rules})
        for (const auto& r : *rs) {
            Rule probe = r;
            probe.implicit_cr = true;
            RuleReport rr{r.name, r.role, classify_rule(probe, a.sig)};
            rep.progressing = rep.progressing && rr.cls.progressing;
            rep.roles_valid = rep.roles_valid && rr.cls.role_valid;
            rep.rules.push_back(std::move(rr));
        }
    rep.eta = eta_measure(a.critical);
    rep.eta_cap = eta_cap;
    rep.eta_ok = rep.eta < eta_cap;
    rep.dmax = infer_dmax(a);
    rep.fact_size_bound = a.fact_size_bound;
    rep.max_fact_size = max_fact_size(a);
    std::size_t bound = a.fact_size_bound ? a.fact_size_bound : rep.max_fact_size;
    for (const auto& f : a.initial.facts())
        if (fact_size(f) > bound)
            rep.size_issues.push_back({"init", render(f), fact_size(f)});
    for (const auto* rs : {&a.system_rules, &a.update_rules})
        for (const auto& r : *rs)
            for (const auto& c : r.created)
                if (fact_size(c.atom) > bound)
                    rep.size_issues.push_back({"rule " + r.name, render(c.atom), fact_size(c.atom)});
    return rep;
}

std::string ValidationReport::render() const {
    std::ostringstream out;
    out << "rules:\n";
    for (const auto& r : rules) {
        out << "  " << to_string(r.role) << " " << r.name << ":" << (r.cls.balanced ? " balanced" : " unbalanced")
            << (r.cls.progressing ? " progressing" : " not-progressing")
            << (r.cls.role_valid ? " role-valid" : " role-invalid") << "\n";
        for (const auto& v : r.cls.violations)
            out << "    " << v << "\n";
    }
    out << "progressing: " << (progressing ? "yes" : "no") << "\n";
    out << "roles: " << (roles_valid ? "valid" : "invalid") << "\n";
    out << "eta: measure " << eta << ", " << eta + 1 << "-simple (cap " << eta_cap << ") "
        << (eta_ok ? "ok" : "exceeds cap") << "\n";
    out << "Dmax: " << dmax << "\n";
    out << "fact size: max " << max_fact_size << ", bound " << fact_size_bound << "\n";
    for (const auto& s : size_issues)
        out << "  " << s.where << ": " << s.fact << " has size " << s.size << "\n";
    out << "verdict: " << (ok() ? "ok" : "not ok") << "\n";
    return out.str();
}

}  // namespace msr
