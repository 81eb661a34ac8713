#include "msr/specs.hpp"

#include <algorithm>
#include <set>

namespace msr {

namespace {

void count_vars(const Term& t, std::set<std::string>& out) {
    if (t.kind == Term::Kind::Var)
        out.insert(t.name);
    for (const auto& a : t.args)
        count_vars(a, out);
}

}  // namespace

void check_spec(const ConfigSpec& spec, const Signature& sig) {
    PredRole want = spec.kind == SpecKind::Goal ? PredRole::Goal : PredRole::Critical;
    std::string kind = spec.kind == SpecKind::Goal ? "goal" : "critical";
    for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
        const auto& p = spec.pairs[i];
        std::string where = kind + " pair " + std::to_string(i) + (p.label.empty() ? "" : " '" + p.label + "'");
        bool has_role = false;
        std::set<std::string> tvars;
        for (const auto& a : p.pattern) {
            try {
                check_fact(sig, a.atom);
            } catch (const Error& e) {
                throw Error(where + ": " + e.what());
            }
            has_role |= sig.role(a.atom.pred) == want;
            tvars.insert(a.tvar);
        }
        if (!has_role)
            throw Error(where + ": pattern needs at least one " + kind + " predicate");
        for (const auto& c : p.constraints)
            for (const auto* v : {&c.lhs, &c.rhs})
                if (!tvars.count(*v))
                    throw Error(where + ": constraint variable '" + *v + "' is not in the pattern");
    }
}

std::optional<SpecMatch> match_spec(const ConfigSpec& spec, const Configuration& s) {
    for (std::size_t i = 0; i < spec.pairs.size(); ++i) {
        std::optional<SpecMatch> found;
        match_pattern(spec.pairs[i].pattern, spec.pairs[i].constraints, s, [&](const Binding& b) {
            found = SpecMatch{i, b};
            return false;
        });
        if (found)
            return found;
    }
    return std::nullopt;
}

std::size_t Trace::ticks() const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [](const Step& s) { return s.is_tick(); }));
}

std::string render(const ComplianceViolation& v) {
    return "step " + std::to_string(v.step) + ", pair " + std::to_string(v.pair) + ", σ=" + render(v.sigma);
}

std::optional<ComplianceViolation> check_compliance(const Trace& t, const ConfigSpec& cs) {
    for (std::size_t i = 0; i < t.configurations(); ++i)
        if (auto m = match_spec(cs, t.at(i)))
            return ComplianceViolation{i, m->pair, m->sigma};
    return std::nullopt;
}

std::size_t eta_measure(const ConfigSpec& spec) {
    std::size_t best = 0;
    for (const auto& p : spec.pairs) {
        std::set<std::string> fo, tv;
        for (const auto& a : p.pattern) {
            for (const auto& t : a.atom.args)
                count_vars(t, fo);
            tv.insert(a.tvar);
        }
        best = std::max(best, fo.size() + tv.size());
    }
    return best;
}

}  // namespace msr
