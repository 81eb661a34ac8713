#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msr/specs.hpp"

namespace msr {

struct PlanningScenario {
    std::string name;
    Signature sig;
    std::vector<Rule> system_rules;
    std::vector<Rule> update_rules;
    ConfigSpec goal{SpecKind::Goal, {}};
    ConfigSpec critical{SpecKind::Critical, {}};
    Configuration initial;
    // 0 until finalize() picks the largest fact size present.
    std::size_t fact_size_bound = 0;
    bool progressing = false;

    const Rule* find_rule(const std::string& name) const;

    // Checks well-formedness, decides the progressing flag and, for progressing
    // scenarios, enables the implicit past-or-present constraints on every rule.
    void finalize();

    friend bool operator==(const PlanningScenario&, const PlanningScenario&) = default;
};

struct Diagnostic {
    std::string file;
    int line = 0;
    int col = 0;
    std::string message;

    std::string str() const;
};

struct ParseResult {
    std::optional<PlanningScenario> scenario;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return scenario.has_value(); }
};

ParseResult parse_scenario(std::string_view text, const std::string& file = "<input>");
// Reads and parses a file; throws Error carrying the rendered diagnostics.
PlanningScenario load_scenario(const std::string& path);

std::string print_scenario(const PlanningScenario& a);

// Ground terms and configurations in rendered form, e.g. "{ Time@5, P(a)@3 }".
Term parse_ground_term(const Signature& sig, std::string_view text);
Configuration parse_configuration(const Signature& sig, std::string_view text);

struct RuleReport {
    std::string name;
    RuleRole role = RuleRole::System;
    RuleClass cls;
};

struct FactSizeIssue {
    std::string where;
    std::string fact;
    std::size_t size = 0;
};

struct ValidationReport {
    std::vector<RuleReport> rules;
    bool progressing = false;
    bool roles_valid = false;
    std::size_t eta = 0;
    std::size_t eta_cap = 0;
    bool eta_ok = false;
    Time dmax = 0;
    std::size_t fact_size_bound = 0;
    std::size_t max_fact_size = 0;
    std::vector<FactSizeIssue> size_issues;

    // Progressing, role-valid, within the η cap and the fact-size bound.
    bool ok() const { return progressing && roles_valid && eta_ok && size_issues.empty(); }
    std::string render() const;
};

inline constexpr std::size_t kDefaultEtaCap = 6;

ValidationReport validate_scenario(const PlanningScenario& a, std::size_t eta_cap = kDefaultEtaCap);

Time infer_dmax(const PlanningScenario& a);

}  // namespace msr
