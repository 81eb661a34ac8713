#pragma once

#include <optional>
#include <string>
#include <vector>

#include "msr/rules.hpp"

namespace msr {

enum class SpecKind { Goal, Critical };

struct SpecPair {
    std::string label;
    std::vector<TimedAtom> pattern;
    std::vector<TimeConstraint> constraints;

    friend bool operator==(const SpecPair&, const SpecPair&) = default;
};

struct ConfigSpec {
    SpecKind kind = SpecKind::Goal;
    std::vector<SpecPair> pairs;

    friend bool operator==(const ConfigSpec&, const ConfigSpec&) = default;
};

// Throws unless every pair mentions a predicate of the goal or critical role and its
// constraints only use the pair's time variables.
void check_spec(const ConfigSpec& spec, const Signature& sig);

struct SpecMatch {
    std::size_t pair = 0;
    Binding sigma;
};

std::optional<SpecMatch> match_spec(const ConfigSpec& spec, const Configuration& s);

struct Step {
    // Empty for a Tick.
    std::optional<RuleInstance> instance;
    Configuration result;

    bool is_tick() const { return !instance.has_value(); }

    friend bool operator==(const Step&, const Step&) = default;
};

struct Trace {
    Configuration initial;
    std::vector<Step> steps;

    // Configuration i, where 0 is the initial one.
    const Configuration& at(std::size_t i) const { return i == 0 ? initial : steps[i - 1].result; }
    std::size_t configurations() const { return steps.size() + 1; }
    const Configuration& last() const { return at(steps.size()); }
    std::size_t ticks() const;

    friend bool operator==(const Trace&, const Trace&) = default;
};

struct ComplianceViolation {
    std::size_t step = 0;
    std::size_t pair = 0;
    Binding sigma;
};

std::string render(const ComplianceViolation& v);

std::optional<ComplianceViolation> check_compliance(const Trace& t, const ConfigSpec& cs);

std::size_t eta_measure(const ConfigSpec& spec);

}  // namespace msr
