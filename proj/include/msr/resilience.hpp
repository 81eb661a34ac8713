#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/search.hpp"

namespace msr {

struct Query {
    int n = 0;
    Time a = 1;
    Time b = 0;

    friend bool operator==(const Query&, const Query&) = default;
};

std::string render(const Query& q);

struct WitnessTree;

struct WitnessChild {
    // Index of the configuration in the parent trace, 0 being the start.
    std::size_t step = 0;
    RuleInstance instance;
    std::shared_ptr<const WitnessTree> subtree;
};

struct WitnessTree {
    Query query;
    Trace trace;
    std::vector<WitnessChild> children;
};

bool operator==(const WitnessTree& x, const WitnessTree& y);

struct UpdatePoint {
    std::size_t step = 0;
    RuleInstance instance;
    Configuration result;
};

// Update instances applicable at configurations within `window` time units of the start.
// A configuration repeated along the trace contributes its instances once.
std::vector<UpdatePoint> enumerate_update_points(const PlanningScenario& a, const Trace& t, Time window);

struct ResilienceOptions {
    bool memo = true;
    std::size_t eta_cap = kDefaultEtaCap;
    // Worker threads for the update branches of one node.
    unsigned jobs = 1;
};

enum class Verdict { Resilient, NotResilient, Refused };

struct ResilienceResult {
    Verdict verdict = Verdict::Refused;
    std::shared_ptr<const WitnessTree> witness;
    // Why the query was refused, or the update that defeated the last root candidate.
    std::string reason;
    std::size_t nodes = 0;
};

ResilienceResult check_resilience(const PlanningScenario& a, const Query& q, const ResilienceOptions& opts = {});

struct WitnessViolation {
    std::string clause;
    // Path of child indices from the root, e.g. "root/2/0".
    std::string location;
    std::string detail;

    std::string str() const;
};

std::optional<WitnessViolation> verify_witness(const PlanningScenario& a, const Query& q, const WitnessTree& w);

nlohmann::ordered_json witness_to_json(const WitnessTree& w);
// Throws Error on malformed input.
WitnessTree witness_from_json(const Signature& sig, const nlohmann::ordered_json& j);

}  // namespace msr
