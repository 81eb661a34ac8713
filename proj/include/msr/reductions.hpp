#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "msr/scenario.hpp"

namespace msr {

struct Literal {
    int var = 0;
    bool positive = true;

    friend bool operator==(const Literal&, const Literal&) = default;
};

struct QbfBlock {
    bool exists = true;
    std::vector<int> vars;

    friend bool operator==(const QbfBlock&, const QbfBlock&) = default;
};

// Prenex 3-CNF: ∃v̄1 ∀v̄2 … ∃v̄(2n+1) (C1 ∧ … ∧ Cm).
struct Qbf {
    std::vector<QbfBlock> blocks;
    std::vector<std::array<Literal, 3>> clauses;

    // Number of ∀ blocks.
    int n() const { return static_cast<int>(blocks.size()) / 2; }

    friend bool operator==(const Qbf&, const Qbf&) = default;
};

// Throws Error unless blocks alternate from ∃ to ∃, are nonempty and disjoint,
// and every clause variable is quantified.
void check_qbf(const Qbf& q);

// QDIMACS restricted to 3-literal clauses; `e`/`a` lines give the blocks.
Qbf parse_qdimacs(std::string_view text);
std::string print_qdimacs(const Qbf& q);

// Exhaustive game-tree evaluation; refuses formulas with more than max_vars variables.
bool evaluate_qbf(const Qbf& q, std::size_t max_vars = 20);

PlanningScenario qbf_to_scenario(const Qbf& q);

// Directed graph on vertices 0..vertices-1 with a set of edges.
struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;
};

// "p digraph N" followed by "e U V" lines with 1-based vertices; "c" lines are comments.
Graph parse_graph(std::string_view text);

// Goal pattern from g, configuration from k: the goal matches iff g → k has a homomorphism.
std::pair<PlanningScenario, Configuration> graph_to_goal_instance(const Graph& g, const Graph& k);

}  // namespace msr
