#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "msr/reductions.hpp"
#include "msr/resilience.hpp"

namespace {

constexpr int kYes = 0;
constexpr int kNo = 1;
constexpr int kError = 2;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw msr::Error(path + ": cannot read file");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spill(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text))
        throw msr::Error(path + ": cannot write file");
}

unsigned default_jobs() {
    if (const char* env = std::getenv("MSR_JOBS")) {
        try {
            return static_cast<unsigned>(std::max(1, std::stoi(env)));
        } catch (const std::exception&) {
        }
    }
    return 1;
}

int cmd_validate(const std::string& file, std::size_t eta_cap) {
    auto a = msr::load_scenario(file);
    auto rep = msr::validate_scenario(a, eta_cap);
    std::cout << "scenario " << (a.name.empty() ? file : a.name) << "\n" << rep.render();
    return rep.ok() ? kYes : kNo;
}

int cmd_trace(const std::string& file, msr::Time ticks, std::uint64_t seed) {
    auto a = msr::load_scenario(file);
    std::cout << "seed " << seed << "\n" << "0: " << msr::render(a.initial) << "\n";
    std::mt19937_64 rng(seed);
    msr::Trace t{a.initial, {}};
    msr::Configuration s = a.initial;
    std::size_t cap = static_cast<std::size_t>(ticks + 1) * s.size();
    while (static_cast<msr::Time>(t.ticks()) < ticks && t.steps.size() < cap) {
        auto succ = msr::successors(a, s, msr::RuleSet::System);
        std::uniform_int_distribution<std::size_t> pick(0, succ.size() - 1);
        auto& next = succ[pick(rng)];
        t.steps.push_back({std::move(next.instance), std::move(next.result)});
        s = t.steps.back().result;
    }
    std::cout << msr::render_trace(t) << "final: " << msr::render(s) << "\n";
    auto crit = msr::check_compliance(t, a.critical);
    std::cout << "compliant: " << (crit ? "no (" + msr::render(*crit) + ")" : std::string("yes")) << "\n";
    std::cout << "goal: " << (msr::match_spec(a.goal, s) ? "yes" : "no") << "\n";
    return kYes;
}

int cmd_goal(const std::string& file, msr::Time budget, bool memo) {
    auto a = msr::load_scenario(file);
    msr::SearchStats stats;
    auto t = msr::find_compliant_goal_trace(a, budget, {memo}, &stats);
    if (!t) {
        std::cout << "no compliant goal trace within " << budget << " ticks (" << stats.nodes << " nodes)\n";
        return kNo;
    }
    std::cout << "0: " << msr::render(t->initial) << "\n"
              << msr::render_trace(*t) << "goal: " << msr::render(t->last()) << "\n";
    return kYes;
}

int cmd_resilience(const std::string& file, const msr::Query& q, const std::string& witness_out,
                   const std::string& verify_in, const msr::ResilienceOptions& opts) {
    auto a = msr::load_scenario(file);
    if (!verify_in.empty()) {
        auto j = nlohmann::ordered_json::parse(slurp(verify_in));
        auto w = msr::witness_from_json(a.sig, j);
        if (auto v = msr::verify_witness(a, q, w)) {
            std::cout << "witness rejected: " << v->str() << "\n";
            return kNo;
        }
        std::cout << "witness verified for " << msr::render(q) << "\n";
        return kYes;
    }
    auto r = msr::check_resilience(a, q, opts);
    switch (r.verdict) {
    case msr::Verdict::Refused:
        std::cerr << file << ": refused: " << r.reason << "\n";
        return kError;
    case msr::Verdict::NotResilient:
        std::cout << "not resilient " << msr::render(q) << ": " << r.reason << "\n";
        return kNo;
    case msr::Verdict::Resilient:
        break;
    }
    std::cout << "resilient " << msr::render(q) << "\n" << msr::render_trace(r.witness->trace);
    std::cout << "update branches: " << r.witness->children.size() << "\n";
    if (!witness_out.empty())
        spill(witness_out, msr::witness_to_json(*r.witness).dump(2) + "\n");
    return kYes;
}

int cmd_qbf_eval(const std::string& file) {
    bool v = msr::evaluate_qbf(msr::parse_qdimacs(slurp(file)));
    std::cout << (v ? "true" : "false") << "\n";
    return v ? kYes : kNo;
}

int cmd_qbf_gen(const std::string& file, const std::string& out) {
    auto a = msr::qbf_to_scenario(msr::parse_qdimacs(slurp(file)));
    spill(out, msr::print_scenario(a));
    std::cout << "wrote " << out << ": " << a.system_rules.size() << " system rules, " << a.update_rules.size()
              << " update rules, " << a.initial.size() << " facts\n";
    return kYes;
}

int cmd_graph_goal(const std::string& gfile, const std::string& kfile) {
    auto g = msr::parse_graph(slurp(gfile));
    auto k = msr::parse_graph(slurp(kfile));
    auto [a, s] = msr::graph_to_goal_instance(g, k);
    auto m = msr::match_spec(a.goal, s);
    std::cout << "homomorphism: " << (m ? "yes " + msr::render(m->sigma) : std::string("no")) << "\n";
    return m ? kYes : kNo;
}

int cmd_delta(const std::string& file, msr::Time dmax) {
    auto a = msr::load_scenario(file);
    if (dmax <= 0)
        dmax = msr::infer_dmax(a);
    auto d = msr::abstract(a.initial, dmax);
    std::cout << "Dmax " << dmax << "\n" << msr::render(d) << "\n";
    if (d.future_bounded())
        std::cout << "after Tock: " << msr::render(msr::tock(d)) << "\n";
    else
        std::cout << "not future-bounded\n";
    return kYes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timed MSR planning scenarios: validation, goal search and (n,a,b)-resilience"};
    app.require_subcommand(1);

    std::string file, out, gfile, kfile, witness_out, verify_in;
    std::size_t eta_cap = msr::kDefaultEtaCap;
    msr::Time ticks = 10, budget = 0, dmax = 0;
    std::uint64_t seed = 1;
    bool no_memo = false;
    msr::Query q;
    unsigned jobs = default_jobs();

    auto* validate = app.add_subcommand("validate", "classify rules and report progressing, η and Dmax");
    validate->add_option("file", file)->required();
    validate->add_option("--eta-cap", eta_cap, "refuse critical specs whose measure reaches this cap");

    auto* trace = app.add_subcommand("trace", "seeded random walk over system rules and Tick");
    trace->add_option("file", file)->required();
    trace->add_option("--ticks", ticks)->required();
    trace->add_option("--seed", seed);

    auto* goal = app.add_subcommand("goal", "search for a compliant goal trace");
    goal->add_option("file", file)->required();
    goal->add_option("--budget", budget, "maximum number of Ticks")->required();
    goal->add_flag("--no-memo", no_memo, "disable δ-memoization");

    auto* res = app.add_subcommand("resilience", "decide (n,a,b)-resilience");
    res->add_option("file", file)->required();
    res->add_option("-n", q.n)->required();
    res->add_option("-a", q.a)->required();
    res->add_option("-b", q.b)->required();
    res->add_option("--witness", witness_out, "write the witness tree as JSON");
    res->add_option("--verify", verify_in, "check a witness file instead of searching");
    res->add_option("--jobs", jobs, "parallel update branches (default $MSR_JOBS or 1)");
    res->add_option("--eta-cap", eta_cap);
    res->add_flag("--no-memo", no_memo);

    auto* qbf = app.add_subcommand("qbf", "QBF oracle and scenario generator");
    qbf->require_subcommand(1);
    auto* qeval = qbf->add_subcommand("eval", "evaluate a QDIMACS formula by brute force");
    qeval->add_option("file", file)->required();
    auto* qgen = qbf->add_subcommand("gen", "emit the planning scenario for a QDIMACS formula");
    qgen->add_option("file", file)->required();
    qgen->add_option("-o", out)->required();

    auto* graph = app.add_subcommand("graph-goal", "decide a homomorphism G → K through goal recognition");
    graph->add_option("g", gfile)->required();
    graph->add_option("k", kfile)->required();

    auto* delta = app.add_subcommand("delta", "print the δ-representation of the initial configuration");
    delta->add_option("file", file)->required();
    delta->add_option("--dmax", dmax);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kError;
    }

    try {
        if (*validate)
            return cmd_validate(file, eta_cap);
        if (*trace)
            return cmd_trace(file, ticks, seed);
        if (*goal)
            return cmd_goal(file, budget, !no_memo);
        if (*res) {
            msr::ResilienceOptions opts;
            opts.memo = !no_memo;
            opts.eta_cap = eta_cap;
            opts.jobs = std::max(1u, jobs);
            return cmd_resilience(file, q, witness_out, verify_in, opts);
        }
        if (*qeval)
            return cmd_qbf_eval(file);
        if (*qgen)
            return cmd_qbf_gen(file, out);
        if (*graph)
            return cmd_graph_goal(gfile, kfile);
        if (*delta)
            return cmd_delta(file, dmax);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kError;
    }
    return kError;
}
