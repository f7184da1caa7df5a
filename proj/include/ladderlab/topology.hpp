#pragma once

#include <map>
#include <string>
#include <vector>

#include "ladderlab/path_equilibrium.hpp"
#include "ladderlab/sim.hpp"

namespace ladderlab {

// Supported equilibrium topologies: arborescences (unique expert-DM path)
// and the two-intermediary star. Other graphs need user-supplied policies.
enum class TopologyClass { tree, two_intermediary_star, unsupported };

TopologyClass classify_topology(const NetworkSpec& net);

// Solve the equilibrium implied by the network's class and return per-agent
// policies (dangling branches get silent policies).
struct NetworkEquilibrium {
    PolicyMap policies;
    std::map<int, LadderPolicy> ladders;
    std::map<int, ValueSolution> solutions;
};

NetworkEquilibrium solve_network_equilibrium(const ScenarioConfig& config);

struct PermutationOutcome {
    std::vector<int> order;  // intermediary ids along the line
    ValueReport values;
    double max_inaction_width = 0.0;  // widest per-row inaction band on path
};

struct TreeSweepReport {
    std::vector<PermutationOutcome> outcomes;
    std::vector<int> best_order;       // argmax V0
    std::vector<int> bias_sorted;      // ascending-bias order
    bool best_is_bias_sorted = false;
    // paired diff of bias-sorted line minus each rival (CRN)
    std::vector<PairedDiff> sorted_minus_rival;
};

// Exhaustive sweep over line permutations (<= 6 intermediaries).
TreeSweepReport sweep_trees(const ScenarioConfig& config);

struct DominanceRecord {
    ValueReport line;
    ValueReport star;
    PairedDiff v0_star_minus_line;
    PairedDiff w_star_minus_line;
    bool v0_dominates = false;  // 95% CI excludes zero in favor of the star
    bool w_dominates = false;
};

// Thm.-3 comparison: ordered line e->i->j->0 against the reputational star
// {e->i->0, e->j->0}. Requires b_i = b_j ("hypothesis_violated").
DominanceRecord compare_line_star(const ScenarioConfig& base, int expert_id,
                                  int fast_id, int slow_id);

struct LinkMarginal {
    std::map<int, PairedDiff> per_agent;  // Delta_k(l | G)
    PairedDiff social;                    // Delta_soc = W(G+l) - W(G)
    double link_cost = 0.0;
};

// CRN-paired difference of estimate_values between G+l and G.
LinkMarginal link_marginal(const ScenarioConfig& config, const Link& link,
                           double cost);

// paired per-replication values for two configs sharing rep indices
PairedDiff paired_difference(const std::vector<double>& a,
                             const std::vector<double>& b);

// per-pair (antithetic-averaged) replication values keyed by agent, plus
// welfare; used to assemble paired comparisons
struct PairedSamples {
    std::map<int, std::vector<double>> per_agent;
    std::vector<double> welfare;
    std::vector<double> v0;
};

PairedSamples paired_samples(const ScenarioConfig& config,
                             const PolicyMap& policies);

}  // namespace ladderlab
