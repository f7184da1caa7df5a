#pragma once

#include <map>
#include <vector>

#include "ladderlab/qvi.hpp"

namespace ladderlab {

struct PathEquilibrium {
    std::vector<int> path;  // agent ids, expert first, DM excluded
    std::map<int, LadderPolicy> policies;
    std::map<int, ValueSolution> solutions;
    int iterations = 0;
    double sup_change = 0.0;
    bool converged = false;
    std::vector<double> sweep_history;  // sup movement per sweep
};

// Gauss-Seidel best-response iteration over the path agents, upstream to
// downstream, with damping on threshold updates.
PathEquilibrium solve_path(const std::vector<int>& path_ids,
                           const ScenarioConfig& config);

// Same, but sweeping downstream to upstream (order-invariance diagnostic).
PathEquilibrium solve_path_reversed(const std::vector<int>& path_ids,
                                    const ScenarioConfig& config);

// Two-intermediary star: both intermediaries hold direct DM links, and each
// environment carries the other's disclosure rate (pre-emption channel).
PathEquilibrium solve_star(int expert_id, int i1, int i2,
                           const ScenarioConfig& config);

struct Certificate {
    double mat_bound = 0.0;   // Delta-bar^mat
    double rep_bound = 0.0;   // reputational gain lower bound
    double gain = 0.0;        // rep_bound - mat_bound
    bool sufficient = false;  // gain > 0
    double min_beta = 0.0;    // smallest beta making the gain positive
    double max_rho = 0.0;     // largest rho at the given beta (0 if none)
};

// Closed-form sufficiency certificate for dynamic unraveling: the material
// temptation bound alpha (vbar/(rho+2kappa) + 2 sqrt(2 vbar (vbar+b^2))/(rho+kappa))
// against the reputational gain beta p drep lambda/((lambda+rho) rho).
Certificate unraveling_certificate(const AgentSpec& agent, const OUParams& ou,
                                   double p, double delta_rep);

struct DeliveryCheck {
    double fraction = 0.0;  // delivered share of expert signals by T
    double ci_low = 0.0;
    double ci_high = 0.0;
    int signals = 0;
    int delivered = 0;
    std::vector<double> delays;  // empirical delivery delays
};

// Monte Carlo delivered-signal fraction by horizon T (propagates simulator
// errors).
DeliveryCheck eventual_disclosure_check(const PathEquilibrium& eq,
                                        const ScenarioConfig& config,
                                        double horizon, int reps,
                                        std::uint64_t seed);

}  // namespace ladderlab
