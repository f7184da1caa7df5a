#pragma once

#include <utility>
#include <vector>

#include "ladderlab/model.hpp"

namespace ladderlab {

struct GaussianPrior {
    double mean = 0.0;
    double var = 1.0;
};

struct PathAgent {
    double alpha = 1.0;
    double bias = 0.0;
};

struct BlockedInterval {
    int agent_index = -1;  // position along the path, -1 for aggregate
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

struct StaticOutcome {
    bool full_disclosure = false;
    double y_silent = 0.0;                       // DM action after silence
    std::vector<BlockedInterval> blocked_intervals;
    double blocked_measure = 0.0;                // prior mass of the withheld set
    double v0 = 0.0;                             // DM ex ante payoff (<= 0)
    std::vector<double> per_agent_payoffs;       // one per path agent
    bool multiple_fixed_points = false;
    int iterations = 0;
};

// Single expert, verifiable message: full unraveling (Prop.-1 benchmark).
StaticOutcome direct_unraveling(const GaussianPrior& prior,
                                const PathAgent& expert);

// Strict-preference-to-block interval for a negative bias: (y_silent,
// y_silent - 2b). Rejects b >= 0 (mirror case handled by callers).
std::pair<double, double> blocked_interval(double b, double y_silent);

// One-shot path equilibrium: aligned paths fully disclose; otherwise a fixed
// point of (silent action, withheld set) found by damped iteration on a grid
// over mean +- 6 sd. Throws Error("no_convergence") after 1e4 sweeps.
StaticOutcome static_path_solve(const std::vector<PathAgent>& agents,
                                const GaussianPrior& prior, int grid);

struct TreeRankEntry {
    std::vector<int> permutation;  // indices into the input bias list
    bool aligned = false;
    double v0 = 0.0;
    double blocked_measure = 0.0;
};

struct TreeRankResult {
    std::vector<int> bias_sorted;        // ascending-bias permutation
    std::vector<TreeRankEntry> entries;  // one per permutation
    bool all_aligned = false;
    bool all_zero_v0 = false;
};

// Exhaustive permutation sweep (<= 7 intermediaries).
TreeRankResult static_tree_rank(const std::vector<double>& biases,
                                const GaussianPrior& prior, int grid = 2001);

}  // namespace ladderlab
