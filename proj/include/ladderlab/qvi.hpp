#pragma once

#include <functional>
#include <vector>

#include "ladderlab/model.hpp"

namespace ladderlab {

// Exogenous side of a single-agent solve: Poisson rates at which other
// agents' disclosures re-anchor the public belief.
struct PathEnvironment {
    std::vector<double> disclosure_rates;
};

struct Grid2D {
    std::vector<double> m;  // uniform, ascending
    std::vector<double> r;  // uniform, ascending
    double dm() const { return m.size() > 1 ? m[1] - m[0] : 1.0; }
    double dr() const { return r.size() > 1 ? r[1] - r[0] : 1.0; }
    std::size_t index(std::size_t i, std::size_t j) const {
        return j * m.size() + i;
    }
};

struct ThresholdInfo {
    double m = 0.0;                 // interpolated crossing location
    double value_match = 0.0;       // |V - MV| at the crossing
    double pasting_gap = 0.0;       // relative one-sided derivative gap
    bool disclose_above = false;    // disclose region sits at higher m
};

struct LadderRow {
    double r = 0.0;
    std::vector<ThresholdInfo> thresholds;  // ascending in m
    bool disclose_left = false;  // policy at the low-m end of the row
    bool full_disclosure = false;
    bool pure_inaction = false;
    bool pasting_flagged = false;
};

struct LadderPolicy {
    int agent_id = -1;
    std::vector<double> r_nodes;
    std::vector<LadderRow> rows;

    bool discloses(double m, double r) const;  // nearest-row lookup
    const LadderRow& nearest_row(double r) const;
    // sup-norm distance between threshold sets (node-count mismatch counts
    // as `infinite_penalty`)
    static double sup_distance(const LadderPolicy& a, const LadderPolicy& b,
                               double infinite_penalty);
};

struct ValueSolution {
    Grid2D grid;
    std::vector<double> values;             // V(m, R), row-major by R
    std::vector<double> disclose_advantage; // MV - V (MV includes the
                                            // post-disclosure variance bonus)
    std::vector<char> disclose_policy;
    std::vector<char> clock_choice;         // 1 = on
    std::vector<double> qvi_residual;       // min(rho V - u - LV, V - MV)
    std::vector<double> pde_residual;
    std::vector<double> intervention_values;  // MV per R row (m-free)
    double v_eff = 0.0;
    double dip_bonus = 0.0;
    int policy_iterations = 0;
    double max_qvi_residual = 0.0;
    double min_verification_margin = 0.0;  // min over grid of V - MV
};

// Upwind monotone discretization of the continuation generator (no jump
// terms): sparse triplets plus the flow-payoff vector. Exposed for tests.
struct GeneratorTriplets {
    std::vector<int> row;
    std::vector<int> col;
    std::vector<double> val;
};

GeneratorTriplets build_generator(const OUParams& ou, const AgentSpec& agent,
                                  const Grid2D& grid, bool clock_on,
                                  const std::vector<char>& disclose_policy);

// Expected post-disclosure value by 15-node Gauss-Hermite quadrature with
// linear interpolation of V: E over X ~ N(center, v_eff) of V(X, r_post).
double intervention_value(const std::vector<double>& values, const Grid2D& grid,
                          double center, double v_eff, double r_post);

// Discounted value of the posterior-variance dip after a full revelation:
// alpha * int_0^inf e^{-rho t} (v_eff - v(t)) dt with v(0) = 0.
double variance_dip_bonus(const OUParams& ou, double alpha);

ValueSolution solve_qvi(const AgentSpec& agent, const OUParams& ou,
                        const PathEnvironment& env,
                        const SolverSettings& settings);

LadderPolicy extract_ladder(const ValueSolution& sol, const AgentSpec& agent,
                            const SolverSettings& settings);

// Effective disclosure rate another agent contributes to the environment:
// lambda_bar times the Gauss-Hermite mass of the disclose region at the
// agent's prior reputation row.
double effective_disclosure_rate(const LadderPolicy& policy,
                                 const AgentSpec& agent, const OUParams& ou);

}  // namespace ladderlab
