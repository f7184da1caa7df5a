#pragma once

#include <vector>

#include "ladderlab/model.hpp"

namespace ladderlab {

// R = phi_low + (phi_high - phi_low) * pi
double rep_from_pi(const ReputationParams& rep, double pi);
double pi_from_rep(const ReputationParams& rep, double r);

// Posterior after dt of observed silence. While the clock is on and the
// public expects disclosure, the censoring hazard lambda_bar * p_theta gives
// d logit(pi) / dt = -lambda_bar (p_high - p_low); otherwise pi is constant.
double silence_drift(const ReputationParams& rep, double pi, double lambda_bar,
                     bool disclosing_region, double dt);

// Bayes jump at an observed disclosure: pi+ = pi p_H / (pi p_H + (1-pi) p_L).
double disclosure_jump(const ReputationParams& rep, double pi);

struct ReputationState {
    std::vector<double> pi;  // indexed like the scenario's non-DM agents
};

}  // namespace ladderlab
