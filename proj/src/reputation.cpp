#include "ladderlab/reputation.hpp"

#include <algorithm>
#include <cmath>

namespace ladderlab {

double rep_from_pi(const ReputationParams& rep, double pi) {
    return rep.phi_low + (rep.phi_high - rep.phi_low) * pi;
}

double pi_from_rep(const ReputationParams& rep, double r) {
    const double pi = (r - rep.phi_low) / (rep.phi_high - rep.phi_low);
    return std::clamp(pi, 0.0, 1.0);
}

double silence_drift(const ReputationParams& rep, double pi, double lambda_bar,
                     bool disclosing_region, double dt) {
    if (dt < 0.0) throw Error("negative_dt", "silence_drift needs dt >= 0");
    if (!disclosing_region || dt == 0.0) return pi;
    if (pi <= 0.0) return 0.0;
    if (pi >= 1.0) return 1.0;
    // d logit(pi)/dt = -lambda_bar (p_high - p_low): exact integral of the
    // censoring ODE, stays in (0,1) for any dt
    const double dp = rep.p_high - rep.p_low;
    const double logit = std::log(pi / (1.0 - pi)) - lambda_bar * dp * dt;
    const double out = 1.0 / (1.0 + std::exp(-logit));
    return std::clamp(out, 0.0, 1.0);
}

double disclosure_jump(const ReputationParams& rep, double pi) {
    if (pi <= 0.0) return 0.0;
    if (pi >= 1.0) return 1.0;
    const double num = pi * rep.p_high;
    const double den = num + (1.0 - pi) * rep.p_low;
    if (den == 0.0) return 1.0;  // p_low = 0 and pi > 0
    return std::clamp(num / den, 0.0, 1.0);
}

}  // namespace ladderlab
