#include "ladderlab/belief.hpp"

#include <algorithm>
#include <cmath>

namespace ladderlab {

double ou_transition_mean(const OUParams& p, double x, double dt) {
    return p.xbar + std::exp(-p.kappa * dt) * (x - p.xbar);
}

double ou_transition_var(const OUParams& p, double dt) {
    return p.sigma * p.sigma * (1.0 - std::exp(-2.0 * p.kappa * dt)) /
           (2.0 * p.kappa);
}

double ou_transition_sample(const OUParams& p, double x, double dt,
                            RngStream& rng) {
    if (dt < 0.0) throw Error("negative_dt", "ou_transition_sample needs dt >= 0");
    if (dt == 0.0) return x;
    return ou_transition_mean(p, x, dt) +
           std::sqrt(ou_transition_var(p, dt)) * rng.gaussian();
}

double riccati_stationary_var(const OUParams& p) {
    if (p.h == 0.0) return p.stationary_var();
    const double k = p.kappa, h2 = p.h * p.h;
    return (std::sqrt(k * k + h2 * p.sigma * p.sigma) - k) / h2;
}

double variance_path_h0(const OUParams& p, double v0, double t) {
    const double vbar = p.stationary_var();
    return vbar + (v0 - vbar) * std::exp(-2.0 * p.kappa * t);
}

BeliefState filter_advance(const OUParams& p, const BeliefState& b, double dt,
                           std::optional<double> news_increment) {
    if (dt < 0.0) throw Error("negative_dt", "filter_advance needs dt >= 0");
    BeliefState out = b;
    out.t = b.t + dt;
    if (dt == 0.0) return out;

    if (p.h == 0.0 || !news_increment.has_value()) {
        // exact prediction ODEs
        out.m = ou_transition_mean(p, b.m, dt);
        if (p.h == 0.0) {
            out.v = variance_path_h0(p, b.v, dt);
        } else {
            // no news observed but channel open: variance still follows the
            // Riccati ODE; integrate with substeps
            const double dti = std::min(dt, 0.01 / p.kappa);
            const int n = std::max(1, static_cast<int>(std::ceil(dt / dti)));
            const double step = dt / n;
            double v = b.v;
            for (int i = 0; i < n; ++i) {
                const double dv =
                    p.sigma * p.sigma - 2.0 * p.kappa * v - p.h * p.h * v * v;
                v = std::max(0.0, v + step * dv);
            }
            out.v = v;
        }
        return out;
    }

    // Kalman-Bucy substeps; the news increment is apportioned linearly
    const double dti = std::min(dt, 0.01 / p.kappa);
    const int n = std::max(1, static_cast<int>(std::ceil(dt / dti)));
    const double step = dt / n;
    const double dz_step = *news_increment / n;
    double m = b.m, v = b.v;
    for (int i = 0; i < n; ++i) {
        const double innovation = dz_step - p.h * m * step;
        const double dm = p.kappa * (p.xbar - m) * step + p.h * v * innovation;
        const double dv =
            (p.sigma * p.sigma - 2.0 * p.kappa * v - p.h * p.h * v * v) * step;
        m += dm;
        v = std::max(0.0, v + dv);
    }
    out.m = m;
    out.v = v;
    return out;
}

BeliefState filter_disclose(const BeliefState& b, double x_revealed) {
    return {x_revealed, 0.0, b.t};
}

}  // namespace ladderlab
