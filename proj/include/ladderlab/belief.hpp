#pragma once

#include <optional>

#include "ladderlab/model.hpp"
#include "ladderlab/rng.hpp"

namespace ladderlab {

struct BeliefState {
    double m = 0.0;  // posterior mean
    double v = 0.0;  // posterior variance, >= 0
    double t = 0.0;  // current time
};

// Exact OU transition law X_{t+dt} | X_t = x.
double ou_transition_mean(const OUParams& p, double x, double dt);
double ou_transition_var(const OUParams& p, double dt);
double ou_transition_sample(const OUParams& p, double x, double dt,
                            RngStream& rng);

// Stationary root of dv/dt = sigma^2 - 2 kappa v - h^2 v^2 (the h = 0 case
// reduces to sigma^2 / (2 kappa)).
double riccati_stationary_var(const OUParams& p);

// Advance (m, v) by dt. With h = 0 or absent news the prediction step is
// exact; with news the Kalman-Bucy update is integrated with explicit
// substeps of size min(dt, 0.01/kappa). `news_increment` is the observed
// increment of Z over [t, t+dt] where dZ = h X dt + dW.
BeliefState filter_advance(const OUParams& p, const BeliefState& b, double dt,
                           std::optional<double> news_increment = std::nullopt);

// Fully revealing disclosure: jump to (x_revealed, 0).
BeliefState filter_disclose(const BeliefState& b, double x_revealed);

// Deterministic variance path v(t) with h = 0: closed form.
double variance_path_h0(const OUParams& p, double v0, double t);

}  // namespace ladderlab
