#include "ladderlab/path_equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ladderlab/belief.hpp"
#include "ladderlab/sim.hpp"

namespace ladderlab {

namespace {

// damp threshold positions toward the previous ladder (same crossing counts
// per row required; otherwise the new row wins)
LadderPolicy damp_ladder(const LadderPolicy& prev, const LadderPolicy& next,
                         double damping) {
    if (prev.rows.size() != next.rows.size()) return next;
    LadderPolicy out = next;
    for (std::size_t j = 0; j < out.rows.size(); ++j) {
        auto& rn = out.rows[j];
        const auto& rp = prev.rows[j];
        if (rp.thresholds.size() != rn.thresholds.size()) continue;
        for (std::size_t k = 0; k < rn.thresholds.size(); ++k)
            rn.thresholds[k].m = damping * rp.thresholds[k].m +
                                 (1.0 - damping) * rn.thresholds[k].m;
    }
    return out;
}

PathEquilibrium solve_path_impl(const std::vector<int>& path_ids,
                                const ScenarioConfig& config, bool reversed) {
    PathEquilibrium eq;
    eq.path = path_ids;
    const auto& net = config.network;
    std::vector<const AgentSpec*> agents;
    for (int id : path_ids) {
        const AgentSpec* a = net.find(id);
        if (!a) throw Error("unknown_node", "path agent not in scenario");
        if (a->is_dm()) throw Error("dm_on_path", "path ids must exclude the DM");
        agents.push_back(a);
    }

    std::vector<int> order(path_ids);
    if (reversed) std::reverse(order.begin(), order.end());

    // start from full-disclosure ladders so first environments are active
    for (const auto* a : agents)
        eq.policies[a->id] = always_disclose_policy(a->id);

    const double big = 1e9;
    for (int sweep = 0; sweep < config.solver.path_max_sweeps; ++sweep) {
        double sup = 0.0;
        for (int id : order) {
            const AgentSpec* me = net.find(id);
            PathEnvironment env;
            for (const auto* other : agents) {
                if (other->id == id) continue;
                env.disclosure_rates.push_back(effective_disclosure_rate(
                    eq.policies.at(other->id), *other, config.ou));
            }
            ValueSolution sol = solve_qvi(*me, config.ou, env, config.solver);
            LadderPolicy lad = extract_ladder(sol, *me, config.solver);
            const LadderPolicy& prev = eq.policies.at(id);
            LadderPolicy damped =
                (sweep == 0) ? lad
                             : damp_ladder(prev, lad, config.solver.path_damping);
            sup = std::max(sup, LadderPolicy::sup_distance(prev, damped, big));
            eq.policies[id] = std::move(damped);
            eq.solutions[id] = std::move(sol);
        }
        eq.sweep_history.push_back(sup);
        eq.iterations = sweep + 1;
        if (sweep > 0 && sup < config.solver.path_tol) {
            eq.converged = true;
            eq.sup_change = sup;
            return eq;
        }
        eq.sup_change = sup;
    }
    std::ostringstream oss;
    oss << "path fixed point did not converge; sup movements:";
    const std::size_t n = eq.sweep_history.size();
    for (std::size_t k = n > 8 ? n - 8 : 0; k < n; ++k)
        oss << " " << eq.sweep_history[k];
    throw Error("no_convergence", oss.str());
}

}  // namespace

PathEquilibrium solve_path(const std::vector<int>& path_ids,
                           const ScenarioConfig& config) {
    return solve_path_impl(path_ids, config, false);
}

PathEquilibrium solve_path_reversed(const std::vector<int>& path_ids,
                                    const ScenarioConfig& config) {
    return solve_path_impl(path_ids, config, true);
}

PathEquilibrium solve_star(int expert_id, int i1, int i2,
                           const ScenarioConfig& config) {
    // the coupling runs through disclosure rates only, so the star is the
    // same Gauss-Seidel fixed point over the agent set {e, i1, i2}
    return solve_path_impl({expert_id, i1, i2}, config, false);
}

Certificate unraveling_certificate(const AgentSpec& agent, const OUParams& ou,
                                   double p, double delta_rep) {
    if (!(p > 0.0 && p <= 1.0))
        throw Error("bad_probability", "p must lie in (0, 1]");
    if (!(delta_rep > 0.0))
        throw Error("bad_delta_rep", "delta_rep must be positive");
    const double vbar = ou.stationary_var();
    const double b2 = agent.bias * agent.bias;
    const auto mat = [&](double rho) {
        return agent.alpha * (vbar / (rho + 2.0 * ou.kappa) +
                              2.0 * std::sqrt(2.0 * vbar * (vbar + b2)) /
                                  (rho + ou.kappa));
    };
    const auto rep = [&](double beta, double rho) {
        return beta * p * delta_rep * agent.lambda_bar /
               ((agent.lambda_bar + rho) * rho);
    };

    Certificate c;
    c.mat_bound = mat(ou.rho);
    c.rep_bound = rep(agent.beta, ou.rho);
    c.gain = c.rep_bound - c.mat_bound;
    c.sufficient = c.gain > 0.0;
    // minimal beta at the given rho: closed-form inversion of the rep bound
    c.min_beta = c.mat_bound * (agent.lambda_bar + ou.rho) * ou.rho /
                 (p * delta_rep * agent.lambda_bar);
    // maximal rho at the given beta: bracket the largest sign change of
    // gain(rho); gain -> +inf at 0+ and -> 0- at infinity when beta > 0
    if (agent.beta <= 0.0) {
        c.max_rho = 0.0;
    } else {
        const auto gain_at = [&](double rho) {
            return rep(agent.beta, rho) - mat(rho);
        };
        double lo = 1e-12, hi = 1e-12;
        // expand until the gain is negative
        for (hi = std::max(ou.rho, 1e-6); gain_at(hi) > 0.0 && hi < 1e12;)
            hi *= 2.0;
        if (gain_at(hi) > 0.0) {
            c.max_rho = hi;  // effectively unbounded
        } else {
            lo = hi / 2.0;
            while (gain_at(lo) <= 0.0 && lo > 1e-14) lo /= 2.0;
            for (int it = 0; it < 200; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (gain_at(mid) > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            c.max_rho = 0.5 * (lo + hi);
        }
    }
    return c;
}

DeliveryCheck eventual_disclosure_check(const PathEquilibrium& eq,
                                        const ScenarioConfig& config,
                                        double horizon, int reps,
                                        std::uint64_t seed) {
    if (!eq.converged)
        throw Error("not_converged", "delivery check needs a converged equilibrium");
    ScenarioConfig cfg = config;
    cfg.sim.horizon = horizon;
    cfg.sim.reps = reps;
    cfg.seed = seed;
    cfg.seed_set = true;

    PolicyMap pols;
    for (const auto& [id, lad] : eq.policies) pols[id] = {lad, {}};
    // agents off the path keep their scenario policies silent
    for (const auto& a : config.network.nodes) {
        if (a.is_dm() || pols.count(a.id)) continue;
        pols[a.id] = {never_disclose_policy(a.id), {}};
    }

    DeliveryCheck out;
    for (int k = 0; k < reps; ++k) {
        EventTrace tr = simulate_once(cfg, pols, static_cast<std::uint64_t>(k));
        out.signals += tr.signals_originated;
        out.delivered += static_cast<int>(tr.deliveries.size());
        for (const auto& d : tr.deliveries)
            out.delays.push_back(d.deliver_time - d.origin_time);
    }
    if (out.signals > 0) {
        const double f = static_cast<double>(out.delivered) / out.signals;
        const double se = std::sqrt(std::max(0.0, f * (1.0 - f) /
                                                     static_cast<double>(out.signals)));
        out.fraction = f;
        out.ci_low = std::max(0.0, f - 1.96 * se);
        out.ci_high = std::min(1.0, f + 1.96 * se);
    }
    return out;
}

}  // namespace ladderlab
