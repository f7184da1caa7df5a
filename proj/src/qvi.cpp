#include "ladderlab/qvi.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ladderlab/belief.hpp"
#include "ladderlab/gauss.hpp"
#include "ladderlab/reputation.hpp"

namespace ladderlab {

namespace {

Grid2D make_grid(const AgentSpec& agent, const OUParams& ou,
                 const SolverSettings& s) {
    Grid2D g;
    const double v = riccati_stationary_var(ou);
    const double half = s.m_span_sds * std::sqrt(v);
    g.m.resize(s.m_count);
    for (int i = 0; i < s.m_count; ++i)
        g.m[i] = ou.xbar - half + 2.0 * half * i / (s.m_count - 1);
    g.r.resize(s.r_count);
    const double lo = agent.rep.phi_low, hi = agent.rep.phi_high;
    for (int j = 0; j < s.r_count; ++j)
        g.r[j] = lo + (hi - lo) * j / (s.r_count - 1);
    return g;
}

// linear interpolation weights for x on a uniform grid, clamped at the edges
struct Interp {
    int lo = 0;
    int hi = 0;
    double w_lo = 1.0;
    double w_hi = 0.0;
};

Interp interp_weights(const std::vector<double>& nodes, double x) {
    Interp out;
    const double d = nodes[1] - nodes[0];
    if (x <= nodes.front()) return {0, 0, 1.0, 0.0};
    if (x >= nodes.back()) {
        const int n = static_cast<int>(nodes.size()) - 1;
        return {n, n, 1.0, 0.0};
    }
    const double f = (x - nodes.front()) / d;
    const int lo = static_cast<int>(f);
    const double t = f - lo;
    out.lo = lo;
    out.hi = lo + 1;
    out.w_lo = 1.0 - t;
    out.w_hi = t;
    return out;
}

double bleed_rate(const AgentSpec& a, double r) {
    const double pi = pi_from_rep(a.rep, r);
    const double dp = a.rep.p_high - a.rep.p_low;
    return (a.rep.phi_high - a.rep.phi_low) * pi * (1.0 - pi) * a.lambda_bar * dp;
}

double flow_payoff(const AgentSpec& a, const OUParams& ou, double v_eff,
                   double m, double r) {
    const double gap = m - ou.xbar - a.bias;
    return -a.alpha * (gap * gap + v_eff) + a.beta * r;
}

}  // namespace

double variance_dip_bonus(const OUParams& ou, double alpha) {
    const double v_eff = riccati_stationary_var(ou);
    if (ou.h == 0.0)
        return alpha * v_eff / (ou.rho + 2.0 * ou.kappa);
    // integrate e^{-rho t}(v_eff - v(t)) with v' = sigma^2 - 2k v - h^2 v^2
    double v = 0.0, t = 0.0, acc = 0.0;
    const double dt = 0.005 / ou.kappa;
    const auto rhs = [&](double vv) {
        return ou.sigma * ou.sigma - 2.0 * ou.kappa * vv - ou.h * ou.h * vv * vv;
    };
    while (std::exp(-ou.rho * t) * (v_eff - v) > 1e-14 * v_eff || t < 1.0 / ou.kappa) {
        const double f0 = std::exp(-ou.rho * t) * (v_eff - v);
        const double k1 = rhs(v);
        const double k2 = rhs(v + 0.5 * dt * k1);
        const double k3 = rhs(v + 0.5 * dt * k2);
        const double k4 = rhs(v + dt * k3);
        v += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += dt;
        const double f1 = std::exp(-ou.rho * t) * (v_eff - v);
        acc += 0.5 * dt * (f0 + f1);
        if (t > 200.0 / std::min(ou.rho, ou.kappa)) break;
    }
    return alpha * acc;
}

double intervention_value(const std::vector<double>& values, const Grid2D& grid,
                          double center, double v_eff, double r_post) {
    const Interp jr = interp_weights(grid.r, r_post);
    const double sd = std::sqrt(std::max(0.0, v_eff));
    const auto& gh = gh15();
    double acc = 0.0;
    for (std::size_t q = 0; q < gh.x.size(); ++q) {
        const double x = center + sd * gh.x[q];
        const Interp im = interp_weights(grid.m, x);
        const double v_lo = values[grid.index(im.lo, jr.lo)] * im.w_lo +
                            values[grid.index(im.hi, jr.lo)] * im.w_hi;
        const double v_hi = values[grid.index(im.lo, jr.hi)] * im.w_lo +
                            values[grid.index(im.hi, jr.hi)] * im.w_hi;
        acc += gh.w[q] * (jr.w_lo * v_lo + jr.w_hi * v_hi);
    }
    return acc;
}

GeneratorTriplets build_generator(const OUParams& ou, const AgentSpec& agent,
                                  const Grid2D& grid, bool clock_on,
                                  const std::vector<char>& disclose_policy) {
    const int nm = static_cast<int>(grid.m.size());
    const int nr = static_cast<int>(grid.r.size());
    const double dm = grid.dm();
    const double dr = grid.dr();
    const double v_eff = riccati_stationary_var(ou);
    const double vol2 = ou.h * v_eff * ou.h * v_eff;  // diffusion of m
    const double diff = 0.5 * vol2 / (dm * dm);

    GeneratorTriplets t;
    auto push = [&t](int r, int c, double v) {
        if (v == 0.0) return;
        t.row.push_back(r);
        t.col.push_back(c);
        t.val.push_back(v);
    };

    for (int j = 0; j < nr; ++j) {
        const double bleed = clock_on ? bleed_rate(agent, grid.r[j]) : 0.0;
        for (int i = 0; i < nm; ++i) {
            const int k = static_cast<int>(grid.index(i, j));
            double diag = 0.0;
            // m advection, upwind
            const double a = ou.kappa * (ou.xbar - grid.m[i]);
            if (a > 0.0 && i + 1 < nm) {
                push(k, static_cast<int>(grid.index(i + 1, j)), a / dm);
                diag -= a / dm;
            } else if (a < 0.0 && i > 0) {
                push(k, static_cast<int>(grid.index(i - 1, j)), -a / dm);
                diag -= -a / dm;
            }
            // m diffusion, central with reflecting edges
            if (vol2 > 0.0) {
                if (i == 0) {
                    push(k, static_cast<int>(grid.index(1, j)), 2.0 * diff);
                    diag -= 2.0 * diff;
                } else if (i == nm - 1) {
                    push(k, static_cast<int>(grid.index(nm - 2, j)), 2.0 * diff);
                    diag -= 2.0 * diff;
                } else {
                    push(k, static_cast<int>(grid.index(i - 1, j)), diff);
                    push(k, static_cast<int>(grid.index(i + 1, j)), diff);
                    diag -= 2.0 * diff;
                }
            }
            // R advection: informative-silence bleed (always <= 0), active
            // only where the public expects disclosure
            const bool disclosing =
                !disclose_policy.empty() && disclose_policy[k] != 0;
            if (disclosing && bleed > 0.0 && j > 0) {
                push(k, static_cast<int>(grid.index(i, j - 1)), bleed / dr);
                diag -= bleed / dr;
            }
            push(k, k, diag);
        }
    }
    return t;
}

ValueSolution solve_qvi(const AgentSpec& agent, const OUParams& ou,
                        const PathEnvironment& env,
                        const SolverSettings& settings) {
    if (agent.is_dm())
        throw Error("dm_has_no_policy", "solve_qvi takes a non-DM agent");
    ValueSolution sol;
    sol.grid = make_grid(agent, ou, settings);
    const Grid2D& g = sol.grid;
    const int nm = static_cast<int>(g.m.size());
    const int nr = static_cast<int>(g.r.size());
    const int n = nm * nr;
    sol.v_eff = riccati_stationary_var(ou);
    sol.dip_bonus = variance_dip_bonus(ou, agent.alpha);

    // monotonicity check of the continuation scheme (upwind + central
    // diffusion is unconditionally monotone on this grid; a nonuniform or
    // degenerate grid would fail here)
    if (nm < 3 || nr < 2)
        throw Error("grid_too_coarse", "need at least 3 x 2 grid nodes");

    const double dm = g.dm();
    std::vector<double> u(n);
    for (int j = 0; j < nr; ++j)
        for (int i = 0; i < nm; ++i)
            u[g.index(i, j)] = flow_payoff(agent, ou, sol.v_eff, g.m[i], g.r[j]);

    // post-disclosure reputation row per R node
    std::vector<double> r_post(nr);
    for (int j = 0; j < nr; ++j)
        r_post[j] = rep_from_pi(agent.rep,
                                disclosure_jump(agent.rep, pi_from_rep(agent.rep, g.r[j])));

    const auto& gh = gh15();
    const double sd = std::sqrt(sol.v_eff);
    // quadrature abscissae anchored at the stationary mean (disclosure
    // re-anchors the public belief at the revealed fundamental)
    std::vector<Interp> anchor_interp(gh.x.size());
    for (std::size_t q = 0; q < gh.x.size(); ++q)
        anchor_interp[q] = interp_weights(g.m, ou.xbar + sd * gh.x[q]);

    const double env_rate_total =
        std::accumulate(env.disclosure_rates.begin(), env.disclosure_rates.end(), 0.0);
    const double penalty = settings.penalty_rate;

    std::vector<char> d(n, 0);  // disclose policy (active set)
    std::vector<double> V(n, 0.0);
    Eigen::SparseMatrix<double> A(n, n);
    Eigen::VectorXd rhs(n);

    auto assemble_and_solve = [&](const std::vector<char>& dd) {
        GeneratorTriplets cont = build_generator(ou, agent, g, true, dd);
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(cont.row.size() + static_cast<std::size_t>(n) * 70 + n);
        for (std::size_t k = 0; k < cont.row.size(); ++k)
            trip.emplace_back(cont.row[k], cont.col[k], -cont.val[k]);
        for (int k = 0; k < n; ++k) trip.emplace_back(k, k, ou.rho);

        for (int j = 0; j < nr; ++j) {
            const Interp jr = interp_weights(g.r, r_post[j]);
            for (int i = 0; i < nm; ++i) {
                const int k = static_cast<int>(g.index(i, j));
                double rate_own = dd[k] ? penalty : 0.0;
                const double rate_env = env_rate_total;
                const double total = rate_own + rate_env;
                if (total == 0.0) {
                    rhs(k) = u[k];
                    continue;
                }
                trip.emplace_back(k, k, total);
                for (std::size_t q = 0; q < gh.x.size(); ++q) {
                    const Interp& im = anchor_interp[q];
                    const double wq = gh.w[q];
                    if (rate_own > 0.0) {
                        trip.emplace_back(k, static_cast<int>(g.index(im.lo, jr.lo)),
                                          -rate_own * wq * im.w_lo * jr.w_lo);
                        trip.emplace_back(k, static_cast<int>(g.index(im.hi, jr.lo)),
                                          -rate_own * wq * im.w_hi * jr.w_lo);
                        if (jr.w_hi != 0.0) {
                            trip.emplace_back(k, static_cast<int>(g.index(im.lo, jr.hi)),
                                              -rate_own * wq * im.w_lo * jr.w_hi);
                            trip.emplace_back(k, static_cast<int>(g.index(im.hi, jr.hi)),
                                              -rate_own * wq * im.w_hi * jr.w_hi);
                        }
                    }
                    if (rate_env > 0.0) {
                        trip.emplace_back(k, static_cast<int>(g.index(im.lo, j)),
                                          -rate_env * wq * im.w_lo);
                        trip.emplace_back(k, static_cast<int>(g.index(im.hi, j)),
                                          -rate_env * wq * im.w_hi);
                    }
                }
                rhs(k) = u[k] + total * sol.dip_bonus;
            }
        }
        A.setZero();
        A.setFromTriplets(trip.begin(), trip.end());
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success)
            throw Error("singular_system", "policy-iteration linear solve failed");
        Eigen::VectorXd x = lu.solve(rhs);
        for (int k = 0; k < n; ++k) V[k] = x(k);
    };

    auto compute_mv = [&](std::vector<double>& mv_row) {
        mv_row.assign(nr, 0.0);
        for (int j = 0; j < nr; ++j)
            mv_row[j] = intervention_value(V, g, ou.xbar, sol.v_eff, r_post[j]) +
                        sol.dip_bonus;
    };

    // Howard iteration on the disclose active set
    std::vector<double> mv_row(nr, 0.0);
    int iter = 0;
    const int max_iter = std::max(10, settings.max_sweeps / 100);
    std::vector<char> d_prev2;
    for (;; ++iter) {
        if (iter >= max_iter)
            throw Error("max_sweeps_exceeded", "policy iteration did not settle");
        assemble_and_solve(d);
        compute_mv(mv_row);
        std::vector<char> d_new(n, 0);
        for (int j = 0; j < nr; ++j)
            for (int i = 0; i < nm; ++i) {
                const int k = static_cast<int>(g.index(i, j));
                d_new[k] = mv_row[j] - V[k] > 0.0 ? 1 : 0;
            }
        if (d_new == d) break;
        if (!d_prev2.empty() && d_new == d_prev2) {
            // 2-cycle: freeze the union (both sets are within tolerance of
            // indifference) and do a final solve
            for (int k = 0; k < n; ++k) d[k] = d[k] | d_new[k];
            assemble_and_solve(d);
            compute_mv(mv_row);
            break;
        }
        d_prev2 = d;
        d = std::move(d_new);
    }
    sol.policy_iterations = iter + 1;

    // exported policy: ties toward disclosure
    const double scale = 1.0 + std::abs(*std::max_element(
                                   u.begin(), u.end(),
                                   [](double a, double b) {
                                       return std::abs(a) < std::abs(b);
                                   })) / ou.rho;
    const double tie_tol = 1e-6 * scale;

    sol.values = V;
    sol.disclose_policy.assign(n, 0);
    sol.disclose_advantage.assign(n, 0.0);
    sol.clock_choice.assign(n, 1);  // on everywhere; see extract_ladder notes
    sol.qvi_residual.assign(n, 0.0);
    sol.pde_residual.assign(n, 0.0);
    sol.intervention_values = mv_row;

    // residuals: continuation PDE (with env jumps, without the exercise
    // penalty) and the obstacle margin
    GeneratorTriplets cont = build_generator(ou, agent, g, true, d);
    std::vector<double> LV(n, 0.0);
    for (std::size_t k = 0; k < cont.row.size(); ++k)
        LV[cont.row[k]] += cont.val[k] * V[cont.col[k]];
    std::vector<double> envV(nr, 0.0);
    for (int j = 0; j < nr; ++j)
        envV[j] = intervention_value(V, g, ou.xbar, sol.v_eff, g.r[j]) +
                  sol.dip_bonus;

    sol.max_qvi_residual = 0.0;
    sol.min_verification_margin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < nr; ++j)
        for (int i = 0; i < nm; ++i) {
            const int k = static_cast<int>(g.index(i, j));
            const double env_term =
                env_rate_total > 0.0 ? env_rate_total * (envV[j] - V[k]) : 0.0;
            const double r_pde = ou.rho * V[k] - u[k] - LV[k] - env_term;
            const double r_obs = V[k] - mv_row[j];
            sol.pde_residual[k] = r_pde;
            sol.qvi_residual[k] = std::min(r_pde, r_obs);
            sol.disclose_advantage[k] = mv_row[j] - V[k];
            sol.disclose_policy[k] = mv_row[j] - V[k] >= -tie_tol ? 1 : 0;
            sol.max_qvi_residual =
                std::max(sol.max_qvi_residual, std::abs(sol.qvi_residual[k]));
            sol.min_verification_margin =
                std::min(sol.min_verification_margin, r_obs);
        }
    return sol;
}

namespace {

// Derivative at the threshold from one side: parabola through the three
// nearest same-side nodes at distances x1, x1+dm, x1+2dm, slope evaluated at
// the threshold itself. `s` converts from distance-from-threshold to the m
// direction.
double one_sided_derivative(double v1, double v2, double v3, double x1,
                            double dm, double s) {
    const double d2 = 2.0 * dm * dm;
    const double c1 = -(2.0 * x1 + 3.0 * dm) / d2;
    const double c2 = (2.0 * x1 + 2.0 * dm) / (dm * dm);
    const double c3 = -(2.0 * x1 + dm) / d2;
    return s * (c1 * v1 + c2 * v2 + c3 * v3);
}

}  // namespace

LadderPolicy extract_ladder(const ValueSolution& sol, const AgentSpec& agent,
                            const SolverSettings& settings) {
    const Grid2D& g = sol.grid;
    const int nm = static_cast<int>(g.m.size());
    const int nr = static_cast<int>(g.r.size());
    LadderPolicy pol;
    pol.agent_id = agent.id;
    pol.r_nodes = g.r;
    pol.rows.resize(nr);

    for (int j = 0; j < nr; ++j) {
        LadderRow& row = pol.rows[j];
        row.r = g.r[j];
        const auto adv = [&](int i) {
            return sol.disclose_advantage[g.index(i, j)];
        };
        const auto disclose = [&](int i) {
            return sol.disclose_policy[g.index(i, j)] != 0;
        };
        row.disclose_left = disclose(0);
        int crossings = 0;
        for (int i = 0; i + 1 < nm; ++i) {
            if (disclose(i) == disclose(i + 1)) continue;
            ++crossings;
            if (crossings > settings.threshold_cap)
                throw Error("threshold_cap_exceeded",
                            "oscillatory advantage: more crossings than cap");
            ThresholdInfo th;
            const double a0 = adv(i), a1 = adv(i + 1);
            const double t = a0 == a1 ? 0.5 : a0 / (a0 - a1);
            th.m = g.m[i] + t * g.dm();
            th.disclose_above = disclose(i + 1);
            // value matching: |V - MV| at the crossing (linear interpolation
            // of the advantage vanishes there by construction; record the
            // nodal residue)
            th.value_match = std::min(std::abs(a0), std::abs(a1));
            // smooth pasting: one-sided derivative gap at the boundary
            const auto val = [&](int i2) {
                return sol.values[g.index(std::clamp(i2, 0, nm - 1), j)];
            };
            const double dm = g.dm();
            double d_lo = 0.0, d_hi = 0.0;
            if (i >= 2)
                d_lo = one_sided_derivative(val(i), val(i - 1), val(i - 2),
                                            th.m - g.m[i], dm, -1.0);
            else
                d_lo = (val(i) - val(std::max(0, i - 1))) / dm;
            if (i + 3 < nm)
                d_hi = one_sided_derivative(val(i + 1), val(i + 2), val(i + 3),
                                            g.m[i + 1] - th.m, dm, 1.0);
            else
                d_hi = (val(std::min(nm - 1, i + 2)) - val(i + 1)) / dm;
            const double denom = 1.0 + std::max(std::abs(d_lo), std::abs(d_hi));
            th.pasting_gap = std::abs(d_lo - d_hi) / denom;
            if (th.pasting_gap > settings.tol_pasting) row.pasting_flagged = true;
            row.thresholds.push_back(th);
        }
        if (row.thresholds.empty()) {
            if (row.disclose_left)
                row.full_disclosure = true;
            else
                row.pure_inaction = true;
        }
    }
    return pol;
}

bool LadderPolicy::discloses(double m, double r) const {
    const LadderRow& row = nearest_row(r);
    bool state = row.disclose_left;
    for (const auto& th : row.thresholds) {
        if (m < th.m) break;
        state = th.disclose_above;
    }
    return state;
}

const LadderRow& LadderPolicy::nearest_row(double r) const {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < r_nodes.size(); ++j) {
        const double d = std::abs(r_nodes[j] - r);
        if (d < bd) {
            bd = d;
            best = j;
        }
    }
    return rows[best];
}

double LadderPolicy::sup_distance(const LadderPolicy& a, const LadderPolicy& b,
                                  double infinite_penalty) {
    double sup = 0.0;
    const std::size_t nr = std::min(a.rows.size(), b.rows.size());
    for (std::size_t j = 0; j < nr; ++j) {
        const auto& ra = a.rows[j].thresholds;
        const auto& rb = b.rows[j].thresholds;
        if (ra.size() != rb.size()) {
            sup = std::max(sup, infinite_penalty);
            continue;
        }
        for (std::size_t k = 0; k < ra.size(); ++k)
            sup = std::max(sup, std::abs(ra[k].m - rb[k].m));
    }
    return sup;
}

double effective_disclosure_rate(const LadderPolicy& policy,
                                 const AgentSpec& agent, const OUParams& ou) {
    const double v_eff = riccati_stationary_var(ou);
    const double sd = std::sqrt(v_eff);
    const double r0 = rep_from_pi(agent.rep, agent.rep.pi0);
    const auto& gh = gh15();
    double mass = 0.0;
    for (std::size_t q = 0; q < gh.x.size(); ++q)
        if (policy.discloses(ou.xbar + sd * gh.x[q], r0)) mass += gh.w[q];
    return agent.lambda_bar * mass;
}

}  // namespace ladderlab
