#include "ladderlab/static_game.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ladderlab/gauss.hpp"

namespace ladderlab {

StaticOutcome direct_unraveling(const GaussianPrior& prior,
                                const PathAgent& expert) {
    if (prior.var < 0.0) throw Error("bad_prior", "variance must be >= 0");
    StaticOutcome out;
    out.full_disclosure = true;
    out.y_silent = prior.mean;
    out.v0 = 0.0;
    // separating outcome: y = theta, so the expert's loss is alpha b^2
    out.per_agent_payoffs = {-expert.alpha * expert.bias * expert.bias};
    return out;
}

std::pair<double, double> blocked_interval(double b, double y_silent) {
    if (b >= 0.0)
        throw Error("bias_not_negative",
                    "blocked_interval takes b < 0; mirror b > 0 by symmetry");
    return {y_silent, y_silent - 2.0 * b};
}

namespace {

// blocking interval of an agent with bias b given silent action y: the open
// interval where (y - theta - b)^2 < b^2
std::pair<double, double> block_region(double b, double y) {
    if (b < 0.0) return {y, y - 2.0 * b};
    return {y - 2.0 * b, y};
}

struct GridQuad {
    std::vector<double> theta;
    std::vector<double> weight;  // Gaussian prior mass per node
    double mean, sd;
};

GridQuad make_grid(const GaussianPrior& prior, int n) {
    GridQuad g;
    g.mean = prior.mean;
    g.sd = std::sqrt(prior.var);
    g.theta.resize(n);
    g.weight.resize(n);
    const double lo = prior.mean - 6.0 * g.sd;
    const double hi = prior.mean + 6.0 * g.sd;
    const double dx = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double th = lo + i * dx;
        g.theta[i] = th;
        // cell mass: exact Gaussian mass of [th - dx/2, th + dx/2]
        const double a = (th - 0.5 * dx - prior.mean) / g.sd;
        const double b = (th + 0.5 * dx - prior.mean) / g.sd;
        g.weight[i] = normal_mass(a, b);
    }
    return g;
}

}  // namespace

StaticOutcome static_path_solve(const std::vector<PathAgent>& agents,
                                const GaussianPrior& prior, int grid) {
    if (agents.empty()) throw Error("empty_path", "need at least one agent");
    if (grid < 100) throw Error("grid_too_small", "static grid must be >= 100");

    std::vector<double> biases;
    for (const auto& a : agents) biases.push_back(a.bias);

    StaticOutcome out;
    out.per_agent_payoffs.assign(agents.size(), 0.0);

    if (check_bias_aligned(biases)) {
        out.full_disclosure = true;
        out.y_silent = prior.mean;
        out.v0 = 0.0;
        for (std::size_t i = 0; i < agents.size(); ++i)
            out.per_agent_payoffs[i] =
                -agents[i].alpha * agents[i].bias * agents[i].bias;
        return out;
    }

    // reference sign: the first nonzero bias along the path (upstream end)
    double ref = 0.0;
    for (double b : biases)
        if (b != 0.0) {
            ref = b;
            break;
        }
    std::vector<std::size_t> blockers;
    for (std::size_t i = 0; i < agents.size(); ++i)
        if (biases[i] * ref < 0.0) blockers.push_back(i);

    const GridQuad g = make_grid(prior, grid);

    auto solve_from = [&](double y0, StaticOutcome& res) -> bool {
        double y = y0;
        const int max_sweeps = 10000;
        const double tol = 1e-8;
        for (int it = 0; it < max_sweeps; ++it) {
            // withheld set on the grid: union of blockers' regions
            double mass = 0.0, first = 0.0;
            for (std::size_t k = 0; k < g.theta.size(); ++k) {
                const double th = g.theta[k];
                bool withheld = false;
                for (std::size_t bi : blockers) {
                    const auto [lo, hi] = block_region(biases[bi], y);
                    if (th > lo && th < hi) {
                        withheld = true;
                        break;
                    }
                }
                if (withheld) {
                    mass += g.weight[k];
                    first += g.weight[k] * th;
                }
            }
            double y_new;
            if (mass <= 0.0) {
                y_new = prior.mean;  // empty withheld set: prior mean
            } else {
                y_new = first / mass;
            }
            const double y_next = 0.5 * y + 0.5 * y_new;  // damping 0.5
            if (std::abs(y_next - y) < tol) {
                res.y_silent = y_next;
                res.iterations = it + 1;
                return true;
            }
            y = y_next;
        }
        return false;
    };

    StaticOutcome base = out;
    if (!solve_from(prior.mean, base))
        throw Error("no_convergence", "static fixed point did not stabilize");

    // flag non-uniqueness from perturbed starts
    const double sd = std::sqrt(prior.var);
    for (double start : {prior.mean - sd, prior.mean + sd}) {
        StaticOutcome alt = out;
        if (solve_from(start, alt) &&
            std::abs(alt.y_silent - base.y_silent) > 1e-6)
            base.multiple_fixed_points = true;
    }

    const double y = base.y_silent;
    out = base;
    out.full_disclosure = false;

    // final evaluation of payoffs and blocked set at the fixed point
    for (std::size_t bi : blockers) {
        const auto [lo, hi] = block_region(biases[bi], y);
        out.blocked_intervals.push_back({static_cast<int>(bi), lo, hi});
    }
    double mass = 0.0, loss = 0.0;
    std::vector<double> agent_loss(agents.size(), 0.0);
    for (std::size_t k = 0; k < g.theta.size(); ++k) {
        const double th = g.theta[k];
        bool withheld = false;
        for (std::size_t bi : blockers) {
            const auto [lo, hi] = block_region(biases[bi], y);
            if (th > lo && th < hi) {
                withheld = true;
                break;
            }
        }
        const double w = g.weight[k];
        if (withheld) {
            mass += w;
            loss += w * (y - th) * (y - th);
            for (std::size_t i = 0; i < agents.size(); ++i) {
                const double e = y - th - agents[i].bias;
                agent_loss[i] += w * e * e;
            }
        } else {
            for (std::size_t i = 0; i < agents.size(); ++i)
                agent_loss[i] += w * agents[i].bias * agents[i].bias;
        }
    }
    out.blocked_measure = mass;
    out.v0 = -loss;
    for (std::size_t i = 0; i < agents.size(); ++i)
        out.per_agent_payoffs[i] = -agents[i].alpha * agent_loss[i];
    return out;
}

TreeRankResult static_tree_rank(const std::vector<double>& biases,
                                const GaussianPrior& prior, int grid) {
    if (biases.size() > 7)
        throw Error("too_many_intermediaries", "exhaustive sweep capped at 7");
    TreeRankResult res;
    res.bias_sorted.resize(biases.size());
    std::iota(res.bias_sorted.begin(), res.bias_sorted.end(), 0);
    std::stable_sort(res.bias_sorted.begin(), res.bias_sorted.end(),
                     [&](int a, int b) { return biases[a] < biases[b]; });

    std::vector<int> perm(biases.size());
    std::iota(perm.begin(), perm.end(), 0);
    res.all_aligned = true;
    res.all_zero_v0 = true;
    do {
        std::vector<PathAgent> agents;
        for (int idx : perm) agents.push_back({1.0, biases[idx]});
        const StaticOutcome o = static_path_solve(agents, prior, grid);
        TreeRankEntry e;
        e.permutation = perm;
        e.aligned = o.full_disclosure;
        e.v0 = o.v0;
        e.blocked_measure = o.blocked_measure;
        if (!e.aligned) res.all_aligned = false;
        if (e.v0 < 0.0) res.all_zero_v0 = false;
        res.entries.push_back(std::move(e));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return res;
}

}  // namespace ladderlab
