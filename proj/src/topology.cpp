#include "ladderlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ladderlab {

TopologyClass classify_topology(const NetworkSpec& net) {
    const int dm = net.dm_id();
    if (dm < 0) return TopologyClass::unsupported;
    std::vector<int> experts;
    for (const auto& a : net.nodes)
        if (a.role == AgentRole::expert) experts.push_back(a.id);
    if (experts.size() != 1) return TopologyClass::unsupported;
    const int e = experts[0];

    const auto paths = enumerate_simple_paths(net, e, dm);
    if (paths.empty()) return TopologyClass::unsupported;
    if (paths.size() == 1) return TopologyClass::tree;
    if (paths.size() == 2 && paths[0].size() == 3 && paths[1].size() == 3)
        return TopologyClass::two_intermediary_star;
    return TopologyClass::unsupported;
}

NetworkEquilibrium solve_network_equilibrium(const ScenarioConfig& config) {
    const NetworkSpec& net = config.network;
    const TopologyClass cls = classify_topology(net);
    if (cls == TopologyClass::unsupported)
        throw Error("unsupported_topology",
                    "equilibrium computation covers trees and the "
                    "two-intermediary star");
    const int dm = net.dm_id();
    int expert = -1;
    for (const auto& a : net.nodes)
        if (a.role == AgentRole::expert) expert = a.id;

    NetworkEquilibrium out;
    std::set<int> on_path;
    if (cls == TopologyClass::tree) {
        const auto paths = enumerate_simple_paths(net, expert, dm);
        std::vector<int> ids(paths[0].begin(), paths[0].end() - 1);
        PathEquilibrium eq = solve_path(ids, config);
        for (auto& [id, lad] : eq.policies) {
            out.ladders[id] = lad;
            on_path.insert(id);
        }
        out.solutions = std::move(eq.solutions);
    } else {
        // two parallel routes; each intermediary's environment carries the
        // other's disclosure rate plus the expert's (pre-emption channel)
        const auto paths = enumerate_simple_paths(net, expert, dm);
        const int i1 = paths[0][1];
        const int i2 = paths[1][1];
        PathEquilibrium eq = solve_star(expert, i1, i2, config);
        for (auto& [id, lad] : eq.policies) {
            out.ladders[id] = lad;
            on_path.insert(id);
        }
        out.solutions = std::move(eq.solutions);
    }
    for (const auto& a : net.nodes) {
        if (a.is_dm()) continue;
        if (on_path.count(a.id))
            out.policies[a.id] = {out.ladders.at(a.id), {}};
        else
            out.policies[a.id] = {never_disclose_policy(a.id), {}};
    }
    return out;
}

PairedSamples paired_samples(const ScenarioConfig& config,
                             const PolicyMap& policies) {
    const int reps = config.sim.reps;
    const int n_pairs = std::max(1, reps / 2);
    PairedSamples out;
    std::vector<int> ids;
    for (const auto& a : config.network.nodes) ids.push_back(a.id);
    for (int id : ids) out.per_agent[id] = {};
    double total_cost = 0.0;
    for (const auto& [l, c] : config.network.link_costs) total_cost += c;
    const int dm = config.network.dm_id();

    for (int p = 0; p < n_pairs; ++p) {
        EventTrace t0 = simulate_once(config, policies, 2 * p);
        EventTrace t1 = simulate_once(config, policies, 2 * p + 1);
        double wsum = -total_cost;
        for (int id : ids) {
            const double v = 0.5 * (t0.payoffs.at(id) + t1.payoffs.at(id));
            out.per_agent[id].push_back(v);
            wsum += v;
        }
        out.welfare.push_back(wsum);
        out.v0.push_back(out.per_agent[dm].back());
    }
    return out;
}

PairedDiff paired_difference(const std::vector<double>& a,
                             const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw Error("paired_size_mismatch", "paired samples must align");
    RunningStats rs;
    for (std::size_t k = 0; k < a.size(); ++k) rs.add(a[k] - b[k]);
    PairedDiff d;
    d.mean = rs.mean;
    d.se = rs.se();
    d.ci_low = d.mean - 1.96 * d.se;
    d.ci_high = d.mean + 1.96 * d.se;
    return d;
}

namespace {

ScenarioConfig line_config(const ScenarioConfig& base, int expert_id,
                           const std::vector<int>& order) {
    ScenarioConfig cfg = base;
    cfg.network.links.clear();
    cfg.network.link_costs.clear();
    const int dm = base.network.dm_id();
    int prev = expert_id;
    for (int id : order) {
        cfg.network.links.emplace_back(prev, id);
        prev = id;
    }
    cfg.network.links.emplace_back(prev, dm);
    return cfg;
}

}  // namespace

TreeSweepReport sweep_trees(const ScenarioConfig& config) {
    const NetworkSpec& net = config.network;
    const int dm = net.dm_id();
    int expert = -1;
    std::vector<int> inter;
    for (const auto& a : net.nodes) {
        if (a.role == AgentRole::expert) expert = a.id;
        if (a.role == AgentRole::intermediary) inter.push_back(a.id);
    }
    if (inter.size() > 6)
        throw Error("too_many_intermediaries", "factorial sweep capped at 6");

    TreeSweepReport rep;
    std::sort(inter.begin(), inter.end());
    rep.bias_sorted = inter;
    std::stable_sort(rep.bias_sorted.begin(), rep.bias_sorted.end(),
                     [&](int a, int b) {
                         return net.find(a)->bias < net.find(b)->bias;
                     });

    std::vector<int> perm = inter;
    std::map<std::vector<int>, PairedSamples> samples;
    do {
        ScenarioConfig cfg = line_config(config, expert, perm);
        NetworkEquilibrium eq = solve_network_equilibrium(cfg);
        PermutationOutcome out;
        out.order = perm;
        out.values = estimate_values(cfg, eq.policies);
        // widest per-row inaction band along the path (deterministic,
        // solver-level steepness measure)
        double width = 0.0;
        for (const auto& [id, sol] : eq.solutions) {
            const Grid2D& grid = sol.grid;
            for (std::size_t j = 0; j < grid.r.size(); ++j) {
                double run = 0.0;
                for (std::size_t i = 0; i < grid.m.size(); ++i) {
                    if (!sol.disclose_policy[grid.index(i, j)]) {
                        run += grid.dm();
                        width = std::max(width, run);
                    } else {
                        run = 0.0;
                    }
                }
            }
        }
        out.max_inaction_width = width;
        rep.outcomes.push_back(out);
        samples[perm] = paired_samples(cfg, eq.policies);
    } while (std::next_permutation(perm.begin(), perm.end()));

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& o : rep.outcomes)
        if (o.values.v0.mean > best) {
            best = o.values.v0.mean;
            rep.best_order = o.order;
        }
    rep.best_is_bias_sorted = rep.best_order == rep.bias_sorted;
    const auto& sorted_samples = samples.at(rep.bias_sorted);
    for (const auto& o : rep.outcomes) {
        if (o.order == rep.bias_sorted) continue;
        rep.sorted_minus_rival.push_back(
            paired_difference(sorted_samples.v0, samples.at(o.order).v0));
    }
    return rep;
}

DominanceRecord compare_line_star(const ScenarioConfig& base, int expert_id,
                                  int fast_id, int slow_id) {
    const AgentSpec* fi = base.network.find(fast_id);
    const AgentSpec* sj = base.network.find(slow_id);
    if (!fi || !sj) throw Error("unknown_node", "line/star agents missing");
    if (fi->bias != sj->bias)
        throw Error("hypothesis_violated",
                    "line-star comparison requires b_i = b_j");
    const int dm = base.network.dm_id();

    ScenarioConfig line = base;
    line.network.links = {{expert_id, fast_id}, {fast_id, slow_id}, {slow_id, dm}};
    ScenarioConfig star = base;
    star.network.links = {{expert_id, fast_id},
                          {expert_id, slow_id},
                          {fast_id, dm},
                          {slow_id, dm}};
    // keep only costs for links that exist
    auto prune_costs = [](ScenarioConfig& c) {
        std::map<Link, double> kept;
        for (const auto& [l, cost] : c.network.link_costs)
            if (c.network.has_link(l.first, l.second)) kept[l] = cost;
        c.network.link_costs = kept;
    };
    prune_costs(line);
    prune_costs(star);

    NetworkEquilibrium eq_line = solve_network_equilibrium(line);
    NetworkEquilibrium eq_star = solve_network_equilibrium(star);

    DominanceRecord rec;
    rec.line = estimate_values(line, eq_line.policies);
    rec.star = estimate_values(star, eq_star.policies);
    PairedSamples sl = paired_samples(line, eq_line.policies);
    PairedSamples ss = paired_samples(star, eq_star.policies);
    rec.v0_star_minus_line = paired_difference(ss.v0, sl.v0);
    rec.w_star_minus_line = paired_difference(ss.welfare, sl.welfare);
    rec.v0_dominates = rec.v0_star_minus_line.ci_low > 0.0;
    rec.w_dominates = rec.w_star_minus_line.ci_low > 0.0;
    return rec;
}

LinkMarginal link_marginal(const ScenarioConfig& config, const Link& link,
                           double cost) {
    if (config.network.has_link(link.first, link.second))
        throw Error("link_exists", "marginal link must be absent from G");
    ScenarioConfig plus = config;
    plus.network.links.push_back(link);
    plus.network.link_costs[link] = cost;

    NetworkEquilibrium eq_g = solve_network_equilibrium(config);
    NetworkEquilibrium eq_p = solve_network_equilibrium(plus);
    PairedSamples sg = paired_samples(config, eq_g.policies);
    PairedSamples sp = paired_samples(plus, eq_p.policies);

    LinkMarginal out;
    out.link_cost = cost;
    for (const auto& [id, xs] : sg.per_agent)
        out.per_agent[id] = paired_difference(sp.per_agent.at(id), xs);
    out.social = paired_difference(sp.welfare, sg.welfare);
    return out;
}

}  // namespace ladderlab
