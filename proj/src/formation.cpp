#include "ladderlab/formation.hpp"

#include <algorithm>
#include <cmath>

namespace ladderlab {

NetworkSpec apply_mask(const FormationInstance& inst, LinkMask mask) {
    NetworkSpec net;
    net.nodes = inst.base.network.nodes;
    for (std::size_t k = 0; k < inst.l_max.size(); ++k) {
        if (!(mask & (LinkMask{1} << k))) continue;
        const Link& l = inst.l_max[k];
        net.links.push_back(l);
        auto it = inst.costs.find(l);
        net.link_costs[l] = it == inst.costs.end() ? 0.0 : it->second;
    }
    return net;
}

bool mask_feasible(const FormationInstance& inst, LinkMask mask) {
    NetworkSpec net = apply_mask(inst, mask);
    const int dm = net.dm_id();
    for (const auto& a : net.nodes) {
        if (a.role != AgentRole::expert) continue;
        if (enumerate_simple_paths(net, a.id, dm).empty()) return false;
    }
    return true;
}

std::map<int, double> net_payoffs(const NetworkSpec& net,
                                  const std::map<int, double>& values) {
    std::map<int, double> out = values;
    for (const auto& [l, c] : net.link_costs) out[l.first] -= c;  // sender pays
    return out;
}

namespace {

double total_cost(const NetworkSpec& net) {
    double c = 0.0;
    for (const auto& [l, cost] : net.link_costs) c += cost;
    return c;
}

NetworkValuation value_mask(const FormationInstance& inst, LinkMask mask) {
    NetworkValuation val;
    val.mask = mask;
    ScenarioConfig cfg = inst.base;
    cfg.network = apply_mask(inst, mask);
    val.feasible = mask_feasible(inst, mask);
    if (!val.feasible) {
        // closed-form no-information benchmark
        val.supported = false;
        val.values = no_information_values(cfg);
        for (const auto& [id, v] : val.values) val.se[id] = 0.0;
        double w = -total_cost(cfg.network);
        for (const auto& [id, v] : val.values) w += v;
        val.w = w;
        val.w_se = 0.0;
        return val;
    }
    NetworkEquilibrium eq = solve_network_equilibrium(cfg);  // may throw
    val.supported = true;
    ValueReport rep = estimate_values(cfg, eq.policies);
    double pooled2 = 0.0;
    for (const auto& [id, est] : rep.per_agent) {
        val.values[id] = est.mean;
        val.se[id] = est.se;
        pooled2 += est.se * est.se;
    }
    val.w = rep.welfare.mean;
    val.w_se = rep.welfare.se;
    val.pooled_se = std::sqrt(pooled2 / std::max<std::size_t>(1, rep.per_agent.size()));
    return val;
}

double tilde_v(const FormationInstance& inst,
               const std::map<LinkMask, NetworkValuation>& table, LinkMask mask,
               int agent) {
    auto it = table.find(mask);
    if (it == table.end())
        throw Error("missing_valuation",
                    "no valuation for mask " + std::to_string(mask));
    const NetworkValuation& v = it->second;
    double out = v.values.at(agent);
    for (std::size_t k = 0; k < inst.l_max.size(); ++k) {
        if (!(mask & (LinkMask{1} << k))) continue;
        if (inst.l_max[k].first != agent) continue;
        auto c = inst.costs.find(inst.l_max[k]);
        out -= c == inst.costs.end() ? 0.0 : c->second;
    }
    return out;
}

}  // namespace

bool check_pairwise_stable(LinkMask mask, const FormationInstance& inst,
                           const std::map<LinkMask, NetworkValuation>& table,
                           double eps, std::vector<Witness>* witnesses) {
    bool stable = true;
    for (std::size_t k = 0; k < inst.l_max.size(); ++k) {
        const LinkMask bit = LinkMask{1} << k;
        const Link& l = inst.l_max[k];
        if (mask & bit) {
            // unilateral severing by either endpoint
            for (int agent : {l.first, l.second}) {
                const double gain = tilde_v(inst, table, mask & ~bit, agent) -
                                    tilde_v(inst, table, mask, agent);
                if (gain > eps) {
                    stable = false;
                    if (witnesses)
                        witnesses->push_back({"sever", agent, l, gain});
                }
            }
        } else {
            // bilateral addition: blocked unless both strictly gain
            const double gain_i = tilde_v(inst, table, mask | bit, l.first) -
                                  tilde_v(inst, table, mask, l.first);
            const double gain_j = tilde_v(inst, table, mask | bit, l.second) -
                                  tilde_v(inst, table, mask, l.second);
            if (gain_i > eps && gain_j > eps) {
                stable = false;
                if (witnesses)
                    witnesses->push_back(
                        {"add", gain_i >= gain_j ? l.first : l.second, l,
                         std::min(gain_i, gain_j)});
            }
        }
    }
    return stable;
}

std::vector<LinkMask> find_efficient(
    const std::map<LinkMask, NetworkValuation>& table, double eps) {
    std::vector<LinkMask> feas;
    for (const auto& [mask, v] : table)
        if (v.feasible) feas.push_back(mask);
    const bool use_all = feas.empty();
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [mask, v] : table) {
        if (!use_all && !v.feasible) continue;
        best = std::max(best, v.w);
    }
    std::vector<LinkMask> out;
    for (const auto& [mask, v] : table) {
        if (!use_all && !v.feasible) continue;
        if (v.w >= best - eps) out.push_back(mask);
    }
    return out;
}

StabilityReport classify(const FormationInstance& inst) {
    if (inst.l_max.size() > 12)
        throw Error("budget_exceeded", "|L_max| capped at 12");
    const std::size_t n_masks = std::size_t{1} << inst.l_max.size();
    if (n_masks > 4096) throw Error("budget_exceeded", "subsets > 4096");

    std::map<LinkMask, NetworkValuation> table;
    for (LinkMask mask = 0; mask < n_masks; ++mask)
        table[mask] = value_mask(inst, mask);

    double pooled2 = 0.0;
    int n_pooled = 0;
    for (const auto& [mask, v] : table) {
        if (!v.feasible) continue;
        pooled2 += v.w_se * v.w_se;
        ++n_pooled;
    }
    const double pooled = n_pooled > 0 ? std::sqrt(pooled2 / n_pooled) : 0.0;
    const double eps = inst.epsilon_se_mult * pooled;

    StabilityReport rep;
    rep.epsilon = eps;
    for (const auto& [mask, v] : table) rep.valuations.push_back(v);
    rep.efficient = find_efficient(table, eps);

    const auto count_bits = [](LinkMask m) {
        int c = 0;
        while (m) {
            c += m & 1;
            m >>= 1;
        }
        return c;
    };

    for (const auto& [mask, v] : table) {
        StabilityEntry e;
        e.mask = mask;
        std::vector<Witness> w;
        e.stable = check_pairwise_stable(mask, inst, table, eps, &w);
        e.witnesses = std::move(w);
        if (e.stable) {
            rep.stable.push_back(mask);
            bool is_eff = std::find(rep.efficient.begin(), rep.efficient.end(),
                                    mask) != rep.efficient.end();
            if (is_eff) {
                e.classification = "efficient";
            } else {
                bool under = false, over = false;
                for (LinkMask eff : rep.efficient) {
                    if ((mask & eff) == mask && count_bits(eff) > count_bits(mask))
                        under = true;  // strict subset of an efficient network
                    if ((mask & eff) == eff && count_bits(mask) > count_bits(eff))
                        over = true;  // strict superset
                }
                e.classification = under   ? "under_connected"
                                   : over  ? "over_connected"
                                           : "other";
            }
        } else {
            e.classification = "unstable";
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

}  // namespace ladderlab
