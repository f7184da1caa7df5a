#pragma once

#include <map>
#include <string>
#include <vector>

#include "ladderlab/sim.hpp"
#include "ladderlab/topology.hpp"

namespace ladderlab {

struct FormationInstance {
    ScenarioConfig base;           // nodes and primitives; links ignored
    std::vector<Link> l_max;       // candidate directed links, |L| <= 12
    std::map<Link, double> costs;  // sender-paid present-value costs
    double epsilon_se_mult = 2.0;  // eps = mult x pooled SE
};

using LinkMask = std::uint32_t;

struct NetworkValuation {
    LinkMask mask = 0;
    bool feasible = false;
    bool supported = false;  // equilibrium class available
    std::map<int, double> values;   // V_i(G), gross of link costs
    std::map<int, double> se;
    double w = 0.0;                 // W(G) = sum V_i - costs
    double w_se = 0.0;
    double pooled_se = 0.0;
};

struct Witness {
    std::string kind;  // "sever" or "add"
    int agent = -1;    // deviating agent (sever) or one strict gainer (add)
    Link link{};
    double gain = 0.0;
};

struct StabilityEntry {
    LinkMask mask = 0;
    bool stable = false;
    std::string classification;  // efficient | under_connected | over_connected | other
    std::vector<Witness> witnesses;
};

struct StabilityReport {
    std::vector<NetworkValuation> valuations;  // all feasible candidates
    std::vector<LinkMask> stable;
    std::vector<LinkMask> efficient;
    std::vector<StabilityEntry> entries;  // one per valued network
    double epsilon = 0.0;
};

// Net payoffs: sender pays her outgoing link costs.
std::map<int, double> net_payoffs(const NetworkSpec& net,
                                  const std::map<int, double>& values);

// Pairwise stability (Def.-3 semantics) with eps-strictness over a valuation
// table keyed by link mask. Throws Error("missing_valuation").
bool check_pairwise_stable(LinkMask mask, const FormationInstance& inst,
                           const std::map<LinkMask, NetworkValuation>& table,
                           double eps, std::vector<Witness>* witnesses);

// Efficient set: argmax W with eps-ties.
std::vector<LinkMask> find_efficient(
    const std::map<LinkMask, NetworkValuation>& table, double eps);

// Full enumeration, valuation, stability and classification pass.
StabilityReport classify(const FormationInstance& inst);

// helpers
NetworkSpec apply_mask(const FormationInstance& inst, LinkMask mask);
bool mask_feasible(const FormationInstance& inst, LinkMask mask);

}  // namespace ladderlab
