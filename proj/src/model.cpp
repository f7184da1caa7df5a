#include "ladderlab/model.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ladderlab {

namespace {

bool reaches(const NetworkSpec& net, int from, int to) {
    std::set<int> seen{from};
    std::vector<int> stack{from};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        if (cur == to) return true;
        for (int nxt : net.out_neighbors(cur))
            if (seen.insert(nxt).second) stack.push_back(nxt);
    }
    return false;
}

}  // namespace

std::vector<Violation> validate(const ScenarioConfig& config) {
    std::vector<Violation> out;
    const auto add = [&out](const std::string& code, const std::string& msg) {
        out.push_back({code, msg});
    };

    if (!(config.ou.kappa > 0.0)) add("ou.kappa_nonpositive", "kappa must be > 0");
    if (!(config.ou.sigma > 0.0)) add("ou.sigma_nonpositive", "sigma must be > 0");
    if (!(config.ou.rho > 0.0)) add("ou.rho_nonpositive", "rho must be > 0");
    if (config.ou.h < 0.0) add("ou.h_negative", "news gain h must be >= 0");

    if (!config.seed_set) add("seed.missing", "seed is mandatory");

    const auto& net = config.network;
    int dm_count = 0;
    std::set<int> ids;
    for (const auto& a : net.nodes) {
        if (!ids.insert(a.id).second)
            add("network.duplicate_id", "duplicate node id " + std::to_string(a.id));
        if (a.is_dm()) {
            ++dm_count;
            continue;
        }
        const std::string tag = "agent" + std::to_string(a.id);
        if (!(a.alpha > 0.0)) add(tag + ".alpha_nonpositive", "alpha must be > 0");
        if (a.beta < 0.0) add(tag + ".beta_negative", "beta must be >= 0");
        if (!(a.lambda_bar > 0.0))
            add(tag + ".lambda_bar_nonpositive", "lambda_bar must be > 0");
        const auto& r = a.rep;
        if (!(r.pi0 > 0.0 && r.pi0 < 1.0))
            add(tag + ".rep.pi0_out_of_range", "pi0 must lie in (0,1)");
        if (!(r.p_low >= 0.0 && r.p_low < r.p_high && r.p_high <= 1.0))
            add(tag + ".rep.propensities_invalid",
                "need 0 <= p_low < p_high <= 1");
        if (!(r.phi_high > r.phi_low && r.phi_low >= 0.0))
            add(tag + ".rep.phi_invalid", "need phi_high > phi_low >= 0");
    }
    if (dm_count != 1)
        add("network.dm_count", "exactly one decision_maker required, got " +
                                    std::to_string(dm_count));

    for (const auto& l : net.links) {
        if (l.first == l.second)
            add("network.self_link", "self-link at node " + std::to_string(l.first));
        if (!net.find(l.first) || !net.find(l.second))
            add("network.dangling_link", "link references missing node");
    }
    for (const auto& [l, c] : net.link_costs) {
        if (c < 0.0) add("network.negative_link_cost", "link cost must be >= 0");
        if (!net.has_link(l.first, l.second))
            add("network.cost_without_link", "cost given for absent link");
    }

    if (dm_count == 1) {
        const int dm = net.dm_id();
        for (const auto& a : net.nodes) {
            if (a.role != AgentRole::expert) continue;
            if (!reaches(net, a.id, dm))
                add("network.infeasible",
                    "expert " + std::to_string(a.id) + " has no path to the DM");
        }
    }

    if (config.solver.m_count < 201) add("solver.m_count_too_small", "need >= 201");
    if (config.solver.r_count < 21) add("solver.r_count_too_small", "need >= 21");
    if (config.sim.dt < 0.0) add("sim.dt_negative", "dt must be > 0 (or 0 = default)");
    if (config.sim.horizon < 0.0) add("sim.horizon_negative", "horizon must be >= 0");
    if (config.sim.reps < 1) add("sim.reps_too_small", "need reps >= 1");

    return out;
}

std::vector<std::vector<int>> enumerate_simple_paths(const NetworkSpec& net,
                                                     int from, int to) {
    if (!net.find(from) || !net.find(to))
        throw Error("unknown_node", "path query references missing node");
    std::vector<std::vector<int>> out;
    std::vector<int> path{from};
    std::set<int> on_path{from};

    // explicit stack of (node, next-neighbor-index); neighbors sorted so the
    // output is lexicographic
    struct Frame {
        std::vector<int> nbrs;
        std::size_t next = 0;
    };
    std::vector<Frame> stack;
    auto sorted_nbrs = [&net](int id) {
        auto v = net.out_neighbors(id);
        std::sort(v.begin(), v.end());
        return v;
    };
    stack.push_back({sorted_nbrs(from), 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (path.back() == to) {
            out.push_back(path);
            on_path.erase(path.back());
            path.pop_back();
            stack.pop_back();
            continue;
        }
        bool advanced = false;
        while (f.next < f.nbrs.size()) {
            const int nxt = f.nbrs[f.next++];
            if (on_path.count(nxt)) continue;
            path.push_back(nxt);
            on_path.insert(nxt);
            stack.push_back({sorted_nbrs(nxt), 0});
            advanced = true;
            break;
        }
        if (!advanced) {
            on_path.erase(path.back());
            path.pop_back();
            stack.pop_back();
        }
    }
    return out;
}

bool check_bias_aligned(const std::vector<double>& biases) {
    if (biases.empty())
        throw Error("empty_bias_list", "bias alignment needs a non-empty list");
    bool any_pos = false, any_neg = false;
    for (double b : biases) {
        if (b > 0.0) any_pos = true;
        if (b < 0.0) any_neg = true;
    }
    return !(any_pos && any_neg);
}

bool is_arborescence(const NetworkSpec& net) {
    const int dm = net.dm_id();
    if (dm < 0) return false;
    for (const auto& a : net.nodes) {
        if (a.id == dm) {
            if (!net.out_neighbors(a.id).empty()) return false;
            continue;
        }
        if (net.out_neighbors(a.id).size() != 1) return false;
    }
    // unique out-link per node guarantees a unique walk; it must hit the DM
    for (const auto& a : net.nodes) {
        if (a.id == dm) continue;
        int cur = a.id;
        std::set<int> seen{cur};
        while (cur != dm) {
            const auto nb = net.out_neighbors(cur);
            if (nb.empty()) return false;
            cur = nb[0];
            if (!seen.insert(cur).second) return false;  // cycle
        }
    }
    return true;
}

bool check_bias_monotone_tree(const NetworkSpec& net) {
    if (!is_arborescence(net))
        throw Error("not_a_tree", "bias monotonicity is defined on arborescences");
    const int dm = net.dm_id();
    for (const auto& a : net.nodes) {
        if (a.role != AgentRole::expert) continue;
        for (const auto& path : enumerate_simple_paths(net, a.id, dm)) {
            std::vector<double> biases;
            for (int id : path) {
                const AgentSpec* sp = net.find(id);
                if (!sp->is_dm()) biases.push_back(sp->bias);
            }
            if (!check_bias_aligned(biases)) return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// JSON schema (strict)

namespace {

using nlohmann::json;

void require_keys(const json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw Error("schema.unknown_key", "unknown key '" + it.key() +
                                                  "' in " + where);
}

AgentRole role_from_string(const std::string& s) {
    if (s == "expert") return AgentRole::expert;
    if (s == "intermediary") return AgentRole::intermediary;
    if (s == "decision_maker") return AgentRole::decision_maker;
    throw Error("schema.bad_role", "unknown role '" + s + "'");
}

std::string role_to_string(AgentRole r) {
    switch (r) {
        case AgentRole::expert: return "expert";
        case AgentRole::intermediary: return "intermediary";
        default: return "decision_maker";
    }
}

}  // namespace

ScenarioConfig scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error("schema.parse_error", e.what());
    }
    require_keys(j, {"ou", "network", "solver", "sim", "seed"}, "scenario");
    ScenarioConfig c;

    if (!j.contains("ou")) throw Error("schema.missing_key", "ou");
    {
        const json& o = j["ou"];
        require_keys(o, {"kappa", "xbar", "sigma", "rho", "h"}, "ou");
        c.ou.kappa = o.at("kappa").get<double>();
        c.ou.xbar = o.at("xbar").get<double>();
        c.ou.sigma = o.at("sigma").get<double>();
        c.ou.rho = o.at("rho").get<double>();
        c.ou.h = o.value("h", 0.0);
    }

    if (!j.contains("network")) throw Error("schema.missing_key", "network");
    {
        const json& n = j["network"];
        require_keys(n, {"nodes", "links", "link_costs"}, "network");
        for (const json& a : n.at("nodes")) {
            require_keys(a,
                         {"id", "role", "alpha", "b", "beta", "lambda_bar", "rep"},
                         "node");
            AgentSpec s;
            s.id = a.at("id").get<int>();
            s.role = role_from_string(a.at("role").get<std::string>());
            if (!s.is_dm()) {
                s.alpha = a.at("alpha").get<double>();
                s.bias = a.at("b").get<double>();
                s.beta = a.at("beta").get<double>();
                s.lambda_bar = a.at("lambda_bar").get<double>();
                const json& r = a.at("rep");
                require_keys(r, {"pi0", "p_high", "p_low", "phi_low", "phi_high"},
                             "rep");
                s.rep.pi0 = r.at("pi0").get<double>();
                s.rep.p_high = r.at("p_high").get<double>();
                s.rep.p_low = r.at("p_low").get<double>();
                s.rep.phi_low = r.at("phi_low").get<double>();
                s.rep.phi_high = r.at("phi_high").get<double>();
            }
            c.network.nodes.push_back(s);
        }
        for (const json& l : n.at("links")) {
            if (!l.is_array() || l.size() != 2)
                throw Error("schema.bad_link", "links must be [from, to] pairs");
            c.network.links.emplace_back(l[0].get<int>(), l[1].get<int>());
        }
        if (n.contains("link_costs")) {
            for (const json& e : n.at("link_costs")) {
                require_keys(e, {"from", "to", "cost"}, "link_costs");
                c.network.link_costs[{e.at("from").get<int>(),
                                      e.at("to").get<int>()}] =
                    e.at("cost").get<double>();
            }
        }
    }

    if (j.contains("solver")) {
        const json& s = j["solver"];
        require_keys(s,
                     {"m_count", "r_count", "m_span_sds", "tol_value",
                      "tol_pasting", "max_sweeps", "threshold_cap",
                      "penalty_rate", "path_tol", "path_max_sweeps",
                      "path_damping"},
                     "solver");
        c.solver.m_count = s.value("m_count", c.solver.m_count);
        c.solver.r_count = s.value("r_count", c.solver.r_count);
        c.solver.m_span_sds = s.value("m_span_sds", c.solver.m_span_sds);
        c.solver.tol_value = s.value("tol_value", c.solver.tol_value);
        c.solver.tol_pasting = s.value("tol_pasting", c.solver.tol_pasting);
        c.solver.max_sweeps = s.value("max_sweeps", c.solver.max_sweeps);
        c.solver.threshold_cap = s.value("threshold_cap", c.solver.threshold_cap);
        c.solver.penalty_rate = s.value("penalty_rate", c.solver.penalty_rate);
        c.solver.path_tol = s.value("path_tol", c.solver.path_tol);
        c.solver.path_max_sweeps =
            s.value("path_max_sweeps", c.solver.path_max_sweeps);
        c.solver.path_damping = s.value("path_damping", c.solver.path_damping);
    }

    if (j.contains("sim")) {
        const json& s = j["sim"];
        require_keys(s, {"dt", "horizon", "reps", "crn", "threads"}, "sim");
        c.sim.dt = s.value("dt", c.sim.dt);
        c.sim.horizon = s.value("horizon", c.sim.horizon);
        c.sim.reps = s.value("reps", c.sim.reps);
        c.sim.crn = s.value("crn", c.sim.crn);
        c.sim.threads = s.value("threads", c.sim.threads);
    }

    if (j.contains("seed")) {
        c.seed = j.at("seed").get<std::uint64_t>();
        c.seed_set = true;
    }
    return c;
}

std::string scenario_to_json(const ScenarioConfig& c) {
    json j;
    j["ou"] = {{"kappa", c.ou.kappa},
               {"xbar", c.ou.xbar},
               {"sigma", c.ou.sigma},
               {"rho", c.ou.rho},
               {"h", c.ou.h}};
    json nodes = json::array();
    for (const auto& a : c.network.nodes) {
        json n;
        n["id"] = a.id;
        n["role"] = role_to_string(a.role);
        if (!a.is_dm()) {
            n["alpha"] = a.alpha;
            n["b"] = a.bias;
            n["beta"] = a.beta;
            n["lambda_bar"] = a.lambda_bar;
            n["rep"] = {{"pi0", a.rep.pi0},
                        {"p_high", a.rep.p_high},
                        {"p_low", a.rep.p_low},
                        {"phi_low", a.rep.phi_low},
                        {"phi_high", a.rep.phi_high}};
        }
        nodes.push_back(n);
    }
    json links = json::array();
    for (const auto& l : c.network.links) links.push_back({l.first, l.second});
    json costs = json::array();
    for (const auto& [l, cost] : c.network.link_costs)
        costs.push_back({{"from", l.first}, {"to", l.second}, {"cost", cost}});
    j["network"] = {{"nodes", nodes}, {"links", links}, {"link_costs", costs}};
    j["solver"] = {{"m_count", c.solver.m_count},
                   {"r_count", c.solver.r_count},
                   {"m_span_sds", c.solver.m_span_sds},
                   {"tol_value", c.solver.tol_value},
                   {"tol_pasting", c.solver.tol_pasting},
                   {"max_sweeps", c.solver.max_sweeps},
                   {"threshold_cap", c.solver.threshold_cap},
                   {"penalty_rate", c.solver.penalty_rate},
                   {"path_tol", c.solver.path_tol},
                   {"path_max_sweeps", c.solver.path_max_sweeps},
                   {"path_damping", c.solver.path_damping}};
    j["sim"] = {{"dt", c.sim.dt},
                {"horizon", c.sim.horizon},
                {"reps", c.sim.reps},
                {"crn", c.sim.crn},
                {"threads", c.sim.threads}};
    j["seed"] = c.seed;
    return j.dump(2);
}

ScenarioConfig scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("io.open_failed", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

std::uint64_t scenario_hash(const ScenarioConfig& config) {
    const std::string s = scenario_to_json(config);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace ladderlab
