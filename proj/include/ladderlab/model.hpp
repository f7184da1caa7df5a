#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ladderlab {

// Operational failure with a machine-readable code ("no_convergence", ...).
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

struct OUParams {
    double kappa = 1.0;   // mean-reversion rate, > 0
    double xbar = 0.0;    // long-run mean
    double sigma = 1.0;   // volatility, > 0
    double rho = 0.1;     // discount rate, > 0
    double h = 0.0;       // public-news signal gain, >= 0

    double stationary_var() const { return sigma * sigma / (2.0 * kappa); }
};

struct ReputationParams {
    double pi0 = 0.5;       // prior P(high type), in (0,1)
    double p_high = 0.9;    // disclosure propensity of the high type
    double p_low = 0.3;     // disclosure propensity of the low type
    double phi_low = 0.0;   // project surplus, low type
    double phi_high = 1.0;  // project surplus, high type
};

enum class AgentRole { expert, intermediary, decision_maker };

struct AgentSpec {
    int id = 0;
    AgentRole role = AgentRole::intermediary;
    double alpha = 1.0;       // material weight (unused for DM)
    double bias = 0.0;        // b, state units (unused for DM)
    double beta = 0.0;        // reputational intensity
    double lambda_bar = 1.0;  // maximal clock intensity (non-DM)
    ReputationParams rep;     // non-DM only

    bool is_dm() const { return role == AgentRole::decision_maker; }
};

using Link = std::pair<int, int>;

struct NetworkSpec {
    std::vector<AgentSpec> nodes;
    std::vector<Link> links;                 // directed (from, to)
    std::map<Link, double> link_costs;       // present-value cost per link

    const AgentSpec* find(int id) const {
        for (const auto& a : nodes)
            if (a.id == id) return &a;
        return nullptr;
    }
    bool has_link(int from, int to) const {
        for (const auto& l : links)
            if (l.first == from && l.second == to) return true;
        return false;
    }
    double cost(const Link& l) const {
        auto it = link_costs.find(l);
        return it == link_costs.end() ? 0.0 : it->second;
    }
    std::vector<int> out_neighbors(int id) const {
        std::vector<int> out;
        for (const auto& l : links)
            if (l.first == id) out.push_back(l.second);
        return out;
    }
    int dm_id() const {
        for (const auto& a : nodes)
            if (a.is_dm()) return a.id;
        return -1;
    }
};

struct SolverSettings {
    int m_count = 201;         // >= 201
    int r_count = 21;          // >= 21
    double m_span_sds = 5.0;   // span = xbar +- span_sds * sqrt(stationary v)
    double tol_value = 1e-7;
    double tol_pasting = 1e-3;
    int max_sweeps = 100000;
    int threshold_cap = 8;
    double penalty_rate = 1e9;       // exercise-rate penalty for the QVI
    double path_tol = 1e-3;          // fixed-point tolerance, m units
    int path_max_sweeps = 200;
    double path_damping = 0.5;
};

struct SimSettings {
    double dt = 0.0;      // 0 -> default 0.01 / kappa
    double horizon = 0.0; // 0 -> chosen so exp(-rho T) <= 1e-4
    int reps = 2000;
    bool crn = true;
    int threads = 1;
};

struct ScenarioConfig {
    OUParams ou;
    NetworkSpec network;
    SolverSettings solver;
    SimSettings sim;
    std::uint64_t seed = 0;
    bool seed_set = false;

    double sim_dt() const { return sim.dt > 0.0 ? sim.dt : 0.01 / ou.kappa; }
    double sim_horizon() const {
        if (sim.horizon > 0.0) return sim.horizon;
        return std::log(1e4) / ou.rho;
    }
};

struct Violation {
    std::string code;
    std::string message;
};

// Returns every violated invariant; empty list iff the config is valid.
std::vector<Violation> validate(const ScenarioConfig& config);

// All simple directed paths from `from` to `to`, lexicographic order.
std::vector<std::vector<int>> enumerate_simple_paths(const NetworkSpec& net,
                                                     int from, int to);

// True iff all biases share a weak sign (zero matches both).
bool check_bias_aligned(const std::vector<double>& biases);

// True iff every simple expert->DM path in an arborescence is bias-aligned.
// Throws Error("not_a_tree") on non-tree inputs.
bool check_bias_monotone_tree(const NetworkSpec& net);

// True iff net is an arborescence rooted at the DM (every non-DM node has
// exactly one out-link and a unique directed path to the DM).
bool is_arborescence(const NetworkSpec& net);

// JSON serialization with a strict schema: unknown keys are a hard error.
ScenarioConfig scenario_from_json(const std::string& text);
std::string scenario_to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_file(const std::string& path);

// FNV-1a hash of the canonical serialized form (printed by every CLI run).
std::uint64_t scenario_hash(const ScenarioConfig& config);

}  // namespace ladderlab
