#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ladderlab/clocks.hpp"
#include "ladderlab/qvi.hpp"

namespace ladderlab {

struct AgentPolicy {
    LadderPolicy ladder;
    std::vector<AnnouncedWindow> windows;
};

using PolicyMap = std::map<int, AgentPolicy>;

// Degenerate policies used by tests and benchmarks.
LadderPolicy always_disclose_policy(int agent_id);
LadderPolicy never_disclose_policy(int agent_id);

struct DeliveryRecord {
    int origin_agent = -1;
    double origin_time = 0.0;
    double deliver_time = 0.0;
};

struct DisclosureRecord {
    int agent = -1;
    double time = 0.0;
    double delay = 0.0;    // time since the signal's origin
    double m_move = 0.0;   // post-jump m minus pre-jump m (0 for relays)
    bool terminal = false; // reached the DM
};

struct PathSample {
    double t = 0.0;
    double x = 0.0;
    double m = 0.0;
    double v = 0.0;
    std::vector<double> pi;  // per non-DM agent, scenario order
};

struct EventTrace {
    std::vector<Event> events;
    std::map<int, double> payoffs;  // discounted, per agent id (DM included)
    std::vector<DeliveryRecord> deliveries;
    std::vector<DisclosureRecord> disclosures;
    int signals_originated = 0;
    std::vector<PathSample> path;  // populated only when recording
};

struct SimOptions {
    bool record_events = false;
    bool record_path = false;
    // agents deleted from the simulation (counterfactual runs)
    std::vector<int> deleted_agents;
};

EventTrace simulate_once(const ScenarioConfig& config, const PolicyMap& policies,
                         std::uint64_t rep_index, const SimOptions& opts = {});

struct ValueEstimate {
    double mean = 0.0;
    double se = 0.0;
};

struct ValueReport {
    std::map<int, ValueEstimate> per_agent;  // DM included under its id
    ValueEstimate v0;
    ValueEstimate welfare;  // W = sum V_i - link costs
    int reps = 0;
    std::uint64_t seed = 0;
};

ValueReport estimate_values(const ScenarioConfig& config,
                            const PolicyMap& policies);

// paired difference a - b under common random numbers (same rep indices)
struct PairedDiff {
    double mean = 0.0;
    double se = 0.0;
    double ci_low = 0.0;   // 95%
    double ci_high = 0.0;
};

struct TimingStats {
    int n_disclosures = 0;
    double mean_duration = 0.0;
    double sd_duration = 0.0;
    double burstiness = 0.0;  // (sd - mean)/(sd + mean)
    double q10 = 0.0, q50 = 0.0, q90 = 0.0;
    double mean_delay_up = 0.0;    // delay of disclosures moving m up
    double mean_delay_down = 0.0;  // ... moving m down
    int n_up = 0, n_down = 0;
    std::vector<double> durations;  // pooled inter-disclosure durations
};

// >= 100 traces required; Error("insufficient_events") below 20 disclosures.
TimingStats timing_statistics(const std::vector<EventTrace>& traces);

// Closed-form no-information values (every clock silent forever): the DM
// loss integrates the deterministic variance path; agents add beta R(pi0)
// flows.
std::map<int, double> no_information_values(const ScenarioConfig& config);

// Build full policy maps for convenience.
PolicyMap uniform_policies(const ScenarioConfig& config, bool disclose);

}  // namespace ladderlab
