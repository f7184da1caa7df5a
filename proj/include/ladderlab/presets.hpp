#pragma once

#include <string>
#include <vector>

#include "ladderlab/model.hpp"

namespace ladderlab {

struct PresetAssertion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct PresetResult {
    std::string preset;
    std::vector<PresetAssertion> assertions;
    bool all_pass() const {
        for (const auto& a : assertions)
            if (!a.pass) return false;
        return true;
    }
};

std::vector<std::string> preset_names();

// The scenario a preset runs on (exportable as JSON).
ScenarioConfig preset_scenario(const std::string& name);

// Runs the preset's operations, writes CSV artifacts under outdir, and
// evaluates its machine-checkable assertions.
PresetResult run_preset(const std::string& name, const std::string& outdir,
                        int threads = 1);

// Scenario builders shared with tests.
ScenarioConfig chain_scenario();       // e -> i1 -> i2 -> 0, aligned biases
ScenarioConfig single_link_scenario(); // e -> i -> 0
ScenarioConfig reversal_scenario();    // e -> i -> 0 with a bias reversal

AgentSpec make_dm(int id);
AgentSpec make_expert(int id, double alpha, double b, double beta,
                      double lambda_bar, const ReputationParams& rep);
AgentSpec make_intermediary(int id, double alpha, double b, double beta,
                            double lambda_bar, const ReputationParams& rep);

}  // namespace ladderlab
