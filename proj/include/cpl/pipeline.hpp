// Stage orchestration: simulate -> retrieve-phase -> reduce -> invert ->
// evaluate, each persisting a bundle the next stage consumes.
#pragma once

#include "cpl/config.hpp"
#include "cpl/recon.hpp"

namespace cpl {

struct StageOptions {
    bool force = false;       // accept bundles with a mismatched config hash
    bool skip_phase = false;  // feed the exact complex field to reduction
    int checkpoint_every = 0;
};

void stage_simulate(const ScenarioConfig& cfg, const StageOptions& opt = {});
void stage_retrieve_phase(const ScenarioConfig& cfg, const StageOptions& opt = {});
void stage_reduce(const ScenarioConfig& cfg, const StageOptions& opt = {});
void stage_invert(const ScenarioConfig& cfg, const StageOptions& opt = {});
MetricsReport stage_evaluate(const ScenarioConfig& cfg, const StageOptions& opt = {});

// The whole chain; returns the final metrics.
MetricsReport run_pipeline(const ScenarioConfig& cfg, const StageOptions& opt = {});

// Serialized metrics exactly as written to evaluate/metrics.json.
std::string metrics_to_json(const MetricsReport& rep, const ScenarioConfig& cfg);

int log_verbosity();  // from CP_LOG (0 = quiet)
void log_line(int level, const std::string& msg);

}  // namespace cpl
