// Scenario configuration: geometry, spectrum, truncation, Carleman and noise
// parameters, medium descriptor. Parsed from plain key = value text; CLI flags
// override file values.
#pragma once

#include "cpl/carleman.hpp"
#include "cpl/forward.hpp"
#include "cpl/phase.hpp"

namespace cpl {

struct ScenarioConfig {
    // geometry
    double R = 1.0;
    double d = 4.0;   // source depth, x0 = (0,0,-d)
    double L = 0.28;  // slab thickness
    int nx = 21;
    int forward_nx = 41;  // data-generation grid (resolves the inclusions)

    // spectrum
    double kmin = kPi;
    double kmax = 2.0 * kPi;
    int nk = 121;

    // truncation and Carleman parameters
    int N = 7;
    CarlemanParams carleman;

    // phase retrieval
    PhaseRetrievalConfig phase;

    // noise
    double noise = 0.10;
    uint64_t seed = 7;

    // medium: named scenario or explicit primitives
    std::string scenario = "test1";
    std::vector<Inclusion> inclusions;  // used when scenario == "custom"

    std::string out_dir = "out";
    int jobs = 1;

    Vec3 source() const { return {0.0, 0.0, -d}; }
    std::vector<Inclusion> medium_inclusions() const;
    void validate() const;

    // canonical text form; identical configs hash identically
    std::string canonical() const;
    uint64_t hash() const;
};

// Parse `key = value` lines; '#' starts a comment. Unknown keys are rejected.
ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);

// The three published inclusion layouts plus "vacuum".
std::vector<Inclusion> named_scenario(const std::string& name);

}  // namespace cpl
