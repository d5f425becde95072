// Batch front-end for the phaseless reconstruction pipeline.
#include <iostream>

#include "CLI11.hpp"
#include "cpl/pipeline.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::string scenario;
    double noise = -1.0;
    long long seed = -1;
    int jobs = 0;
    std::string out_dir;
    int nx = 0, nk = 0, forward_nx = 0;
    double L = 0.0;
};

cpl::ScenarioConfig resolve_config(const CliOverrides& o) {
    cpl::ScenarioConfig cfg;
    if (!o.config_path.empty()) cfg = cpl::load_config(o.config_path);
    if (!o.scenario.empty()) cfg.scenario = o.scenario;
    if (o.noise >= 0.0) cfg.noise = o.noise;
    if (o.seed >= 0) cfg.seed = static_cast<uint64_t>(o.seed);
    if (o.jobs > 0) cfg.jobs = o.jobs;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.nx > 0) cfg.nx = o.nx;
    if (o.nk > 0) cfg.nk = o.nk;
    if (o.forward_nx > 0) cfg.forward_nx = o.forward_nx;
    if (o.L > 0.0) cfg.L = o.L;
    cfg.validate();
    return cfg;
}

void add_common(CLI::App* app, CliOverrides& o, cpl::StageOptions& s) {
    app->add_option("--config", o.config_path, "configuration file (key = value lines)");
    app->add_option("--scenario", o.scenario, "named scenario: test1|test2|test3|vacuum");
    app->add_option("--noise", o.noise, "noise level delta");
    app->add_option("--seed", o.seed, "RNG seed");
    app->add_option("--jobs", o.jobs, "worker count for per-wavenumber stages");
    app->add_option("--out", o.out_dir, "output directory");
    app->add_option("--nx", o.nx, "inversion grid nodes per axis");
    app->add_option("--nk", o.nk, "wavenumber count");
    app->add_option("--forward-nx", o.forward_nx, "data-generation grid nodes per axis");
    app->add_option("--slab", o.L, "measurement slab thickness L");
    app->add_flag("--force", s.force, "ignore config-hash mismatches in bundles");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carleman-phaseless: coefficient reconstruction from intensity-only data"};
    app.require_subcommand(1);

    CliOverrides o;
    cpl::StageOptions s;

    auto* run = app.add_subcommand("run", "full pipeline");
    add_common(run, o, s);
    run->add_flag("--skip-phase", s.skip_phase, "feed the exact complex field to reduction");
    run->add_option("--checkpoint-every", s.checkpoint_every, "descent checkpoint interval");

    auto* simulate = app.add_subcommand("simulate", "generate synthetic data");
    add_common(simulate, o, s);
    auto* phase = app.add_subcommand("retrieve-phase", "phase retrieval on the slab");
    add_common(phase, o, s);
    auto* reduce = app.add_subcommand("reduce", "frequency dimension reduction");
    add_common(reduce, o, s);
    reduce->add_flag("--skip-phase", s.skip_phase, "use the exact complex field");
    auto* invert = app.add_subcommand("invert", "Carleman-weighted minimization");
    add_common(invert, o, s);
    invert->add_option("--checkpoint-every", s.checkpoint_every,
                       "descent checkpoint interval");
    auto* evaluate = app.add_subcommand("evaluate", "assemble c and report metrics");
    add_common(evaluate, o, s);

    CLI11_PARSE(app, argc, argv);

    try {
        const cpl::ScenarioConfig cfg = resolve_config(o);
        if (run->parsed()) {
            cpl::MetricsReport rep = cpl::run_pipeline(cfg, s);
            std::cout << cpl::metrics_to_json(rep, cfg);
        } else if (simulate->parsed()) {
            cpl::stage_simulate(cfg, s);
        } else if (phase->parsed()) {
            cpl::stage_retrieve_phase(cfg, s);
        } else if (reduce->parsed()) {
            cpl::stage_reduce(cfg, s);
        } else if (invert->parsed()) {
            cpl::stage_invert(cfg, s);
        } else if (evaluate->parsed()) {
            cpl::MetricsReport rep = cpl::stage_evaluate(cfg, s);
            std::cout << cpl::metrics_to_json(rep, cfg);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
