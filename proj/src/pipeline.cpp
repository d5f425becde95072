#include "cpl/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "cpl/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cpl {

int log_verbosity() {
    const char* env = std::getenv("CP_LOG");
    if (!env) return 0;
    return std::atoi(env);
}

void log_line(int level, const std::string& msg) {
    if (log_verbosity() >= level) std::cerr << "[cpl] " << msg << "\n";
}

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    ensure(os.good(), "cannot open " + path);
    os << text;
}

std::string read_text(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    ensure(is.good(), "missing expected file " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_manifest(const std::string& dir, const std::string& stage,
                    const ScenarioConfig& cfg, json extra = json::object()) {
    json j = extra;
    j["stage"] = stage;
    j["config_hash"] = std::to_string(cfg.hash());
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
}

json check_manifest(const std::string& dir, const std::string& stage,
                    const ScenarioConfig& cfg, bool force) {
    const std::string path = dir + "/manifest.json";
    ensure(fs::exists(path), "stage '" + stage + "' bundle missing: expected " + path);
    json j = json::parse(read_text(path));
    if (!force) {
        const std::string want = std::to_string(cfg.hash());
        ensure(j.value("config_hash", "") == want,
               "config hash mismatch for bundle " + path + " (use --force to override)");
    }
    return j;
}

struct Geometry {
    Grid3D grid;
    SlabIndex slab;
};

Geometry make_geometry(const ScenarioConfig& cfg) {
    Geometry g{build_grid(cfg.R, cfg.nx), {}};
    g.slab = SlabIndex::build(g.grid, cfg.L);
    return g;
}

std::vector<Box3<Complex>> load_slab_stack(const std::string& path, size_t expect) {
    FieldBundle b = load_fields(path);
    ensure(b.is_complex && b.cfields.size() == expect, "unexpected layout in " + path);
    return std::move(b.cfields);
}

}  // namespace

void stage_simulate(const ScenarioConfig& cfg, const StageOptions& opt) {
    (void)opt;
    cfg.validate();
    const Geometry geo = make_geometry(cfg);
    ensure(geo.slab.n_layers >= 3,
           "simulate: slab thinner than 3 node layers; increase L or nx");
    const auto ks = uniform_wavenumbers(cfg.kmin, cfg.kmax, cfg.nk);

    const Grid3D gfwd = build_grid(cfg.R, cfg.forward_nx);
    const MediumModel medium = MediumModel::build(gfwd, cfg.medium_inclusions());
    log_line(1, "simulate: support nodes on the forward grid: " +
                    std::to_string([&] {
                        size_t c = 0;
                        for (double v : medium.c.a)
                            if (v > 1.0) ++c;
                        return c;
                    }()));

    auto [noiseless, ustar] =
        measure_on_grid(medium, geo.grid, geo.slab, cfg.source(), ks, 1e-8, cfg.jobs);
    PhaselessData noisy = add_noise(noiseless, cfg.noise, cfg.seed);

    const std::string dir = cfg.out_dir + "/data";
    fs::create_directories(dir);
    save_fields(dir + "/ustar.fld", cfg.R, ustar.u);
    std::vector<RealField> fboxes;
    for (auto& box : noisy.f) {
        RealField rf(box.nx, box.ny, box.nz);
        rf.a = box.a;
        fboxes.push_back(std::move(rf));
    }
    save_fields(dir + "/f.fld", cfg.R, fboxes);

    // inversion-grid sample of the true medium, for visualization
    const MediumModel m_inv = MediumModel::build(geo.grid, cfg.medium_inclusions());
    save_fields(dir + "/ctrue_inv.fld", cfg.R, std::vector<RealField>{m_inv.c});

    json extra;
    extra["ks"] = ks;
    extra["slab_layers"] = geo.slab.n_layers;
    extra["noise"] = cfg.noise;
    extra["seed"] = cfg.seed;
    write_manifest(dir, "simulate", cfg, extra);
}

void stage_retrieve_phase(const ScenarioConfig& cfg, const StageOptions& opt) {
    cfg.validate();
    const Geometry geo = make_geometry(cfg);
    const auto ks = uniform_wavenumbers(cfg.kmin, cfg.kmax, cfg.nk);
    const std::string data_dir = cfg.out_dir + "/data";
    check_manifest(data_dir, "simulate", cfg, opt.force);

    FieldBundle fb = load_fields(data_dir + "/f.fld");
    ensure(!fb.is_complex && fb.rfields.size() == ks.size(),
           "retrieve-phase: unexpected layout in f.fld");

    std::vector<Box3<double>> f(ks.size());
    for (size_t kk = 0; kk < ks.size(); ++kk) {
        f[kk] = Box3<double>(fb.nx, fb.ny, fb.nz);
        f[kk].a = fb.rfields[kk].a;
    }

    SlabStack uphase;
    uphase.ks = ks;
    uphase.u.assign(ks.size(), Box3<Complex>(fb.nx, fb.ny, fb.nz));
    std::vector<PhaseResult> results(ks.size());

    auto work = [&](size_t a, size_t b) {
        for (size_t kk = a; kk < b; ++kk) {
            results[kk] = retrieve_phase(f[kk], ks[kk], geo.grid, cfg.source(), cfg.phase);
            uphase.u[kk] = results[kk].u;
        }
    };
    const int nth = std::max(1, std::min<int>(cfg.jobs, static_cast<int>(ks.size())));
    if (nth == 1) {
        work(0, ks.size());
    } else {
        std::vector<std::thread> pool;
        size_t chunk = (ks.size() + nth - 1) / nth;
        for (int w = 0; w < nth; ++w) {
            size_t a = w * chunk, b = std::min(ks.size(), a + chunk);
            if (a < b) pool.emplace_back(work, a, b);
        }
        for (auto& th : pool) th.join();
    }

    const std::string dir = cfg.out_dir + "/phase";
    fs::create_directories(dir);
    save_fields(dir + "/uphase.fld", cfg.R, uphase.u);
    json log = json::array();
    for (size_t kk = 0; kk < ks.size(); ++kk)
        log.push_back({{"k", ks[kk]},
                       {"iterations", results[kk].iters},
                       {"J_initial", results[kk].J0},
                       {"J_final", results[kk].J},
                       {"grad_norm", results[kk].grad_norm},
                       {"converged", results[kk].converged}});
    write_text(dir + "/log.json", log.dump(2) + "\n");
    write_manifest(dir, "retrieve-phase", cfg);
}

void stage_reduce(const ScenarioConfig& cfg, const StageOptions& opt) {
    cfg.validate();
    const Geometry geo = make_geometry(cfg);
    const auto ks = uniform_wavenumbers(cfg.kmin, cfg.kmax, cfg.nk);

    SlabStack stack;
    stack.ks = ks;
    if (opt.skip_phase) {
        const std::string data_dir = cfg.out_dir + "/data";
        check_manifest(data_dir, "simulate", cfg, opt.force);
        stack.u = load_slab_stack(data_dir + "/ustar.fld", ks.size());
    } else {
        const std::string phase_dir = cfg.out_dir + "/phase";
        check_manifest(phase_dir, "retrieve-phase", cfg, opt.force);
        stack.u = load_slab_stack(phase_dir + "/uphase.fld", ks.size());
    }

    const BasisSystem basis = build_basis(cfg.kmin, cfg.kmax, cfg.N);
    CauchyData cd = extract_cauchy(stack, geo.grid);
    CoefficientStack cs;
    cs.N = cfg.N;
    std::tie(cs.g_m, cs.h_m) = cauchy_coefficients(cd, basis, geo.grid, cfg.source());
    complement_data(cs, geo.grid);

    const std::string dir = cfg.out_dir + "/reduce";
    fs::create_directories(dir);
    save_fields(dir + "/gm.fld", cfg.R, cs.g_m);
    save_fields(dir + "/hm.fld", cfg.R, cs.h_m);
    json extra;
    extra["N"] = cfg.N;
    extra["quadrature"] = "trapezoid";
    extra["unwrap_anchor"] = "principal value at kmin";
    extra["skip_phase"] = opt.skip_phase;
    write_manifest(dir, "reduce", cfg, extra);
}

void stage_invert(const ScenarioConfig& cfg, const StageOptions& opt) {
    cfg.validate();
    const Geometry geo = make_geometry(cfg);
    const std::string reduce_dir = cfg.out_dir + "/reduce";
    check_manifest(reduce_dir, "reduce", cfg, opt.force);

    CoefficientStack cs;
    cs.N = cfg.N;
    cs.g_m = load_slab_stack(reduce_dir + "/gm.fld", cfg.N);
    cs.h_m = load_slab_stack(reduce_dir + "/hm.fld", cfg.N);
    complement_data(cs, geo.grid);

    const BasisSystem basis = build_basis(cfg.kmin, cfg.kmax, cfg.N);
    const ReducedTensors tensors = compute_tensors(basis);
    CarlemanProblem prob(geo.grid, tensors, cs, cfg.source(), cfg.carleman);

    InitResult init = init_guess(prob);
    log_line(1, "invert: init CG iterations " + std::to_string(init.iters) +
                    ", residual " + std::to_string(init.rel_residual));
    // a partially converged initializer must not be worse than a cold start
    const double J_init = eval_functional(init.candidate, prob);
    const double J_zero = eval_functional(Candidate::zeros(geo.grid, cfg.N), prob);
    if (J_zero < J_init) {
        log_line(1, "invert: zero start beats the initializer, using it");
        init.candidate = Candidate::zeros(geo.grid, cfg.N);
    }

    const std::string dir = cfg.out_dir + "/invert";
    fs::create_directories(dir);
    IterateHook hook;
    if (opt.checkpoint_every > 0) {
        hook = [&](int it, const Candidate& c) {
            if (it % opt.checkpoint_every == 0)
                save_fields(dir + "/checkpoint_" + std::to_string(it) + ".fld", cfg.R, c.phi);
        };
    }
    MinimizeResult res = minimize(init.candidate, prob, hook);

    save_fields(dir + "/phi.fld", cfg.R, res.candidate.phi);
    {
        std::ofstream os(dir + "/descent.jsonl");
        for (const auto& rec : res.log) {
            json j = {{"iter", rec.iter},
                      {"J", rec.J},
                      {"interior", rec.blocks.interior},
                      {"gamma", rec.blocks.gamma},
                      {"sidewall", rec.blocks.sidewall},
                      {"reg", rec.blocks.reg},
                      {"grad_norm", rec.grad_norm},
                      {"eta", rec.eta}};
            os << j.dump() << "\n";
        }
    }

    // quick convexity diagnostic around the returned candidate
    int bregman_failures = 0;
    {
        Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
        const double amp = 0.01;
        for (int trial = 0; trial < 10; ++trial) {
            Candidate u = res.candidate, w = res.candidate;
            for (int n = 0; n < cfg.N; ++n)
                for (size_t p = 0; p < u.phi[n].size(); ++p) {
                    u.phi[n].a[p] += amp * Complex(rng.symmetric(), rng.symmetric());
                    w.phi[n].a[p] += amp * Complex(rng.symmetric(), rng.symmetric());
                }
            BregmanSample s = bregman_probe(prob, u, w);
            if (s.lhs < s.rhs) ++bregman_failures;
        }
    }
    if (bregman_failures > 0)
        log_line(0, "invert: Bregman probe failures: " + std::to_string(bregman_failures) +
                        "/10 (weight lambda = " + std::to_string(cfg.carleman.lambda) + ")");

    json extra;
    extra["init_cg_iterations"] = init.iters;
    extra["init_cg_residual"] = init.rel_residual;
    extra["descent_iterations"] = static_cast<int>(res.log.size()) - 1;
    extra["final_J"] = res.final_J;
    extra["final_grad_norm"] = res.final_grad_norm;
    extra["converged"] = res.converged;
    extra["bregman_failures"] = bregman_failures;
    write_manifest(dir, "invert", cfg, extra);
}

std::string metrics_to_json(const MetricsReport& rep, const ScenarioConfig& cfg) {
    json j;
    j["config_hash"] = std::to_string(cfg.hash());
    j["seed"] = cfg.seed;
    j["scenario"] = cfg.scenario;
    j["max_value"] = rep.max_value;
    j["max_location"] = {rep.max_location[0], rep.max_location[1], rep.max_location[2]};
    j["threshold"] = rep.threshold;
    j["true_max"] = rep.true_max;
    j["peak_relative_error"] = rep.peak_relative_error;
    json comps = json::array();
    for (size_t ci = 0; ci < rep.components.size(); ++ci) {
        const auto& c = rep.components[ci];
        json jc = {{"max_value", c.max_value},
                   {"max_location", {c.max_location[0], c.max_location[1], c.max_location[2]}},
                   {"centroid", {c.centroid[0], c.centroid[1], c.centroid[2]}},
                   {"node_count", c.node_count},
                   {"bbox_min", {c.bbox_min[0], c.bbox_min[1], c.bbox_min[2]}},
                   {"bbox_max", {c.bbox_max[0], c.bbox_max[1], c.bbox_max[2]}}};
        if (ci < rep.component_relative_errors.size())
            jc["relative_error"] = rep.component_relative_errors[ci];
        comps.push_back(jc);
    }
    j["components"] = comps;
    return j.dump(2) + "\n";
}

MetricsReport stage_evaluate(const ScenarioConfig& cfg, const StageOptions& opt) {
    cfg.validate();
    const Geometry geo = make_geometry(cfg);
    const std::string invert_dir = cfg.out_dir + "/invert";
    check_manifest(invert_dir, "invert", cfg, opt.force);

    FieldBundle pb = load_fields(invert_dir + "/phi.fld");
    ensure(pb.is_complex && static_cast<int>(pb.cfields.size()) == cfg.N,
           "evaluate: unexpected layout in phi.fld");
    Candidate phi;
    phi.phi = std::move(pb.cfields);

    const BasisSystem basis = build_basis(cfg.kmin, cfg.kmax, cfg.N);
    const auto ks = uniform_wavenumbers(cfg.kmin, cfg.kmax, cfg.nk);
    auto v = assemble_v(phi, basis, ks);
    ReconstructionResult rec = recover_c(v, geo.grid, cfg.source(), ks);

    const MediumModel truth = MediumModel::build(geo.grid, cfg.medium_inclusions());
    MetricsReport rep = metrics(rec, geo.grid, &truth);

    const std::string dir = cfg.out_dir + "/evaluate";
    fs::create_directories(dir);
    save_fields(dir + "/c_comp.fld", cfg.R, std::vector<RealField>{rec.c});
    save_vtk(dir + "/c_comp.vtk", geo.grid,
             {{"c_comp", &rec.c}, {"c_true", &truth.c}});
    save_csv_slice(dir + "/c_comp_slice.csv", geo.grid, rec.c, -0.65);
    write_text(dir + "/metrics.json", metrics_to_json(rep, cfg));
    write_manifest(dir, "evaluate", cfg);
    return rep;
}

MetricsReport run_pipeline(const ScenarioConfig& cfg, const StageOptions& opt) {
    stage_simulate(cfg, opt);
    if (!opt.skip_phase) stage_retrieve_phase(cfg, opt);
    stage_reduce(cfg, opt);
    stage_invert(cfg, opt);
    return stage_evaluate(cfg, opt);
}

}  // namespace cpl
