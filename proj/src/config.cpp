#include "cpl/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cpl/io.hpp"

namespace cpl {

std::vector<Inclusion> named_scenario(const std::string& name) {
    auto cylinder = [](double value, double cx, double cy, double radius, double zc,
                       double hz) {
        Inclusion inc;
        inc.kind = Inclusion::Kind::kCylinder;
        inc.value = value;
        inc.center = {cx, cy, zc};
        inc.extent = {radius, radius, hz};
        return inc;
    };
    auto box = [](double value, Vec3 center, Vec3 half) {
        Inclusion inc;
        inc.kind = Inclusion::Kind::kBox;
        inc.value = value;
        inc.center = center;
        inc.extent = half;
        return inc;
    };
    if (name == "vacuum") return {};
    if (name == "test1") return {cylinder(5.0, 0.0, 0.0, 0.25, -0.65, 0.05)};
    if (name == "test2")
        return {cylinder(5.0, 0.5, 0.0, 0.25, -0.65, 0.05),
                cylinder(4.5, -0.5, 0.0, 0.25, -0.65, 0.05)};
    if (name == "test3")
        // max{0.25|x|, |y -+ 0.5|} < 0.2 means |x| < 0.8, |y -+ 0.5| < 0.2
        return {box(3.2, {0.0, 0.5, -0.65}, {0.8, 0.2, 0.05}),
                box(3.2, {0.0, -0.5, -0.65}, {0.8, 0.2, 0.05})};
    throw std::runtime_error("unknown scenario '" + name + "'");
}

std::vector<Inclusion> ScenarioConfig::medium_inclusions() const {
    if (scenario == "custom") return inclusions;
    return named_scenario(scenario);
}

void ScenarioConfig::validate() const {
    ensure(d > R, "config: need d > R (source outside the domain)");
    ensure(kmax > kmin && kmin > 0.0, "config: need kmax > kmin > 0");
    ensure(nx >= 3 && forward_nx >= 3, "config: grids need at least 3 nodes per axis");
    ensure(nk >= 2, "config: need at least 2 wavenumbers");
    ensure(N >= 1, "config: need N >= 1");
    ensure(noise >= 0.0, "config: need noise >= 0");
    ensure(jobs >= 1, "config: need jobs >= 1");
    ensure(L > 0.0 && L < 2.0 * R, "config: need 0 < L < 2R");
    carleman.validate(R);
    phase.validate();
}

std::string ScenarioConfig::canonical() const {
    std::ostringstream os;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "R = " << num(R) << "\n";
    os << "d = " << num(d) << "\n";
    os << "L = " << num(L) << "\n";
    os << "nx = " << nx << "\n";
    os << "forward_nx = " << forward_nx << "\n";
    os << "kmin = " << num(kmin) << "\n";
    os << "kmax = " << num(kmax) << "\n";
    os << "nk = " << nk << "\n";
    os << "N = " << N << "\n";
    os << "lambda = " << num(carleman.lambda) << "\n";
    os << "r = " << num(carleman.r) << "\n";
    os << "epsilon = " << num(carleman.epsilon) << "\n";
    os << "init_epsilon = " << num(carleman.init_epsilon) << "\n";
    os << "eta = " << num(carleman.eta) << "\n";
    os << "descent_iters = " << carleman.max_iters << "\n";
    os << "descent_grad_tol = " << num(carleman.grad_tol) << "\n";
    os << "precondition = " << (carleman.precondition ? 1 : 0) << "\n";
    os << "cg_iters = " << carleman.cg_max_iters << "\n";
    os << "cg_tol = " << num(carleman.cg_tol) << "\n";
    os << "phase_iters = " << phase.max_iters << "\n";
    os << "phase_grad_tol = " << num(phase.grad_tol) << "\n";
    os << "noise = " << num(noise) << "\n";
    os << "seed = " << seed << "\n";
    os << "scenario = " << scenario << "\n";
    for (const auto& inc : medium_inclusions()) {
        os << "inclusion = " << (inc.kind == Inclusion::Kind::kCylinder ? "cylinder" : "box");
        os << "," << num(inc.value);
        for (double v : inc.center) os << "," << num(v);
        for (double v : inc.extent) os << "," << num(v);
        os << "\n";
    }
    return os.str();
}

uint64_t ScenarioConfig::hash() const { return fnv1a(canonical()); }

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

Inclusion parse_inclusion(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    ensure(parts.size() == 8, "config: inclusion wants kind,value,cx,cy,cz,ex,ey,ez");
    Inclusion inc;
    if (parts[0] == "cylinder")
        inc.kind = Inclusion::Kind::kCylinder;
    else if (parts[0] == "box")
        inc.kind = Inclusion::Kind::kBox;
    else
        throw std::runtime_error("config: unknown inclusion kind '" + parts[0] + "'");
    inc.value = std::stod(parts[1]);
    inc.center = {std::stod(parts[2]), std::stod(parts[3]), std::stod(parts[4])};
    inc.extent = {std::stod(parts[5]), std::stod(parts[6]), std::stod(parts[7])};
    return inc;
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        size_t hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        size_t eq = line.find('=');
        ensure(eq != std::string::npos,
               "config: line " + std::to_string(lineno) + " is not key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key == "R") cfg.R = std::stod(val);
        else if (key == "d") cfg.d = std::stod(val);
        else if (key == "L") cfg.L = std::stod(val);
        else if (key == "nx") cfg.nx = std::stoi(val);
        else if (key == "forward_nx") cfg.forward_nx = std::stoi(val);
        else if (key == "kmin") cfg.kmin = std::stod(val);
        else if (key == "kmax") cfg.kmax = std::stod(val);
        else if (key == "nk") cfg.nk = std::stoi(val);
        else if (key == "N") cfg.N = std::stoi(val);
        else if (key == "lambda") cfg.carleman.lambda = std::stod(val);
        else if (key == "r") cfg.carleman.r = std::stod(val);
        else if (key == "epsilon") cfg.carleman.epsilon = std::stod(val);
        else if (key == "init_epsilon") cfg.carleman.init_epsilon = std::stod(val);
        else if (key == "eta") cfg.carleman.eta = std::stod(val);
        else if (key == "descent_iters") cfg.carleman.max_iters = std::stoi(val);
        else if (key == "descent_grad_tol") cfg.carleman.grad_tol = std::stod(val);
        else if (key == "precondition") cfg.carleman.precondition = std::stoi(val) != 0;
        else if (key == "cg_iters") cfg.carleman.cg_max_iters = std::stoi(val);
        else if (key == "cg_tol") cfg.carleman.cg_tol = std::stod(val);
        else if (key == "phase_iters") cfg.phase.max_iters = std::stoi(val);
        else if (key == "phase_grad_tol") cfg.phase.grad_tol = std::stod(val);
        else if (key == "noise") cfg.noise = std::stod(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "scenario") cfg.scenario = val;
        else if (key == "out") cfg.out_dir = val;
        else if (key == "jobs") cfg.jobs = std::stoi(val);
        else if (key == "inclusion") {
            cfg.inclusions.push_back(parse_inclusion(val));
            cfg.scenario = "custom";
        } else {
            throw std::runtime_error("config: unknown key '" + key + "' on line " +
                                     std::to_string(lineno));
        }
    }
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream is(path);
    ensure(is.good(), "load_config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace cpl
