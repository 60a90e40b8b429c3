#include "minsurf/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "minsurf/surface.hpp"

namespace minsurf::cli {

namespace {

namespace fs = std::filesystem;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs a number, got '" + v + "'");
    }
}

int parse_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' needs an integer, got '" + v + "'");
    }
}

json config_to_json(const RunConfig& c) {
    json j;
    j["genus"] = c.genus;
    j["solve_tol"] = c.solve_tol;
    j["period_tol"] = c.period_tol;
    j["quad_tol"] = c.quad_tol;
    j["mesh_density"] = c.mesh_density;
    j["r_min"] = c.r_min ? json(*c.r_min) : json(nullptr);
    j["r_max"] = c.r_max ? json(*c.r_max) : json(nullptr);
    j["out"] = c.out_dir;
    j["seed"] = c.seed_path;
    j["solution"] = c.solution_path;
    j["ply"] = c.write_ply;
    return j;
}

json report_to_json(const orthodisk::ConjugacyReport& r) {
    json j;
    json res = json::object();
    for (std::size_t i = 0; i < r.labels.size(); ++i) res[r.labels[i]] = r.residuals[i];
    j["residuals"] = res;
    j["max"] = r.max_residual;
    return j;
}

json divisor_to_json(const orthodisk::DivisorTable& t, const std::vector<double>& vertices) {
    json rows = json::array();
    for (const auto& e : t.entries) {
        json row;
        row["point"] = e.at_infinity ? json("inf") : json(vertices[e.vertex]);
        row["lifts"] = e.lifts;
        row["order"] = e.order;
        row["cone_angle_over_pi"] = e.cone_angle;
        rows.push_back(row);
    }
    return json{{"entries", rows}, {"degree", t.degree()}};
}

json ends_to_json(const surface::EndReport& r) {
    json a = json::array();
    for (const auto& e : r.ends) {
        a.push_back({{"puncture", e.puncture.label()},
                     {"ord_g", e.ord_g},
                     {"ord_eta", e.ord_eta},
                     {"type", surface::to_string(e.type)},
                     {"growth", e.growth},
                     {"complete", e.complete}});
    }
    return a;
}

json base_report(const std::string& command, const RunConfig& config) {
    json j;
    j["command"] = command;
    j["status"] = "running";
    j["config"] = config_to_json(config);
    j["software"] = {{"name", "minsurf"}, {"version", kVersion}};
    return j;
}

std::string report_path_for(const RunConfig& c, const std::string& command) {
    if (!c.report_path.empty()) return c.report_path;
    return (fs::path(c.out_dir) / ("report-" + command + ".json")).string();
}

void write_json(const json& j, const std::string& path) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

Outcome finish(Outcome o, const std::string& path, const Stopwatch& sw, const std::string& started) {
    o.report["timestamp"]["started_utc"] = started;
    o.report["timestamp"]["elapsed_seconds"] = sw.seconds();
    o.report_path = path;
    write_json(o.report, path);
    return o;
}

bool ends_ok(const surface::EndReport& r) {
    bool cat = false, enn = false, complete = true;
    for (const auto& e : r.ends) {
        if (!e.puncture.at_infinity && e.puncture.z == 0.0 && e.type == surface::EndType::Catenoid) cat = true;
        if (e.puncture.at_infinity && e.type == surface::EndType::Enneper) enn = true;
        complete = complete && e.complete;
    }
    return cat && enn && complete;
}

// Data of the minimal surface built from the stored vertices and Gauss constant.
surface::WeierstrassData weierstrass_from(const angel::SolveResult& r, double gauss_constant) {
    angel::SolveResult s = r;
    s.c1 = gauss_constant * gauss_constant;
    s.c2 = 1.0;
    return surface::assemble(s);
}

// Checks shared by solve and verify; every value is recomputed from the
// vertex vectors and scales.
bool run_checks(const angel::SolveResult& r, double gauss_constant, const RunConfig& c, json& rep) {
    json checks = json::object();
    bool ok = true;
    auto check = [&](const std::string& name, double value, double tol) {
        const bool pass = std::isfinite(value) && value <= tol;
        checks[name] = {{"value", value}, {"tol", tol}, {"pass", pass}};
        ok = ok && pass;
    };

    check("scale_consistency", std::abs(gauss_constant - std::sqrt(r.c1 / r.c2)) / gauss_constant, 1e-12);
    const auto x = angel::geta_orthodisk(r.genus, r.c1, r.t_vector);
    const auto y = angel::ginveta_orthodisk(r.genus, r.c2, r.t_vector);
    double refl = 0;
    const auto a = orthodisk::normalized_vertices(r.t_vector);
    const auto b = orthodisk::normalized_vertices(r.s_vector);
    for (std::size_t i = 0; i < a.size(); ++i) refl = std::max(refl, std::abs(a[i] - b[i]));
    check("reflexivity", refl, c.period_tol);

    const auto conj = orthodisk::conjugacy_report(x, y, c.quad_tol);
    rep["orthodisk_conjugacy"] = report_to_json(conj);
    check("orthodisk_conjugacy", conj.max_residual, c.period_tol);

    const auto dx = orthodisk::divisor(x), dy = orthodisk::divisor(y);
    rep["divisors"] = {{"geta", divisor_to_json(dx, r.t_vector)}, {"ginveta", divisor_to_json(dy, r.t_vector)}};
    const int canonical = 2 * r.genus - 2;
    check("divisor_degree", std::abs(dx.degree() - canonical) + std::abs(dy.degree() - canonical), 0);

    surface::WeierstrassData wd;
    try {
        wd = weierstrass_from(r, gauss_constant);
        checks["divisor_condition"] = {{"pass", true}};
    } catch (const DivisorMismatch& e) {
        checks["divisor_condition"] = {{"pass", false}, {"message", e.what()}};
        rep["checks"] = checks;
        return false;
    }
    const auto direct = surface::verify_periods(wd, std::min(1e-12, c.quad_tol * 10));
    rep["verify_periods"] = report_to_json(direct);
    check("verify_periods", direct.max_residual, c.period_tol);

    const auto ends = surface::classify_ends(wd);
    rep["ends"] = ends_to_json(ends);
    const bool ends_pass = ends_ok(ends);
    checks["end_classification"] = {{"pass", ends_pass}};
    ok = ok && ends_pass;

    const int deg = surface::gauss_degree(wd);
    rep["curvature"] = {{"gauss_degree", deg}, {"expected_total_curvature", -4 * M_PI * deg}};
    rep["checks"] = checks;
    return ok;
}

}  // namespace

void RunConfig::validate() const {
    if (genus < 1) throw ConfigError("genus must be ≥ 1");
    if (!(solve_tol > 0) || !(period_tol > 0) || !(quad_tol > 0)) throw ConfigError("tolerances must be positive");
    if (mesh_density < 8 || mesh_density % 2 != 0) throw ConfigError("mesh density must be an even number >= 8");
    if (r_min && !(*r_min > 0)) throw ConfigError("r_min must be positive");
    if (r_min && r_max && !(*r_max > *r_min)) throw ConfigError("r_max must exceed r_min");
}

RunConfig read_config_file(const std::string& path, RunConfig c) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string v = trim(line.substr(eq + 1));
        if (key == "genus") {
            c.genus = parse_int(key, v);
        } else if (key == "solve_tol") {
            c.solve_tol = parse_double(key, v);
        } else if (key == "period_tol") {
            c.period_tol = parse_double(key, v);
        } else if (key == "quad_tol") {
            c.quad_tol = parse_double(key, v);
        } else if (key == "mesh_density") {
            c.mesh_density = parse_int(key, v);
        } else if (key == "r_min") {
            c.r_min = parse_double(key, v);
        } else if (key == "r_max") {
            c.r_max = parse_double(key, v);
        } else if (key == "out") {
            c.out_dir = v;
        } else if (key == "report") {
            c.report_path = v;
        } else if (key == "seed") {
            c.seed_path = v;
        } else if (key == "solution") {
            c.solution_path = v;
        } else if (key == "ply") {
            c.write_ply = (v == "true" || v == "1" || v == "yes");
        } else {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
    }
    return c;
}

json solution_to_json(const angel::SolveResult& r) {
    json j;
    j["format"] = "minsurf-solution";
    j["version"] = 1;
    j["genus"] = r.genus;
    j["t_vector"] = r.t_vector;
    j["s_vector"] = r.s_vector;
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["gauss_constant"] = r.gauss_constant();
    j["residual_reflexive"] = r.residual_reflexive;
    j["residual_conjugate"] = r.residual_conjugate;
    j["iterations"] = r.iterations;
    j["pair"] = {{"l_minus1", r.pair.base.l_minus1},
                 {"l0", r.pair.base.l0},
                 {"l_last", r.pair.base.l_last},
                 {"mu", r.pair.base.mu},
                 {"stairs", r.pair.stairs}};
    return j;
}

angel::SolveResult solution_from_json(const json& j) {
    angel::SolveResult r;
    try {
        if (j.at("format").get<std::string>() != "minsurf-solution") throw ConfigError("not a solution file");
        r.genus = j.at("genus").get<int>();
        r.t_vector = j.at("t_vector").get<std::vector<double>>();
        r.s_vector = j.at("s_vector").get<std::vector<double>>();
        r.c1 = j.at("c1").get<double>();
        r.c2 = j.at("c2").get<double>();
        r.residual_reflexive = j.value("residual_reflexive", 0.0);
        r.residual_conjugate = j.value("residual_conjugate", 0.0);
        r.iterations = j.value("iterations", 0);
        const auto& p = j.at("pair");
        angel::PairBase base{p.at("l_minus1").get<double>(), p.at("l0").get<double>(), p.at("l_last").get<double>(),
                             p.at("mu").get<double>()};
        r.pair = angel::build_polygon_pair(base, p.at("stairs").get<std::vector<double>>());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed solution: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("malformed solution: ") + e.what());
    }
    const std::size_t n = static_cast<std::size_t>(2 * r.genus + 2);
    if (r.genus < 1 || r.t_vector.size() != n || r.s_vector.size() != n) {
        throw ConfigError("solution vectors do not match the genus");
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(r.t_vector[i] > r.t_vector[i - 1]) || !(r.s_vector[i] > r.s_vector[i - 1])) {
            throw ConfigError("solution vertices must increase");
        }
    }
    if (!(r.c1 > 0) || !(r.c2 > 0)) throw ConfigError("solution scales must be positive");
    return r;
}

angel::SolveResult read_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read solution file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + path + ": " + e.what());
    }
    return solution_from_json(j);
}

Outcome cmd_solve(const RunConfig& config) {
    const Stopwatch sw;
    const std::string started = utc_now();
    Outcome out;
    out.report = base_report("solve", config);
    const std::string path = report_path_for(config, "solve");
    config.validate();

    std::optional<angel::SolveResult> seed;
    if (!config.seed_path.empty()) {
        seed = read_solution(config.seed_path);
        if (seed->genus >= config.genus) throw ConfigError("seed genus must be below the requested genus");
    }
    angel::SolveOptions so;
    so.quad_tol = config.quad_tol;
    std::vector<angel::TracePoint> trace;
    so.on_iteration = [&](const angel::TracePoint& t) { trace.push_back(t); };
    angel::SolveResult r;
    try {
        if (config.genus == 1) {
            r = angel::solve_genus1(std::min(config.solve_tol, 1e-12), so);
        } else {
            if (!seed) seed = angel::solve_genus1(1e-12, so);
            r = angel::solve_genus_p(config.genus, seed, config.solve_tol, so);
        }
    } catch (const NoConvergence& e) {
        json landscape = json::array();
        for (const auto& t : trace) {
            landscape.push_back({{"iteration", t.iteration}, {"residual", t.residual}, {"step", t.step}});
        }
        out.report["status"] = "no_convergence";
        out.report["error"] = e.what();
        out.report["best_iterate"] = e.best_iterate();
        out.report["best_residual"] = e.residual();
        out.report["landscape"] = landscape;
        out.exit_code = kNoConvergence;
        return finish(out, path, sw, started);
    }
    const double t_solve = sw.seconds();

    const std::string sol_path = (fs::path(config.out_dir) / ("solution-genus" + std::to_string(r.genus) + ".json")).string();
    const json sol = solution_to_json(r);
    write_json(sol, sol_path);
    out.report["solution_file"] = sol_path;
    out.report["solve"] = sol;
    const bool ok = run_checks(r, r.gauss_constant(), config, out.report);
    out.report["status"] = ok ? "success" : "verify_failed";
    out.exit_code = ok ? kSuccess : kVerifyFailure;
    // Timings vary between runs; they live under the timestamp entry.
    out.report["timestamp"]["solve_seconds"] = t_solve;
    out.report["timestamp"]["verify_seconds"] = sw.seconds() - t_solve;
    return finish(out, path, sw, started);
}

Outcome cmd_verify(const RunConfig& config) {
    const Stopwatch sw;
    const std::string started = utc_now();
    Outcome out;
    out.report = base_report("verify", config);
    const std::string path = report_path_for(config, "verify");
    config.validate();
    if (config.solution_path.empty()) throw ConfigError("verify needs a solution file");
    std::ifstream probe(config.solution_path);
    if (!probe) throw ConfigError("cannot read solution file " + config.solution_path);
    json j;
    try {
        j = json::parse(probe);
    } catch (const json::exception& e) {
        throw ConfigError("cannot parse " + config.solution_path + ": " + e.what());
    }
    const auto r = solution_from_json(j);
    double gc = 0;
    try {
        gc = j.at("gauss_constant").get<double>();
    } catch (const json::exception&) {
        throw ConfigError("solution has no gauss_constant");
    }
    if (!(gc > 0)) throw ConfigError("gauss_constant must be positive");
    out.report["solution_file"] = config.solution_path;
    const bool ok = run_checks(r, gc, config, out.report);
    out.report["status"] = ok ? "success" : "verify_failed";
    out.exit_code = ok ? kSuccess : kVerifyFailure;
    return finish(out, path, sw, started);
}

Outcome cmd_mesh(const RunConfig& config) {
    const Stopwatch sw;
    const std::string started = utc_now();
    Outcome out;
    out.report = base_report("mesh", config);
    const std::string path = report_path_for(config, "mesh");
    config.validate();
    if (config.solution_path.empty()) throw ConfigError("mesh needs a solution file");
    const auto r = read_solution(config.solution_path);
    out.report["solution_file"] = config.solution_path;

    const auto wd = weierstrass_from(r, r.gauss_constant());
    const auto pre = surface::verify_periods(wd, 1e-12);
    out.report["verify_periods"] = report_to_json(pre);
    const double pre_tol = std::min(config.period_tol, 1e-6);
    if (!(pre.max_residual <= pre_tol)) {
        out.report["status"] = "verify_failed";
        out.exit_code = kVerifyFailure;
        return finish(out, path, sw, started);
    }

    surface::MeshOptions mo;
    mo.angular = config.mesh_density;
    mo.r_min = config.r_min;
    mo.r_max = config.r_max;
    mo.quad_tol = std::max(config.quad_tol, 1e-12);
    mo.path_tol = 1e-6;
    surface::SurfaceMesh mesh;
    try {
        mesh = surface::immerse(wd, mo);
    } catch (const PeriodLeak& e) {
        std::cerr << "period leak " << e.leak() << "\n";
        out.report["status"] = "period_leak";
        out.report["period_leak"] = e.leak();
        out.exit_code = kPeriodLeak;
        return finish(out, path, sw, started);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const auto d = surface::diagnostics(wd, mesh);
    const auto trunc = surface::default_truncation(wd);
    const std::string stem = "mesh-genus" + std::to_string(r.genus);
    const std::string obj = (fs::path(config.out_dir) / (stem + ".obj")).string();
    fs::create_directories(config.out_dir);
    surface::write_obj(mesh, obj);
    json files = {{"obj", obj}};
    if (config.write_ply) {
        const std::string ply = (fs::path(config.out_dir) / (stem + ".ply")).string();
        surface::write_ply(mesh, ply);
        files["ply"] = ply;
    }
    double lmin = d.conformal_factor.front(), lmax = lmin;
    for (double x : d.conformal_factor) {
        lmin = std::min(lmin, x);
        lmax = std::max(lmax, x);
    }
    out.report["mesh"] = {{"files", files},
                          {"vertices", mesh.positions.size()},
                          {"triangles", d.triangles},
                          {"period_leak", d.period_leak},
                          {"euler_characteristic", d.euler_characteristic},
                          {"boundary_loops", d.boundary_loops},
                          {"r_min", config.r_min.value_or(trunc.first)},
                          {"r_max", config.r_max.value_or(trunc.second)},
                          {"angular", config.mesh_density}};
    out.report["curvature"] = {{"gauss_degree", d.gauss_degree},
                               {"total_curvature", d.total_curvature},
                               {"expected_total_curvature", d.expected_curvature},
                               {"relative_error", d.curvature_relative_error}};
    out.report["metric"] = {{"conformal_factor_min", lmin},
                            {"conformal_factor_max", lmax},
                            {"anisotropy_max", d.anisotropy_max},
                            {"anisotropy_median", d.anisotropy_median}};
    out.report["ends"] = ends_to_json(surface::classify_ends(wd));
    out.report["status"] = "success";
    std::cerr << "period leak " << d.period_leak << ", " << d.triangles << " triangles\n";
    return finish(out, path, sw, started);
}

int run(int argc, char** argv) {
    CLI::App app{"Angel minimal surfaces: solve, verify and mesh"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig flags;
    std::string config_path;
    std::vector<double> truncate;
    auto* o_config = app.add_option("--config", config_path, "key = value configuration file");
    auto* o_genus = app.add_option("--genus", flags.genus, "genus p >= 1");
    auto* o_tol = app.add_option("--tol", flags.solve_tol, "solver tolerance");
    auto* o_ptol = app.add_option("--period-tol", flags.period_tol, "period and verification tolerance");
    auto* o_qtol = app.add_option("--quad-tol", flags.quad_tol, "quadrature tolerance");
    auto* o_seed = app.add_option("--seed", flags.seed_path, "solution file of a lower genus");
    auto* o_out = app.add_option("--out", flags.out_dir, "output directory");
    auto* o_density = app.add_option("--mesh-density", flags.mesh_density, "angular samples per sheet");
    auto* o_trunc = app.add_option("--truncate", truncate, "r_min r_max")->expected(2);
    auto* o_report = app.add_option("--report", flags.report_path, "report path");
    auto* o_ply = app.add_flag("--ply", flags.write_ply, "also write binary PLY");
    auto* solve = app.add_subcommand("solve", "solve the period problem up to --genus");
    auto* verify = app.add_subcommand("verify", "re-derive every check from a solution file");
    auto* mesh = app.add_subcommand("mesh", "integrate and triangulate a solution");
    std::string solution;
    verify->add_option("solution", solution, "solution file")->required();
    mesh->add_option("solution", solution, "solution file")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        RunConfig c = o_config->count() ? read_config_file(config_path) : RunConfig{};
        if (o_genus->count()) c.genus = flags.genus;
        if (o_tol->count()) c.solve_tol = flags.solve_tol;
        if (o_ptol->count()) c.period_tol = flags.period_tol;
        if (o_qtol->count()) c.quad_tol = flags.quad_tol;
        if (o_seed->count()) c.seed_path = flags.seed_path;
        if (o_out->count()) c.out_dir = flags.out_dir;
        if (o_density->count()) c.mesh_density = flags.mesh_density;
        if (o_report->count()) c.report_path = flags.report_path;
        if (o_ply->count()) c.write_ply = true;
        if (o_trunc->count()) {
            c.r_min = truncate.at(0);
            c.r_max = truncate.at(1);
        }
        if (!solution.empty()) c.solution_path = solution;

        Outcome o;
        if (solve->parsed()) {
            o = cmd_solve(c);
        } else if (verify->parsed()) {
            o = cmd_verify(c);
        } else {
            o = cmd_mesh(c);
        }
        if (o.exit_code != kSuccess) std::cerr << "status: " << o.report["status"].get<std::string>() << "\n";
        std::cout << o.report_path << "\n";
        return o.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const NoConvergence& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
}

}  // namespace minsurf::cli
