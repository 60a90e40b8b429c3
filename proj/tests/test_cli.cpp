#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "minsurf/cli.hpp"

using namespace minsurf;
using cli::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("minsurf_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Runs the command-line tool and captures its streams.
Run tool(const std::string& args) {
    const char* exe = std::getenv("MINSURF_TOOL");
    REQUIRE_MESSAGE(exe != nullptr, "MINSURF_TOOL must point at the minsurf executable");
    const auto dir = fs::temp_directory_path();
    const auto out = dir / "minsurf_cli_stdout";
    const auto err = dir / "minsurf_cli_stderr";
    const std::string cmd = std::string(exe) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

json without_timestamp(json j) {
    j.erase("timestamp");
    return j;
}

}  // namespace

TEST_CASE("config validation") {
    cli::RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.genus = 0;
    CHECK_THROWS_WITH_AS(c.validate(), "genus must be ≥ 1", cli::ConfigError);
    c = {};
    c.solve_tol = 0;
    CHECK_THROWS_AS(c.validate(), cli::ConfigError);
    c = {};
    c.mesh_density = 0;
    CHECK_THROWS_AS(c.validate(), cli::ConfigError);
    c = {};
    c.r_min = 2.0;
    c.r_max = 1.0;
    CHECK_THROWS_AS(c.validate(), cli::ConfigError);
}

TEST_CASE("config file parsing") {
    const auto dir = scratch("config");
    const auto path = (dir / "run.cfg").string();
    std::ofstream(path) << "# comment\ngenus = 3\nsolve_tol = 1e-9\nmesh_density = 64\nout = results\nply = true\n";
    const auto c = cli::read_config_file(path);
    CHECK(c.genus == 3);
    CHECK(c.solve_tol == 1e-9);
    CHECK(c.mesh_density == 64);
    CHECK(c.out_dir == "results");
    CHECK(c.write_ply);
    std::ofstream(path) << "colour = blue\n";
    CHECK_THROWS_AS(cli::read_config_file(path), cli::ConfigError);
    std::ofstream(path) << "genus = two\n";
    CHECK_THROWS_AS(cli::read_config_file(path), cli::ConfigError);
    CHECK_THROWS_AS(cli::read_config_file((dir / "missing.cfg").string()), cli::ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("solution JSON round trip") {
    const auto dir = scratch("roundtrip");
    cli::RunConfig c;
    c.genus = 2;
    c.out_dir = dir.string();
    const auto o = cli::cmd_solve(c);
    REQUIRE(o.exit_code == cli::kSuccess);
    const auto path = dir / "solution-genus2.json";
    const auto r = cli::read_solution(path.string());
    CHECK(cli::solution_to_json(r) == json::parse(slurp(path)));
    CHECK(r.genus == 2);
    CHECK(r.t_vector.size() == 6);
    fs::remove_all(dir);
}

TEST_CASE("solve then verify through the command line") {
    const auto dir = scratch("pipeline");
    const std::string out = " --out " + dir.string();

    auto r = tool("solve --genus 1" + out);
    CHECK(r.code == 0);
    CHECK(r.out == (dir / "report-solve.json").string() + "\n");
    const json rep = json::parse(slurp(dir / "report-solve.json"));
    CHECK(rep["status"] == "success");
    CHECK(rep["solve"]["residual_conjugate"].get<double>() < 1e-8);

    r = tool("solve --genus 2" + out);
    CHECK(r.code == 0);
    const auto sol2 = (dir / "solution-genus2.json").string();
    CHECK(tool("verify " + sol2 + out).code == 0);

    r = tool("solve --genus 3 --seed " + sol2 + out);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "solution-genus3.json"));

    // Perturbed Gauss constant and perturbed scale both fail verification.
    for (const char* key : {"gauss_constant", "c1"}) {
        json j = json::parse(slurp(sol2));
        j[key] = j[key].get<double>() * 1.01;
        const auto bad = (dir / (std::string("bad-") + key + ".json")).string();
        std::ofstream(bad) << j.dump(2);
        CAPTURE(key);
        CHECK(tool("verify " + bad + out).code == 3);
    }

    const auto corrupt = (dir / "corrupt.json").string();
    std::ofstream(corrupt) << slurp(sol2).substr(0, 100);
    CHECK(tool("verify " + corrupt + out).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("configuration errors exit with code 1") {
    const auto dir = scratch("errors");
    const std::string out = " --out " + dir.string();
    auto r = tool("solve --genus 0" + out);
    CHECK(r.code == 1);
    CHECK(r.err.find("genus must be ≥ 1") != std::string::npos);
    CHECK(r.out.empty());
    CHECK(tool("frobnicate").code == 1);
    CHECK(tool("verify" + out).code == 1);
    CHECK(tool("solve --genus 1 --tol 0" + out).code == 1);

    REQUIRE(tool("solve --genus 1" + out).code == 0);
    CHECK(tool("mesh " + (dir / "solution-genus1.json").string() + " --mesh-density 0" + out).code == 1);
    fs::remove_all(dir);
}

TEST_CASE("flags override the config file") {
    const auto dir = scratch("override");
    const auto cfg = (dir / "run.cfg").string();
    std::ofstream(cfg) << "genus = 4\nout = " << (dir / "from-config").string() << "\n";
    REQUIRE(tool("--config " + cfg + " solve --genus 1").code == 0);
    CHECK(fs::exists(dir / "from-config" / "solution-genus1.json"));
    CHECK(!fs::exists(dir / "from-config" / "solution-genus4.json"));
    fs::remove_all(dir);
}

TEST_CASE("repeated runs are identical") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    REQUIRE(tool("solve --genus 2 --out " + a.string()).code == 0);
    REQUIRE(tool("solve --genus 2 --out " + b.string()).code == 0);
    CHECK(slurp(a / "solution-genus2.json") == slurp(b / "solution-genus2.json"));
    const auto ra = json::parse(slurp(a / "report-solve.json"));
    const auto rb = json::parse(slurp(b / "report-solve.json"));
    CHECK(without_timestamp(ra)["solve"] == without_timestamp(rb)["solve"]);
    CHECK(without_timestamp(ra)["checks"] == without_timestamp(rb)["checks"]);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("mesh of the genus-1 solution") {
    const auto dir = scratch("mesh");
    const std::string out = " --out " + dir.string();
    REQUIRE(tool("solve --genus 1" + out).code == 0);
    const auto sol = (dir / "solution-genus1.json").string();
    const auto r = tool("mesh " + sol + " --ply" + out);
    CHECK(r.code == 0);
    CHECK(r.err.find("period leak") != std::string::npos);
    const auto obj = slurp(dir / "mesh-genus1.obj");
    std::size_t faces = 0;
    for (std::size_t p = obj.find("\nf "); p != std::string::npos; p = obj.find("\nf ", p + 1)) ++faces;
    CHECK(faces > 10000);
    CHECK(fs::exists(dir / "mesh-genus1.ply"));
    const json rep = json::parse(slurp(dir / "report-mesh.json"));
    CHECK(rep["mesh"]["period_leak"].get<double>() < 1e-5);

    // A second run writes the same OBJ byte for byte.
    const auto first = obj;
    REQUIRE(tool("mesh " + sol + out).code == 0);
    CHECK(slurp(dir / "mesh-genus1.obj") == first);
    fs::remove_all(dir);
}
