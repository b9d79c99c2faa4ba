#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CliResult run_cli(const std::string& args) {
    static int counter = 0;
    const char* exe = std::getenv("VOLTERRA_CLI");
    REQUIRE(exe != nullptr);
    const auto dir = std::filesystem::temp_directory_path();
    const auto out = dir / ("volterra_cli_out_" + std::to_string(++counter) + ".txt");
    const auto err = dir / ("volterra_cli_err_" + std::to_string(counter) + ".txt");
    const std::string cmd = std::string("\"") + exe + "\" " + args + " > " +
                            out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    std::filesystem::remove(out);
    std::filesystem::remove(err);
    return r;
}

std::vector<json> json_lines(const std::string& s) {
    std::vector<json> lines;
    std::istringstream ss(s);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) lines.push_back(json::parse(line));
    return lines;
}

} // namespace

TEST_CASE("tensor on the lattice side") {
    const CliResult r = run_cli("tensor --space u --index 2 --at 1,2,3");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["v"] == 1);
    CHECK(doc["space"] == "u");
    CHECK(doc["matrix"][0][1] == 2.0);
    CHECK(doc["matrix"][1][2] == 6.0);
    CHECK(doc["matrix"][1][0] == -2.0);
}

TEST_CASE("tensor domain error is structured") {
    const CliResult r = run_cli("tensor --space u --index 0 --at 0,1,1");
    REQUIRE(r.code == 3);
    const json doc = json::parse(r.out);
    CHECK(doc["error"]["type"] == "EvaluationDomain");
    const std::string msg = doc["error"]["message"];
    CHECK(msg.find("u1") != std::string::npos);
}

TEST_CASE("tensor index out of range for u") {
    CHECK(run_cli("tensor --space u --index 7 --at 1,2,3").code == 2);
    CHECK(run_cli("tensor --space qp --index 1 --at 1,2,3").code == 2); // odd length
}

TEST_CASE("tensor on the symplectic side at the origin") {
    const CliResult r = run_cli("tensor --space qp --index 1 --at 0,0,0,0,0,0");
    REQUIRE(r.code == 0);
    const json m = json::parse(r.out)["matrix"];
    CHECK(m[0][1] == 0.0);
    CHECK(m[0][3] == -1.0);
    CHECK(m[0][4] == 1.0);
    CHECK(m[1][2] == 1.0);
    CHECK(m[2][5] == -1.0);
    CHECK(m[4][5] == -1.0);
}

TEST_CASE("verify emits one json line per identity") {
    const CliResult r = run_cli("verify --family lenard --m 5 --points 20 --seed 7");
    REQUIRE(r.code == 0);
    const auto lines = json_lines(r.out);
    REQUIRE(lines.size() == 8); // two rungs x i in 1..4
    for (const json& l : lines) {
        CHECK(l["v"] == 1);
        CHECK(l["family"] == "lenard");
        CHECK(l["passed"] == true);
        CHECK(l["max_residual"].get<double>() <= 1e-9);
    }
}

TEST_CASE("verify is reproducible from the seed") {
    const std::string args = "verify --family involution --m 3 --points 10 --seed 123";
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    CHECK(a.out == b.out);
    const CliResult c = run_cli("verify --family involution --m 3 --points 10 --seed 124");
    CHECK(a.out != c.out);
}

TEST_CASE("verify seed falls back to the environment") {
    const CliResult a = run_cli("verify --family lenard --m 3 --points 5 --seed 77");
    setenv("VOLTERRA_SEED", "77", 1);
    const CliResult b = run_cli("verify --family lenard --m 3 --points 5");
    unsetenv("VOLTERRA_SEED");
    CHECK(a.out == b.out);
}

TEST_CASE("verify rejects unknown families") {
    CHECK(run_cli("verify --family frobnicate").code == 2);
}

TEST_CASE("verify with zero points is vacuously green") {
    const CliResult r = run_cli("verify --family jacobi --m 5 --n 2 --points 0");
    REQUIRE(r.code == 0);
    for (const json& l : json_lines(r.out)) {
        CHECK(l["points"] == 0);
        CHECK(l["vacuous"] == true);
        CHECK(l["passed"] == true);
    }
}

TEST_CASE("integrate emits csv with headers and a summary on stderr") {
    const CliResult r =
        run_cli("integrate --space u --x0 1,2 --t-end 1 --dt 0.001");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("t,u1,u2,H1,H2,lambda1,lambda2,lambda3", 0) == 0);
    const json summary = json::parse(r.err);
    CHECK(summary["v"] == 1);
    CHECK(summary["summary"]["max_h_drift"].get<double>() < 1e-10);
}

TEST_CASE("integrate constant state at the lattice zero") {
    const CliResult r = run_cli(
        "integrate --space u --x0 0,0,0 --t-end 1 --dt 0.1 --format json");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    for (const auto& state : doc["trajectory"]["states"])
        for (const auto& v : state) CHECK(v.get<double>() == 0.0);
}

TEST_CASE("paired integration from the origin hits the blow-up") {
    const CliResult r = run_cli(
        "integrate --space paired --x0 0,0,0,0,0,0 --t-end 5 --dt 0.001");
    REQUIRE(r.code == 3);
    const json doc = json::parse(r.out);
    CHECK(doc["error"]["type"] == "NonFinite");
    const double t = doc["error"]["last_valid_time"];
    CHECK(t > 1.2);
    CHECK(t < 1.45);
}

TEST_CASE("paired integration on a scaled leaf stays tight") {
    // preimage of 0.1*(-1,1,-1,1,-1) with q1 = 0
    const CliResult r = run_cli(
        "integrate --space paired --x0 0,-2.302585092994046,-4.605170185988092,"
        "-2.302585092994046,-2.302585092994046,-2.302585092994046 "
        "--t-end 1 --dt 0.001 --format json");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["summary"]["max_gap"].get<double>() < 1e-10);
}

TEST_CASE("henon paired integration") {
    const CliResult r = run_cli(
        "integrate --space henon --x0 1,2,3,4,5 --t-end 1 --dt 0.001 --format json");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["summary"]["max_gap"].get<double>() < 1e-9);
    CHECK(doc["summary"]["max_h_drift_u"].get<double>() < 1e-10);
}

TEST_CASE("integrate argument validation") {
    CHECK(run_cli("integrate --space u --t-end 1").code == 2);          // missing x0
    CHECK(run_cli("integrate --space u --x0 1,2 --t-end 1 --dt 0").code == 2);
    CHECK(run_cli("integrate --space henon --x0 1,2 --t-end 1").code == 2);
    CHECK(run_cli("nonsense").code == 2);
}
