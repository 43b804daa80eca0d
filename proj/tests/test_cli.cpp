#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef DASEE_CLI
#error "DASEE_CLI must name the dasee binary"
#endif

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(DASEE_CLI) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

fs::path tmp(const std::string& name) { return fs::temp_directory_path() / ("dasee_cli_" + name); }

}  // namespace

TEST_CASE("help and argument errors") {
    CHECK(run("--help") == 0);
    CHECK(run("--sweep Q=1,2") == 3);
    CHECK(run("--trials 0") == 3);
    CHECK(run("--sweep E=0.1,x") == 3);
    CHECK(run("--schemes uc-best") == 3);
    CHECK(run("--no-such-flag") == 3);
    auto bad = tmp("bad.json");
    std::ofstream(bad) << "{ not json";
    CHECK(run("--config " + bad.string()) == 3);
    std::ofstream(bad) << R"({"trials": 2, "colour": 1})";
    CHECK(run("--config " + bad.string()) == 3);
}

TEST_CASE("sweep output is deterministic") {
    auto cfg = tmp("cfg.json");
    std::ofstream(cfg) << R"({"scenario": {"num_ports": 3, "num_users": 2}, "trials": 2, "seed": 9})";
    auto a = tmp("a.csv"), b = tmp("b.csv"), s = tmp("s.csv");
    std::string common = "--config " + cfg.string() + " --sweep E=0.05,0.1 --quiet";
    REQUIRE(run(common + " --out " + a.string() + " --summary " + s.string()) == 0);
    REQUIRE(run(common + " --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).size() > 100);
    CHECK(slurp(s).find("mean") != std::string::npos);
}

TEST_CASE("single scenario mode") {
    auto sc = tmp("scenario.json");
    std::ofstream(sc) << R"({"num_ports": 2, "num_users": 2, "energy_req": 1e-5, "seed": 4})";
    auto out = tmp("scenario_out.json");
    int rc = run("--scenario " + sc.string() + " --schemes nc-opt,uc-fp --out " + out.string());
    CHECK(rc == 0);
    auto j = nlohmann::json::parse(slurp(out));
    REQUIRE(j.at("reports").size() == 2);
    CHECK(j.at("reports")[0].at("scheme") == "nc-opt");
    CHECK(j.contains("channel"));

    // the written scenario and channel solve to the same reports
    auto again = tmp("scenario_again.json");
    CHECK(run("--scenario " + out.string() + " --schemes nc-opt,uc-fp --out " + again.string()) == 0);
    auto k = nlohmann::json::parse(slurp(again));
    CHECK(k.at("reports")[0].at("objective") == j.at("reports")[0].at("objective"));
    CHECK(k.at("channel") == j.at("channel"));
}
