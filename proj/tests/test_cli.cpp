#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gpseg/config.hpp"
#include "gpseg/report.hpp"

using namespace gpseg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config: parses, validates and names bad fields") {
    auto cfg = ExperimentConfig::from_json_text(R"({
        "dim": 3,
        "domain": {"kind": "ball"},
        "f": {"kind": "power", "lambda": 0.0, "p": 1.0},
        "h": {"kind": "power", "lambda": 0.0, "p": 1.0},
        "g_list": [1e4, 1e5],
        "gamma": 0.5,
        "seed": 42
    })");
    CHECK(cfg.pipeline.dim == 3);
    CHECK(cfg.pipeline.g_list.size() == 2);
    CHECK(cfg.pipeline.seed == 42);

    // gamma = 1.5 rejected with the field named
    try {
        ExperimentConfig::from_json_text(R"({"gamma": 1.5})");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gamma") != std::string::npos);
    }
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"g_list": [10.0]})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"f": {"kind": "exp"}})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text("not json"), ConfigError);
}

TEST_CASE("config: hash is stable under key reordering") {
    auto a = ExperimentConfig::from_json_text(R"({"dim": 3, "gamma": 0.25, "seed": 7})");
    auto b = ExperimentConfig::from_json_text(R"({"seed": 7, "gamma": 0.25, "dim": 3})");
    CHECK(a.config_hash() == b.config_hash());
    auto c = ExperimentConfig::from_json_text(R"({"dim": 3, "gamma": 0.3, "seed": 7})");
    CHECK(a.config_hash() != c.config_hash());
}

TEST_CASE("profile stage: cache makes the second run byte-identical") {
    ExperimentConfig cfg;
    cfg.output_dir = "test_cli_out";
    cfg.blowup_T = 8.0;
    cfg.blowup_n_nodes = 4001;
    fs::remove_all(cfg.output_dir);

    auto art1 = run_profile_stage(cfg);
    REQUIRE(art1.files.size() == 1);
    const std::string first = slurp(art1.files[0]);
    CHECK(first.size() > 1000);
    CHECK(first.substr(0, 6) == "t,U,V\n");

    auto art2 = run_profile_stage(cfg);
    CHECK(slurp(art2.files[0]) == first);
    fs::remove_all(cfg.output_dir);
}

TEST_CASE("csv writer: header plus 17-digit rows") {
    const std::string path = "test_cli_tmp.csv";
    std::vector<double> x = {0.0, 1.0 / 3.0};
    std::vector<double> y = {2.0, -1e-17};
    write_csv(path, {"a", "b"}, {&x, &y});
    const std::string body = slurp(path);
    CHECK(body.find("a,b\n") == 0);
    CHECK(body.find("0.33333333333333331") != std::string::npos);
    fs::remove(path);
}

#ifdef GPSEG_BIN
TEST_CASE("cli binary: malformed config exits with status 2") {
    const std::string bad = "test_cli_bad.json";
    std::ofstream(bad) << "{\"gamma\": 1.5}";
    const std::string cmd = std::string(GPSEG_BIN) + " verify --config " + bad +
                            " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(rc) == 2);
    fs::remove(bad);
}

TEST_CASE("cli binary: construct stage is deterministic byte for byte") {
    const std::string cfgp = "test_cli_small.json";
    std::ofstream(cfgp) << R"({
        "g_list": [1e4],
        "grid": {"base_count": 1024},
        "blowup": {"spacing": 1e-3},
        "solver_base_count": 512,
        "seed": 7,
        "output_dir": "test_cli_det"
    })";
    fs::remove_all("test_cli_det");
    const std::string cmd = std::string(GPSEG_BIN) + " construct --config " + cfgp +
                            " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    const std::string first = slurp("test_cli_det/construct_report.json");
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(slurp("test_cli_det/construct_report.json") == first);
    CHECK(first.find("config_hash") != std::string::npos);
    fs::remove(cfgp);
    fs::remove_all("test_cli_det");
}
#endif
