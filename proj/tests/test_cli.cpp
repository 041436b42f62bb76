// Drives the installed command-line binary end to end through its
// subcommands: gen -> train -> calibrate -> eval, the one-shot run, and
// inspect-model. The binary path is injected by the build.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BINCAL_CLI_PATH;

int run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
    return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / "bincal_cli_test") {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("cli pipeline") {
    TempDir dir;
    const std::string d = dir.path.string();

    SUBCASE("staged subcommands") {
        REQUIRE(run("gen --pattern linear --seed 4 --n-train 200 --n-calib 200 --n-test 200 "
                    "--out-dir " + d + "/data") == 0);
        CHECK(fs::exists(dir.path / "data/train.csv"));
        CHECK(fs::exists(dir.path / "data/schema.json"));

        REQUIRE(run("train --train " + d + "/data/train.csv --schema " + d +
                    "/data/schema.json --classifier lr --epochs 2000 "
                    "--score " + d + "/data/calib.csv --scores-out " + d + "/calib_scores.csv "
                    "--score " + d + "/data/test.csv --scores-out " + d + "/test_scores.csv") == 0);
        CHECK(fs::exists(dir.path / "calib_scores.csv"));

        REQUIRE(run("calibrate --scores " + d + "/calib_scores.csv --method sbb --out " + d +
                    "/sbb.json") == 0);
        REQUIRE(run("calibrate --scores " + d + "/calib_scores.csv --method abb --cells 50 "
                    "--out " + d + "/abb.json") == 0);
        REQUIRE(run("eval --scores " + d + "/test_scores.csv --model " + d + "/sbb.json "
                    "--model " + d + "/abb.json --out-dir " + d + "/results") == 0);

        const std::string results = slurp(dir.path / "results/results.csv");
        CHECK(results.find("dataset,classifier,method,measure,value,rank") == 0);
        CHECK(results.find("sbb,auc") != std::string::npos);
        CHECK(fs::exists(dir.path / "results/reliability_raw.csv"));
        CHECK(fs::exists(dir.path / "results/reliability_sbb.csv"));

        REQUIRE(run("inspect-model " + d + "/sbb.json --grid 4") == 0);
    }

    SUBCASE("one-shot run writes the table") {
        REQUIRE(run("run --pattern xor --seed 3 --n-train 150 --n-calib 150 --n-test 150 "
                    "--epochs 500 --out-dir " + d + "/out") == 0);
        const std::string results = slurp(dir.path / "out/results.csv");
        for (const char* method : {"raw", "platt", "hist", "isoreg", "sbb", "abb"})
            CHECK(results.find(method) != std::string::npos);
        CHECK(fs::exists(dir.path / "out/results.json"));
    }

    SUBCASE("run accepts a config file that overrides flags") {
        nlohmann::json cfg = {
            {"dataset", {{"sim", {{"pattern", "linear"}, {"n_train", 100}, {"n_calib", 100},
                                  {"n_test", 100}, {"seed", 8}}}}},
            {"classifier", {{"kind", "lr"}, {"epochs", 400}}},
            {"calibrators", {{{"method", "hist"}, {"bins", 4}}}},
            {"out_dir", d + "/cfg_out"},
        };
        std::ofstream(dir.path / "cfg.json") << cfg.dump();
        REQUIRE(run("run --config " + d + "/cfg.json --pattern xor --seed 999") == 0);
        const std::string results = slurp(dir.path / "cfg_out/results.csv");
        CHECK(results.find("linear") != std::string::npos);
        CHECK(results.find("hist") != std::string::npos);
        CHECK(results.find("sbb") == std::string::npos); // calibrators replaced by config
    }

    SUBCASE("failures exit nonzero") {
        CHECK(run("gen --pattern spiral --out-dir " + d + "/x") != 0);
        CHECK(run("eval --scores " + d + "/does_not_exist.csv") != 0);
        CHECK(run("inspect-model " + d + "/missing.json") != 0);
        CHECK(run("nonsense") != 0);
    }
}
