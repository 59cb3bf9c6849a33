#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cdsl/json_util.hpp"
#include "test_util.hpp"

using namespace cdsl;
namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args, const std::string& stdout_path = "/dev/null") {
    std::string cmd =
        std::string(CDSL_CLI_PATH) + " " + args + " > " + stdout_path + " 2> /dev/null";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

// Scratch directory with the fixture files the exit-code table needs.
struct CliFixture {
    fs::path dir;

    CliFixture() {
        dir = fs::temp_directory_path() / ("cdsl_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir);
        write_file_atomic(path("broken.cdsl"), "CLICK CLICK CLICK\n");
        write_file_atomic(path("faulty_config.json"),
                          R"({"client":{"kind":"mock","mode":"scripted_faulty",)"
                          R"("invalid_script_prob":1.0}})");
        write_file_atomic(path("unreachable.json"),
                          R"({"client":{"kind":"http","url":"http://127.0.0.1:9/v1/x"}})");
        write_file_atomic(path("bench.json"),
                          R"({"categories":["rotation"],"seeds":{"count":2},"timing":"none"})");
        write_file_atomic(path("bad_key.json"), R"({"categoriez":["rotation"]})");
        write_file_atomic(path("not_json.json"), "{nope");
    }
    ~CliFixture() { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("cli exit codes follow the documented table") {
    CliFixture fx;
    const std::string valid = test::repo_path("data/canonical/same_orientation_zero.cdsl");
    const std::string faulty = test::repo_path("data/corpus/same_orientation_zero_faulty.cdsl");

    // generate a challenge document for exec up front
    REQUIRE(run_cli("gen bingo --seed 3 --out " + fx.path("ch.json")) == 0);
    Json ch = Json::parse(read_file(fx.path("ch.json")));
    write_file_atomic(fx.path("ref.cdsl"), ch.at("reference_script").get<std::string>());

    struct Row {
        std::string args;
        int expected;
    };
    const std::vector<Row> table = {
        // success
        {"parse " + valid, 0},
        {"verify " + valid, 0},
        {"translate " + valid, 0},
        {"gen rotation --seed 5", 0},
        {"exec " + fx.path("ref.cdsl") + " --scene " + fx.path("ch.json"), 0},
        {"solve bingo --seed 1", 0},
        {"bench --config " + fx.path("bench.json"), 0},
        // diagnostics or failed work
        {"parse " + fx.path("broken.cdsl"), 1},
        {"verify " + faulty, 1},
        {"translate " + faulty, 1},
        {"solve bingo --seed 1 --config " + fx.path("faulty_config.json"), 1},
        // usage problems
        {"", 2},
        {"frobnicate", 2},
        {"parse", 2},
        {"verify " + valid + " --format yaml", 2},
        {"gen sudoku", 2},
        {"bench", 2},
        {"bench --config " + fx.path("bad_key.json"), 2},
        {"bench --config " + fx.path("not_json.json"), 2},
        // I/O and client transport
        {"parse " + fx.path("no_such_file.cdsl"), 3},
        {"exec " + fx.path("ref.cdsl") + " --scene " + fx.path("missing.json"), 3},
        {"bench --config " + fx.path("missing.json"), 3},
        {"solve rotation --seed 1 --config " + fx.path("unreachable.json"), 3},
    };
    for (const Row& row : table) {
        CAPTURE(row.args);
        CHECK(run_cli(row.args) == row.expected);
    }
}

TEST_CASE("cli json mode emits one parseable document even on failure") {
    CliFixture fx;
    const std::string faulty = test::repo_path("data/corpus/same_orientation_zero_faulty.cdsl");

    CHECK(run_cli("verify " + faulty + " --format json", fx.path("verify.json")) == 1);
    Json doc = Json::parse(read_file(fx.path("verify.json")));
    CHECK(doc.at("valid") == false);
    CHECK(doc.at("diagnostics").size() == 1);
    CHECK(doc.at("diagnostics")[0].at("code") == "V002");

    CHECK(run_cli("parse " + fx.path("nowhere.cdsl") + " --format json",
                  fx.path("err.json")) == 3);
    Json err = Json::parse(read_file(fx.path("err.json")));
    CHECK(err.contains("error"));
}

TEST_CASE("cli --out writes the json document atomically alongside text output") {
    CliFixture fx;
    const std::string valid = test::repo_path("data/canonical/same_orientation_zero.cdsl");

    CHECK(run_cli("translate " + valid + " --out " + fx.path("steps.json")) == 0);
    Json doc = Json::parse(read_file(fx.path("steps.json")));
    CHECK(doc.contains("preamble"));
    CHECK(doc.at("steps").size() > 0);

    CHECK(run_cli("bench --config " + fx.path("bench.json") + " --out " +
                  fx.path("report.json")) == 0);
    Json report = Json::parse(read_file(fx.path("report.json")));
    CHECK(report.at("trials").size() == 2);
    std::string csv = read_file(fx.path("report.csv"));
    CHECK(csv.rfind("challenge_id,", 0) == 0);
}
