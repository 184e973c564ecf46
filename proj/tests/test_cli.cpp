// The CLI is a thin adapter: every subcommand's output must match a direct
// library call.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "arbor/io.hpp"
#include "arbor/stats.hpp"
#include "arbor/walk.hpp"

#ifndef ARBOR_CLI_PATH
#error "ARBOR_CLI_PATH must point at the built binary"
#endif

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

CommandResult run(const std::string& args, const std::string& stdin_text = "") {
    std::string command = std::string(ARBOR_CLI_PATH) + " " + args + " 2>/dev/null";
    if (!stdin_text.empty()) {
        command = "printf '%s' '" + stdin_text + "' | " + command;
    }
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CommandResult result;
    std::array<char, 4096> buffer;
    std::size_t got = 0;
    while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0) {
        result.output.append(buffer.data(), got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

const std::string kExample = "[1,2,3,0,2,0,0,0,1,0]";

}  // namespace

TEST_CASE("stats matches the library") {
    const auto r = run("stats", kExample);
    REQUIRE(r.exit_code == 0);
    const auto j = arbor::Json::parse(r.output);
    const auto t = arbor::tree_from_json(kExample);
    const auto s = arbor::tree_stats(t);
    CHECK(j.at("height") == s.height);
    CHECK(j.at("width") == s.width);
    CHECK(j.at("h2") == s.second_order_height);
    CHECK(j.at("height") == 4);
    CHECK(j.at("width") == 4);
    CHECK(j.at("h2") == 2);
}

TEST_CASE("encode and decode match the library and roundtrip") {
    const auto t = arbor::tree_from_json(kExample);
    const auto dfs = run("encode", kExample);
    REQUIRE(dfs.exit_code == 0);
    CHECK(dfs.output == arbor::walk_to_json(arbor::dfs_walk(t)) + "\n");
    const auto bfs = run("encode --bfs", kExample);
    CHECK(bfs.output == arbor::walk_to_json(arbor::bfs_walk(t)) + "\n");

    const auto back = run("decode", dfs.output);
    CHECK(back.output == kExample + "\n");
    const auto back_bfs = run("decode --bfs", bfs.output);
    CHECK(back_bfs.output == kExample + "\n");
}

TEST_CASE("sampling is reproducible byte for byte") {
    const auto a = run("sample --type 3,1,0,1 --count 4 --seed 7");
    const auto b = run("sample --type 3,1,0,1 --count 4 --seed 7");
    REQUIRE(a.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(std::count(a.output.begin(), a.output.end(), '\n') == 4);
    const auto c = run("sample --type 3,1,0,1 --count 4 --seed 8");
    CHECK(a.output != c.output);
}

TEST_CASE("enumerate matches the library count") {
    const auto count = run("enumerate --type 5,2,2,1 --count-only");
    REQUIRE(count.exit_code == 0);
    CHECK(count.output == "756\n");
    const auto listing = run("enumerate --type 3,1,0,1");
    CHECK(std::count(listing.output.begin(), listing.output.end(), '\n') == 4);
}

TEST_CASE("transform subcommand mirrors the library") {
    const auto r = run("transform --op mirror", kExample);
    REQUIRE(r.exit_code == 0);
    const auto j = arbor::Json::parse(r.output);
    CHECK(j.at("tree").get<std::vector<int>>() ==
          std::vector<int>{1, 2, 1, 0, 3, 0, 2, 0, 0, 0});
    const auto psi = run("transform --op psi --u 1 --v 3", "[2,1,0,1,0]");
    const auto pj = arbor::Json::parse(psi.output);
    CHECK(pj.at("tree").get<std::vector<int>>() == std::vector<int>{2, 2, 0, 0, 0});
}

TEST_CASE("verify runs the identity suite") {
    const auto r = run("verify --cap 5 --trials 2 --seed 1");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("PASS dfs-walk-roundtrip") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("exit codes") {
    CHECK(run("nonsense-subcommand").exit_code == 1);
    CHECK(run("stats --in /does/not/exist.json").exit_code == 3);
    CHECK(run("sample --type 3,1,1 --count 1").exit_code == 1);  // invalid type
    CHECK(run("decode", "[0,1,0]").exit_code == 1);              // not an excursion
}

TEST_CASE("experiment subcommand writes deterministic reports") {
    const std::string dir = "cli_experiment_out";
    const std::string cfg_path = dir + "/cfg.json";
    std::filesystem::create_directories(dir);
    arbor::write_file(cfg_path, R"({
        "experiment": "hw_tail",
        "model": {"kind": "type_preset", "name": "full_binary"},
        "sizes": [21],
        "replicates": 100,
        "s_grid": [2, 4],
        "seed": 12,
        "parallelism": 1,
        "timing": false
    })");
    const auto first =
        run("experiment --config " + cfg_path + " --format csv,jsonl,svg --out " + dir);
    REQUIRE(first.exit_code == 0);
    const auto csv1 = arbor::read_file(dir + "/report.csv");
    CHECK(csv1.rfind("model,", 0) == 0);
    CHECK(arbor::read_file(dir + "/report.svg").find("<polyline") != std::string::npos);

    const auto second =
        run("experiment --config " + cfg_path + " --format csv --out " + dir + " --threads 4");
    REQUIRE(second.exit_code == 0);
    CHECK(arbor::read_file(dir + "/report.csv") == csv1);
}
