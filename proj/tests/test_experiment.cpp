#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <sstream>

#include "arbor/experiment.hpp"
#include "arbor/verify.hpp"

using arbor::ExperimentConfig;
using arbor::ExperimentRecord;
using arbor::Index;

namespace {

ExperimentConfig small_hw_config(int parallelism) {
    ExperimentConfig cfg;
    cfg.experiment = "hw_tail";
    cfg.model.kind = arbor::ModelConfig::Kind::type_preset;
    cfg.model.preset = "full_binary";
    cfg.sizes = {31, 64};
    cfg.replicates = 400;
    cfg.s_grid = {2, 4};
    cfg.seed = 7;
    cfg.parallelism = parallelism;
    cfg.timing = false;
    return cfg;
}

std::string csv_of(const std::vector<ExperimentRecord>& records) {
    std::ostringstream out;
    arbor::write_report_csv(records, out);
    return out.str();
}

}  // namespace

TEST_CASE("wilson interval basics") {
    const auto zero = arbor::wilson_interval(0, 100);
    CHECK(zero.lo == 0.0);
    CHECK(zero.hi > 0.0);
    CHECK(zero.hi < 0.05);
    const auto all = arbor::wilson_interval(100, 100);
    CHECK(all.hi == 1.0);
    CHECK(all.lo > 0.95);
    const auto half = arbor::wilson_interval(50, 100);
    CHECK(half.lo < 0.5);
    CHECK(half.hi > 0.5);
    CHECK(half.lo > 0.39);
    CHECK(half.hi < 0.61);
}

TEST_CASE("height-width tail experiment") {
    const auto out = arbor::run_hw_tail(small_hw_config(1));
    REQUIRE(out.records.size() == 4);  // two sizes, two s values
    for (const auto& r : out.records) {
        CHECK(r.empirical >= 0.0);
        CHECK(r.empirical <= 1.0);
        CHECK(r.wilson_lo <= r.empirical);
        CHECK(r.wilson_hi >= r.empirical);
        CHECK(r.bound == Catch::Approx(230.0 * std::pow(r.param, -2.0 / 13.0)));
        CHECK(r.replicates == 400);
        CHECK(r.ms == 0);
        // never exceeds the universal tail bound beyond confidence slack
        CHECK(r.wilson_lo <= r.bound);
    }
    REQUIRE(out.quartiles.size() == 2);
    for (const auto& q : out.quartiles) {
        CHECK(q.q25 <= q.q50);
        CHECK(q.q50 <= q.q75);
        CHECK(q.q25 > 0.0);
    }
}

TEST_CASE("experiment output is deterministic across parallelism") {
    const auto p1 = arbor::run_hw_tail(small_hw_config(1));
    const auto p4 = arbor::run_hw_tail(small_hw_config(4));
    const auto p8 = arbor::run_hw_tail(small_hw_config(8));
    CHECK(csv_of(p1.records) == csv_of(p4.records));
    CHECK(csv_of(p1.records) == csv_of(p8.records));
}

TEST_CASE("type preset needs only the size") {
    arbor::ModelConfig model;
    model.kind = arbor::ModelConfig::Kind::type_preset;
    model.preset = "full_binary";
    CHECK(model.preset_type(31).size() == 31);
    CHECK(model.preset_type(64).size() == 64);
    CHECK_THROWS_AS(model.preset_type(2), arbor::ConfigError);
    arbor::ModelConfig bad = model;
    bad.preset = "zigzag";
    CHECK_THROWS_AS(bad.preset_type(10), arbor::ConfigError);
}

TEST_CASE("bridge range experiment on a two-step walk") {
    ExperimentConfig cfg;
    cfg.experiment = "bridge_range";
    arbor::JumpSourceConfig jumps;
    jumps.kind = arbor::JumpSourceConfig::Kind::values;
    jumps.values = {1, -1};
    cfg.jumps = jumps;
    cfg.replicates = 500;
    cfg.epsilon_grid = {2.0, 1.0};
    cfg.p_grid = {1, 9};  // p = 9 violates n >= p^2 and is skipped
    cfg.seed = 3;
    cfg.timing = false;
    const auto records = arbor::run_bridge_range(cfg);
    REQUIRE(records.size() == 3);
    // R = 1 always, sigma = sqrt(2): R/sigma >= 1/eps iff eps >= sqrt(2)
    CHECK(records[0].param == 2.0);
    CHECK(records[0].empirical == 1.0);
    CHECK(records[0].bound == Catch::Approx(24.0));
    CHECK(records[1].param == 1.0);
    CHECK(records[1].empirical == 0.0);
    // lower tail at p = 1: 2R/sigma = sqrt(2) > 1, never below
    CHECK(records[2].param == 1.0);
    CHECK(records[2].empirical == 0.0);
    CHECK(records[2].bound == Catch::Approx(400.0));
}

TEST_CASE("bridge range uses centered type jumps") {
    ExperimentConfig cfg;
    cfg.experiment = "bridge_range";
    arbor::JumpSourceConfig jumps;
    jumps.kind = arbor::JumpSourceConfig::Kind::type;
    jumps.type = arbor::TypeSequence::from_counts({26, 0, 25});  // 51 vertices
    cfg.jumps = jumps;
    cfg.replicates = 2000;
    cfg.epsilon_grid = {0.25};
    cfg.p_grid = {4};
    cfg.seed = 11;
    cfg.timing = false;
    const auto records = arbor::run_bridge_range(cfg);
    REQUIRE(records.size() == 2);
    for (const auto& r : records) {
        CHECK(r.wilson_lo <= r.bound);  // both proposition bounds hold
    }
}

TEST_CASE("csv report shape") {
    std::vector<ExperimentRecord> records(3);
    records[0].model = "a";
    records[1].model = "b";
    records[2].model = "c";
    const std::string csv = csv_of(records);
    CHECK(csv.rfind("model,n,param,empirical,wilson_lo,wilson_hi,bound,replicates,seed,ms\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("jsonl report roundtrips") {
    ExperimentRecord r;
    r.model = "m";
    r.n = 10;
    r.param = 2.5;
    r.empirical = 0.125;
    r.wilson_lo = 0.1;
    r.wilson_hi = 0.2;
    r.bound = 230.0;
    r.replicates = 7;
    r.seed = 42;
    r.ms = 3;
    std::ostringstream out;
    arbor::write_report_jsonl({r}, out);
    const auto j = arbor::Json::parse(out.str());
    CHECK(j.at("model") == "m");
    CHECK(j.at("n") == 10);
    CHECK(j.at("param") == 2.5);
    CHECK(j.at("empirical") == 0.125);
    CHECK(j.at("replicates") == 7);
    CHECK(j.at("seed") == 42);
}

TEST_CASE("svg report carries one polyline per model series") {
    std::vector<ExperimentRecord> records;
    for (const std::string model : {"alpha", "beta"}) {
        for (double s : {2.0, 4.0, 8.0}) {
            ExperimentRecord r;
            r.model = model;
            r.param = s;
            r.empirical = 0.01 * s;
            r.bound = arbor::hw_tail_bound(s);
            records.push_back(r);
        }
    }
    std::ostringstream out;
    arbor::write_report_svg(records, out);
    const std::string svg = out.str();
    CHECK(svg.find("<svg") != std::string::npos);
    std::size_t empirical_lines = 0, pos = 0;
    while ((pos = svg.find("polyline class=\"empirical\"", pos)) != std::string::npos) {
        ++empirical_lines;
        pos += 1;
    }
    CHECK(empirical_lines == 2);
    CHECK(svg.find("data-model=\"alpha\"") != std::string::npos);
    CHECK(svg.find("data-model=\"beta\"") != std::string::npos);
}

TEST_CASE("report writing failure modes") {
    CHECK_THROWS_AS(arbor::write_report({}, "csv", "/tmp/arbor_empty.csv"), arbor::IoFailure);
    std::vector<ExperimentRecord> one(1);
    CHECK_THROWS_AS(arbor::write_report(one, "yaml", "/tmp/arbor_bad.yaml"), arbor::IoFailure);
    CHECK_THROWS_AS(arbor::write_report(one, "csv", "/nonexistent-dir/x.csv"), arbor::IoFailure);
}

TEST_CASE("experiment config parsing") {
    const auto j = arbor::Json::parse(R"({
        "experiment": "hw_tail",
        "model": {"kind": "bienayme", "pmf": {"kind": "geometric", "p": 0.5}},
        "sizes": [100, 1000],
        "replicates": 50,
        "s_grid": [2, 4, 8, 16],
        "seed": 99,
        "parallelism": 2,
        "timing": false
    })");
    const auto cfg = arbor::experiment_config_from_json(j);
    CHECK(cfg.model.label() == "bienayme:geometric(0.5)");
    CHECK(cfg.sizes == std::vector<Index>{100, 1000});
    CHECK(cfg.replicates == 50);
    CHECK(cfg.seed == 99);
    CHECK(cfg.parallelism == 2);
    CHECK_FALSE(cfg.timing);

    auto bad = j;
    bad["sizes"] = {2};
    CHECK_THROWS_AS(arbor::experiment_config_from_json(bad), arbor::ConfigError);
    bad = j;
    bad["replicates"] = 0;
    CHECK_THROWS_AS(arbor::experiment_config_from_json(bad), arbor::ConfigError);
    bad = j;
    bad["model"] = {{"kind", "nonsense"}};
    CHECK_THROWS_AS(arbor::experiment_config_from_json(bad), arbor::ConfigError);
}

TEST_CASE("environment seed override") {
    const auto j = arbor::Json::parse(R"({"seed": 5, "sizes": [10]})");
    setenv("ARBOR_SEED", "1234", 1);
    const auto overridden = arbor::experiment_config_from_json(j);
    CHECK(overridden.seed == 1234);
    unsetenv("ARBOR_SEED");
    const auto plain = arbor::experiment_config_from_json(j);
    CHECK(plain.seed == 5);
}

TEST_CASE("identity suite passes on a small budget") {
    arbor::IdentitySuiteConfig cfg;
    cfg.cap = 5;
    cfg.random_trials = 3;
    cfg.large_size = 400;
    cfg.h2_trials = 5;
    cfg.h2_size = 120;
    cfg.moment_trials = 20;
    cfg.seed = 2;
    const auto report = arbor::run_identity_suite(cfg);
    for (const auto& item : report.items) {
        INFO(item.name << " " << item.detail);
        CHECK(item.pass);
    }
    CHECK(report.all_pass());
    CHECK(report.items.size() >= 12);
}

TEST_CASE("proposition probability reports") {
    const auto type = arbor::TypeSequence::from_counts({5, 2, 2, 1});
    SECTION("line comparison") {
        const auto rep = arbor::run_proposition_probabilities(type, arbor::PropositionCheck::not_line);
        REQUIRE_FALSE(rep.rows.empty());
        CHECK(rep.all_ok());
        // eps = 1/2 satisfies eps^(1/3) n0 >= 2 with n0 = 5
        CHECK(rep.rows[0].hypothesis_met);
    }
    SECTION("width versus max right spinal weight") {
        const auto rep =
            arbor::run_proposition_probabilities(type, arbor::PropositionCheck::width_vs_luka);
        CHECK(rep.all_ok());
        // desk-scale types cannot satisfy eps^(4/3) sqrt(n0-1) >= 64 at small eps
        CHECK_FALSE(rep.rows[0].hypothesis_met);
    }
    SECTION("left-right weights") {
        const auto rep =
            arbor::run_proposition_probabilities(type, arbor::PropositionCheck::lr_weights);
        CHECK(rep.all_ok());
    }
    SECTION("spine product tail") {
        const auto rep =
            arbor::run_proposition_probabilities(type, arbor::PropositionCheck::spine_product);
        CHECK(rep.all_ok());
        for (const auto& row : rep.rows) {
            CHECK(row.lhs <= 1.0);
        }
    }
    SECTION("second-order height times min spinal weight") {
        const auto rep =
            arbor::run_proposition_probabilities(type, arbor::PropositionCheck::lr_height);
        CHECK(rep.all_ok());
        REQUIRE_FALSE(rep.rows.empty());
    }
}
