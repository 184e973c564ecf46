// Command-line front door: sampling, statistics, walk codecs, transforms,
// exact enumeration, Monte Carlo experiments and the identity verifier.
// Subcommands are thin adapters over the library; trees travel as JSON
// child-count arrays on stdin/stdout so runs compose with shell pipelines.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "arbor/arbor.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;
constexpr int kExitIo = 3;

std::vector<arbor::Index> parse_csv_integers(const std::string& text) {
    std::vector<arbor::Index> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        out.push_back(std::stoll(part));
    }
    return out;
}

std::string read_input(const std::string& path) {
    if (path.empty() || path == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        return buffer.str();
    }
    return arbor::read_file(path);
}

std::string first_line(const std::string& text) {
    const auto pos = text.find('\n');
    std::string line = pos == std::string::npos ? text : text.substr(0, pos);
    return line;
}

struct SampleOptions {
    std::string type;
    std::string degrees;
    std::string model_path;
    arbor::Index n = 0;
    arbor::Index count = 1;
};

int run_sample(const SampleOptions& opt, std::uint64_t seed) {
    arbor::Rng rng(arbor::derive_seed(seed, 0x73616d70ULL));
    for (arbor::Index i = 0; i < opt.count; ++i) {
        if (!opt.type.empty()) {
            const auto type = arbor::TypeSequence::from_counts(parse_csv_integers(opt.type));
            std::cout << arbor::tree_to_json(arbor::sample_tree_with_type(type, rng)) << '\n';
        } else if (!opt.degrees.empty()) {
            std::vector<int> d;
            for (arbor::Index x : parse_csv_integers(opt.degrees)) d.push_back(static_cast<int>(x));
            const auto labelled = arbor::sample_tree_with_degree_sequence(d, rng);
            arbor::Json j{{"degrees", labelled.tree.degrees()}, {"labels", labelled.labels}};
            std::cout << j.dump() << '\n';
        } else if (!opt.model_path.empty()) {
            if (opt.n < 1) throw arbor::ConfigError("--n is required with --model");
            const auto dist = arbor::distribution_from_json_text(arbor::read_file(opt.model_path));
            std::cout << arbor::tree_to_json(
                             dist.is_pmf()
                                 ? arbor::sample_conditioned_bienayme(dist, opt.n, rng)
                                 : arbor::sample_simply_generated(dist, opt.n, rng))
                      << '\n';
        } else {
            throw arbor::ConfigError("sample: one of --type, --degrees, --model is required");
        }
    }
    return kExitOk;
}

int run_stats(const std::string& in_path) {
    const auto t = arbor::tree_from_json(first_line(read_input(in_path)));
    const auto s = arbor::tree_stats(t);
    arbor::Json j{{"size", s.size},
                  {"height", s.height},
                  {"width", s.width},
                  {"h2", s.second_order_height},
                  {"leaves", s.leaf_count},
                  {"max_right_spinal_weight", s.max_right_spinal_weight}};
    std::cout << j.dump() << '\n';
    return kExitOk;
}

int run_encode(const std::string& in_path, bool breadth_first) {
    const auto t = arbor::tree_from_json(first_line(read_input(in_path)));
    std::cout << arbor::walk_to_json(breadth_first ? arbor::bfs_walk(t) : arbor::dfs_walk(t)) << '\n';
    return kExitOk;
}

int run_decode(const std::string& in_path, bool breadth_first) {
    const auto w = arbor::walk_from_json(first_line(read_input(in_path)));
    std::cout << arbor::tree_to_json(breadth_first ? arbor::tree_from_bfs_walk(w)
                                                   : arbor::tree_from_dfs_walk(w))
              << '\n';
    return kExitOk;
}

struct TransformOptions {
    std::string op;
    std::string in_path;
    arbor::Index u = -1;
    arbor::Index v = -1;
    long long i = 0;
};

int run_transform(const TransformOptions& opt, std::uint64_t seed) {
    const auto t = arbor::tree_from_json(first_line(read_input(opt.in_path)));
    arbor::Json out;
    if (opt.op == "mirror") {
        const auto r = arbor::mirror(t);
        out = {{"tree", r.tree.degrees()}, {"map", r.map.forward}};
    } else if (opt.op == "shuffle") {
        const auto r = arbor::apply_shuffle(t, arbor::ShuffleRule::seeded_uniform(seed));
        out = {{"tree", r.tree.degrees()}, {"map", r.map.forward}};
    } else if (opt.op == "relocate") {
        const auto r = arbor::relocate_subtree(t, opt.u, opt.v);
        out = {{"tree", r.tree.degrees()}, {"map", r.map.forward}};
    } else if (opt.op == "cyclic-shift") {
        const auto r = arbor::cyclic_spine_shift(t, opt.v, opt.i);
        out = {{"tree", r.tree.degrees()}, {"map", r.map.forward}};
    } else if (opt.op == "psi") {
        const auto r = arbor::psi_swap(t, opt.u, opt.v);
        out = {{"tree", r.tree.degrees()},
               {"map", r.map.forward},
               {"u_star", r.u_star},
               {"v_star", r.v_star}};
    } else {
        throw arbor::ConfigError("transform: unknown --op " + opt.op);
    }
    std::cout << out.dump() << '\n';
    return kExitOk;
}

int run_enumerate(const std::string& type_text, bool count_only, arbor::Index cap) {
    const auto type = arbor::TypeSequence::from_counts(parse_csv_integers(type_text));
    if (count_only) {
        std::cout << arbor::count_trees_with_type(type).str() << '\n';
        return kExitOk;
    }
    arbor::for_each_tree_with_type(
        type, [](const arbor::PlaneTree& t) { std::cout << arbor::tree_to_json(t) << '\n'; }, cap);
    return kExitOk;
}

int run_experiment(const std::string& config_path, const std::string& out_dir,
                   const std::string& formats, std::optional<std::uint64_t> seed_override,
                   std::optional<int> threads_override) {
    arbor::Json cfg_json;
    try {
        cfg_json = arbor::Json::parse(arbor::read_file(config_path));
    } catch (const arbor::Json::exception& e) {
        throw arbor::ConfigError(std::string("config parse error: ") + e.what());
    }
    auto cfg = arbor::experiment_config_from_json(cfg_json);
    if (seed_override) cfg.seed = *seed_override;
    if (threads_override) cfg.parallelism = *threads_override;

    std::vector<arbor::ExperimentRecord> records;
    std::vector<arbor::RatioQuartiles> quartiles;
    if (cfg.experiment == "hw_tail") {
        auto out = arbor::run_hw_tail(cfg);
        records = std::move(out.records);
        quartiles = std::move(out.quartiles);
    } else if (cfg.experiment == "bridge_range") {
        records = arbor::run_bridge_range(cfg);
    } else {
        throw arbor::ConfigError("unknown experiment: " + cfg.experiment);
    }

    std::filesystem::create_directories(out_dir);
    std::stringstream fmts(formats);
    std::string fmt;
    while (std::getline(fmts, fmt, ',')) {
        const std::string path = out_dir + "/report." + fmt;
        arbor::write_report(records, fmt, path);
        std::cout << "wrote " << path << '\n';
    }
    if (!quartiles.empty()) {
        arbor::Json q = arbor::Json::array();
        for (const auto& row : quartiles) {
            q.push_back({{"model", row.model},
                         {"n", row.n},
                         {"q25", row.q25},
                         {"q50", row.q50},
                         {"q75", row.q75}});
        }
        const std::string path = out_dir + "/quartiles.json";
        arbor::write_file(path, q.dump(2) + "\n");
        std::cout << "wrote " << path << '\n';
    }

    // A record violates its theorem when even the lower confidence end sits
    // above the bound.
    for (const auto& r : records) {
        if (r.wilson_lo > r.bound) {
            std::cerr << "bound violation: " << r.model << " n=" << r.n << " param=" << r.param
                      << " empirical=" << r.empirical << " bound=" << r.bound << '\n';
            return kExitVerification;
        }
    }
    return kExitOk;
}

int run_verify(arbor::Index cap, arbor::Index trials, std::uint64_t seed, int threads) {
    arbor::IdentitySuiteConfig cfg;
    cfg.cap = cap;
    cfg.random_trials = trials;
    cfg.h2_trials = std::max<arbor::Index>(trials, 1);
    cfg.moment_trials = std::max<arbor::Index>(trials, 1);
    cfg.seed = seed;
    cfg.parallelism = threads;
    const auto report = arbor::run_identity_suite(cfg);
    for (const auto& item : report.items) {
        if (item.pass) {
            std::cout << "PASS " << item.name << '\n';
        } else {
            std::cout << "FAIL " << item.name << ": " << item.detail << '\n';
        }
    }
    return report.all_pass() ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random plane trees: samplers, codings, transforms and bound checks"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::uint64_t seed = 1;
    int threads = 1;
    std::string out_dir = ".";
    app.add_option("--seed", seed, "master seed; runs with the same seed are reproducible");
    app.add_option("--threads", threads, "worker bound for experiment/verify");
    app.add_option("--out", out_dir, "output directory for experiment reports");
    bool seed_given = false, threads_given = false;

    SampleOptions sample_opt;
    auto* sample = app.add_subcommand("sample", "draw random trees");
    sample->add_option("--type", sample_opt.type, "type sequence, e.g. 3,1,1");
    sample->add_option("--degrees", sample_opt.degrees, "degree sequence d_1,...,d_n");
    sample->add_option("--model", sample_opt.model_path, "distribution config JSON file");
    sample->add_option("--n", sample_opt.n, "tree size for --model");
    sample->add_option("--count", sample_opt.count, "number of samples");

    std::string in_path;
    auto* stats = app.add_subcommand("stats", "tree statistics as JSON");
    stats->add_option("--in", in_path, "tree JSON file (default: stdin)");

    bool use_bfs = false;
    auto* encode = app.add_subcommand("encode", "tree -> walk");
    encode->add_option("--in", in_path, "tree JSON file (default: stdin)");
    encode->add_flag("--bfs", use_bfs, "breadth-first walk instead of depth-first");
    auto* decode = app.add_subcommand("decode", "walk -> tree");
    decode->add_option("--in", in_path, "walk JSON file (default: stdin)");
    decode->add_flag("--bfs", use_bfs, "breadth-first decoding");

    TransformOptions transform_opt;
    auto* transform = app.add_subcommand("transform", "law-preserving tree transformations");
    transform->add_option("--op", transform_opt.op,
                          "mirror|shuffle|relocate|cyclic-shift|psi")->required();
    transform->add_option("--in", transform_opt.in_path, "tree JSON file (default: stdin)");
    transform->add_option("--u", transform_opt.u, "first marked vertex (depth-first index)");
    transform->add_option("--v", transform_opt.v, "second marked vertex / leaf");
    transform->add_option("--i", transform_opt.i, "cyclic shift amount");

    std::string enum_type;
    bool count_only = false;
    arbor::Index enum_cap = arbor::kDefaultEnumCap;
    auto* enumerate = app.add_subcommand("enumerate", "list every tree of a type");
    enumerate->add_option("--type", enum_type, "type sequence, e.g. 5,2,2,1")->required();
    enumerate->add_flag("--count-only", count_only, "print the exact count instead");
    enumerate->add_option("--cap", enum_cap, "enumeration size cap");

    std::string config_path, formats = "csv";
    auto* experiment = app.add_subcommand("experiment", "Monte Carlo bound verification");
    experiment->add_option("--config", config_path, "experiment config JSON")->required();
    experiment->add_option("--format", formats, "comma list of csv,jsonl,svg");

    arbor::Index verify_cap = 8, verify_trials = 50;
    auto* verify = app.add_subcommand("verify", "run the deterministic identity suite");
    verify->add_option("--cap", verify_cap, "exhaustive size cap");
    verify->add_option("--trials", verify_trials, "random trials per identity");

    try {
        app.parse(argc, argv);
        seed_given = app.count("--seed") > 0;
        threads_given = app.count("--threads") > 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sample->parsed()) return run_sample(sample_opt, seed);
        if (stats->parsed()) return run_stats(in_path);
        if (encode->parsed()) return run_encode(in_path, use_bfs);
        if (decode->parsed()) return run_decode(in_path, use_bfs);
        if (transform->parsed()) return run_transform(transform_opt, seed);
        if (enumerate->parsed()) return run_enumerate(enum_type, count_only, enum_cap);
        if (experiment->parsed()) {
            return run_experiment(config_path, out_dir, formats,
                                  seed_given ? std::optional<std::uint64_t>(seed) : std::nullopt,
                                  threads_given ? std::optional<int>(threads) : std::nullopt);
        }
        if (verify->parsed()) return run_verify(verify_cap, verify_trials, seed, threads);
    } catch (const arbor::IoFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const arbor::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
