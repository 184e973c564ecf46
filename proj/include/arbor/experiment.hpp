#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "arbor/common.hpp"
#include "arbor/io.hpp"
#include "arbor/moments.hpp"
#include "arbor/sampler.hpp"
#include "arbor/stats.hpp"
#include "arbor/walk.hpp"

namespace arbor {

// One row of a verification run.
struct ExperimentRecord {
    std::string model;
    Index n = 0;
    double param = 0.0;
    double empirical = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 1.0;
    double bound = 0.0;
    Index replicates = 0;
    std::uint64_t seed = 0;
    long long ms = 0;
};

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// 95% Wilson score interval; behaves sensibly near 0, which is the regime
// rare-event tails live in.
inline WilsonInterval wilson_interval(Index successes, Index trials,
                                      double z = 1.959963984540054) {
    if (trials <= 0) return {0.0, 1.0};
    const double nn = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    // the interval must contain the point estimate despite rounding
    return {std::min(p, std::max(0.0, center - half)), std::max(p, std::min(1.0, center + half))};
}

inline double hw_tail_bound(double s) { return 230.0 * std::pow(s, -2.0 / 13.0); }

// ---------------------------------------------------------------------------
// Model configuration

struct ModelConfig {
    enum class Kind { bienayme, simply_generated, degree_sequence, type_sequence, type_preset };
    enum class Method { rejection, tables };

    Kind kind = Kind::bienayme;
    Method method = Method::rejection;
    std::optional<OffspringDistribution> distribution;  // bienayme / simply_generated
    std::vector<int> degree_sequence;                   // degree_sequence
    std::optional<TypeSequence> type;                   // type_sequence
    std::string preset;                                 // type_preset

    std::string label() const {
        switch (kind) {
            case Kind::bienayme:
                return "bienayme:" + distribution->label() +
                       (method == Method::tables ? ":tables" : "");
            case Kind::simply_generated: return "simply_generated";
            case Kind::degree_sequence: return "degree_sequence";
            case Kind::type_sequence: return "type_sequence";
            case Kind::type_preset: return "type:" + preset;
        }
        return "?";
    }

    TypeSequence preset_type(Index n) const {
        if (preset == "full_binary") {
            // nearest type of size n made of leaves and binary vertices
            if (n < 3) throw ConfigError("full_binary preset needs n >= 3");
            if (n % 2 == 1) {
                return TypeSequence::from_counts({(n + 1) / 2, 0, (n - 1) / 2});
            }
            return TypeSequence::from_counts({n / 2, 1, n / 2 - 1});
        }
        throw ConfigError("unknown type preset: " + preset);
    }

    // The tree generator for one size; shared across worker threads.
    std::function<PlaneTree(Rng&)> sampler_for(Index n) const {
        switch (kind) {
            case Kind::bienayme: {
                if (method == Method::tables) {
                    auto tables = std::make_shared<ConditionedSumTables>(*distribution, n);
                    return [tables](Rng& rng) { return tables->sample(rng); };
                }
                auto rejection = std::make_shared<BienaymeRejectionSampler>(*distribution, n);
                return [rejection](Rng& rng) { return rejection->sample(rng); };
            }
            case Kind::simply_generated: {
                const OffspringDistribution w = *distribution;
                return [w, n](Rng& rng) { return sample_simply_generated(w, n, rng); };
            }
            case Kind::degree_sequence: {
                if (static_cast<Index>(degree_sequence.size()) != n) {
                    throw ConfigError("degree_sequence model: size list must match |d|");
                }
                const std::vector<int> d = degree_sequence;
                return [d](Rng& rng) { return sample_tree_with_degree_sequence(d, rng).tree; };
            }
            case Kind::type_sequence: {
                if (type->size() != n) {
                    throw ConfigError("type_sequence model: size list must match the type size");
                }
                const TypeSequence t = *type;
                return [t](Rng& rng) { return sample_tree_with_type(t, rng); };
            }
            case Kind::type_preset: {
                const TypeSequence t = preset_type(n);
                return [t](Rng& rng) { return sample_tree_with_type(t, rng); };
            }
        }
        throw ConfigError("unhandled model kind");
    }
};

// Jump source for bridge-range experiments.
struct JumpSourceConfig {
    enum class Kind { values, type };
    Kind kind = Kind::values;
    std::vector<long long> values;          // must sum to 0
    std::optional<TypeSequence> type;       // centered automatically

    CenteredJumps jumps() const {
        if (kind == Kind::type) return CenteredJumps::of_type(*type);
        return CenteredJumps::of_zero_sum(JumpSequence::from_jumps(values));
    }

    std::string label() const {
        return kind == Kind::type ? "bridge:type" : "bridge:values";
    }
};

struct ExperimentConfig {
    std::string experiment = "hw_tail";  // or "bridge_range"
    ModelConfig model;
    std::vector<Index> sizes;
    Index replicates = 1000;
    std::vector<double> s_grid{2, 4, 8, 16};
    std::optional<JumpSourceConfig> jumps;
    std::vector<double> epsilon_grid{0.5, 0.25, 0.125};
    std::vector<Index> p_grid{1, 4, 16};
    std::uint64_t seed = 1;
    int parallelism = 1;
    bool timing = true;
};

inline ExperimentConfig experiment_config_from_json(const Json& j) {
    ExperimentConfig cfg;
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    cfg.experiment = j.value("experiment", std::string("hw_tail"));
    if (j.contains("model")) {
        const Json& m = j.at("model");
        const std::string kind = m.at("kind").get<std::string>();
        if (kind == "bienayme") {
            cfg.model.kind = ModelConfig::Kind::bienayme;
            cfg.model.distribution = distribution_from_json(m.at("pmf"));
            const std::string method = m.value("method", std::string("rejection"));
            if (method == "tables") cfg.model.method = ModelConfig::Method::tables;
            else if (method != "rejection") throw ConfigError("unknown sampling method: " + method);
        } else if (kind == "simply_generated") {
            cfg.model.kind = ModelConfig::Kind::simply_generated;
            cfg.model.distribution = distribution_from_json(m.at("weights"));
        } else if (kind == "degree_sequence") {
            cfg.model.kind = ModelConfig::Kind::degree_sequence;
            cfg.model.degree_sequence = m.at("d").get<std::vector<int>>();
        } else if (kind == "type") {
            cfg.model.kind = ModelConfig::Kind::type_sequence;
            cfg.model.type = TypeSequence::from_counts(m.at("counts").get<std::vector<Index>>());
        } else if (kind == "type_preset") {
            cfg.model.kind = ModelConfig::Kind::type_preset;
            cfg.model.preset = m.at("name").get<std::string>();
        } else {
            throw ConfigError("unknown model kind: " + kind);
        }
    }
    if (j.contains("sizes")) cfg.sizes = j.at("sizes").get<std::vector<Index>>();
    cfg.replicates = j.value("replicates", cfg.replicates);
    if (j.contains("s_grid")) cfg.s_grid = j.at("s_grid").get<std::vector<double>>();
    if (j.contains("jumps")) {
        JumpSourceConfig src;
        const Json& js = j.at("jumps");
        const std::string kind = js.at("kind").get<std::string>();
        if (kind == "values") {
            src.kind = JumpSourceConfig::Kind::values;
            src.values = js.at("values").get<std::vector<long long>>();
        } else if (kind == "type") {
            src.kind = JumpSourceConfig::Kind::type;
            src.type = TypeSequence::from_counts(js.at("counts").get<std::vector<Index>>());
        } else {
            throw ConfigError("unknown jump source kind: " + kind);
        }
        cfg.jumps = std::move(src);
    }
    if (j.contains("epsilon_grid")) cfg.epsilon_grid = j.at("epsilon_grid").get<std::vector<double>>();
    if (j.contains("p_grid")) cfg.p_grid = j.at("p_grid").get<std::vector<Index>>();
    cfg.seed = j.value("seed", cfg.seed);
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.timing = j.value("timing", cfg.timing);
    if (const char* env = std::getenv("ARBOR_SEED")) {
        cfg.seed = std::strtoull(env, nullptr, 10);
    }
    if (cfg.replicates < 1) throw ConfigError("replicates must be >= 1");
    for (Index n : cfg.sizes) {
        if (n < 3) throw ConfigError("tree-bound runs need sizes >= 3");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Parallel replication

namespace detail {

// values[r] is written by exactly one worker, and replicate r's stream
// depends only on (seed, tag, n, r), so aggregation is order-independent.
inline void replicate_values(Index replicates, int parallelism, std::uint64_t seed,
                             std::uint64_t tag, Index n,
                             const std::function<PlaneTree(Rng&)>& sampler,
                             std::vector<long long>& values) {
    values.assign(static_cast<std::size_t>(replicates), 0);
    const int threads = std::max(1, parallelism);
    std::exception_ptr worker_error;
    std::mutex error_mutex;
    auto work = [&](Index lo, Index hi) {
        try {
            for (Index r = lo; r < hi; ++r) {
                Rng rng(derive_seed(seed, tag, static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(r)));
                const PlaneTree t = sampler(rng);
                const auto prof = profile(t);
                const long long h = static_cast<long long>(prof.size()) - 1;
                const long long w = *std::max_element(prof.begin(), prof.end());
                if (w * h < t.size() - 1) {
                    throw Error("sampled tree violates W*H >= n-1");
                }
                values[static_cast<std::size_t>(r)] = w * h;
            }
        } catch (...) {
            const std::lock_guard<std::mutex> lock(error_mutex);
            if (!worker_error) worker_error = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0, replicates);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            const Index lo = replicates * t / threads;
            const Index hi = replicates * (t + 1) / threads;
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    if (worker_error) std::rethrow_exception(worker_error);
}

inline std::uint64_t string_tag(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

struct RatioQuartiles {
    std::string model;
    Index n = 0;
    double q25 = 0.0, q50 = 0.0, q75 = 0.0;
};

struct HwTailOutput {
    std::vector<ExperimentRecord> records;
    std::vector<RatioQuartiles> quartiles;  // of W*H / (n ln n), per (model, n)
};

// Estimates P(W(T) H(T) > s n log n) against the universal bound 230 s^(-2/13).
// One batch of replicates per (model, n) serves every s in the grid.
inline HwTailOutput run_hw_tail(const ExperimentConfig& cfg) {
    HwTailOutput out;
    const std::uint64_t tag = detail::string_tag(cfg.model.label());
    std::vector<long long> values;
    for (Index n : cfg.sizes) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto sampler = cfg.model.sampler_for(n);
        detail::replicate_values(cfg.replicates, cfg.parallelism, cfg.seed, tag, n, sampler, values);
        const auto t1 = std::chrono::steady_clock::now();
        const long long ms = cfg.timing
            ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
            : 0;

        const double scale = static_cast<double>(n) * std::log(static_cast<double>(n));
        for (double s : cfg.s_grid) {
            const double threshold = s * scale;
            Index hits = 0;
            for (long long v : values) {
                if (static_cast<double>(v) > threshold) ++hits;
            }
            ExperimentRecord rec;
            rec.model = cfg.model.label();
            rec.n = n;
            rec.param = s;
            rec.empirical = static_cast<double>(hits) / static_cast<double>(cfg.replicates);
            const auto ci = wilson_interval(hits, cfg.replicates);
            rec.wilson_lo = ci.lo;
            rec.wilson_hi = ci.hi;
            rec.bound = hw_tail_bound(s);
            rec.replicates = cfg.replicates;
            rec.seed = cfg.seed;
            rec.ms = ms;
            out.records.push_back(std::move(rec));
        }

        std::vector<long long> sorted(values);
        std::sort(sorted.begin(), sorted.end());
        auto pick = [&](double q) {
            const std::size_t idx = static_cast<std::size_t>(q * (sorted.size() - 1));
            return static_cast<double>(sorted[idx]) / scale;
        };
        out.quartiles.push_back({cfg.model.label(), n, pick(0.25), pick(0.5), pick(0.75)});
    }
    return out;
}

// Checks the exchangeable-bridge range tails: P(R/sigma >= 1/eps) <= 12 eps
// and P(2R/sigma <= p^(-1/2)) <= 400/p (the latter needs n >= p^2).
inline std::vector<ExperimentRecord> run_bridge_range(const ExperimentConfig& cfg) {
    if (!cfg.jumps) throw ConfigError("bridge_range needs a jump source");
    const CenteredJumps jumps = cfg.jumps->jumps();
    if (jumps.sum_numerators() != 0) {
        throw ConfigError("bridge_range: centered jumps must sum to zero");
    }
    const Index n = static_cast<Index>(jumps.numerators.size());
    double sigma_num = 0.0;
    for (long long v : jumps.numerators) {
        sigma_num += static_cast<double>(v) * static_cast<double>(v);
    }
    sigma_num = std::sqrt(sigma_num);

    const std::uint64_t tag = detail::string_tag(cfg.jumps->label());
    std::vector<long long> ranges(static_cast<std::size_t>(cfg.replicates), 0);
    const int threads = std::max(1, cfg.parallelism);
    auto work = [&](Index lo, Index hi) {
        std::vector<long long> buf;
        for (Index r = lo; r < hi; ++r) {
            Rng rng(derive_seed(cfg.seed, tag, static_cast<std::uint64_t>(n),
                                static_cast<std::uint64_t>(r)));
            buf = jumps.numerators;
            rng.shuffle(buf);
            long long walk = 0, mn = 0, mx = 0;
            for (long long b : buf) {
                walk += b;
                mn = std::min(mn, walk);
                mx = std::max(mx, walk);
            }
            ranges[static_cast<std::size_t>(r)] = mx - mn;
        }
    };
    const auto t0 = std::chrono::steady_clock::now();
    if (threads == 1) {
        work(0, cfg.replicates);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            const Index lo = cfg.replicates * t / threads;
            const Index hi = cfg.replicates * (t + 1) / threads;
            if (lo < hi) pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    const auto t1 = std::chrono::steady_clock::now();
    const long long ms = cfg.timing
        ? std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()
        : 0;

    std::vector<ExperimentRecord> records;
    auto push = [&](const std::string& model, double param, Index hits, double bound) {
        ExperimentRecord rec;
        rec.model = model;
        rec.n = n;
        rec.param = param;
        rec.empirical = static_cast<double>(hits) / static_cast<double>(cfg.replicates);
        const auto ci = wilson_interval(hits, cfg.replicates);
        rec.wilson_lo = ci.lo;
        rec.wilson_hi = ci.hi;
        rec.bound = bound;
        rec.replicates = cfg.replicates;
        rec.seed = cfg.seed;
        rec.ms = ms;
        records.push_back(std::move(rec));
    };
    for (double eps : cfg.epsilon_grid) {
        Index hits = 0;
        for (long long r : ranges) {
            if (static_cast<double>(r) * eps >= sigma_num) ++hits;
        }
        push(cfg.jumps->label() + ":upper", eps, hits, 12.0 * eps);
    }
    for (Index p : cfg.p_grid) {
        if (p < 1 || n < p * p) continue;  // outside the proposition's hypothesis
        Index hits = 0;
        for (long long r : ranges) {
            if (2.0 * static_cast<double>(r) * std::sqrt(static_cast<double>(p)) <= sigma_num) ++hits;
        }
        push(cfg.jumps->label() + ":lower", static_cast<double>(p), hits, 400.0 / static_cast<double>(p));
    }
    return records;
}

// ---------------------------------------------------------------------------
// Report writing

namespace detail {

inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

}  // namespace detail

inline void write_report_csv(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    out << "model,n,param,empirical,wilson_lo,wilson_hi,bound,replicates,seed,ms\n";
    for (const auto& r : records) {
        out << r.model << ',' << r.n << ',' << detail::format_double(r.param) << ','
            << detail::format_double(r.empirical) << ',' << detail::format_double(r.wilson_lo)
            << ',' << detail::format_double(r.wilson_hi) << ',' << detail::format_double(r.bound)
            << ',' << r.replicates << ',' << r.seed << ',' << r.ms << '\n';
    }
}

inline void write_report_jsonl(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    for (const auto& r : records) {
        Json j{{"model", r.model},       {"n", r.n},
               {"param", r.param},       {"empirical", r.empirical},
               {"wilson_lo", r.wilson_lo}, {"wilson_hi", r.wilson_hi},
               {"bound", r.bound},       {"replicates", r.replicates},
               {"seed", r.seed},         {"ms", r.ms}};
        out << j.dump() << '\n';
    }
}

// Log-log tail-vs-bound plot; one empirical polyline and one bound polyline
// per model series.
inline void write_report_svg(const std::vector<ExperimentRecord>& records, std::ostream& out) {
    constexpr double width = 640, height = 480, margin = 60;
    constexpr double floor_p = 1e-5;

    std::vector<std::string> models;
    for (const auto& r : records) {
        if (std::find(models.begin(), models.end(), r.model) == models.end()) {
            models.push_back(r.model);
        }
    }
    double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
    auto clamp_p = [&](double p) { return std::max(p, floor_p); };
    for (const auto& r : records) {
        const double x = std::log10(std::max(r.param, 1e-12));
        x_lo = std::min(x_lo, x);
        x_hi = std::max(x_hi, x);
        for (double y : {clamp_p(r.empirical), clamp_p(r.bound)}) {
            y_lo = std::min(y_lo, std::log10(y));
            y_hi = std::max(y_hi, std::log10(y));
        }
    }
    if (x_hi <= x_lo) x_hi = x_lo + 1;
    if (y_hi <= y_lo) y_hi = y_lo + 1;
    auto sx = [&](double param) {
        const double x = std::log10(std::max(param, 1e-12));
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin);
    };
    auto sy = [&](double p) {
        const double y = std::log10(clamp_p(p));
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    int color = 0;
    for (const auto& model : models) {
        std::vector<const ExperimentRecord*> series;
        for (const auto& r : records) {
            if (r.model == model) series.push_back(&r);
        }
        std::sort(series.begin(), series.end(),
                  [](const ExperimentRecord* a, const ExperimentRecord* b) {
                      return a->param < b->param;
                  });
        std::ostringstream emp, bnd;
        for (const auto* r : series) {
            emp << sx(r->param) << ',' << sy(r->empirical) << ' ';
            bnd << sx(r->param) << ',' << sy(r->bound) << ' ';
        }
        const char* c = palette[color % 6];
        ++color;
        out << "<polyline class=\"empirical\" data-model=\"" << model
            << "\" fill=\"none\" stroke=\"" << c << "\" points=\"" << emp.str() << "\"/>\n";
        out << "<polyline class=\"bound\" data-model=\"" << model
            << "\" fill=\"none\" stroke=\"" << c << "\" stroke-dasharray=\"4 3\" points=\""
            << bnd.str() << "\"/>\n";
        out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16 * color
            << "\" font-size=\"10\">" << model << "</text>\n";
    }
    out << "</svg>\n";
}

// format: "csv", "jsonl" or "svg". Bit-stable given identical records.
inline void write_report(const std::vector<ExperimentRecord>& records, const std::string& format,
                         const std::string& path) {
    if (records.empty()) throw IoFailure("write_report: no records");
    std::ostringstream buffer;
    if (format == "csv") {
        write_report_csv(records, buffer);
    } else if (format == "jsonl") {
        write_report_jsonl(records, buffer);
    } else if (format == "svg") {
        write_report_svg(records, buffer);
    } else {
        throw IoFailure("write_report: unknown format " + format);
    }
    write_file(path, buffer.str());
}

}  // namespace arbor
