#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "arbor/common.hpp"
#include "arbor/offspring.hpp"
#include "arbor/tree.hpp"
#include "arbor/walk.hpp"

namespace arbor {

using Json = nlohmann::json;

// Trees travel as JSON arrays of depth-first child counts,
// e.g. [1,2,3,0,2,0,0,0,1,0]; newline-delimited for corpora.
inline std::string tree_to_json(const PlaneTree& t) {
    Json j = t.degrees();
    return j.dump();
}

inline PlaneTree tree_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw IoFailure(std::string("tree JSON parse error: ") + e.what());
    }
    if (!j.is_array()) throw IoFailure("tree JSON must be an array of child counts");
    std::vector<int> degrees;
    degrees.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw IoFailure("tree JSON entries must be integers");
        degrees.push_back(x.get<int>());
    }
    return PlaneTree::from_degrees(std::move(degrees));
}

// Walks travel as JSON arrays of values including x_0 = 0.
inline std::string walk_to_json(const Walk& w) {
    Json j = w.values;
    return j.dump();
}

inline Walk walk_from_json(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw IoFailure(std::string("walk JSON parse error: ") + e.what());
    }
    if (!j.is_array()) throw IoFailure("walk JSON must be an array of values");
    std::vector<long long> values;
    values.reserve(j.size());
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw IoFailure("walk JSON entries must be integers");
        values.push_back(x.get<long long>());
    }
    return Walk::from_values(std::move(values));
}

// Distribution config schema:
//   {"kind": "geometric", "p": 0.5, "cap": 1000000}
//   {"kind": "poisson", "lambda": 1.0, "cap": 1000000}
//   {"kind": "powerlaw", "beta": 3.0, "cap": 1000000}
//   {"kind": "table", "p": [0.5, 0.25, 0.25]}
//   {"kind": "weights", "w": [1, 0, 1], "tilt": {<pmf config>}}
inline OffspringDistribution distribution_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("distribution config must be an object with a \"kind\"");
    }
    const std::string kind = j.at("kind").get<std::string>();
    const Index cap = j.value("cap", OffspringDistribution::kDefaultCap);
    if (kind == "geometric") return OffspringDistribution::geometric(j.at("p").get<double>(), cap);
    if (kind == "poisson") return OffspringDistribution::poisson(j.at("lambda").get<double>(), cap);
    if (kind == "powerlaw") return OffspringDistribution::powerlaw(j.at("beta").get<double>(), cap);
    if (kind == "table") {
        return OffspringDistribution::table(j.at("p").get<std::vector<double>>());
    }
    if (kind == "weights") {
        std::optional<OffspringDistribution> tilt;
        if (j.contains("tilt") && !j.at("tilt").is_null()) {
            tilt = distribution_from_json(j.at("tilt"));
        }
        return OffspringDistribution::weight_sequence(j.at("w").get<std::vector<double>>(),
                                                      std::move(tilt));
    }
    throw ConfigError("unknown distribution kind: " + kind);
}

inline OffspringDistribution distribution_from_json_text(const std::string& text) {
    try {
        return distribution_from_json(Json::parse(text));
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("distribution JSON parse error: ") + e.what());
    }
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoFailure("cannot open " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoFailure("cannot open " + path + " for writing");
    out << contents;
    if (!out) throw IoFailure("write failed: " + path);
}

}  // namespace arbor
