#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fractlab/errors.hpp"
#include "fractlab/gap_sequence.hpp"

namespace fractlab {

/// A ratio given as a number, a decimal string, or a fraction "p/q".
inline double parse_ratio(const nlohmann::json& j) {
    if (j.is_number())
        return j.get<double>();
    if (!j.is_string())
        throw ConfigError("ratio must be a number or a string, got " + j.dump());
    const std::string s = j.get<std::string>();
    try {
        const auto slash = s.find('/');
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(s, &used);
            if (used != s.size())
                throw ConfigError("");
            return v;
        }
        const std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        std::size_t u1 = 0, u2 = 0;
        const double p = std::stod(num, &u1), q = std::stod(den, &u2);
        if (u1 != num.size() || u2 != den.size() || q == 0)
            throw ConfigError("");
        return p / q;
    } catch (const std::exception&) {
        throw ConfigError("cannot parse ratio '" + s + "'");
    }
}

/// A length given as {"log2": x}, a decimal string, or a number.
inline LogLength parse_length(const nlohmann::json& j) {
    if (j.is_object()) {
        if (!j.contains("log2") || !j["log2"].is_number())
            throw ConfigError("length object needs a numeric \"log2\" field");
        return LogLength::from_log2(j["log2"].get<double>());
    }
    if (j.is_number())
        return LogLength::from_value(j.get<double>());
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        try {
            std::size_t used = 0;
            const long double v = std::stold(s, &used);
            if (used != s.size())
                throw ConfigError("");
            return LogLength::from_value(v);
        } catch (const std::exception&) {
            throw ConfigError("cannot parse length '" + s + "'");
        }
    }
    throw ConfigError("length must be {\"log2\": x}, a decimal string or a number");
}

/// Comma-separated ratios; the last one repeats forever.
inline RatioSequence parse_ratio_list(const std::string& text) {
    std::vector<double> rs;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        rs.push_back(parse_ratio(nlohmann::json(item)));
    if (rs.empty())
        throw ConfigError("empty ratio list");
    const double last = rs.back();
    rs.pop_back();
    return RatioSequence(rs, last);
}

inline RatioSequence parse_ratio_sequence(const nlohmann::json& j) {
    std::vector<double> prefix;
    if (j.contains("ratios")) {
        if (!j["ratios"].is_array())
            throw ConfigError("\"ratios\" must be an array");
        for (const auto& r : j["ratios"])
            prefix.push_back(parse_ratio(r));
    }
    std::optional<double> then, inf_r, sup_r;
    if (j.contains("then"))
        then = parse_ratio(j["then"]);
    if (j.contains("inf_r"))
        inf_r = parse_ratio(j["inf_r"]);
    if (j.contains("sup_r"))
        sup_r = parse_ratio(j["sup_r"]);
    if (prefix.empty() && !then)
        throw ConfigError("from_ratios spec needs \"ratios\" or \"then\"");
    return RatioSequence(prefix, then, inf_r, sup_r);
}

inline ModelPtr model_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        throw ConfigError("sequence spec must be an object with a string \"kind\"");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "geometric") {
        if (!j.contains("lambda"))
            throw ConfigError("geometric spec needs \"lambda\"");
        const LogLength scale = j.contains("scale") ? parse_length(j["scale"]) : LogLength::one();
        return make_geometric(parse_ratio(j["lambda"]), scale);
    }
    if (kind == "level_constant") {
        if (!j.contains("levels") || !j["levels"].is_array())
            throw ConfigError("level_constant spec needs a \"levels\" array");
        std::vector<LogLength> lv;
        for (const auto& x : j["levels"])
            lv.push_back(parse_length(x));
        return make_level_constant(std::move(lv));
    }
    if (kind == "from_ratios") {
        const RatioSequence r = parse_ratio_sequence(j);
        if (j.contains("depth"))
            return make_from_ratios(r, j["depth"].get<int>());
        if (!r.infinite())
            return make_from_ratios(r, static_cast<int>(r.explicit_count()));
        return make_from_ratios(r);
    }
    if (kind == "explicit") {
        if (!j.contains("terms") || !j["terms"].is_array())
            throw ConfigError("explicit spec needs a \"terms\" array");
        std::vector<LogLength> t;
        for (const auto& x : j["terms"])
            t.push_back(parse_length(x));
        return make_explicit(std::move(t));
    }
    if (kind == "example35") {
        if (!j.contains("K") || !j["K"].is_number_integer())
            throw ConfigError("example35 spec needs an integer \"K\"");
        return make_example35(j["K"].get<int>());
    }
    throw ConfigError("unknown sequence kind '" + kind + "'");
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in '" + path + "': " + e.what());
    }
}

inline ModelPtr model_from_file(const std::string& path) {
    try {
        return model_from_json(read_json_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad sequence spec '" + path + "': " + e.what());
    }
}

} // namespace fractlab
