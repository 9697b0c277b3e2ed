#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fractlab {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// One evaluated (k, n) or (x, R, r) point of a dimension estimate.
struct Witness {
    int k = -1;
    int n = -1;
    std::optional<long double> x;
    double R_log2 = kNaN;
    double r_log2 = kNaN;
    long double N = 0;
    bool certified = true;
    double exponent = kNaN;
};

struct ConvergenceRow {
    int n_min = 0;
    double value = kNaN;
};

struct DimensionReport {
    std::string kind;
    double value = 0.0;  // clamped to [0, 1]
    double raw = 0.0;
    std::string status = "finite-window";
    int k_max = -1, n_min = -1, n_max = -1;
    Witness witness;
    std::vector<Witness> pairs;
    std::vector<ConvergenceRow> convergence;
    std::size_t skipped = 0;
    std::vector<std::string> log;

    void set_value(double v) {
        raw = v;
        value = std::isnan(v) ? v : std::min(1.0, std::max(0.0, v));
    }
};

/// 12 significant digits, the precision used for every printed log value.
inline std::string fmt12(double v) {
    if (std::isnan(v))
        return "";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string fmt12(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12Lg", v);
    return buf;
}

namespace detail {
inline void csv_row(std::ostringstream& os, const std::string& kind, double value, const Witness& w) {
    os << kind << ',' << fmt12(value) << ',';
    if (w.k >= 0)
        os << w.k;
    os << ',';
    if (w.n >= 0)
        os << w.n;
    os << ',';
    if (w.x)
        os << fmt12(*w.x);
    os << ',' << fmt12(w.R_log2) << ',' << fmt12(w.r_log2) << ',';
    if (w.N > 0)
        os << fmt12(w.N);
    os << ',' << (w.certified ? "true" : "false") << '\n';
}
} // namespace detail

/// CSV with the summary row first, then one row per sampled pair.
inline std::string to_csv(const DimensionReport& r) {
    std::ostringstream os;
    os << "kind,value,k,n,x,R_log2,r_log2,N,certified\n";
    detail::csv_row(os, r.kind, r.value, r.witness);
    for (const auto& p : r.pairs)
        detail::csv_row(os, r.kind + ":pair", p.exponent, p);
    return os.str();
}

inline nlohmann::json witness_json(const Witness& w) {
    nlohmann::json j = nlohmann::json::object();
    if (w.k >= 0)
        j["k"] = w.k;
    if (w.n >= 0)
        j["n"] = w.n;
    if (w.x)
        j["x"] = fmt12(*w.x);
    if (!std::isnan(w.R_log2))
        j["R_log2"] = fmt12(w.R_log2);
    if (!std::isnan(w.r_log2))
        j["r_log2"] = fmt12(w.r_log2);
    if (w.N > 0)
        j["N"] = fmt12(w.N);
    j["certified"] = w.certified;
    return j;
}

inline nlohmann::json to_json(const DimensionReport& r) {
    nlohmann::json j;
    j["kind"] = r.kind;
    j["value"] = fmt12(r.value);
    j["raw"] = fmt12(r.raw);
    j["status"] = r.status;
    if (r.k_max >= 0)
        j["window"] = {{"k_max", r.k_max}, {"n_min", r.n_min}, {"n_max", r.n_max}};
    j["witness"] = witness_json(r.witness);
    nlohmann::json conv = nlohmann::json::array();
    for (const auto& c : r.convergence)
        conv.push_back({{"n_min", c.n_min}, {"value", fmt12(c.value)}});
    j["convergence"] = conv;
    j["pairs_evaluated"] = r.pairs.size();
    j["skipped"] = r.skipped;
    j["log"] = r.log;
    return j;
}

} // namespace fractlab
