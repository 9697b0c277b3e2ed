#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fractlab/covering.hpp"
#include "fractlab/gap_sequence.hpp"
#include "fractlab/parallel.hpp"
#include "fractlab/report.hpp"
#include "fractlab/seq_core.hpp"
#include "fractlab/sets.hpp"

namespace fractlab {

// Formula windows ------------------------------------------------------------

namespace detail {

inline DimensionReport formula_grid(const GapSequenceModel& m, int k_max, int n_min, int n_max, bool upper) {
    if (n_min < 1 || n_min > n_max)
        throw ConfigError("formula window needs 1 <= n_min <= n_max");
    if (k_max < 0)
        throw ConfigError("formula window needs k_max >= 0");
    std::vector<double> s;
    for (int j = 0; j <= k_max + n_max; ++j)
        s.push_back(m.scale(j).log2());
    DimensionReport rep;
    rep.kind = upper ? "assouad_formula" : "lower_formula";
    rep.k_max = k_max;
    rep.n_min = n_min;
    rep.n_max = n_max;
    // best per n first, so the convergence table is a suffix reduction
    std::vector<Witness> per_n;
    for (int n = n_min; n <= n_max; ++n) {
        Witness best;
        for (int k = 0; k <= k_max; ++k) {
            const double lr = s[static_cast<std::size_t>(k)] - s[static_cast<std::size_t>(k + n)];
            if (!(lr > 0.0) || !std::isfinite(lr))
                throw RangeError("log(s_k / s_{k+n}) is not positive and finite at k=" + std::to_string(k) +
                                 ", n=" + std::to_string(n));
            const double v = n / lr;
            if (best.n < 0 || (upper ? v > best.exponent : v < best.exponent)) {
                best.k = k;
                best.n = n;
                best.exponent = v;
            }
        }
        per_n.push_back(best);
    }
    std::optional<Witness> acc;
    std::vector<ConvergenceRow> conv;
    for (auto it = per_n.rbegin(); it != per_n.rend(); ++it) {
        // ">=" on the way down keeps the smallest n among ties
        if (!acc || (upper ? it->exponent >= acc->exponent : it->exponent <= acc->exponent))
            acc = *it;
        conv.push_back({it->n, acc->exponent});
    }
    rep.convergence.assign(conv.rbegin(), conv.rend());
    rep.witness = *acc;
    rep.set_value(acc->exponent);
    return rep;
}

} // namespace detail

/// max over n_min <= n <= n_max, 0 <= k <= k_max of n log 2 / log(s_k / s_{k+n}).
inline DimensionReport assouad_formula(const GapSequenceModel& m, int k_max, int n_min, int n_max) {
    return detail::formula_grid(m, k_max, n_min, n_max, true);
}

/// The min/min dual of assouad_formula.
inline DimensionReport lower_formula(const GapSequenceModel& m, int k_max, int n_min, int n_max) {
    return detail::formula_grid(m, k_max, n_min, n_max, false);
}

/// Re-evaluates a formula witness.
inline double formula_value_at(const GapSequenceModel& m, int k, int n) {
    return n / (m.scale(k).log2() - m.scale(k + n).log2());
}

/// min_{k <= horizon} s_{k+1} / s_k.
inline Diagnostic lower_zero_test(const GapSequenceModel& m, int horizon) {
    Diagnostic d;
    d.log2_value = std::numeric_limits<double>::infinity();
    double prev = m.scale(0).log2();
    for (int k = 0; k <= horizon; ++k) {
        const double next = m.scale(k + 1).log2();
        if (next - prev < d.log2_value) {
            d.log2_value = next - prev;
            d.at = static_cast<Index>(k);
        }
        prev = next;
    }
    d.value = std::exp2(d.log2_value);
    return d;
}

struct DaClassification {
    std::string verdict;  // "zero" or "one"
    double epsilon = kNaN;
    double floor = 1e-6;
    std::vector<std::pair<Index, double>> evidence;  // (horizon, epsilon*)
    bool stable = true;
};

/// dim_A D_a is 0 or 1; it is 0 exactly when a_j >= eps sum_{i>j} a_i for some
/// eps > 0. The prefix test asks that epsilon* stays above `floor` on every
/// horizon and does not halve from one horizon to the next.
inline DaClassification classify_Da(const GapSequenceModel& m, double floor = 1e-6,
                                    std::vector<Index> horizons = {Index{1} << 8, Index{1} << 10, Index{1} << 12}) {
    if (horizons.empty())
        throw ConfigError("classify_Da needs at least one horizon");
    std::sort(horizons.begin(), horizons.end());
    DaClassification c;
    c.floor = floor;
    bool above = true;
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        const double eps = lacunarity_inf(m, horizons[i]).value;
        c.evidence.emplace_back(horizons[i], eps);
        if (eps < floor)
            above = false;
        if (i > 0 && eps < c.evidence[i - 1].second / 2)
            c.stable = false;
    }
    c.epsilon = c.evidence.back().second;
    c.verdict = above && c.stable ? "zero" : "one";
    return c;
}

// Empirical estimators --------------------------------------------------------

struct ScalePair {
    LogLength R, r;
    int k = -1, n = -1;
    std::optional<long double> x;  // unset: every placed endpoint is a center
};

using SamplingPlan = std::vector<ScalePair>;

inline LogLength max_residual_gap(const Approximation& ap) {
    LogLength g;
    for (const auto& r : ap.residuals)
        g = std::max(g, r.max_gap);
    return g;
}

/// Pairs (R, r) = (s_k, s_{k+n}) of the source sequence with n >= n_min and r
/// no smaller than the largest unplaced gap, so every pair can be certified.
inline SamplingPlan default_plan(const GapSequenceModel& source, const Approximation& ap, int n_min = 8,
                                 int n_max = 1 << 20) {
    const LogLength g = max_residual_gap(ap);
    std::vector<LogLength> s;
    for (int j = 0; j <= kMaxIndexLevel; ++j) {
        LogLength v;
        try {
            v = source.scale(j);
        } catch (const RangeError&) {
            break;
        }
        if (v.is_zero() || v < g)
            break;
        s.push_back(v);
    }
    SamplingPlan plan;
    const int top = static_cast<int>(s.size()) - 1;
    for (int n = n_min; n <= std::min(n_max, top); ++n)
        for (int k = 0; k + n <= top; ++k)
            plan.push_back({s[static_cast<std::size_t>(k)], s[static_cast<std::size_t>(k + n)], k, n, std::nullopt});
    return plan;
}

/// Precomputed structure for many covering queries on one approximation:
/// binary-lifting jump tables over the endpoints (one per ball diameter) and a
/// sparse table of residual max gaps for certification.
class CoverEngine {
public:
    explicit CoverEngine(const Approximation& ap) : ap_(ap), E_(ap.endpoints) {
        const std::size_t m = ap.residuals.size();
        std::vector<double> base(m);
        for (std::size_t i = 0; i < m; ++i)
            base[i] = ap.residuals[i].max_gap.log2();
        sparse_.push_back(std::move(base));
        for (std::size_t w = 1; 2 * w <= m; w *= 2) {
            const auto& prev = sparse_.back();
            std::vector<double> cur(m - 2 * w + 1);
            for (std::size_t i = 0; i < cur.size(); ++i)
                cur[i] = std::max(prev[i], prev[i + w]);
            sparse_.push_back(std::move(cur));
        }
    }

    const Approximation& approx() const { return ap_; }
    const std::vector<long double>& endpoints() const { return E_; }

    /// Builds jump tables for the given radii (in parallel).
    void prepare(const std::vector<LogLength>& radii) {
        std::vector<LogLength> todo;
        for (auto r : radii)
            if (!tables_.count(r.log2()) && std::find(todo.begin(), todo.end(), r) == todo.end())
                todo.push_back(r);
        std::vector<std::vector<std::vector<std::uint32_t>>> built(todo.size());
        parallel_for(todo.size(), [&](std::size_t i) { built[i] = build_table(todo[i]); });
        for (std::size_t i = 0; i < todo.size(); ++i)
            tables_.emplace(todo[i].log2(), std::move(built[i]));
    }

    /// Largest unplaced gap (log2) among residuals meeting [a, b].
    double residual_max_gap(long double a, long double b) const {
        const auto& res = ap_.residuals;
        auto lo = std::lower_bound(res.begin(), res.end(), a, [](const Residual& r, long double v) { return r.hi < v; });
        auto hi = std::upper_bound(res.begin(), res.end(), b, [](long double v, const Residual& r) { return v < r.lo; });
        if (lo >= hi)
            return -std::numeric_limits<double>::infinity();
        const std::size_t i = static_cast<std::size_t>(lo - res.begin());
        const std::size_t j = static_cast<std::size_t>(hi - res.begin());  // exclusive
        const std::size_t len = j - i;
        const int lvl = 63 - std::countl_zero(static_cast<std::uint64_t>(len));
        const auto& row = sparse_[static_cast<std::size_t>(lvl)];
        return std::max(row[i], row[j - (std::size_t{1} << lvl)]);
    }

    bool certified(long double x, const ScalePair& p) const {
        const long double R = p.R.value();
        return residual_max_gap(x - R, x + R) <= p.r.log2();
    }

    /// Greedy count over the placed endpoints in B(x, R): equals
    /// local_cover(...).lower.
    long double lower_count(long double x, const ScalePair& p) const {
        const long double R = p.R.value();
        const auto i0 = std::lower_bound(E_.begin(), E_.end(), x - R) - E_.begin();
        const auto i1 = std::upper_bound(E_.begin(), E_.end(), x + R) - E_.begin();
        if (i0 >= i1)
            return 0;
        auto it = tables_.find(p.r.log2());
        if (it == tables_.end()) {
            std::vector<Atom> atoms;
            for (auto i = i0; i < i1; ++i)
                atoms.push_back({E_[static_cast<std::size_t>(i)], E_[static_cast<std::size_t>(i)]});
            return greedy_cover(atoms, p.r);
        }
        const auto& up = it->second;
        std::uint32_t pos = static_cast<std::uint32_t>(i0);
        const std::uint32_t last = static_cast<std::uint32_t>(i1 - 1);
        long double count = 1;
        for (std::size_t b = up.size(); b-- > 0;) {
            const std::uint32_t nxt = up[b][pos];
            if (nxt <= last) {
                pos = nxt;
                count += std::ldexp(1.0L, static_cast<int>(b));
            }
        }
        return count;
    }

    /// Greedy count over residuals and endpoints in B(x, R): equals
    /// local_cover(...).upper.
    long double upper_count(long double x, const ScalePair& p) const {
        const long double R = p.R.value();
        return greedy_cover(window_atoms(ap_, x - R, x + R, true), p.r);
    }

private:
    std::vector<std::vector<std::uint32_t>> build_table(LogLength r) const {
        const long double d = ball_diameter(r);
        const std::size_t m = E_.size();
        std::vector<std::vector<std::uint32_t>> up;
        std::vector<std::uint32_t> next(m);
        // next[i]: first endpoint beyond the ball [E_i, E_i + 2r]
        std::size_t j = 0;
        for (std::size_t i = 0; i < m; ++i) {
            j = std::max(j, i);
            while (j < m && E_[j] <= E_[i] + d)
                ++j;
            next[i] = static_cast<std::uint32_t>(j);
        }
        up.push_back(std::move(next));
        for (std::size_t b = 1; (std::size_t{1} << b) < m; ++b) {
            const auto& prev = up.back();
            std::vector<std::uint32_t> cur(m);
            for (std::size_t i = 0; i < m; ++i)
                cur[i] = prev[i] >= m ? static_cast<std::uint32_t>(m) : prev[prev[i]];
            up.push_back(std::move(cur));
        }
        return up;
    }

    const Approximation& ap_;
    const std::vector<long double>& E_;
    std::vector<std::vector<double>> sparse_;
    std::map<double, std::vector<std::vector<std::uint32_t>>> tables_;
};

inline double cover_exponent(long double N, const ScalePair& p) {
    if (N <= 1)
        return 0.0;
    return static_cast<double>(std::log2(N)) / (p.R.log2() - p.r.log2());
}

namespace detail {

// higher exponent first, then (n, k) ascending, then x ascending
inline bool better_witness(const Witness& a, const Witness& b, bool want_max) {
    if (a.exponent != b.exponent)
        return want_max ? a.exponent > b.exponent : a.exponent < b.exponent;
    if (a.n != b.n)
        return a.n < b.n;
    if (a.k != b.k)
        return a.k < b.k;
    return a.x.value_or(0) < b.x.value_or(0);
}

inline Witness make_witness(const ScalePair& p, long double x, long double N, double e) {
    Witness w;
    w.k = p.k;
    w.n = p.n;
    w.x = x;
    w.R_log2 = p.R.log2();
    w.r_log2 = p.r.log2();
    w.N = N;
    w.certified = true;
    w.exponent = e;
    return w;
}

inline void finish_empirical(DimensionReport& rep, std::vector<std::optional<Witness>>& per_pair, bool want_max) {
    std::optional<Witness> best;
    std::map<int, Witness> by_n;
    for (auto& w : per_pair) {
        if (!w)
            continue;
        rep.pairs.push_back(*w);
        if (!best || better_witness(*w, *best, want_max))
            best = *w;
        auto it = by_n.find(w->n);
        if (it == by_n.end() || better_witness(*w, it->second, want_max))
            by_n[w->n] = *w;
    }
    if (!best) {
        rep.status = "no-valid-pair";
        rep.set_value(0.0);
        rep.log.push_back("no certified (x, R, r) sample; value 0 by convention");
        return;
    }
    rep.witness = *best;
    rep.set_value(best->exponent);
    std::optional<Witness> acc;
    std::vector<ConvergenceRow> conv;
    for (auto it = by_n.rbegin(); it != by_n.rend(); ++it) {
        if (!acc || better_witness(it->second, *acc, want_max) || it->second.exponent == acc->exponent)
            acc = it->second;
        conv.push_back({it->first, acc->exponent});
    }
    rep.convergence.assign(conv.rbegin(), conv.rend());
    int nmin = std::numeric_limits<int>::max(), nmax = -1, kmax = -1;
    for (const auto& p : rep.pairs) {
        nmin = std::min(nmin, p.n);
        nmax = std::max(nmax, p.n);
        kmax = std::max(kmax, p.k);
    }
    rep.n_min = nmin;
    rep.n_max = nmax;
    rep.k_max = kmax;
}

inline std::vector<long double> centers_for(const CoverEngine& eng, const ScalePair& p) {
    if (p.x)
        return {*p.x};
    return eng.endpoints();
}

inline std::string pair_name(const ScalePair& p) {
    return "(k=" + std::to_string(p.k) + ", n=" + std::to_string(p.n) + ", R_log2=" + fmt12(p.R.log2()) +
           ", r_log2=" + fmt12(p.r.log2()) + ")";
}

inline void validate_plan(const SamplingPlan& plan, const Approximation& ap) {
    for (const auto& p : plan) {
        if (!(p.r < p.R))
            throw ConfigError("sampling plan pair " + pair_name(p) + " violates r < R");
        if (p.R > ap.total)
            throw ConfigError("sampling plan pair " + pair_name(p) + " has R above the diameter");
    }
}

} // namespace detail

/// max over sampled (x, R, r) of log N / log(R / r), N the certified lower
/// bound from the placed endpoints.
inline DimensionReport assouad_empirical(const Approximation& ap, const SamplingPlan& plan) {
    detail::validate_plan(plan, ap);
    CoverEngine eng(ap);
    std::vector<LogLength> radii;
    for (const auto& p : plan)
        if (!p.x)
            radii.push_back(p.r);
    eng.prepare(radii);
    DimensionReport rep;
    rep.kind = "assouad_empirical";
    std::vector<std::optional<Witness>> per_pair(plan.size());
    std::vector<std::size_t> skipped(plan.size(), 0);
    parallel_for(plan.size(), [&](std::size_t i) {
        const ScalePair& p = plan[i];
        for (long double x : detail::centers_for(eng, p)) {
            if (!eng.certified(x, p)) {
                ++skipped[i];
                continue;
            }
            const long double N = eng.lower_count(x, p);
            const Witness w = detail::make_witness(p, x, N, cover_exponent(N, p));
            if (!per_pair[i] || detail::better_witness(w, *per_pair[i], true))
                per_pair[i] = w;
        }
    });
    for (std::size_t i = 0; i < plan.size(); ++i) {
        rep.skipped += skipped[i];
        if (!per_pair[i])
            rep.log.push_back("pair " + detail::pair_name(plan[i]) + " skipped: no certified center");
        else if (skipped[i])
            rep.log.push_back("pair " + detail::pair_name(plan[i]) + ": " + std::to_string(skipped[i]) +
                              " uncertified centers skipped");
    }
    detail::finish_empirical(rep, per_pair, true);
    return rep;
}

/// min over sampled (x, R, r) of log N / log(R / r), N the certified upper
/// bound from residuals and endpoints.
inline DimensionReport lower_empirical(const Approximation& ap, const SamplingPlan& plan) {
    detail::validate_plan(plan, ap);
    CoverEngine eng(ap);
    std::vector<LogLength> radii;
    for (const auto& p : plan)
        if (!p.x)
            radii.push_back(p.r);
    eng.prepare(radii);
    DimensionReport rep;
    rep.kind = "lower_empirical";

    // every certified candidate with its lower-count exponent; the upper
    // exponent is never smaller, so candidates are visited in that order and
    // the scan stops once no remaining one can beat the best upper exponent
    struct Cand {
        double lower_e;
        std::uint32_t pair;
        long double x;
    };
    std::vector<std::vector<Cand>> per(plan.size());
    std::vector<std::size_t> skipped(plan.size(), 0);
    parallel_for(plan.size(), [&](std::size_t i) {
        const ScalePair& p = plan[i];
        for (long double x : detail::centers_for(eng, p)) {
            if (!eng.certified(x, p)) {
                ++skipped[i];
                continue;
            }
            per[i].push_back({cover_exponent(eng.lower_count(x, p), p), static_cast<std::uint32_t>(i), x});
        }
    });
    std::vector<Cand> all;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        all.insert(all.end(), per[i].begin(), per[i].end());
        rep.skipped += skipped[i];
        if (per[i].empty())
            rep.log.push_back("pair " + detail::pair_name(plan[i]) + " skipped: no certified center");
        else if (skipped[i])
            rep.log.push_back("pair " + detail::pair_name(plan[i]) + ": " + std::to_string(skipped[i]) +
                              " uncertified centers skipped");
        per[i].clear();
        per[i].shrink_to_fit();
    }
    std::sort(all.begin(), all.end(), [](const Cand& a, const Cand& b) {
        if (a.lower_e != b.lower_e)
            return a.lower_e < b.lower_e;
        if (a.pair != b.pair)
            return a.pair < b.pair;
        return a.x < b.x;
    });

    std::vector<std::optional<Witness>> per_pair(plan.size());
    double bound = std::numeric_limits<double>::infinity();
    const std::size_t batch = 512;
    std::size_t evaluated = 0;
    for (std::size_t start = 0; start < all.size() && all[start].lower_e <= bound; start += batch) {
        const std::size_t stop = std::min(all.size(), start + batch);
        std::vector<double> up(stop - start, kNaN);
        std::vector<long double> counts(stop - start, 0);
        const double cutoff = bound;
        parallel_for(stop - start, [&](std::size_t t) {
            const Cand& c = all[start + t];
            if (c.lower_e > cutoff)
                return;
            counts[t] = eng.upper_count(c.x, plan[c.pair]);
            up[t] = cover_exponent(counts[t], plan[c.pair]);
        });
        for (std::size_t t = 0; t < up.size(); ++t) {
            if (std::isnan(up[t]))
                continue;
            ++evaluated;
            const Cand& c = all[start + t];
            const Witness w = detail::make_witness(plan[c.pair], c.x, counts[t], up[t]);
            auto& slot = per_pair[c.pair];
            if (!slot || detail::better_witness(w, *slot, false))
                slot = w;
            bound = std::min(bound, up[t]);
        }
    }
    rep.log.push_back("upper counts evaluated for " + std::to_string(evaluated) + " of " +
                      std::to_string(all.size()) + " certified samples");
    detail::finish_empirical(rep, per_pair, false);
    return rep;
}

/// Re-evaluates an empirical witness through local_cover.
inline double empirical_value_at(const Approximation& ap, const Witness& w, bool upper_bound) {
    CoverQuery q{*w.x, LogLength::from_log2(w.R_log2), LogLength::from_log2(w.r_log2)};
    const CoverBounds cb = local_cover(ap, q);
    const ScalePair p{q.R, q.r, w.k, w.n, w.x};
    return cover_exponent(upper_bound ? cb.upper : cb.lower, p);
}

} // namespace fractlab
