#pragma once

#include <bit>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fractlab/dimension.hpp"
#include "fractlab/gap_sequence.hpp"
#include "fractlab/report.hpp"
#include "fractlab/seq_core.hpp"
#include "fractlab/sets.hpp"

namespace fractlab {

/// One verified inequality of a construction.
struct Check {
    std::string name;
    int k = -1, j = -1;
    bool pass = false;
    std::string detail;
};

inline nlohmann::json checks_json(const std::vector<Check>& cs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : cs) {
        nlohmann::json j = {{"condition", c.name}, {"pass", c.pass}};
        if (c.k >= 0)
            j["k"] = c.k;
        if (c.j >= 0)
            j["j"] = c.j;
        if (!c.detail.empty())
            j["detail"] = c.detail;
        arr.push_back(j);
    }
    return arr;
}

inline bool all_pass(const std::vector<Check>& cs) {
    return std::all_of(cs.begin(), cs.end(), [](const Check& c) { return c.pass; });
}

namespace detail {

// central Cantor gap lengths by construction step i >= 1 (2^{i-1} gaps each)
struct StepLengths {
    const LevelModel* lm;
    LogLength operator()(int i) const { return lm->level_length(i - 1); }
};

inline const LevelModel& require_level(const ModelPtr& m) {
    const LevelModel* lm = m->as_level();
    if (!lm || !lm->dyadic())
        throw ConfigError("construction needs a central Cantor gap model");
    return *lm;
}

// the source's gaps left after taking `used[l]` from the front of each level
inline ModelPtr remainder_model(const ModelPtr& src, std::map<int, long double> used, const std::string& kind) {
    const LevelModel& lm = require_level(src);
    auto shared_used = std::make_shared<std::map<int, long double>>(std::move(used));
    LevelRule rule;
    rule.kind = kind;
    nlohmann::json removed = nlohmann::json::object();
    for (auto [l, c] : *shared_used)
        removed[std::to_string(l)] = static_cast<double>(c);
    rule.params = {{"source", src->describe()}, {"removed_per_level", removed}};
    rule.length = [src](int l) { return src->as_level()->level_length(l); };
    rule.count = [shared_used](int l) {
        auto it = shared_used->find(l);
        return std::ldexp(1.0L, l) - (it == shared_used->end() ? 0.0L : it->second);
    };
    rule.summation_cap = 4096;
    (void)lm;
    return std::make_shared<LevelModel>(std::move(rule));
}

inline std::function<Index(Index)> remainder_to_source(const ModelPtr& rem, const ModelPtr& src,
                                                       const std::map<int, long double>& used) {
    auto u = std::make_shared<std::map<int, long double>>(used);
    return [rem, src, u](Index i) {
        const LevelModel* r = rem->as_level();
        const LevelModel* s = src->as_level();
        const int l = r->level_of(i);
        auto it = u->find(l);
        const Index skip = it == u->end() ? 0 : static_cast<Index>(it->second);
        return s->level_start(l) + skip + (i - r->level_start(l));
    };
}

inline Region cantor_region(const ModelPtr& m, std::string label) {
    Region r;
    r.model = m;
    const Node root = make_tree_node(*m, 1);
    if (!root.mass.is_zero())
        r.forest.push_back(root);
    r.router = {Router::Kind::cantor, 0};
    r.label = std::move(label);
    return r;
}

inline void check_ratio_bounds(const RatioSequence& r) {
    if (!r.infinite() && !r.has_declared_bounds())
        throw ConfigError("ratio sequence must have a continuation or declared inf_r/sup_r");
}

} // namespace detail

// Prescribed Assouad dimension ----------------------------------------------

struct AssouadStage {
    int k = 0;
    int d_step = 0;  // d_k is the gap length of this construction step
    int n = 0;       // n_k, with n_k + 1 = d_step
    int skipped = 0; // admissible-looking steps passed over before d_step
    LogLength d, rho, R;
    std::vector<int> i;          // i_j, j = 0..k
    std::vector<LogLength> gaps; // A_k gaps in left to right order
};

struct AssouadTargetBuild {
    double s = 0, gamma = 0, alpha = 0;
    double window_dim = 0;  // assouad_formula of the source on the check window
    RatioSequence ratios;
    ModelPtr source;
    std::vector<AssouadStage> stages;
    std::map<int, long double> consumed;  // construction step -> gaps taken by the A_k
    Index separator_index = 1;
    ModelPtr remainder;
    Arrangement arrangement;
    std::vector<Check> checks;
    std::vector<std::string> log;

    /// delta_k = log(alpha / (1 - 2 gamma)) s / (k log(1 / gamma)).
    double delta(int k) const { return std::log(alpha / (1 - 2 * gamma)) * s / (k * std::log(1 / gamma)); }

    /// Leftmost point of A_k in the assembled arrangement.
    long double stage_left(int k) const {
        long double x = 0;
        for (auto it = stages.rbegin(); it != stages.rend() && it->k > k; ++it)
            x += it->R.value();
        return x;
    }
};

/// Builds `stages` blocks A_1..A_K, each the in-order placement of 2^j gaps of
/// length about d_k gamma^j for j = 0..k, followed by a separating gap and the
/// remaining gaps in Cantor order.
inline AssouadTargetBuild build_assouad_target(const RatioSequence& ratios, double s, int stages) {
    detail::check_ratio_bounds(ratios);
    if (stages < 1)
        throw ConfigError("stages must be at least 1");
    if (!(s < 1.0))
        throw DomainError("s = 1 is attained by the decreasing arrangement; build that instead");
    AssouadTargetBuild B;
    B.s = s;
    B.ratios = ratios;
    B.source = make_from_ratios(ratios);
    const LevelModel& lm = detail::require_level(B.source);
    const detail::StepLengths g{&lm};

    B.window_dim = assouad_formula(*B.source, 40, 10, 40).value;
    if (s < B.window_dim)
        throw DomainError("s = " + fmt12(s) + " is below dim_A of the central Cantor set (window value " +
                          fmt12(B.window_dim) + ")");
    const Diagnostic tau = doubling_constant(*B.source, Index{1} << 20);
    if (!std::isfinite(tau.value) || tau.value > 1e6)
        throw PreconditionError("gap sequence is not doubling on the checked horizon (tau* = " + fmt12(tau.value) +
                                ")");
    B.alpha = tau.value;
    B.gamma = std::exp2(-1.0 / s);
    const double lg_gamma = -1.0 / s;
    const double lg_c8 = 2 * std::log2(B.alpha) - std::log2(1 - 2 * B.gamma);  // alpha^2 / (1 - 2 gamma)
    const double lg_c = std::log2(B.alpha) - std::log2(1 - 2 * B.gamma);       // alpha / (1 - 2 gamma)

    B.checks.push_back({"gamma < 1/2 and gamma^s = 1/2", -1, -1,
                        B.gamma < 0.5 && std::fabs(std::pow(B.gamma, s) - 0.5) <= 1e-12, "gamma=" + fmt12(B.gamma)});

    std::vector<LogLength> d;  // d_1..d_k (index 0 unused)
    d.push_back(LogLength::zero());
    int prev_step = 0;
    for (int k = 1; k <= stages; ++k) {
        AssouadStage st;
        st.k = k;
        if (k == 1) {
            st.d_step = 5;
        } else {
            const int first = std::max(k + 4, prev_step + 1);
            int i = first;
            for (;; ++i) {
                if (i > 4000)
                    throw ConstructionError("no gap level satisfies the scale-gap and tail-budget conditions at k=" + std::to_string(k));
                const LogLength cand = g(i);
                bool ok = k <= s * (d[static_cast<std::size_t>(k - 1)].log2() - cand.log2());
                for (int j = 1; ok && j < k; ++j) {
                    std::vector<LogLength> tail(d.begin() + j + 1, d.end());
                    tail.push_back(cand);
                    ok = lg_c8 + log_sum(tail).log2() < d[static_cast<std::size_t>(j)].log2() + j * lg_gamma;
                }
                if (ok)
                    break;
            }
            st.d_step = i;
            st.skipped = i - first;
        }
        st.d = g(st.d_step);
        st.n = st.d_step - 1;
        d.push_back(st.d);
        prev_step = st.d_step;
        // n_k + i_j = max{l : g_l >= d_k gamma^j}
        int l = st.n + 1;
        for (int j = 0; j <= k; ++j) {
            const double target = st.d.log2() + j * lg_gamma;
            while (g(l + 1).log2() >= target)
                ++l;
            st.i.push_back(l - st.n);
        }
        // in-order traversal of the full binary tree of height k
        const Index count = (Index{1} << (k + 1)) - 1;
        for (Index p = 1; p <= count; ++p) {
            const int j = k - std::countr_zero(p);
            st.gaps.push_back(g(st.n + st.i[static_cast<std::size_t>(j)]));
        }
        for (int j = 0; j <= k; ++j)
            B.consumed[st.n + st.i[static_cast<std::size_t>(j)]] += std::ldexp(1.0L, j);
        st.R = log_sum(st.gaps);
        st.rho = st.d.scaled_pow2(k * lg_gamma);
        if (st.skipped > 0)
            B.log.push_back("k=" + std::to_string(k) + ": skipped " + std::to_string(st.skipped) +
                            " gap levels before the scale-gap and tail-budget conditions held");
        B.stages.push_back(std::move(st));
    }

    // invariants, each checked directly
    for (std::size_t idx = 0; idx < B.stages.size(); ++idx) {
        const AssouadStage& st = B.stages[idx];
        const int k = st.k;
        if (k >= 2) {
            const double lhs = k, rhs = s * (B.stages[idx - 1].d.log2() - st.d.log2());
            B.checks.push_back({"scale gap 2^k <= (d_{k-1}/d_k)^s", k, -1, lhs <= rhs, "log2: " + fmt12(lhs) + " <= " + fmt12(rhs)});
            for (int j = 1; j < k; ++j) {
                std::vector<LogLength> part;
                for (int i = j + 1; i <= k; ++i)
                    part.push_back(B.stages[static_cast<std::size_t>(i - 1)].d);
                const double l8 = lg_c8 + log_sum(part).log2();
                const double r8 = B.stages[static_cast<std::size_t>(j - 1)].d.log2() + j * lg_gamma;
                B.checks.push_back({"tail budget alpha^2/(1-2 gamma) sum_{i>j} d_i < d_j gamma^j", k, j, l8 < r8, "log2: " + fmt12(l8) + " < " + fmt12(r8)});
            }
        }
        B.checks.push_back({"n_k > k+2", k, -1, st.n > k + 2, "n_k=" + std::to_string(st.n)});
        if (idx > 0)
            B.checks.push_back({"n_k increasing", k, -1, st.n > B.stages[idx - 1].n, ""});
        B.checks.push_back({"g_{n_k+2} < d_k <= g_{n_k+1}", k, -1, g(st.n + 2) < st.d && st.d <= g(st.n + 1), ""});
        B.checks.push_back({"i_0 = 1", k, -1, st.i.front() == 1, ""});
        for (int j = 0; j <= k; ++j) {
            const int lvl = st.n + st.i[static_cast<std::size_t>(j)];
            const double t = st.d.log2() + j * lg_gamma;
            const bool ok = g(lvl + 1).log2() < t && t <= g(lvl).log2() &&
                            g(lvl).log2() <= std::log2(B.alpha) + t + 1e-12;
            B.checks.push_back({"gap sandwich g_{n_k+i_j+1} < d_k gamma^j <= g_{n_k+i_j} <= alpha d_k gamma^j", k, j,
                                ok, "level " + std::to_string(lvl)});
            if (j > 0)
                B.checks.push_back({"i_j nondecreasing", k, j,
                                    st.i[static_cast<std::size_t>(j)] >= st.i[static_cast<std::size_t>(j - 1)], ""});
        }
        B.checks.push_back({"d_k <= diam A_k < alpha/(1-2 gamma) d_k", k, -1,
                            st.d <= st.R && st.R.log2() < lg_c + st.d.log2(),
                            "log2 diam=" + fmt12(st.R.log2())});
        const bool chain = st.rho < st.R && (idx + 1 == B.stages.size() || B.stages[idx + 1].R < st.rho);
        B.checks.push_back({"R_{k+1} < rho_k < R_k", k, -1, chain, ""});
    }
    for (auto [step, used] : B.consumed) {
        const long double avail = std::ldexp(1.0L, step - 1);
        B.checks.push_back({"at most half of a level consumed", -1, -1, used <= avail / 2,
                            "step " + std::to_string(step) + ": " + fmt12(used) + " of " + fmt12(avail)});
        if (used > avail / 2)
            throw ConstructionError("gap budget exceeded at step " + std::to_string(step));
    }

    // remainder b' (source minus A gaps minus the separator a_1)
    std::map<int, long double> used_by_level;
    for (auto [step, used] : B.consumed)
        used_by_level[step - 1] += used;
    used_by_level[0] += 1;
    B.separator_index = 1;
    B.remainder = detail::remainder_model(B.source, used_by_level, "assouad_remainder");

    // gap accounting per level
    const LevelModel* rem = B.remainder->as_level();
    bool accounting = true;
    for (int l = 0; l < 48; ++l) {
        const long double a_side = rem->level_count(l) + (used_by_level.count(l) ? used_by_level[l] : 0.0L);
        accounting = accounting && a_side == std::ldexp(1.0L, l);
    }
    B.checks.push_back({"gap accounting (A gaps + separator + remainder = source, levels < 48)", -1, -1, accounting,
                        ""});

    // layout: A_K ... A_1, separator, remainder in Cantor order
    Arrangement& arr = B.arrangement;
    arr.source = B.source;
    arr.kind = "assouad_target";
    std::map<int, Index> next_index;  // construction step -> next unused source index
    std::vector<std::vector<FixedGap>> blocks(B.stages.size());
    for (std::size_t idx = 0; idx < B.stages.size(); ++idx) {
        const AssouadStage& st = B.stages[idx];
        const Index count = st.gaps.size();
        for (Index p = 1; p <= count; ++p) {
            const int j = st.k - std::countr_zero(p);
            const int step = st.n + st.i[static_cast<std::size_t>(j)];
            auto [it, fresh] = next_index.try_emplace(step, lm.level_start(step - 1));
            blocks[idx].push_back({static_cast<std::int64_t>(it->second++), st.gaps[p - 1]});
        }
    }
    for (auto it = blocks.rbegin(); it != blocks.rend(); ++it)
        for (const auto& fg : *it)
            arr.layout.push_back(fg);
    arr.layout.push_back(FixedGap{1, B.source->term(1)});
    Region tail = detail::cantor_region(B.remainder, "remainder");
    tail.to_source = detail::remainder_to_source(B.remainder, B.source, used_by_level);
    arr.layout.push_back(std::move(tail));
    arr.meta = {{"s", s}, {"stages", stages}, {"separator_index", 1}};

    const double mass_err = relative_difference(arr.total(), B.source->total());
    B.checks.push_back({"arrangement mass equals L", -1, -1, mass_err < 1e-10, "relative error " + fmt12(mass_err)});
    return B;
}

struct StageWitness {
    int k = 0;
    long double x = 0;
    long double N = 0;
    double exponent = 0;
    double delta = 0;
    bool certified = false;
};

/// Stage witness: at the left end of A_k, with R = diam A_k and
/// r = d_k gamma^k, at least 2^k balls are needed.
inline StageWitness assouad_stage_witness(const AssouadTargetBuild& B, const Approximation& ap, int k) {
    const AssouadStage& st = B.stages.at(static_cast<std::size_t>(k - 1));
    StageWitness w;
    w.k = k;
    // the left end of A_k, located on the placed endpoints to avoid drift
    const long double want = B.stage_left(k);
    auto it = std::lower_bound(ap.endpoints.begin(), ap.endpoints.end(), want);
    if (it != ap.endpoints.begin() && (it == ap.endpoints.end() || std::fabs(*(it - 1) - want) < std::fabs(*it - want)))
        --it;
    w.x = *it;
    const CoverBounds cb = local_cover(ap, {w.x, st.R, st.rho});
    w.N = cb.lower;
    w.certified = cb.certified;
    w.exponent = cover_exponent(cb.lower, ScalePair{st.R, st.rho, k, -1, w.x});
    w.delta = B.delta(k);
    return w;
}

inline nlohmann::json manifest_json(const AssouadTargetBuild& B) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& st : B.stages)
        stages.push_back({{"k", st.k},
                          {"d_step", st.d_step},
                          {"n_k", st.n},
                          {"skipped_levels", st.skipped},
                          {"d_log2", fmt12(st.d.log2())},
                          {"rho_log2", fmt12(st.rho.log2())},
                          {"R_log2", fmt12(st.R.log2())},
                          {"i_j", st.i},
                          {"delta_k", fmt12(B.delta(st.k))}});
    nlohmann::json consumed = nlohmann::json::object();
    for (auto [step, used] : B.consumed)
        consumed[std::to_string(step)] = static_cast<double>(used);
    return {{"construction", "assouad_target"},
            {"s", fmt12(B.s)},
            {"gamma", fmt12(B.gamma)},
            {"alpha", fmt12(B.alpha)},
            {"dim_A_window", fmt12(B.window_dim)},
            {"ratios", B.ratios.to_json()},
            {"stages", stages},
            {"consumed_by_step", consumed},
            {"separator_index", B.separator_index},
            {"checks", checks_json(B.checks)},
            {"all_pass", all_pass(B.checks)},
            {"log", B.log}};
}

// Prescribed lower dimension ------------------------------------------------

struct LowerTargetBuild {
    double alpha = 0, d = 0;
    double window_dim = 0;
    int N = 1;
    int depth = 0;
    RatioSequence ratios;
    ModelPtr source;
    std::vector<std::pair<int, int>> k_table;  // (j, k_j) over the built range
    ModelPtr b;          // C_b gaps
    ModelPtr remainder;  // b' without the separator
    Index separator_index = 1;
    double ratio_constant = kNaN;  // max of s_n^(b)/d^n and its inverse over the built range
    double remainder_equivalence = kNaN;
    Arrangement arrangement;
    std::vector<Check> checks;
    std::vector<std::string> log;
    bool decreasing_fallback = false;
};

/// C_b, whose step j-N+1 gaps copy the step k_j gaps of C{r_j}, followed by a
/// separating gap and the remaining gaps in Cantor order.
inline LowerTargetBuild build_lower_target(const RatioSequence& ratios, double alpha, int depth) {
    detail::check_ratio_bounds(ratios);
    if (depth < 1)
        throw ConfigError("depth must be at least 1");
    LowerTargetBuild B;
    B.alpha = alpha;
    B.depth = depth;
    B.ratios = ratios;
    B.source = make_from_ratios(ratios);
    if (alpha == 0.0) {
        B.decreasing_fallback = true;
        B.arrangement = decreasing_arrangement(B.source);
        B.log.push_back("alpha = 0: any countable arrangement has lower dimension 0; using the decreasing one");
        return B;
    }
    if (!(alpha > 0.0))
        throw DomainError("alpha must be nonnegative");
    const auto sup = ratios.sup_r();
    const auto inf = ratios.inf_r();
    if (!sup || !(*sup < 0.5) || !inf || !(*inf > 0.0))
        throw PreconditionError("the lower-dimension construction needs declared 0 < inf r_j and sup r_j < 1/2");
    B.window_dim = lower_formula(*B.source, 40, 10, 40).value;
    if (!(alpha < B.window_dim))
        throw DomainError("alpha = " + fmt12(alpha) + " is not below dim_L of the central Cantor set (window value " +
                          fmt12(B.window_dim) + ")");
    detail::require_level(B.source);
    B.d = std::exp2(-1.0 / alpha);
    const double lg_d = -1.0 / alpha;

    // k_j: s_{k_j} <= d^j < s_{k_j - 1}
    std::vector<double> s_lg;
    auto s_at = [&](int k) {
        while (static_cast<int>(s_lg.size()) <= k)
            s_lg.push_back(B.source->scale(static_cast<int>(s_lg.size())).log2());
        return s_lg[static_cast<std::size_t>(k)];
    };
    auto k_of = [&](int j) {
        int k = 1;
        while (s_at(k) > j * lg_d)
            ++k;
        return k;
    };
    // N: smallest start with k_j > j over the built range
    int N = 1;
    for (;; ++N) {
        bool ok = true;
        for (int j = N; ok && j < N + depth; ++j)
            ok = k_of(j) > j;
        if (ok)
            break;
        if (N > 1000)
            throw ConstructionError("no start index N with k_j > j on the built range");
    }
    B.N = N;
    // table long enough for the tail sums of C_b
    const int source_levels = 4000;
    auto ktab = std::make_shared<std::vector<int>>();
    for (int m = 0;; ++m) {
        const int k = k_of(N + m);
        if (k > source_levels)
            break;
        ktab->push_back(k);
    }
    for (int m = 0; m < depth; ++m)
        B.k_table.emplace_back(N + m, (*ktab)[static_cast<std::size_t>(m)]);

    LevelRule rule;
    rule.kind = "lower_target_b";
    rule.params = {{"alpha", alpha}, {"N", N}, {"source", B.source->describe()}};
    const ModelPtr src = B.source;
    rule.length = [src, ktab](int m) {
        if (m >= static_cast<int>(ktab->size()))
            throw RangeError("C_b level beyond the tabulated k_j");
        return src->as_level()->level_length((*ktab)[static_cast<std::size_t>(m)] - 1);
    };
    rule.count = [](int m) { return std::ldexp(1.0L, m); };
    rule.dyadic = true;
    rule.summation_cap = static_cast<int>(ktab->size()) - 1;
    B.b = std::make_shared<LevelModel>(std::move(rule));

    // consumption and the remainder
    std::map<int, long double> used_by_level;
    for (std::size_t m = 0; m < ktab->size(); ++m)
        used_by_level[(*ktab)[m] - 1] += std::ldexp(1.0L, static_cast<int>(m));
    for (auto [l, used] : used_by_level) {
        if (used > std::ldexp(1.0L, l - 1)) {
            throw ConstructionError("gap budget exceeded at step " + std::to_string(l + 1));
        }
    }
    used_by_level[0] += 1;
    B.separator_index = 1;
    B.remainder = detail::remainder_model(B.source, used_by_level, "lower_remainder");

    // checks over the built range
    int prev_k = 0;
    for (auto [j, k] : B.k_table) {
        const bool sandwich = s_at(k) <= j * lg_d && j * lg_d < s_at(k - 1);
        B.checks.push_back({"s_{k_j} <= d^j < s_{k_j-1}", k, j, sandwich, ""});
        B.checks.push_back({"k_j > j", k, j, k > j, ""});
        B.checks.push_back({"k_j nondecreasing", k, j, k >= prev_k, ""});
        B.checks.push_back({"at most half of a level consumed", k, j,
                            used_by_level[k - 1] <= std::ldexp(1.0L, k - 2), ""});
        prev_k = k;
    }
    double c_lg = 0;
    for (int n = 0; n <= depth; ++n)
        c_lg = std::max(c_lg, std::fabs(B.b->scale(n).log2() - n * lg_d));
    B.ratio_constant = std::exp2(c_lg);
    B.checks.push_back({"s_n^(b) / d^n bounded over the built range", -1, -1, std::isfinite(B.ratio_constant),
                        "c=" + fmt12(B.ratio_constant)});
    B.remainder_equivalence = equivalence_constant(*B.remainder, *B.source, Index{1} << 20).value;
    B.checks.push_back({"remainder equivalent to the source", -1, -1, std::isfinite(B.remainder_equivalence),
                        "c*=" + fmt12(B.remainder_equivalence)});

    Arrangement& arr = B.arrangement;
    arr.source = B.source;
    arr.kind = "lower_target";
    Region left = detail::cantor_region(B.b, "C_b");
    auto kt = ktab;
    const ModelPtr bm = B.b;
    left.to_source = [bm, src, kt, N](Index i) {
        // level m of b takes the first 2^m indices of source level k_{N+m} - 1
        // after any earlier b level that used the same source level
        const int m = heap_level(i);
        const int lvl = (*kt)[static_cast<std::size_t>(m)] - 1;
        Index offset = 0;
        for (int q = 0; q < m; ++q)
            if ((*kt)[static_cast<std::size_t>(q)] - 1 == lvl)
                offset += Index{1} << q;
        (void)N;
        return src->as_level()->level_start(lvl) + offset + (i - (Index{1} << m));
    };
    arr.layout.push_back(std::move(left));
    arr.layout.push_back(FixedGap{1, B.source->term(1)});
    Region right = detail::cantor_region(B.remainder, "remainder");
    right.to_source = detail::remainder_to_source(B.remainder, B.source, used_by_level);
    arr.layout.push_back(std::move(right));
    arr.meta = {{"alpha", alpha}, {"depth", depth}, {"N", N}, {"separator_index", 1}};

    const double mass_err = relative_difference(arr.total(), B.source->total());
    B.checks.push_back({"arrangement mass equals L", -1, -1, mass_err < 1e-10, "relative error " + fmt12(mass_err)});
    return B;
}

/// lower_formula of C_b on the window k <= depth, depth/2 <= n <= depth.
inline DimensionReport lower_target_dimension(const LowerTargetBuild& B) {
    return lower_formula(*B.b, B.depth, (B.depth + 1) / 2, B.depth);
}

inline nlohmann::json manifest_json(const LowerTargetBuild& B) {
    nlohmann::json kt = nlohmann::json::array();
    for (auto [j, k] : B.k_table)
        kt.push_back({{"j", j}, {"k_j", k}});
    nlohmann::json out = {{"construction", "lower_target"},
                          {"alpha", fmt12(B.alpha)},
                          {"ratios", B.ratios.to_json()},
                          {"log", B.log}};
    if (B.decreasing_fallback) {
        out["arrangement"] = "decreasing";
        return out;
    }
    out["d"] = fmt12(B.d);
    out["dim_L_window"] = fmt12(B.window_dim);
    out["N"] = B.N;
    out["depth"] = B.depth;
    out["k_table"] = kt;
    out["ratio_constant"] = fmt12(B.ratio_constant);
    out["remainder_equivalence"] = fmt12(B.remainder_equivalence);
    out["separator_index"] = B.separator_index;
    out["lower_formula_C_b"] = fmt12(lower_target_dimension(B).value);
    out["checks"] = checks_json(B.checks);
    out["all_pass"] = all_pass(B.checks);
    return out;
}

// Super-exponential example ----------------------------------------------------

struct Example35Sequence {
    int K = 0;
    std::vector<LogLength> g;  // g_0..g_K
    ModelPtr model;            // level k holds 2^k gaps of length g_k
    std::vector<Check> checks;
};

/// g_0 = 1, g_k = g_{k-1} 2^{-k(k+4)}; both growth conditions verified in log space.
inline Example35Sequence generate_example35(int K) {
    if (K < 1)
        throw ConfigError("K must be at least 1");
    Example35Sequence E;
    E.K = K;
    E.model = make_example35(K);
    const LevelModel& lm = *E.model->as_level();
    for (int k = 0; k <= K; ++k)
        E.g.push_back(lm.level_length(k));
    for (int k = 0; k < K; ++k) {
        // sum_{j >= k+1} 2^j g_j < g_k / 2
        const LogLength lhs = lm.level_tail(k + 1);
        const bool ok = lhs.log2() < E.g[static_cast<std::size_t>(k)].log2() - 1.0;
        E.checks.push_back({"tail below half: sum_{j>k} 2^j g_j < g_k/2", k, -1, ok, "log2 lhs=" + fmt12(lhs.log2())});
    }
    for (int k = 1; k <= K; ++k) {
        // (g_{k-1} / g_k)^{1/k} >= 2^{k+4}
        const double lhs = (E.g[static_cast<std::size_t>(k - 1)].log2() - E.g[static_cast<std::size_t>(k)].log2()) / k;
        E.checks.push_back({"level ratio (g_{k-1}/g_k)^{1/k} >= 2^{k+4}", k, -1, lhs >= k + 4, "log2 lhs=" + fmt12(lhs)});
    }
    for (int k = 1; k <= K; ++k)
        if (!(E.g[static_cast<std::size_t>(k)] < E.g[static_cast<std::size_t>(k - 1)]))
            E.checks.push_back({"strictly decreasing", k, -1, false, ""});
    if (!all_pass(E.checks))
        throw ConstructionError("example sequence failed its own verification");
    return E;
}

inline nlohmann::json manifest_json(const Example35Sequence& E) {
    nlohmann::json g = nlohmann::json::array();
    for (const auto& v : E.g)
        g.push_back(fmt12(v.log2()));
    return {{"construction", "example35"}, {"K", E.K}, {"g_log2", g}, {"checks", checks_json(E.checks)},
            {"all_pass", all_pass(E.checks)}};
}

} // namespace fractlab
