#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fractlab/gap_sequence.hpp"
#include "fractlab/report.hpp"

namespace fractlab {

/// s_n = 2^-n * sum_{j >= 2^n} a_j.
inline LogLength scale(const GapSequenceModel& model, int n) { return model.scale(n); }

struct RatioConversion {
    RatioSequence ratios;
    LogLength scale_factor;  // the model was divided by this before converting
};

/// Inverse of the central Cantor gap listing: 1 - 2 r_1 = a_1 and
/// r_1...r_n (1 - 2 r_{n+1}) = 2^-n (a_{2^n} + ... + a_{2^{n+1}-1}), after
/// normalising the total to 1. Subtracting the block from 2^n r_1...r_n leaves
/// 2^{n+1} r_1...r_{n+1}, the tail past level n, so r_{n+1} is read as a ratio
/// of consecutive tails; no differences are taken.
inline RatioConversion ratios_from_gaps(const GapSequenceModel& model, int count) {
    if (count < 1)
        throw ConfigError("ratio count must be at least 1");
    const LogLength L = model.total();
    std::vector<double> r;
    r.reserve(static_cast<std::size_t>(count));
    LogLength prev = L;  // tail(2^n - 1)
    for (int n = 0; n < count; ++n) {
        if (n + 1 > kMaxIndexLevel)
            throw RangeError("ratio r_" + std::to_string(n + 1) + " needs gaps past index 2^62");
        const LogLength next = model.tail((Index{2} << n) - 1);
        const double rn = next.is_zero() ? 0.0 : std::exp2(next.log2() - prev.log2() - 1.0);
        if (!(rn > 0.0 && rn < 0.5))
            throw DegeneracyError("ratio r_" + std::to_string(n + 1) + " = " + fmt12(rn) +
                                  " is outside (0, 1/2): the gaps are not those of a central Cantor set");
        r.push_back(rn);
        prev = next;
    }
    return {RatioSequence(std::move(r)), L};
}

/// Central Cantor gaps of C{r_j}, explicit for levels below `depth`. The mass
/// past that depth is carried as an exact level tail, which requires either a
/// continuation rule or declared bounds on the ratios.
inline ModelPtr gaps_from_ratios(const RatioSequence& r, int depth) {
    if (depth < 1)
        throw ConfigError("depth must be at least 1");
    if (r.infinite())
        return make_from_ratios(r);
    if (!r.has_declared_bounds())
        throw ConfigError("ratio sequence is finite and declares no inf_r/sup_r; the tail beyond depth " +
                          std::to_string(depth) + " cannot be certified");
    return make_from_ratios(r, depth);
}

struct Diagnostic {
    double value = kNaN;
    double log2_value = kNaN;
    Index at = 0;  // index attaining the extremum
    std::string verdict;
};

/// tau* = max_{n <= horizon} a_n / a_{2n}.
inline Diagnostic doubling_constant(const GapSequenceModel& model, Index horizon) {
    if (horizon < 2)
        throw ConfigError("doubling horizon must be at least 2");
    Diagnostic d;
    d.log2_value = 0.0;
    d.at = 1;
    const Index stop = std::min(horizon, model.max_index() / 2);
    for (Index n = 1; n <= stop; ++n) {
        const LogLength a = model.term(n), b = model.term(2 * n);
        if (b.is_zero())
            break;
        const double q = a.log2() - b.log2();
        if (q > d.log2_value) {
            d.log2_value = q;
            d.at = n;
        }
    }
    d.value = std::exp2(d.log2_value);
    d.verdict = "doubling-so-far";
    return d;
}

/// epsilon* = min_{j <= horizon} a_j / sum_{i > j} a_i, over indices with a positive tail.
inline Diagnostic lacunarity_inf(const GapSequenceModel& model, Index horizon) {
    if (horizon < 1)
        throw ConfigError("lacunarity horizon must be at least 1");
    Diagnostic d;
    d.log2_value = std::numeric_limits<double>::infinity();
    const Index stop = std::min(horizon, model.max_index());
    for (Index j = 1; j <= stop; ++j) {
        const LogLength t = model.tail(j);
        if (t.is_zero())
            break;
        const double q = model.term(j).log2() - t.log2();
        if (q < d.log2_value) {
            d.log2_value = q;
            d.at = j;
        }
    }
    d.value = std::exp2(d.log2_value);
    return d;
}

/// c* = max_{n <= horizon} max(a_n / b_n, b_n / a_n).
inline Diagnostic equivalence_constant(const GapSequenceModel& a, const GapSequenceModel& b, Index horizon) {
    Diagnostic d;
    d.log2_value = 0.0;
    d.at = 1;
    const Index stop = std::min({horizon, a.max_index(), b.max_index()});
    for (Index n = 1; n <= stop; ++n) {
        const LogLength x = a.term(n), y = b.term(n);
        if (x.is_zero() || y.is_zero()) {
            if (x.is_zero() != y.is_zero())
                throw DomainError("sequences have different lengths; not equivalent");
            break;
        }
        const double q = std::fabs(x.log2() - y.log2());
        if (q > d.log2_value) {
            d.log2_value = q;
            d.at = n;
        }
    }
    d.value = std::exp2(d.log2_value);
    return d;
}

/// max of n log 2 / |log(s_n / L)| over n in [ceil(N/2), N].
inline DimensionReport upper_box_dim(const GapSequenceModel& model, int N) {
    if (N < 2)
        throw ConfigError("upper box window needs N >= 2");
    const double L_lg = model.total().log2();
    DimensionReport rep;
    rep.kind = "upper_box";
    rep.n_min = (N + 1) / 2;
    rep.n_max = N;
    rep.k_max = 0;
    double best = -1.0;
    for (int n = rep.n_min; n <= N; ++n) {
        const double denom = L_lg - model.scale(n).log2();
        const double v = n / denom;
        Witness w;
        w.k = 0;
        w.n = n;
        w.exponent = v;
        if (v > best) {
            best = v;
            rep.witness = w;
        }
        rep.convergence.push_back({n, v});
    }
    rep.witness.exponent = best;
    rep.set_value(best);
    return rep;
}

} // namespace fractlab
