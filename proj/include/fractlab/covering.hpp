#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "fractlab/errors.hpp"
#include "fractlab/log_length.hpp"
#include "fractlab/sets.hpp"

namespace fractlab {

/// A closed interval [lo, hi]; a point when lo == hi.
struct Atom {
    long double lo = 0, hi = 0;
};

/// Diameter 2r of a closed ball, the one conversion every count goes through.
/// Lengths reach positions through log2 round trips, so a point meant to sit
/// exactly on a ball's edge can miss it by an ulp; the slack keeps such
/// boundary coincidences inside the closed ball.
inline constexpr long double kBoundarySlack = 1e-13L;
inline long double ball_diameter(LogLength r) { return 2.0L * r.value() * (1.0L + kBoundarySlack); }

namespace detail {
// balls needed to cover a stretch of `len`, tolerating rounding in the ratio
inline long double balls_for(long double len, long double d) {
    if (len <= 0)
        return 1;
    const long double q = len / d;
    const long double c = std::ceil(q - 1e-12L * std::max<long double>(1.0L, q));
    return std::max<long double>(c, 1.0L);
}
} // namespace detail

/// Minimal number of closed balls of radius r covering a union of atoms
/// sorted by left end: each ball [p, p + 2r] starts at the leftmost point not
/// yet covered.
inline long double greedy_cover(const std::vector<Atom>& target, LogLength r) {
    if (r.is_zero())
        throw DomainError("covering radius must be positive");
    const long double d = ball_diameter(r);
    long double count = 0;
    long double reach = 0;  // right end of the union of balls so far
    for (const auto& a : target) {
        if (count > 0 && a.hi <= reach)
            continue;
        if (count == 0 || a.lo > reach) {
            const long double k = detail::balls_for(a.hi - a.lo, d);
            count += k;
            reach = a.lo + k * d;
        } else {
            const long double k = detail::balls_for(a.hi - reach, d);
            count += k;
            reach += k * d;
        }
    }
    return count;
}

inline long double greedy_cover_points(const std::vector<long double>& pts, LogLength r) {
    std::vector<Atom> atoms;
    atoms.reserve(pts.size());
    for (long double p : pts)
        atoms.push_back({p, p});
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.lo < b.lo; });
    return greedy_cover(atoms, r);
}

/// Exhaustive minimum for at most 16 points. Some optimal cover has every
/// ball's left edge on a target point, so subsets of points are enumerated
/// by increasing size.
inline int brute_force_cover(std::vector<long double> pts, LogLength r) {
    if (pts.size() > 16)
        throw RefusalError("brute force covering is limited to 16 points");
    if (pts.empty())
        return 0;
    std::sort(pts.begin(), pts.end());
    const long double d = ball_diameter(r);
    const int n = static_cast<int>(pts.size());
    // cov[i]: points covered by a ball with left edge at pts[i]
    std::vector<std::uint32_t> cov(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (pts[static_cast<std::size_t>(j)] >= pts[static_cast<std::size_t>(i)] &&
                pts[static_cast<std::size_t>(j)] <= pts[static_cast<std::size_t>(i)] + d)
                cov[static_cast<std::size_t>(i)] |= 1u << j;
    const std::uint32_t full = n == 32 ? ~0u : ((1u << n) - 1);
    int best = n;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const int size = std::popcount(mask);
        if (size >= best)
            continue;
        std::uint32_t got = 0;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1u)
                got |= cov[static_cast<std::size_t>(i)];
        if (got == full)
            best = size;
    }
    return best;
}

struct CoverQuery {
    long double x = 0;
    LogLength R, r;
};

struct CoverBounds {
    long double lower = 0;
    long double upper = 0;
    bool certified = false;
};

/// Atoms of (residuals U placed endpoints) inside [a, b], sorted; residuals
/// are clipped to the window.
inline std::vector<Atom> window_atoms(const Approximation& ap, long double a, long double b, bool with_residuals) {
    std::vector<Atom> out;
    auto e0 = std::lower_bound(ap.endpoints.begin(), ap.endpoints.end(), a);
    auto e1 = std::upper_bound(ap.endpoints.begin(), ap.endpoints.end(), b);
    if (!with_residuals) {
        for (auto it = e0; it != e1; ++it)
            out.push_back({*it, *it});
        return out;
    }
    auto r0 = std::lower_bound(ap.residuals.begin(), ap.residuals.end(), a,
                               [](const Residual& r, long double v) { return r.hi < v; });
    auto it = e0;
    for (auto rr = r0; rr != ap.residuals.end() && rr->lo <= b; ++rr) {
        const Atom clip{std::max(rr->lo, a), std::min(rr->hi, b)};
        for (; it != e1 && *it < clip.lo; ++it)
            out.push_back({*it, *it});
        out.push_back(clip);
    }
    for (; it != e1; ++it)
        out.push_back({*it, *it});
    return out;
}

/// Two-sided bounds for N_r(B(x, R) intersected with E).
inline CoverBounds local_cover(const Approximation& ap, const CoverQuery& q) {
    if (!(q.r < q.R))
        throw DomainError("cover query needs r < R");
    const long double L = ap.total.value();
    if (q.x < 0 || q.x > L)
        throw DomainError("query center lies outside [0, L]");
    const long double R = q.R.value();
    const long double a = q.x - R, b = q.x + R;
    CoverBounds cb;
    cb.certified = true;
    auto r0 = std::lower_bound(ap.residuals.begin(), ap.residuals.end(), a,
                               [](const Residual& r, long double v) { return r.hi < v; });
    for (auto rr = r0; rr != ap.residuals.end() && rr->lo <= b; ++rr) {
        if (rr->max_gap > q.R)
            throw RefinementRequired("a residual meeting the ball still hides a gap longer than R; refine further");
        if (rr->max_gap > q.r)
            cb.certified = false;
    }
    cb.lower = greedy_cover(window_atoms(ap, a, b, false), q.r);
    cb.upper = greedy_cover(window_atoms(ap, a, b, true), q.r);
    return cb;
}

} // namespace fractlab
