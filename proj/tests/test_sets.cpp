#include <catch_amalgamated.hpp>

#include <map>
#include <random>
#include <set>

#include "fractlab/sets.hpp"

using namespace fractlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> random_decreasing(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> U(0.1, 1.0);
    std::vector<double> v(static_cast<std::size_t>(n));
    for (auto& x : v)
        x = U(rng);
    std::sort(v.rbegin(), v.rend());
    return v;
}

// sum of a over the heap subtree of t, by enumeration
double subtree(const std::vector<double>& a, std::size_t t) {
    if (t > a.size())
        return 0;
    return a[t - 1] + subtree(a, 2 * t) + subtree(a, 2 * t + 1);
}

// placement of C_a by the subdivision rule: gap t sits after the mass of its left subtree
void place(const std::vector<double>& a, std::size_t t, double lo, std::map<std::size_t, double>& at) {
    if (t > a.size())
        return;
    const double left = subtree(a, 2 * t);
    at[t] = lo + left;
    place(a, 2 * t, lo, at);
    place(a, 2 * t + 1, lo + left + a[t - 1], at);
}

void check_structure(const Approximation& ap) {
    for (std::size_t i = 1; i < ap.gaps.size(); ++i)
        CHECK(ap.gaps[i - 1].hi <= ap.gaps[i].lo + 1e-15L);
    for (std::size_t i = 1; i < ap.residuals.size(); ++i)
        CHECK(ap.residuals[i - 1].hi <= ap.residuals[i].lo + 1e-15L);
    for (const auto& r : ap.residuals) {
        CHECK(r.lo >= -1e-15L);
        CHECK(r.hi <= ap.total.value() + 1e-15L);
        CHECK(std::fabs(static_cast<double>((r.hi - r.lo) - r.mass.value())) <= 1e-12);
    }
    const LogLength sum = ap.placed_mass() + ap.residual_mass();
    CHECK(relative_difference(sum, ap.total) < 1e-10);
}

} // namespace

TEST_CASE("middle thirds at depth 2", "[sets]") {
    const Approximation ap = build_cantor(make_classical_cantor(), 2);
    REQUIRE(ap.residuals.size() == 4);
    const double offsets[] = {0, 2.0 / 9, 2.0 / 3, 8.0 / 9};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK_THAT(static_cast<double>(ap.residuals[i].lo), WithinAbs(offsets[i], 1e-15));
        CHECK_THAT(static_cast<double>(ap.residuals[i].hi - ap.residuals[i].lo), WithinAbs(1.0 / 9, 1e-15));
    }
    check_structure(ap);
}

TEST_CASE("build_cantor small cases", "[sets]") {
    const ModelPtr g = make_geometric(0.5);
    const Approximation one = build_cantor(g, 1);
    REQUIRE(one.residuals.size() == 2);
    CHECK_THAT(static_cast<double>(one.residual_mass().value()), WithinRel(0.5, 1e-14));
    const Approximation q = build_cantor(make_from_ratios(RatioSequence::constant(0.25)), 3);
    REQUIRE(q.residuals.size() == 8);
    for (const auto& r : q.residuals)
        CHECK_THAT(static_cast<double>(r.hi - r.lo), WithinRel(1.0 / 64, 1e-13));
}

TEST_CASE("associated Cantor set matches the subdivision rule", "[sets]") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
        const auto a = random_decreasing(rng, 63);
        const Approximation ap = build_cantor(make_explicit_values(a), 6);
        std::map<std::size_t, double> at;
        place(a, 1, 0.0, at);
        REQUIRE(ap.gaps.size() == 63);
        for (const auto& g : ap.gaps)
            CHECK_THAT(static_cast<double>(g.lo), WithinAbs(at.at(static_cast<std::size_t>(g.source_index)), 1e-12));
        check_structure(ap);
    }
}

TEST_CASE("decreasing set points", "[sets]") {
    const DecreasingSet d = build_decreasing(*make_explicit_values({0.5, 0.3, 0.2}), 3);
    CHECK_THAT(static_cast<double>(d.points[0].value()), WithinRel(1.0, 1e-14));
    CHECK_THAT(static_cast<double>(d.points[1].value()), WithinRel(0.5, 1e-14));
    CHECK_THAT(static_cast<double>(d.points[2].value()), WithinRel(0.2, 1e-14));
    const DecreasingSet g = build_decreasing(*make_geometric(0.5), 20);
    for (std::size_t j = 1; j <= 20; ++j)
        CHECK_THAT(g.points[j - 1].log2(), WithinAbs(-static_cast<double>(j - 1), 1e-12));
    CHECK(build_decreasing(*make_geometric(0.5), 1).points.size() == 1);
}

TEST_CASE("refine stages", "[sets]") {
    const ModelPtr c = make_classical_cantor();
    const Approximation ap = refine(cantor_arrangement(c), LogLength::from_value(1.0L / 27));
    CHECK(ap.gaps.size() == 7);
    CHECK(ap.residuals.size() == 8);
    const Approximation none = refine(cantor_arrangement(c), LogLength::from_value(0.5L));
    CHECK(none.gaps.empty());
    REQUIRE(none.residuals.size() == 1);
    CHECK(none.residuals[0].hi == none.total.value());

    // decreasing: gaps 1..k placed at floor a_k, then [0, x_{k+1}] and k singletons
    const ModelPtr g = make_geometric(0.5);
    const int k = 6;
    const Approximation d = refine(decreasing_arrangement(g), g->term(k));
    CHECK(d.gaps.size() == static_cast<std::size_t>(k));
    REQUIRE(d.residuals.size() == static_cast<std::size_t>(k + 1));
    CHECK_THAT(static_cast<double>(d.residuals[0].hi), WithinRel(std::exp2(-k), 1e-12));
    for (std::size_t i = 1; i < d.residuals.size(); ++i)
        CHECK(d.residuals[i].hi == d.residuals[i].lo);
    check_structure(d);
}

TEST_CASE("refinement keeps positions and only adds gaps", "[sets]") {
    const ModelPtr c = make_from_ratios(RatioSequence({0.3, 0.2}, 0.4));
    for (std::uint64_t seed : {1u, 2u}) {
        const Arrangement arr = random_arrangement(c, seed);
        const Approximation coarse = refine(arr, LogLength::from_value(1e-3L));
        const Approximation fine = refine(arr, LogLength::from_value(1e-5L));
        CHECK(coarse.gaps.size() < fine.gaps.size());
        std::map<std::int64_t, long double> pos;
        for (const auto& g : fine.gaps)
            pos[g.source_index] = g.lo;
        for (const auto& g : coarse.gaps)
            CHECK_THAT(static_cast<double>(pos.at(g.source_index)), WithinAbs(static_cast<double>(g.lo), 1e-15));
    }
}

TEST_CASE("random arrangements place every index once and conserve mass", "[sets]") {
    const ModelPtr c = make_classical_cantor();
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Approximation ap = refine(random_arrangement(c, seed), c->term(1023));
        REQUIRE(ap.gaps.size() == 1023);
        std::set<std::int64_t> idx;
        for (const auto& g : ap.gaps)
            idx.insert(g.source_index);
        CHECK(idx.size() == 1023);
        CHECK(*idx.begin() == 1);
        CHECK(*idx.rbegin() == 1023);
        check_structure(ap);
    }
    // different seeds give different placements, the same seed the same one
    const auto a0 = refine(random_arrangement(c, 0), c->term(63));
    const auto a0b = refine(random_arrangement(c, 0), c->term(63));
    const auto a1 = refine(random_arrangement(c, 1), c->term(63));
    CHECK(a0.endpoints == a0b.endpoints);
    CHECK(a0.endpoints != a1.endpoints);
}

TEST_CASE("explicit order", "[sets]") {
    const ModelPtr g = make_explicit_values({0.4, 0.3, 0.2, 0.1});
    const Approximation ap = refine(explicit_order(g, {3, 1}, {Router::Kind::decreasing, 0}), LogLength::from_value(0.05L));
    REQUIRE(ap.gaps.size() == 4);
    CHECK(ap.gaps[0].source_index == 3);
    CHECK(ap.gaps[1].source_index == 1);
    CHECK_THAT(static_cast<double>(ap.gaps[1].lo), WithinAbs(0.2, 1e-15));
    CHECK_THROWS_AS(explicit_order(g, {1, 1}, {}), ArrangementError);
}

TEST_CASE("correspondence map", "[sets]") {
    const ModelPtr a = make_explicit_values({0.5, 0.3, 0.2});
    const ModelPtr b = make_explicit_values({0.4, 0.2, 0.1});
    const Correspondence c = correspondence_map(decreasing_arrangement(a), b, LogLength::from_value(0.1L));
    bool found = false;
    for (auto [x, y] : c.pairs)
        if (std::fabs(static_cast<double>(x) - 0.5) < 1e-15) {
            CHECK_THAT(static_cast<double>(y), WithinAbs(0.3, 1e-15));
            found = true;
        }
    CHECK(found);

    const ModelPtr cc = make_classical_cantor();
    const Correspondence id = correspondence_map(random_arrangement(cc, 4), cc, LogLength::from_value(1e-3L));
    for (auto [x, y] : id.pairs)
        CHECK(x == y);
    const auto halved = std::make_shared<LevelModel>([&] {
        LevelRule r;
        r.kind = "half";
        r.dyadic = true;
        r.length = [](int l) { return LogLength::from_log2(-1.0 - std::log2(3.0) * (l + 1)); };
        r.count = [](int l) { return std::ldexp(1.0L, l); };
        r.exact_level_tail = [](int l) { return LogLength::from_log2(-1.0 + l - std::log2(3.0) * l); };
        return r;
    }());
    const Correspondence h = correspondence_map(cantor_arrangement(cc), halved, LogLength::from_value(1e-3L));
    for (auto [x, y] : h.pairs)
        CHECK_THAT(static_cast<double>(y), WithinAbs(static_cast<double>(x) / 2, 1e-13));
}

TEST_CASE("m_k statistic", "[sets]") {
    const ModelPtr e = make_example35(12);
    const Approximation ac = refine(cantor_arrangement(e), e->as_level()->level_length(10));
    const Approximation ad = refine(decreasing_arrangement(e), e->as_level()->level_length(10));
    const auto mc = gap_level_stats(ac, *e, 10);
    const auto md = gap_level_stats(ad, *e, 10);
    for (int k = 1; k <= 10; ++k) {
        CHECK(mc[static_cast<std::size_t>(k - 1)] == 1);
        CHECK(md[static_cast<std::size_t>(k - 1)] == std::ldexp(1.0L, k));
    }
    CHECK(gap_level_stats(ac, *e, 0).empty());
    CHECK_THROWS_AS(gap_level_stats(ac, *make_geometric(0.5), 1), DomainError);
    CHECK_THROWS_AS(gap_level_stats(ac, *e, 11), PreconditionError);
}
