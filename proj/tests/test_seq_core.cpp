#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "fractlab/json_io.hpp"
#include "fractlab/seq_core.hpp"

using namespace fractlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// classical Cantor gap a_i = 3^-n for 2^(n-1) <= i < 2^n, straight from the definition
double cantor_gap(Index i) {
    int n = 0;
    while ((Index{1} << n) <= i)
        ++n;
    return std::pow(3.0, -n);
}
} // namespace

TEST_CASE("log-space sums and ordering", "[log_length]") {
    std::vector<LogLength> v;
    long double direct = 0;
    for (int i = 1; i <= 1000; ++i) {
        v.push_back(LogLength::from_value(1.0L / (i * i)));
        direct += 1.0L / (static_cast<long double>(i) * i);
    }
    CHECK_THAT(static_cast<double>(log_sum(v).value()), WithinRel(static_cast<double>(direct), 1000 * std::exp2(-50)));
    CHECK(LogLength::from_value(0.25L) < LogLength::from_value(0.5L));
    CHECK(LogLength::zero() < LogLength::from_log2(-5000));
    // far below double range, still ordered and summable
    const LogLength tiny = LogLength::from_log2(-5000);
    CHECK_THAT((tiny + tiny).log2(), WithinAbs(-4999.0, 1e-12));
    CHECK_THROWS_AS(LogLength::from_value(-1.0L), DomainError);
}

TEST_CASE("scale sequence examples", "[seq_core]") {
    const ModelPtr c = make_classical_cantor();
    CHECK_THAT(static_cast<double>(scale(*c, 2).value()), WithinRel(1.0 / 9, 1e-12));
    CHECK_THAT(scale(*c, 0).log2(), WithinAbs(c->total().log2(), 1e-15));
    const ModelPtr g = make_geometric(0.5);
    CHECK_THAT(scale(*g, 3).log2(), WithinAbs(-10.0, 1e-12));
    // cross-check the geometric tail against 10^4 summed terms
    long double sum = 0;
    for (int j = 8; j < 10000; ++j)
        sum += std::exp2(static_cast<long double>(-j));
    CHECK_THAT(static_cast<double>(std::log2(sum / 8)), WithinAbs(-10.0, 1e-12));
}

TEST_CASE("tails are consistent with terms", "[seq_core]") {
    for (const ModelPtr& m : {make_classical_cantor(), make_geometric(0.3), make_example35(6),
                              make_from_ratios(RatioSequence({0.3, 0.2, 0.45}, 0.25)),
                              make_explicit_values({0.5, 0.3, 0.2})}) {
        CHECK(m->tail(0) == m->total());
        const Index stop = std::min<Index>(200, m->size().value_or(200));
        for (Index j = 1; j <= stop; ++j) {
            const LogLength before = m->tail(j - 1), after = m->tail(j);
            CHECK(after < before);
            CHECK(relative_difference(before.minus(after), m->term(j)) < 1e-9);
        }
    }
}

TEST_CASE("scale sequence strictly more than halves", "[seq_core]") {
    for (const ModelPtr& m : {make_classical_cantor(), make_geometric(0.5), make_example35(5),
                              make_from_ratios(RatioSequence({0.1, 0.49, 0.3}, 0.4))})
        for (int n = 0; n < 30; ++n)
            CHECK(scale(*m, n + 1).log2() + 1.0 < scale(*m, n).log2());
}

TEST_CASE("ratios_from_gaps and gaps_from_ratios", "[seq_core]") {
    const RatioConversion rc = ratios_from_gaps(*make_classical_cantor(), 20);
    for (std::size_t j = 1; j <= 20; ++j)
        CHECK_THAT(rc.ratios(j), WithinAbs(1.0 / 3, 1e-12));
    CHECK_THAT(ratios_from_gaps(*make_geometric(0.5), 1).ratios(1), WithinAbs(0.25, 1e-15));
    CHECK_THROWS_AS(ratios_from_gaps(*make_explicit_values({1.0}), 1), DegeneracyError);

    const ModelPtr third = gaps_from_ratios(RatioSequence::constant(1.0 / 3), 3);
    for (Index i = 1; i <= 7; ++i)
        CHECK_THAT(static_cast<double>(third->term(i).value()), WithinRel(cantor_gap(i), 1e-13));
    const ModelPtr quarter = gaps_from_ratios(RatioSequence::constant(0.25), 3);
    CHECK_THAT(static_cast<double>(quarter->term(1).value()), WithinRel(0.5, 1e-14));
    CHECK_THAT(static_cast<double>(quarter->term(3).value()), WithinRel(0.125, 1e-14));

    CHECK_THROWS_AS(gaps_from_ratios(RatioSequence({0.3, 0.3}), 2), ConfigError);
    CHECK_NOTHROW(gaps_from_ratios(RatioSequence({0.3, 0.3}, std::nullopt, 0.2, 0.4), 2));
}

TEST_CASE("random ratio round trips", "[seq_core]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.05, 0.45);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> r(25);
        for (auto& x : r)
            x = U(rng);
        const RatioSequence seq(r, 0.3);
        const ModelPtr m = gaps_from_ratios(seq, 25);
        const RatioConversion back = ratios_from_gaps(*m, 25);
        double prod = 0;
        for (std::size_t j = 1; j <= 25; ++j) {
            CHECK_THAT(back.ratios(j), WithinAbs(r[j - 1], 1e-12));
            prod += std::log2(r[j - 1]);
            CHECK_THAT(scale(*m, static_cast<int>(j)).log2(), WithinAbs(prod, 1e-12 * std::fabs(prod) + 1e-12));
        }
    }
}

TEST_CASE("doubling and lacunarity diagnostics", "[seq_core]") {
    const ModelPtr c = make_classical_cantor();
    CHECK_THAT(doubling_constant(*c, 512).value, WithinRel(3.0, 1e-12));
    CHECK_THAT(doubling_constant(*make_geometric(0.5), 64).log2_value, WithinAbs(64.0, 1e-9));
    CHECK(doubling_constant(*make_explicit_values({0.1, 0.1, 0.1, 0.1, 0.1}, false), 2).value == 1.0);

    for (Index h : {Index{5}, Index{100}, Index{5000}})
        CHECK_THAT(lacunarity_inf(*make_geometric(0.5), h).value, WithinRel(1.0, 1e-12));
    // the Cantor minimum over j <= 2^m - 1 is found by direct summation
    for (int m = 3; m <= 10; ++m) {
        const Index h = (Index{1} << m) - 1;
        double best = 1e9;
        std::vector<double> a(static_cast<std::size_t>(h) + 1);
        for (Index j = 1; j <= h; ++j)
            a[j] = cantor_gap(j);
        for (Index j = 1; j <= h; ++j) {
            // tail past j: unfinished levels plus all deeper mass (each level k >= n adds (2/3)^k / 2)
            int lev = 0;
            while ((Index{1} << lev) <= j)
                ++lev;
            double tail = (static_cast<double>((Index{1} << lev) - 1 - j)) * std::pow(3.0, -lev);
            tail += std::pow(2.0 / 3, lev + 1) * 1.5;
            best = std::min(best, a[j] / tail);
        }
        const Diagnostic d = lacunarity_inf(*c, h);
        CHECK_THAT(d.value, WithinRel(best, 1e-9));
        // at exactly j = 2^m - 1 the ratio is 2^-m
        CHECK_THAT(c->term(h).log2() - c->tail(h).log2(), WithinAbs(-static_cast<double>(m), 1e-9));
    }
    // finite model: indices with zero tail are skipped
    CHECK_NOTHROW(lacunarity_inf(*make_explicit_values({0.5, 0.3, 0.2}), 10));
    CHECK_THAT(lacunarity_inf(*make_explicit_values({0.5, 0.3, 0.2}), 10).value, WithinRel(1.0, 1e-12));
}

TEST_CASE("diagnostics are monotone in the horizon", "[seq_core]") {
    const ModelPtr m = make_from_ratios(RatioSequence({0.2, 0.4, 0.1, 0.3}, 0.35));
    double prev_eps = 1e300, prev_tau = 0;
    for (Index h = 2; h <= 4096; h *= 2) {
        const double e = lacunarity_inf(*m, h).value, t = doubling_constant(*m, h).value;
        CHECK(e <= prev_eps);
        CHECK(t >= prev_tau);
        prev_eps = e;
        prev_tau = t;
    }
}

TEST_CASE("equivalence constant", "[seq_core]") {
    const ModelPtr a = make_geometric(0.5), b = make_geometric(0.5, LogLength::from_value(0.5L));
    CHECK_THAT(equivalence_constant(*a, *b, 1000).value, WithinRel(2.0, 1e-12));
    CHECK(equivalence_constant(*a, *a, 1000).value == 1.0);
}

TEST_CASE("upper box dimension window", "[seq_core]") {
    const double d = std::log(2.0) / std::log(3.0);
    CHECK_THAT(upper_box_dim(*make_classical_cantor(), 30).value, WithinAbs(d, 1e-9));
    for (double r : {0.25, 0.4})
        CHECK_THAT(upper_box_dim(*make_from_ratios(RatioSequence::constant(r)), 30).value,
                   WithinAbs(std::log(2.0) / -std::log(r), 1e-9));
    // geometric: n / (n + 2^n - 1) over the window, shrinking as N grows
    double prev = 1;
    for (int N : {10, 20, 40}) {
        const double v = upper_box_dim(*make_geometric(0.5), N).value;
        const int n = (N + 1) / 2;
        CHECK_THAT(v, WithinRel(n / (n + std::exp2(n) - 1), 1e-9));
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("sequence specs", "[json_io]") {
    using nlohmann::json;
    CHECK_THAT(parse_ratio(json("1/3")), WithinAbs(1.0 / 3, 1e-16));
    CHECK(parse_length(json{{"log2", -3}}).log2() == -3.0);
    CHECK_THAT(parse_length(json("0.125")).log2(), WithinAbs(-3.0, 1e-15));
    CHECK_THROWS_AS(parse_ratio(json("1/x")), ConfigError);
    CHECK_THROWS_AS(model_from_json(json{{"kind", "nope"}}), ConfigError);
    CHECK_THROWS_AS(model_from_json(json{{"kind", "geometric"}}), ConfigError);
    const ModelPtr m = model_from_json(json{{"kind", "from_ratios"}, {"then", "1/3"}});
    CHECK_THAT(static_cast<double>(m->term(4).value()), WithinRel(1.0 / 27, 1e-13));
    CHECK(model_from_json(json{{"kind", "example35"}, {"K", 3}})->as_level()->level_length(3).log2() == -38.0);
    const RatioSequence r = parse_ratio_list("0.3,1/4");
    CHECK(r(1) == 0.3);
    CHECK(r(50) == 0.25);
}
