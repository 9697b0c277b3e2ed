#include <catch_amalgamated.hpp>

#include <set>

#include "fractlab/constructions.hpp"

using namespace fractlab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
// step-i gap length of the middle-thirds set
double g3_log2(int i) { return -i * std::log2(3.0); }

void check_each_index_once(const Arrangement& arr, const GapSequenceModel& src, LogLength floor) {
    const Approximation ap = refine(arr, floor);
    std::set<std::int64_t> seen;
    for (const auto& g : ap.gaps) {
        CHECK(g.source_index >= 1);
        CHECK(seen.insert(g.source_index).second);
        CHECK(g.length == src.term(static_cast<Index>(g.source_index)));
    }
    // the largest gaps of the source are all placed
    for (Index i = 1; i <= 255; ++i)
        if (src.term(i) > floor)
            CHECK(seen.count(static_cast<std::int64_t>(i)) == 1);
    CHECK(relative_difference(ap.placed_mass() + ap.residual_mass(), src.total()) < 1e-10);
}
} // namespace

TEST_CASE("prescribed Assouad dimension build", "[constructions]") {
    const AssouadTargetBuild B = build_assouad_target(RatioSequence::constant(1.0 / 3), 0.8, 6);
    CHECK_THAT(B.gamma, WithinAbs(std::exp2(-1.25), 1e-12));
    CHECK_THAT(B.gamma, WithinAbs(0.420448, 1e-6));
    CHECK_THAT(B.alpha, WithinRel(3.0, 1e-12));
    CHECK(all_pass(B.checks));
    REQUIRE(B.stages.size() == 6);
    CHECK(B.stages[0].d_step == 5);
    CHECK(B.stages[0].n == 4);
    CHECK_THAT(B.stages[0].d.log2(), WithinAbs(g3_log2(5), 1e-12));

    // the conditions again, from the stage steps alone
    const double lg_g = std::log2(B.gamma);
    for (std::size_t k = 1; k <= 6; ++k) {
        const auto& st = B.stages[k - 1];
        const double dk = g3_log2(st.d_step);
        if (k >= 2)
            CHECK(static_cast<double>(k) <= 0.8 * (g3_log2(B.stages[k - 2].d_step) - dk));
        for (std::size_t j = 1; j < k; ++j) {
            double sum = 0;
            for (std::size_t i = j + 1; i <= k; ++i)
                sum += std::exp2(g3_log2(B.stages[i - 1].d_step) - g3_log2(B.stages[j - 1].d_step) - j * lg_g);
            CHECK(9.0 / (1 - 2 * B.gamma) * sum < 1.0);
        }
        CHECK(st.n > static_cast<int>(k) + 2);
        double diam = 0;
        for (std::size_t j = 0; j <= k; ++j) {
            const int lvl = st.n + st.i[j];
            const double t = dk + j * lg_g;
            CHECK(g3_log2(lvl + 1) < t);
            CHECK(t <= g3_log2(lvl) + 1e-12);
            CHECK(g3_log2(lvl) <= std::log2(3.0) + t + 1e-12);
            diam += std::ldexp(std::exp2(g3_log2(lvl)), static_cast<int>(j));
        }
        CHECK_THAT(st.R.log2(), WithinAbs(std::log2(diam), 1e-12));
        CHECK(std::exp2(dk) <= diam);
        CHECK(diam < 3.0 / (1 - 2 * B.gamma) * std::exp2(dk));
        // in-order placement: the middle gap of A_k has the j = 0 length
        CHECK(st.gaps[st.gaps.size() / 2].log2() == Catch::Approx(g3_log2(st.n + 1)).margin(1e-12));
    }
    for (auto [step, used] : B.consumed)
        CHECK(used <= std::ldexp(1.0L, step - 2));
    check_each_index_once(B.arrangement, *B.source, LogLength::from_value(1e-4L));
    CHECK(equivalence_constant(*B.remainder, *B.source, 1 << 16).value <= 3.0 + 1e-9);
}

TEST_CASE("prescribed Assouad dimension: the witness blocks", "[constructions]") {
    const AssouadTargetBuild B = build_assouad_target(RatioSequence::constant(1.0 / 3), 0.8, 6);
    const Approximation ap = refine(B.arrangement, LogLength::from_value(1e-3L));
    for (int k = 1; k <= 6; ++k) {
        const StageWitness w = assouad_stage_witness(B, ap, k);
        CHECK(w.certified);
        CHECK(w.N >= std::ldexp(1.0L, k));
        CHECK(w.exponent <= 1.0);
    }
}

TEST_CASE("prescribed Assouad dimension: rejected requests", "[constructions]") {
    CHECK_THROWS_AS(build_assouad_target(RatioSequence::constant(1.0 / 3), 1.0, 3), DomainError);
    CHECK_THROWS_AS(build_assouad_target(RatioSequence::constant(1.0 / 3), 0.5, 3), DomainError);
    CHECK_THROWS_AS(build_assouad_target(RatioSequence({0.3}), 0.8, 3), ConfigError);
    CHECK_THROWS_AS(build_assouad_target(RatioSequence::constant(1.0 / 3), 0.8, 0), ConfigError);
}

TEST_CASE("prescribed lower dimension build", "[constructions]") {
    const LowerTargetBuild B = build_lower_target(RatioSequence::constant(1.0 / 3), 0.5, 12);
    CHECK(B.d == 0.25);
    CHECK(all_pass(B.checks));
    REQUIRE(B.k_table.size() == 12);
    for (auto [j, k] : B.k_table)
        CHECK(k == static_cast<int>(std::ceil(j * std::log(4.0) / std::log(3.0))));
    CHECK(B.k_table[0] == std::pair{1, 2});
    CHECK(B.k_table[3] == std::pair{4, 6});
    const DimensionReport L = lower_target_dimension(B);
    CHECK(L.value >= 0.45);
    CHECK(L.value <= 0.55);
    CHECK(B.remainder_equivalence <= 3.0 + 1e-9);
    check_each_index_once(B.arrangement, *B.source, LogLength::from_value(1e-4L));

    const LowerTargetBuild Z = build_lower_target(RatioSequence::constant(1.0 / 3), 0.0, 12);
    CHECK(Z.decreasing_fallback);
    CHECK_THROWS_AS(build_lower_target(RatioSequence::constant(1.0 / 3), 0.7, 12), DomainError);
    CHECK_THROWS_AS(build_lower_target(RatioSequence({0.3, 0.3}), 0.5, 12), ConfigError);
}

TEST_CASE("super-exponential level sequence", "[constructions]") {
    const Example35Sequence E = generate_example35(3);
    CHECK(E.g[1].log2() == -5.0);
    CHECK(E.g[2].log2() == -17.0);
    CHECK(E.g[3].log2() == -38.0);
    CHECK(all_pass(E.checks));
    const Example35Sequence F = generate_example35(40);
    CHECK(all_pass(F.checks));
    // the level ratio rule is an equality at k = 1
    CHECK(F.g[0].log2() - F.g[1].log2() == 5.0);
    // tail below half at k = 0, from the partial sum 2^-4 + 2^-15 + ...
    double sum = 0;
    for (int j = 1; j <= 40; ++j)
        sum += std::exp2(j + F.g[static_cast<std::size_t>(j)].log2());
    CHECK(sum < 0.5);
    CHECK_THAT(sum, WithinRel(std::exp2(-4) + std::exp2(-15), 1e-6));
    CHECK_THROWS_AS(generate_example35(0), ConfigError);
}
