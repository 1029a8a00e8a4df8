#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "thief/hierarchy.hpp"
#include "thief/rng.hpp"

using namespace thief;

namespace {

// Brute-force block mean, independent of the summing-matrix path.
double loop_block_mean(const std::array<double, 24>& hourly, int length, int index) {
    double acc = 0.0;
    for (int h = index * length; h < (index + 1) * length; ++h) acc += hourly[h];
    return acc / length;
}

std::array<double, 24> random_day(Rng& rng) {
    std::array<double, 24> day{};
    for (auto& v : day) v = rng.uniform(-150.0, 300.0);
    return day;
}

}  // namespace

TEST_SUITE_BEGIN("hierarchy");

TEST_CASE("summing matrix satisfies its structural invariants") {
    const SummingMatrix s = build_summing_matrix();
    REQUIRE(s.rows() == 60);
    REQUIRE(s.entries.cols() == 24);
    REQUIRE(s.block_order.size() == 60);

    // Top row is the baseload mean.
    for (int h = 0; h < 24; ++h) CHECK(s.entries(0, h) == 1.0 / 24);

    // Every row sums to exactly one and holds 1/L over its block.
    for (int r = 0; r < 60; ++r) {
        const BlockId b = s.block_order[r];
        double row_sum = 0.0;
        for (int h = 0; h < 24; ++h) {
            const double expected =
                (h >= b.index * b.length && h < (b.index + 1) * b.length) ? 1.0 / b.length : 0.0;
            CHECK(s.entries(r, h) == expected);
            row_sum += s.entries(r, h);
        }
        CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-15));
    }

    // Bottom 24 rows form the identity.
    for (int i = 0; i < 24; ++i)
        for (int h = 0; h < 24; ++h)
            CHECK(s.entries(36 + i, h) == (i == h ? 1.0 : 0.0));

    // Row for the first 2H block: 1/2 at hours 0 and 1.
    const int r2h0 = block_ordinal(BlockId{2, 0});
    CHECK(s.entries(r2h0, 0) == 0.5);
    CHECK(s.entries(r2h0, 1) == 0.5);
    for (int h = 2; h < 24; ++h) CHECK(s.entries(r2h0, h) == 0.0);
}

TEST_CASE("canonical block order is coarsest-first, chronological within level") {
    CHECK(block_ordinal(BlockId{24, 0}) == 0);
    CHECK(block_ordinal(BlockId{12, 0}) == 1);
    CHECK(block_ordinal(BlockId{12, 1}) == 2);
    CHECK(block_ordinal(BlockId{8, 0}) == 3);
    CHECK(block_ordinal(BlockId{1, 0}) == 36);
    CHECK(block_ordinal(BlockId{1, 23}) == 59);
    for (int ord = 0; ord < 60; ++ord) CHECK(block_ordinal(block_at(ord)) == ord);
    CHECK(level_offset(2) == 24);
    CHECK(level_block_count(3) == 8);
    CHECK_THROWS_AS(block_ordinal(BlockId{5, 0}), ValidationError);
    CHECK_THROWS_AS(block_ordinal(BlockId{2, 12}), ValidationError);
}

TEST_CASE("aggregate of a constant day is constant at every block") {
    const SummingMatrix s = build_summing_matrix();
    std::array<double, 24> day{};
    day.fill(42.5);
    const HierarchyVector out = aggregate(day, s);
    for (const double v : out) CHECK(v == doctest::Approx(42.5).epsilon(1e-14));
}

TEST_CASE("aggregate of 1..24 yields the textbook block means") {
    const SummingMatrix s = build_summing_matrix();
    std::array<double, 24> day{};
    for (int h = 0; h < 24; ++h) day[h] = h + 1;
    const HierarchyVector out = aggregate(day, s);
    CHECK(out[block_ordinal(BlockId{24, 0})] == doctest::Approx(12.5));
    CHECK(out[block_ordinal(BlockId{12, 0})] == doctest::Approx(6.5));
    CHECK(out[block_ordinal(BlockId{2, 11})] == doctest::Approx(23.5));
    // Bottom level echoes the input.
    for (int h = 0; h < 24; ++h) CHECK(out[36 + h] == day[h]);
}

TEST_CASE("aggregate equals the brute-force block-mean oracle") {
    const SummingMatrix s = build_summing_matrix();
    Rng rng(101);
    for (int rep = 0; rep < 50; ++rep) {
        const auto day = random_day(rng);
        const HierarchyVector out = aggregate(day, s);
        for (int ord = 0; ord < 60; ++ord) {
            const BlockId b = block_at(ord);
            const double oracle = loop_block_mean(day, b.length, b.index);
            CHECK(std::fabs(out[ord] - oracle) <=
                  1e-12 * std::max(1.0, std::fabs(oracle)));
        }
    }
}

TEST_CASE("aggregate is linear") {
    const SummingMatrix s = build_summing_matrix();
    Rng rng(102);
    const auto p = random_day(rng);
    const auto q = random_day(rng);
    const double alpha = 1.7, beta = -0.4;
    std::array<double, 24> mix{};
    for (int h = 0; h < 24; ++h) mix[h] = alpha * p[h] + beta * q[h];
    const auto ap = aggregate(p, s);
    const auto aq = aggregate(q, s);
    const auto amix = aggregate(mix, s);
    for (int ord = 0; ord < 60; ++ord)
        CHECK(amix[ord] == doctest::Approx(alpha * ap[ord] + beta * aq[ord]).epsilon(1e-11));
}

TEST_CASE("aggregates nest: every parent equals the mean of its children") {
    const SummingMatrix s = build_summing_matrix();
    Rng rng(103);
    const auto day = random_day(rng);
    const auto out = aggregate(day, s);
    for (const int parent_len : kBlockLengths) {
        for (const int child_len : kBlockLengths) {
            if (child_len >= parent_len || parent_len % child_len != 0) continue;
            const int ratio = parent_len / child_len;
            for (int i = 0; i < level_block_count(parent_len); ++i) {
                double child_sum = 0.0;
                for (int c = 0; c < ratio; ++c)
                    child_sum += out[block_ordinal(BlockId{child_len, i * ratio + c})];
                const double parent = out[block_ordinal(BlockId{parent_len, i})];
                CHECK(parent == doctest::Approx(child_sum / ratio).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("aggregate rejects non-finite input") {
    const SummingMatrix s = build_summing_matrix();
    std::array<double, 24> day{};
    day[5] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(aggregate(day, s), ValidationError);
    day[5] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(aggregate(day, s), ValidationError);
}

TEST_CASE("generic divisor-set constructor builds consistent levels") {
    const std::array<int, 3> lengths = {12, 4, 1};
    const SummingMatrix s = build_summing_matrix(lengths, 24);
    REQUIRE(s.rows() == 2u + 6u + 24u);
    for (std::size_t r = 0; r < s.rows(); ++r) {
        double row_sum = 0.0;
        for (int h = 0; h < 24; ++h) row_sum += s.entries(r, h);
        CHECK(row_sum == doctest::Approx(1.0));
    }
    CHECK_THROWS_AS(build_summing_matrix(std::array<int, 2>{5, 1}, 24), ValidationError);
    CHECK_THROWS_AS(build_summing_matrix(std::array<int, 2>{4, 4}, 24), ValidationError);
}

TEST_SUITE_END();
