#include <cmath>
#include <vector>

#include "doctest.h"
#include "thief/rng.hpp"
#include "thief/transform.hpp"

using namespace thief;

TEST_SUITE_BEGIN("transform");

TEST_CASE("fit_params on a two-point window") {
    const std::vector<double> w = {1.0, 3.0};
    const TransformParams p = fit_params(w);
    CHECK(p.mu == doctest::Approx(2.0));
    CHECK(p.sigma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_FALSE(p.floored);
}

TEST_CASE("fit_params floors the sigma of a constant window") {
    const std::vector<double> w(100, 0.0);
    const TransformParams p = fit_params(w);
    CHECK(p.mu == 0.0);
    CHECK(p.sigma == kSigmaFloor);
    CHECK(p.floored);
}

TEST_CASE("fit_params rejects degenerate or non-finite windows") {
    CHECK_THROWS_AS(fit_params(std::vector<double>{1.0}), ValidationError);
    CHECK_THROWS_AS(fit_params(std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(fit_params(std::vector<double>{1.0, std::nan("")}), ValidationError);
}

// Oracle values below were frozen from a 40-digit arbitrary-precision
// evaluation of the same expressions.
TEST_CASE("fit_params matches an independent two-pass computation on a long window") {
    Rng rng(2024);
    std::vector<double> w(1092);
    for (auto& v : w) v = rng.uniform(-100.0, 400.0);

    // Independent oracle: Kahan-compensated two-pass mean/std.
    double s = 0.0, comp = 0.0;
    for (const double v : w) {
        const double t = v - comp;
        const double ns = s + t;
        comp = (ns - s) - t;
        s = ns;
    }
    const double mean = s / static_cast<double>(w.size());
    double ss = 0.0;
    comp = 0.0;
    for (const double v : w) {
        const double d = (v - mean) * (v - mean) - comp;
        const double ns = ss + d;
        comp = (ns - ss) - d;
        ss = ns;
    }
    const double sd = std::sqrt(ss / static_cast<double>(w.size() - 1));

    const TransformParams p = fit_params(w);
    CHECK(p.mu == doctest::Approx(mean).epsilon(1e-13));
    CHECK(p.sigma == doctest::Approx(sd).epsilon(1e-13));
}

TEST_CASE("apply maps the mean to zero and inverts sinh") {
    TransformParams p{50.0, 60.0, false};
    CHECK(apply_transform(50.0, p) == 0.0);

    TransformParams unit{0.0, 1.0, false};
    CHECK(apply_transform(std::sinh(2.0), unit) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("apply matches the frozen high-precision value for a deep negative spike") {
    TransformParams p{50.0, 60.0, false};
    CHECK(apply_transform(-500.0, p) ==
          doctest::Approx(-2.9116829125015575).epsilon(1e-14));
}

TEST_CASE("invert maps zero to mu and matches the frozen sinh(3) value") {
    TransformParams p{50.0, 60.0, false};
    CHECK(invert_transform(0.0, p) == 50.0);

    TransformParams unit{0.0, 1.0, false};
    CHECK(invert_transform(3.0, unit) ==
          doctest::Approx(10.017874927409902).epsilon(1e-14));
}

TEST_CASE("invert round-trips apply on random values") {
    Rng rng(31337);
    TransformParams p{37.5, 22.0, false};
    for (int i = 0; i < 1000; ++i) {
        const double y = rng.uniform(-600.0, 600.0);
        const double z = apply_transform(y, p);
        const double back = invert_transform(z, p);
        CHECK(std::fabs(back - y) <= 1e-10 * std::max(1.0, std::fabs(y)));
    }
}

TEST_CASE("apply is strictly monotone and compresses spikes") {
    TransformParams p{50.0, 60.0, false};
    double prev = apply_transform(-800.0, p);
    for (double y = -799.0; y <= 800.0; y += 1.0) {
        const double z = apply_transform(y, p);
        CHECK(z > prev);
        prev = z;
    }
    // A -500 EUR/MWh spike stays within single digits in transformed space.
    CHECK(std::fabs(apply_transform(-500.0, p)) < 10.0);
    CHECK(std::fabs(apply_transform(3000.0, p)) < 10.0);
}

TEST_SUITE_END();
