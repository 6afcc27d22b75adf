#include <doctest.h>

#include <cmath>
#include <vector>

#include "generators.hpp"
#include "gtr/density.hpp"
#include "gtr/rng.hpp"

using namespace gtr;

TEST_CASE("uniform density closed forms") {
    const BreakDensity d = BreakDensity::uniform();
    CHECK(d.pdf_at(-1.0) == 0.5);
    CHECK(d.pdf_at(0.33) == 0.5);
    CHECK(d.pdf_at(1.0) == 0.5);
    CHECK(d.cdf(-1.0) == 0.0);
    CHECK(d.cdf(1.0) == 1.0);
    CHECK(d.cdf(0.6) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(d.integrate(-0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.inverse_cdf(0.25) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(d.inverse_cdf(0.0) == -1.0);
    CHECK(d.inverse_cdf(1.0) == 1.0);
}

TEST_CASE("locally uniform density closed forms") {
    const BreakDensity d = BreakDensity::locally_uniform(0.2, 0.1);
    CHECK(d.pdf_at(0.15) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(d.pdf_at(0.05) == 0.0);
    CHECK(d.pdf_at(0.35) == 0.0);
    CHECK(d.cdf(0.1) == 0.0);
    CHECK(d.cdf(-1.0) == 0.0);
    // 0.2 + 0.1 rounds just above 0.3, so the nominal edge interpolates.
    CHECK(d.cdf(0.3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.cdf(0.31) == 1.0);
    CHECK(d.cdf(1.0) == 1.0);
    CHECK(d.cdf(0.15) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(d.cdf(0.25) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(d.integrate(0.15, 0.25) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(d.inverse_cdf(0.0) == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(d.inverse_cdf(1.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.inverse_cdf(0.5) == doctest::Approx(0.2).epsilon(1e-15));

    SUBCASE("mass outside the support is exactly zero or one") {
        // Sequential conditionals rely on these being exact, not approximate.
        CHECK(BreakDensity::locally_uniform(-0.2, 0.1).cdf(0.5) == 1.0);
        CHECK(BreakDensity::locally_uniform(0.2, 0.1).cdf(-0.5) == 0.0);
    }

    SUBCASE("constructor rejects bad shape parameters") {
        CHECK_THROWS_AS(BreakDensity::locally_uniform(0.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::locally_uniform(0.0, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::locally_uniform(1.0, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::locally_uniform(0.95, 0.1), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::locally_uniform(-0.95, 0.1), std::invalid_argument);
    }
}

TEST_CASE("piecewise constant density closed forms") {
    const BreakDensity d = BreakDensity::piecewise({-1.0, 0.0, 1.0}, {0.7, 0.3});
    CHECK(d.pdf_at(-0.5) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(d.pdf_at(-1.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(d.pdf_at(0.0) == doctest::Approx(0.3).epsilon(1e-15));  // boundary takes the right cell
    CHECK(d.pdf_at(1.0) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.cdf(-1.0) == 0.0);
    CHECK(d.cdf(0.0) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(d.cdf(0.5) == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(d.cdf(1.0) == 1.0);
    CHECK(d.inverse_cdf(0.0) == -1.0);
    CHECK(d.inverse_cdf(0.7) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.inverse_cdf(0.85) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.inverse_cdf(1.0) == 1.0);

    SUBCASE("zero-weight cells are skipped by the quantile") {
        const BreakDensity z = BreakDensity::piecewise({-1.0, -0.5, 0.5, 1.0}, {0.5, 0.0, 0.5});
        CHECK(z.pdf_at(0.0) == 0.0);
        CHECK(z.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
        // Smallest x with cdf(x) >= 0.5 is the left edge of the dead cell.
        CHECK(z.inverse_cdf(0.5) == -0.5);
        CHECK(z.inverse_cdf(0.75) == doctest::Approx(0.75).epsilon(1e-12));
    }

    SUBCASE("constructor validation") {
        CHECK_THROWS_AS(BreakDensity::piecewise({-1.0}, {}), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::piecewise({-1.0, 1.0}, {0.5, 0.5}), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::piecewise({-1.0, 0.5}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::piecewise({-0.9, 1.0}, {1.0}), std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::piecewise({-1.0, 0.0, 0.0, 1.0}, {0.3, 0.3, 0.4}),
                        std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::piecewise({-1.0, 0.0, 1.0}, {-0.1, 1.1}),
                        std::invalid_argument);
        CHECK_THROWS_AS(BreakDensity::piecewise({-1.0, 0.0, 1.0}, {0.6, 0.3}),
                        std::invalid_argument);
    }

    SUBCASE("weights are canonicalized within the acceptance slack") {
        const BreakDensity near = BreakDensity::piecewise({-1.0, 0.0, 1.0}, {0.7, 0.3 + 1e-13});
        CHECK(near.cdf(1.0) == 1.0);
        CHECK(near.cdf(0.0) == doctest::Approx(0.7).epsilon(1e-12));
    }
}

TEST_CASE("domain errors outside [-1, 1]") {
    const BreakDensity d = BreakDensity::uniform();
    CHECK_THROWS_AS(d.pdf_at(1.2), std::domain_error);
    CHECK_THROWS_AS(d.cdf(-1.2), std::domain_error);
    CHECK_THROWS_AS(d.integrate(-2.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(d.integrate(0.5, -0.5), std::domain_error);
    CHECK_THROWS_AS(d.inverse_cdf(-0.1), std::domain_error);
    CHECK_THROWS_AS(d.inverse_cdf(1.1), std::domain_error);
}

TEST_CASE("property: cdf is a normalized nondecreasing map on every family") {
    Rng rng(21);
    for (int i = 0; i < 200; ++i) {
        const BreakDensity d = testgen::random_density(rng);
        CHECK(d.cdf(-1.0) == 0.0);
        CHECK(d.cdf(1.0) == 1.0);
        double prev = 0.0;
        for (int k = 0; k <= 40; ++k) {
            const double x = -1.0 + 2.0 * k / 40.0;
            const double c = d.cdf(x);
            CHECK(c >= prev - 1e-15);
            CHECK(c <= 1.0);
            CHECK(c >= 0.0);
            prev = c;
        }
    }
}

TEST_CASE("property: quantile and cdf form a Galois pair") {
    Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        const BreakDensity d = testgen::random_density(rng);
        for (int k = 0; k < 10; ++k) {
            const double u = rng.next_uniform();
            const double x = d.inverse_cdf(u);
            CHECK(x >= -1.0);
            CHECK(x <= 1.0);
            CHECK(d.cdf(x) >= u - 1e-12);

            const double y = 2.0 * rng.next_uniform() - 1.0;
            // Quantile of an attained positive level never overshoots the
            // point. At level zero the quantile reports the support infimum,
            // which sits above any y left of the support.
            if (d.cdf(y) > 0.0) CHECK(d.inverse_cdf(d.cdf(y)) <= y + 1e-12);
        }
    }
}

TEST_CASE("property: integrate is consistent with the cdf") {
    Rng rng(23);
    for (int i = 0; i < 100; ++i) {
        const BreakDensity d = testgen::random_density(rng);
        double a = 2.0 * rng.next_uniform() - 1.0;
        double b = 2.0 * rng.next_uniform() - 1.0;
        if (a > b) std::swap(a, b);
        CHECK(d.integrate(a, b) == doctest::Approx(d.cdf(b) - d.cdf(a)).epsilon(1e-15));
        CHECK(d.integrate(-1.0, 1.0) == 1.0);
    }
}

TEST_CASE("sampling draws through the quantile and consumes one uniform") {
    const BreakDensity d = BreakDensity::locally_uniform(0.2, 0.1);
    Rng sample_stream(7);
    Rng reference_stream(7);
    for (int i = 0; i < 50; ++i) {
        const double drawn = d.sample_break_point(sample_stream);
        const double expected = d.inverse_cdf(reference_stream.next_uniform());
        CHECK(drawn == expected);
        CHECK(drawn >= 0.1);
        CHECK(drawn <= 0.3);
    }
}
