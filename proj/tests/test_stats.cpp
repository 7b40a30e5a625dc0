#include <doctest.h>

#include <boost/math/distributions/fisher_f.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "segrad/error.hpp"
#include "segrad/stats.hpp"

using namespace segrad;

TEST_CASE("F quantile: closed forms") {
    const double t = std::tan(0.475 * std::numbers::pi);
    CHECK(std::abs(f_quantile(0.95, 1, 1) - t * t) <= 1e-6);
    CHECK(std::abs(f_quantile(0.95, 1, 1) - 161.4476387) <= 1e-6);
    CHECK(std::abs(f_quantile(0.5, 7, 7) - 1.0) <= 1e-10);
    CHECK(f_quantile(1e-300, 3, 4) >= 0.0);
    CHECK(f_quantile(1e-12, 3, 4) < 1e-3);
}

TEST_CASE("F quantile: domain errors") {
    for (double p : {0.0, 1.0, -0.1, 1.5, std::nan("")}) {
        try {
            f_quantile(p, 2, 3);
            FAIL("expected throw");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::Domain);
        }
    }
    CHECK_THROWS_AS(f_quantile(0.5, 0, 3), Error);
    CHECK_THROWS_AS(f_quantile(0.5, 2, -1), Error);
}

TEST_CASE("F quantile: agrees with an independent implementation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> p(0.001, 0.999);
    std::uniform_real_distribution<double> df(0.3, 120.0);
    for (int trial = 0; trial < 2000; ++trial) {
        const double d1 = df(rng), d2 = df(rng), pp = p(rng);
        const boost::math::fisher_f_distribution<double> dist(d1, d2);
        const double expect = boost::math::quantile(dist, pp);
        const double got = f_quantile(pp, d1, d2);
        INFO(pp, " ", d1, " ", d2);
        CHECK(std::abs(got - expect) <= 1e-10 + 1e-8 * expect);
        CHECK(f_cdf(got, d1, d2) == doctest::Approx(pp).epsilon(1e-9));
    }
}

TEST_CASE("F quantile: reciprocal symmetry and monotonicity") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> p(0.01, 0.99);
    std::uniform_real_distribution<double> df(0.5, 60.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const double d1 = df(rng), d2 = df(rng);
        const double a = p(rng), b = p(rng);
        const double q = f_quantile(a, d1, d2);
        CHECK(std::abs(q - 1.0 / f_quantile(1.0 - a, d2, d1)) <= 1e-8 * std::max(1.0, q));
        if (a != b) CHECK((f_quantile(std::min(a, b), d1, d2) < f_quantile(std::max(a, b), d1, d2)));
    }
}

TEST_CASE("incomplete beta: complement and special cases") {
    CHECK(incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
    CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
    // I_x(a, 1) = x^a
    CHECK(incomplete_beta(2.5, 1, 0.4) == doctest::Approx(std::pow(0.4, 2.5)).epsilon(1e-13));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0), ab(0.2, 50.0);
    for (int trial = 0; trial < 500; ++trial) {
        const double a = ab(rng), b = ab(rng), x = u(rng);
        CHECK(incomplete_beta(a, b, x) + incomplete_beta_complement(a, b, x) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(incomplete_beta(a, b, x) == doctest::Approx(1.0 - incomplete_beta(b, a, 1.0 - x)).epsilon(1e-10));
    }
}
