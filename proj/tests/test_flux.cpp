#include <cmath>
#include <random>

#include "doctest.h"

#include "cpm/flux.hpp"

using cpm::FluxModel;

TEST_CASE("legendre transform values") {
    auto burgers = FluxModel::burgers();
    auto quartic = FluxModel::quartic();
    CHECK(burgers.legendre(1.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(burgers.legendre(0.0) == doctest::Approx(0.0));
    CHECK(quartic.legendre(0.0) == doctest::Approx(0.0));
    CHECK(quartic.legendre(1.0) == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("nonlinear average closed forms") {
    auto burgers = FluxModel::burgers();
    auto quartic = FluxModel::quartic();
    CHECK(burgers.nonlinear_average(0.2, 0.8) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(burgers.nonlinear_average(0.7, 0.7) == doctest::Approx(0.7));
    CHECK(quartic.nonlinear_average(0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-13));
}

TEST_CASE("quadratic fast path is the arithmetic mean exactly") {
    auto f = FluxModel::polynomial({1.0, -2.0, 1.5});
    CHECK(f.is_quadratic());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int i = 0; i < 1000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        CHECK(f.nonlinear_average(u1, u2) == 0.5 * (u1 + u2));
    }
}

TEST_CASE("inflection catalogues") {
    auto burgers = FluxModel::burgers();
    auto quartic = FluxModel::quartic();
    auto bl = FluxModel::buckley_leverett();

    CHECK(burgers.inflection_points(0.0, 1.0).empty());
    CHECK(quartic.inflection_points(0.1, 1.0).empty());

    auto pts = bl.inflection_points(0.0, 1.0);
    REQUIRE(pts.size() == 1);
    double ustar = pts[0];
    CHECK(bl.ddf(ustar - 1e-6) * bl.ddf(ustar + 1e-6) < 0.0);
    // interior sign classification uses the same catalogue
    CHECK(bl.convexity_sign(0.0, 1.0) == 0);
    CHECK(bl.convexity_sign(0.0, ustar - 1e-3) != 0);
}

TEST_CASE("average symmetry over random pairs") {
    auto quartic = FluxModel::quartic();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int i = 0; i < 10000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        double a = quartic.nonlinear_average(u1, u2);
        double b = quartic.nonlinear_average(u2, u1);
        CHECK(std::fabs(a - b) <= 1e-14 * std::fabs(a));
    }
}

TEST_CASE("average agrees for f and -f") {
    auto quartic = FluxModel::quartic();
    auto negated = FluxModel::polynomial({0.0, 0.0, 0.0, 0.0, -0.25});
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    for (int i = 0; i < 10000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        double a = quartic.nonlinear_average(u1, u2);
        double b = negated.nonlinear_average(u1, u2);
        CHECK(a == doctest::Approx(b).epsilon(1e-13));
    }
}

TEST_CASE("average lies strictly between distinct arguments") {
    auto quartic = FluxModel::quartic();
    auto bl = FluxModel::buckley_leverett();
    double ustar = bl.inflection_values()[0];
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    std::uniform_real_distribution<double> unif_bl(0.0, ustar);
    for (int i = 0; i < 10000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        if (u1 == u2) continue;
        double a = quartic.nonlinear_average(u1, u2);
        CHECK(a > std::min(u1, u2));
        CHECK(a < std::max(u1, u2));
        double v1 = unif_bl(rng), v2 = unif_bl(rng);
        if (v1 == v2) continue;
        double ab = bl.nonlinear_average(v1, v2);
        CHECK(ab > std::min(v1, v2));
        CHECK(ab < std::max(v1, v2));
    }
}

TEST_CASE("average monotone in each argument") {
    auto quartic = FluxModel::quartic();
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> unif(0.1, 2.0);
    const double eps = 1e-6;
    for (int i = 0; i < 10000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        double up1 = quartic.nonlinear_average(u1 + eps, u2) -
                     quartic.nonlinear_average(u1 - eps, u2);
        double up2 = quartic.nonlinear_average(u1, u2 + eps) -
                     quartic.nonlinear_average(u1, u2 - eps);
        CHECK(up1 > 0.0);
        CHECK(up2 > 0.0);
    }
}

TEST_CASE("average partial derivatives within convexity-ratio bounds") {
    auto quartic = FluxModel::quartic();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> unif(0.2, 2.0);
    const double eps = 1e-6;
    for (int i = 0; i < 2000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        if (std::fabs(u1 - u2) < 0.05) continue;
        auto [mn, mx] =
            quartic.ddf_abs_range(std::min(u1, u2), std::max(u1, u2));
        double lo = 0.5 * (mn / mx) * (mn / mx) - 1e-6;
        double hi = 0.5 * (mx / mn) * (mx / mn) + 1e-6;
        double d1 = (quartic.nonlinear_average(u1 + eps, u2) -
                     quartic.nonlinear_average(u1 - eps, u2)) /
                    (2 * eps);
        double d2 = (quartic.nonlinear_average(u1, u2 + eps) -
                     quartic.nonlinear_average(u1, u2 - eps)) /
                    (2 * eps);
        CHECK(d1 >= lo);
        CHECK(d1 <= hi);
        CHECK(d2 >= lo);
        CHECK(d2 <= hi);
        // the analytic partials match the finite differences
        CHECK(quartic.d_average_d1(u1, u2) == doctest::Approx(d1).epsilon(1e-5));
        CHECK(quartic.d_average_d2(u1, u2) == doctest::Approx(d2).epsilon(1e-5));
    }
}

TEST_CASE("derivative consistency of the builtin catalogue") {
    const double eps = 1e-6;
    for (auto f : {FluxModel::burgers(), FluxModel::quartic(),
                   FluxModel::buckley_leverett()}) {
        for (double u : {0.12, 0.37, 0.58, 0.93}) {
            double fd = (f.f(u + eps) - f.f(u - eps)) / (2 * eps);
            CHECK(f.df(u) == doctest::Approx(fd).epsilon(1e-8));
            double fdd = (f.df(u + eps) - f.df(u - eps)) / (2 * eps);
            CHECK(f.ddf(u) == doctest::Approx(fdd).epsilon(1e-8));
            double fddd = (f.ddf(u + eps) - f.ddf(u - eps)) / (2 * eps);
            CHECK(f.dddf(u) == doctest::Approx(fddd).epsilon(1e-6));
        }
    }
}

TEST_CASE("speed bound includes interior extrema") {
    auto burgers = FluxModel::burgers();
    CHECK(burgers.max_abs_df(-2.0, 1.0) == doctest::Approx(2.0));
    auto bl = FluxModel::buckley_leverett();
    // f' of Buckley-Leverett peaks inside (0,1), above both endpoint slopes
    double interior = bl.max_abs_df(0.0, 1.0);
    CHECK(interior > bl.df(0.0));
    CHECK(interior > bl.df(1.0));
}

TEST_CASE("mirrored frames") {
    auto bl = FluxModel::buckley_leverett();
    double ustar = bl.inflection_values()[0];

    auto mx = bl.mirrored_space();
    CHECK(mx.f(0.3) == doctest::Approx(-bl.f(0.3)).epsilon(1e-15));
    REQUIRE(mx.inflection_values().size() == 1);
    CHECK(mx.inflection_values()[0] == doctest::Approx(ustar).epsilon(1e-9));

    auto mu = bl.mirrored_value(ustar);
    // reflected states keep their speeds
    for (double du : {0.05, 0.1, 0.2}) {
        CHECK(mu.df(ustar + du) ==
              doctest::Approx(bl.df(ustar - du)).epsilon(1e-12));
    }
    REQUIRE(mu.inflection_values().size() == 1);
    CHECK(mu.inflection_values()[0] == doctest::Approx(ustar).epsilon(1e-9));
}
