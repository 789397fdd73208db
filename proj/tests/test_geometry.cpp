#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"

#include "cpm/flux.hpp"
#include "cpm/geometry.hpp"
#include "cpm/interpolant.hpp"

using cpm::FluxModel;
using cpm::GridFunction;
using cpm::Interpolant;
using cpm::Particle;
using cpm::ParticleSystem;

namespace {

ParticleSystem make_system(const std::vector<std::pair<double, double>>& pts) {
    ParticleSystem s;
    for (auto [x, u] : pts) {
        Particle p;
        p.x = x;
        p.u = u;
        s.particles.push_back(p);
    }
    return s;
}

}  // namespace

TEST_CASE("interpolant endpoint and closed-form positions") {
    auto burgers = FluxModel::burgers();
    auto quartic = FluxModel::quartic();

    Interpolant lin(burgers, 0.0, 0.0, 1.0, 1.0);
    CHECK(lin.position_of(0.25) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(lin.position_of(0.0) == doctest::Approx(0.0));
    CHECK(lin.value_at(0.3) == doctest::Approx(0.3).epsilon(1e-12));

    Interpolant cub(quartic, 0.0, 0.0, 1.0, 1.0);
    // f' = u^3, so x(v) = v^3
    CHECK(cub.position_of(0.5) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(cub.value_at(0.125) == doctest::Approx(0.5).epsilon(1e-12));

    Interpolant flat(quartic, 0.2, 0.4, 0.9, 0.4);
    CHECK(flat.value_at(0.5) == doctest::Approx(0.4));
}

TEST_CASE("segment areas") {
    auto burgers = FluxModel::burgers();
    auto quartic = FluxModel::quartic();
    CHECK(Interpolant(burgers, 0, 0, 1, 1).area() == doctest::Approx(0.5));
    CHECK(Interpolant(quartic, 0, 0, 1, 1).area() ==
          doctest::Approx(0.75).epsilon(1e-13));
    CHECK(Interpolant(quartic, 0.7, 0.2, 0.7, 0.9).area() == 0.0);
}

TEST_CASE("value_at inverts position_of") {
    auto quartic = FluxModel::quartic();
    Interpolant seg(quartic, -0.3, 0.1, 1.7, 1.4);
    for (double v = 0.1; v <= 1.4; v += 0.1) {
        double x = seg.position_of(v);
        CHECK(seg.value_at(x) == doctest::Approx(v).epsilon(1e-11));
    }
}

TEST_CASE("splitting a segment preserves its area") {
    auto quartic = FluxModel::quartic();
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unif(0.05, 1.9);
    for (int i = 0; i < 2000; ++i) {
        double u1 = unif(rng), u2 = unif(rng);
        if (std::fabs(u1 - u2) < 1e-3) continue;
        Interpolant seg(quartic, 0.0, u1, 1.3, u2);
        double v = u1 + (u2 - u1) * 0.37;
        double xm = seg.position_of(v);
        double a1 = Interpolant(quartic, 0.0, u1, xm, v).area();
        double a2 = Interpolant(quartic, xm, v, 1.3, u2).area();
        CHECK(a1 + a2 == doctest::Approx(seg.area()).epsilon(1e-13));
    }
}

TEST_CASE("advected interpolant reproduces the classical solution") {
    auto quartic = FluxModel::quartic();
    // deviating data, so characteristics never cross
    double x1 = 0.0, u1 = 0.2, x2 = 1.0, u2 = 1.1;
    Interpolant before(quartic, x1, u1, x2, u2);
    double dt = 0.4;
    Interpolant after(quartic, x1 + quartic.df(u1) * dt, u1,
                      x2 + quartic.df(u2) * dt, u2);
    for (double x = 0.05; x < 1.0; x += 0.07) {
        double v = before.value_at(x);
        CHECK(after.value_at(x + quartic.df(v) * dt) ==
              doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("single-interval interpolation error constant") {
    // linear interpolation of u0 = x^2 under Burgers: L1 error over one
    // interval of width h approaches |e| h^3 with e = 1/6
    auto burgers = FluxModel::burgers();
    double h = 1e-2, x0 = 1.0;
    auto u0 = [](double x) { return x * x; };
    Interpolant seg(burgers, x0, u0(x0), x0 + h, u0(x0 + h));
    double err = 0.0;
    int panels = 2000;
    for (int i = 0; i < panels; ++i) {
        double x = x0 + (i + 0.5) * h / panels;
        err += std::fabs(seg.value_at(x) - u0(x)) * (h / panels);
    }
    CHECK(err / (h * h * h) == doctest::Approx(1.0 / 6.0).epsilon(0.2));
}

TEST_CASE("total area and variation") {
    auto burgers = FluxModel::burgers();
    CHECK(total_area(make_system({{0, 1}, {2, 1}}), burgers) ==
          doctest::Approx(2.0));
    CHECK(total_area(make_system({}), burgers) == 0.0);
    CHECK(total_area(make_system({{0, 0}, {1, 1}, {2, 0}}), burgers) ==
          doctest::Approx(1.0));

    CHECK(total_variation(make_system({{0, 0}, {1, 1}, {2, 0}})) ==
          doctest::Approx(2.0));
    CHECK(total_variation(make_system({{0, 0}, {1, 0.3}, {2, 1}})) ==
          doctest::Approx(1.0));
    CHECK(total_variation(make_system({{0, 0.7}})) == 0.0);
}

TEST_CASE("kruzkov entropy split at crossings") {
    auto burgers = FluxModel::burgers();
    auto flat = make_system({{0, 1}, {2, 1}});
    CHECK(cpm::kruzkov_entropy(flat, burgers, 0.0) == doctest::Approx(2.0));
    auto ramp = make_system({{0, 0}, {1, 1}});
    CHECK(cpm::kruzkov_entropy(ramp, burgers, 0.0) == doctest::Approx(0.5));
    CHECK(cpm::kruzkov_entropy(ramp, burgers, 0.5) ==
          doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("l1 distance against grid references") {
    auto burgers = FluxModel::burgers();
    GridFunction zero;
    zero.lo = 0.0;
    zero.hi = 1.0;
    zero.values.assign(20000, 0.0);

    auto ramp = make_system({{0, 0}, {1, 1}});
    auto r = cpm::l1_distance(ramp, burgers, zero, 0.0, 1.0);
    CHECK(r.value == doctest::Approx(0.5).epsilon(1e-8));
    CHECK_FALSE(r.clamped);

    GridFunction c0 = zero;
    c0.lo = -0.5;
    c0.hi = 1.5;
    auto one = make_system({{0, 1}, {1, 1}});
    auto rc = cpm::l1_distance(one, burgers, c0, -0.5, 1.5);
    CHECK(rc.value == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(rc.clamped);  // window wider than the particle extent

    // matching data integrates to quadrature noise only
    GridFunction self;
    self.lo = 0.0;
    self.hi = 1.0;
    self.values.resize(20000);
    for (std::size_t i = 0; i < self.values.size(); ++i)
        self.values[i] = self.center(i);
    auto rs = cpm::l1_distance(ramp, burgers, self, 0.0, 1.0);
    CHECK(rs.value < 1e-7);
}

TEST_CASE("l1 between piecewise curves is exact on polynomials") {
    auto burgers = FluxModel::burgers();
    auto ramp = make_system({{0, 0}, {1, 1}});
    auto curve = cpm::particle_curve(ramp, burgers);
    cpm::PiecewiseCurve zero{{}, [](double) { return 0.0; }};
    CHECK(cpm::l1_between(curve, zero, 0.0, 1.0) ==
          doctest::Approx(0.5).epsilon(1e-12));

    // a jump in either curve lands on a panel boundary, not inside
    cpm::PiecewiseCurve step{{0.3}, [](double x) { return x < 0.3 ? 1.0 : 0.0; }};
    CHECK(cpm::l1_between(step, zero, 0.0, 1.0) ==
          doctest::Approx(0.3).epsilon(1e-12));

    std::vector<std::pair<double, double>> win = {{0.1, 0.2}};
    CHECK(cpm::l1_between_excluding(step, zero, 0.0, 1.0, win) ==
          doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("jump positions report coincident pairs") {
    auto s = make_system({{0, 1}, {1, 0.5}, {1, 0.2}, {2, 0.2}});
    auto jumps = cpm::jump_positions(s);
    REQUIRE(jumps.size() == 1);
    CHECK(jumps[0] == doctest::Approx(1.0));
    CHECK(cpm::jump_positions(make_system({{0, 1}, {1, 1}})).empty());
}

TEST_CASE("evaluate uses constant extension and right states") {
    auto burgers = FluxModel::burgers();
    auto s = make_system({{0, 1}, {1, 1}, {1, 0}, {2, 0}});
    CHECK(cpm::evaluate(s, burgers, -5.0) == doctest::Approx(1.0));
    CHECK(cpm::evaluate(s, burgers, 5.0) == doctest::Approx(0.0));
    CHECK(cpm::evaluate(s, burgers, 1.0) == doctest::Approx(0.0));
    CHECK(cpm::evaluate(s, burgers, 0.5) == doctest::Approx(1.0));
}
