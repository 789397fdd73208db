#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"

#include "cpm/fv.hpp"
#include "cpm/numerics.hpp"
#include "cpm/sampling.hpp"

using cpm::FluxModel;
using cpm::FvGrid;
using cpm::InitialCondition;

TEST_CASE("godunov interface flux") {
    auto burgers = FluxModel::burgers();
    CHECK(cpm::godunov_flux(1.0, 0.0, burgers) == doctest::Approx(0.5));
    CHECK(cpm::godunov_flux(-1.0, 1.0, burgers) == doctest::Approx(0.0));
    CHECK(cpm::godunov_flux(0.3, 0.3, burgers) ==
          doctest::Approx(burgers.f(0.3)));

    auto bl = FluxModel::buckley_leverett();
    CHECK(cpm::godunov_flux(0.0, 1.0, bl) == doctest::Approx(0.0));
    // shock case takes the max over the interval, which is interior-free
    CHECK(cpm::godunov_flux(1.0, 0.0, bl) == doctest::Approx(bl.f(1.0)));
}

TEST_CASE("sampling cell averages splits at jumps") {
    auto ic = InitialCondition::riemann(0.0, 1.0, 0.55, 1.0, 0.0);
    auto g = cpm::fv_sample(ic, 10);
    REQUIRE(g.cells() == 10);
    CHECK(g.u[0] == doctest::Approx(1.0));
    CHECK(g.u[9] == doctest::Approx(0.0));
    // the jump sits at the midpoint of cell 5: average 0.5
    CHECK(g.u[5] == doctest::Approx(0.5).epsilon(1e-12));

    InitialCondition lin;
    lin.u0 = [](double x) { return 3.0 * x; };
    lin.lo = 0.0;
    lin.hi = 1.0;
    auto gl = cpm::fv_sample(lin, 16);
    for (std::size_t i = 0; i < 16; ++i)
        CHECK(gl.u[i] == doctest::Approx(3.0 * gl.center(i)).epsilon(1e-13));
}

TEST_CASE("constant data is a fixed point of the evolution") {
    auto burgers = FluxModel::burgers();
    InitialCondition flat;
    flat.u0 = [](double) { return 0.7; };
    flat.lo = 0.0;
    flat.hi = 1.0;
    cpm::FvRunOptions opt;
    opt.t_end = 0.5;
    opt.output_times = {0.5};
    auto rr = cpm::fv_run(flat, burgers, cpm::SourceModel::none(), 50, opt);
    REQUIRE(rr.snapshots.size() == 1);
    for (double v : rr.snapshots[0].grid.u) CHECK(v == doctest::Approx(0.7));
}

TEST_CASE("riemann shock lands within one cell of the exact position") {
    auto burgers = FluxModel::burgers();
    auto ic = InitialCondition::riemann(0.0, 2.0, 0.5, 1.0, 0.0);
    cpm::FvRunOptions opt;
    opt.t_end = 1.0;
    opt.output_times = {1.0};
    std::size_t cells = 200;
    auto rr = cpm::fv_run(ic, burgers, cpm::SourceModel::none(), cells, opt);
    const auto& g = rr.snapshots[0].grid;
    // locate the 0.5 level crossing
    double xs = 0.0;
    for (std::size_t i = 0; i + 1 < g.cells(); ++i)
        if (g.u[i] >= 0.5 && g.u[i + 1] < 0.5) xs = g.center(i);
    CHECK(std::fabs(xs - 1.0) <= 2.0 * g.dx());
}

TEST_CASE("closed-boundary evolution conserves the total area") {
    auto burgers = FluxModel::burgers();
    // domain wide enough that the bump never feeds the boundaries
    InitialCondition ic;
    ic.u0 = [](double x) { return 0.5 + 0.3 * std::exp(-x * x); };
    ic.lo = -6.0;
    ic.hi = 6.0;
    cpm::FvRunOptions opt;
    opt.t_end = 1.0;
    opt.output_times = {1.0};
    auto rr = cpm::fv_run(ic, burgers, cpm::SourceModel::none(), 160, opt);
    auto total = [](const FvGrid& g) {
        double s = 0.0;
        for (double v : g.u) s += v * g.dx();
        return s;
    };
    auto g0 = cpm::fv_sample(ic, 160);
    CHECK(total(rr.snapshots[0].grid) ==
          doctest::Approx(total(g0)).epsilon(1e-13));
}

TEST_CASE("self convergence on smooth data is first order") {
    auto burgers = FluxModel::burgers();
    InitialCondition ic;
    ic.u0 = [](double x) { return 0.5 + 0.3 * std::exp(-x * x); };
    ic.lo = -4.0;
    ic.hi = 4.0;
    cpm::FvRunOptions opt;
    opt.t_end = 0.5;
    opt.output_times = {0.5};
    opt.cfl = 0.5;
    auto fine = cpm::fv_run(ic, burgers, cpm::SourceModel::none(), 4096, opt);
    std::vector<double> errs;
    for (std::size_t cells : {64, 128, 256}) {
        auto coarse = cpm::fv_run(ic, burgers, cpm::SourceModel::none(), cells,
                                  opt);
        errs.push_back(cpm::l1_error_vs_reference(coarse.snapshots[0].grid,
                                                  fine.snapshots[0].grid));
    }
    for (std::size_t k = 1; k < errs.size(); ++k) {
        double order = std::log2(errs[k - 1] / errs[k]);
        CHECK(order > 0.8);
        CHECK(order < 1.2);
    }
}

TEST_CASE("error against references") {
    FvGrid a;
    a.lo = 0.0;
    a.hi = 2.0;
    a.u.assign(16, 1.0);
    FvGrid b = a;
    CHECK(cpm::l1_error_vs_reference(a, b) == 0.0);

    FvGrid fine;
    fine.lo = 0.0;
    fine.hi = 2.0;
    fine.u.assign(256, 0.0);
    CHECK(cpm::l1_error_vs_reference(a, fine) == doctest::Approx(2.0));

    // refinement factor below 8 (and not equal) is rejected
    FvGrid shallow = fine;
    shallow.u.assign(20, 0.0);
    CHECK_THROWS_AS(cpm::l1_error_vs_reference(a, shallow), cpm::ConfigError);

    // particle overload integrates over the reference domain
    cpm::ParticleSystem s;
    for (double x : {0.0, 2.0}) {
        cpm::Particle p;
        p.x = x;
        p.u = 1.0;
        s.particles.push_back(p);
    }
    auto burgers = FluxModel::burgers();
    auto r = cpm::l1_error_vs_reference(s, burgers, fine);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("grid validation") {
    FvGrid g;
    g.u.assign(4, 1.0);
    g.cfl = 1.5;
    CHECK_THROWS_AS(g.validate(), cpm::ConfigError);
    g.cfl = 0.9;
    CHECK_NOTHROW(g.validate());
    g.u[2] = std::nan("");
    CHECK_THROWS_AS(g.validate(), cpm::ConfigError);

    auto burgers = FluxModel::burgers();
    InitialCondition flat;
    flat.u0 = [](double) { return 0.0; };
    flat.lo = 0.0;
    flat.hi = 1.0;
    cpm::FvRunOptions opt;
    CHECK_THROWS_AS(
        cpm::fv_run(flat, burgers, cpm::SourceModel::none(), 4, opt),
        cpm::ConfigError);  // needs at least 10 cells
}

TEST_CASE("source splitting adds the balance term") {
    auto burgers = FluxModel::burgers();
    InitialCondition flat;
    flat.u0 = [](double) { return 1.0; };
    flat.lo = 0.0;
    flat.hi = 1.0;
    cpm::SourceModel growth;
    growth.g = [](double, double u) { return u; };
    cpm::FvRunOptions opt;
    opt.t_end = 0.5;
    opt.output_times = {0.5};
    auto rr = cpm::fv_run(flat, burgers, growth, 32, opt);
    // interior cells follow du/dt = u at first order in dt
    double mid = rr.snapshots[0].grid.u[16];
    CHECK(mid == doctest::Approx(std::exp(0.5)).epsilon(0.05));
}
