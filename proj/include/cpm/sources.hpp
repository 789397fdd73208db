#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cpm/engine.hpp"
#include "cpm/flux.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// Right-hand side g(x,u) of the balance law u_t + f(u)_x = g(x,u), plus the
// positions where its x-dependence is non-smooth so the time integrator can
// split steps there. An empty g means a zero source.
struct SourceModel {
    std::function<double(double, double)> g;
    std::vector<double> x_discontinuities;
    std::function<double(double)> bottom;  // b(x) when g = b'(x) u, else empty
    std::string name = "none";

    bool is_zero() const { return !g; }
    void validate() const;

    static SourceModel none();
    // g = b'(x) u for the bottom profile b(x) = cos(pi x) on [lo, hi], zero
    // outside. Requires cos(pi lo) and cos(pi hi) to vanish so b stays
    // continuous; the defaults are the standard obstacle window.
    static SourceModel bottom_profile(double lo = 4.5, double hi = 5.5);
    // g = b'(x) u for a piecewise-polynomial bottom: coeffs[k] (ascending
    // powers) applies on [edges[k], edges[k+1]], b = 0 outside the edges.
    static SourceModel bottom_pieces(const std::vector<double>& edges,
                                     const std::vector<std::vector<double>>& coeffs);
};

// One classical fourth-order Runge-Kutta update of (x, u) under
// (f'(u), g(x,u)). If the step's x-path crosses a source discontinuity, the
// particle creeps up to it with shrinking substeps whose stage points stay on
// the near side, lands on it, and integrates the remainder on the far side,
// so no Runge-Kutta stage ever mixes the two branches of g. Throws
// SolverError on non-finite states.
Particle rk4_step(const Particle& p, const FluxModel& flux,
                  const SourceModel& source, double dt);

struct SourceRunOptions {
    double dt = 0.0;  // 0: 0.2 h / max |f'| over the initial data
    double t_end = 0.0;
    std::vector<double> output_times;
    bool enable_entropy_fix = true;
    bool audit_entropy = false;
    int entropy_fix_rounds = 10;
    std::size_t max_steps = 0;  // 0: internal guard
};

// Fixed-step integration of the whole system to t_end. After every accepted
// step: deduplicate, enforce inflection particles, merge every approaching
// adjacent pair closer than d_min (including slightly overlapped pairs;
// spreading pairs are rarefaction data and stay), deduplicate again. A step
// that inverts ordering by more than d_min is retried at half size, up to 20
// halvings. Particle insertion stays off. If d_min is unset it defaults to
// 0.1 h. Snapshots are recorded at the requested output times.
RunResult run_with_source(ParticleSystem s, const FluxModel& flux,
                          const SourceModel& source, const SourceRunOptions& opt);

}  // namespace cpm
