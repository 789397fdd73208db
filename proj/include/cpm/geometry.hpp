#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cpm/flux.hpp"
#include "cpm/interpolant.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// Exact area under the piecewise interpolant: sum of width * a(u_i, u_i+1).
double total_area(const ParticleSystem& s, const FluxModel& flux);

// sum |u_i+1 - u_i|
double total_variation(const ParticleSystem& s);

// Value of the interpolant at x; constant extension outside the
// particle extent. At a jump the right state is returned.
double evaluate(const ParticleSystem& s, const FluxModel& flux, double x);

// integral |v(x) - k| dx over the particle extent, split exactly at the
// points where the interpolant crosses k.
double kruzkov_entropy(const ParticleSystem& s, const FluxModel& flux,
                       double k);

// Uniform grid of cell averages on [lo, hi] (the finite-volume layout).
struct GridFunction {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<double> values;

    double dx() const { return (hi - lo) / double(values.size()); }
    double center(std::size_t i) const { return lo + dx() * (double(i) + 0.5); }
};

struct L1Result {
    double value = 0.0;
    bool clamped = false;  // window extended past the particle extent
};

// Composite midpoint rule on the reference grid, evaluating the
// particle solution at the reference cell centers. Windows reaching
// past the particle extent use the constant extension and set the
// clamped flag.
L1Result l1_distance(const ParticleSystem& s, const FluxModel& flux,
                     const GridFunction& ref, double window_lo,
                     double window_hi);

// A piecewise-smooth curve given by its breakpoints and a pointwise
// evaluator; the basis of the exact L1 comparison between two
// solutions (particle, finite-volume, or analytic).
struct PiecewiseCurve {
    std::vector<double> breakpoints;  // sorted; may be empty
    std::function<double(double)> eval;
};

PiecewiseCurve particle_curve(const ParticleSystem& s, const FluxModel& flux);
PiecewiseCurve grid_curve(const GridFunction& g);

// integral |A(x) - B(x)| dx over [lo, hi], integrating with Gauss
// panels between the union of breakpoints so that jumps of either
// curve never fall inside a panel. base_cells bounds the panel width
// by (hi - lo) / base_cells.
double l1_between(const PiecewiseCurve& a, const PiecewiseCurve& b, double lo,
                  double hi, int base_cells = 4096);

// Same, but skipping a set of excluded intervals (shock windows).
double l1_between_excluding(
    const PiecewiseCurve& a, const PiecewiseCurve& b, double lo, double hi,
    const std::vector<std::pair<double, double>>& excluded,
    int base_cells = 4096);

// (x(v), v) points for plotting, pts per non-degenerate segment sampled
// uniformly in v; vertical segments contribute their two endpoints.
std::vector<std::pair<double, double>> sample_curve(const ParticleSystem& s,
                                                    const FluxModel& flux,
                                                    int pts = 16);

// x positions of jump pairs (coincident particles with distinct values).
std::vector<double> jump_positions(const ParticleSystem& s);

}  // namespace cpm
