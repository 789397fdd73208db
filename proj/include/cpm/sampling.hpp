#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cpm/flux.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// One discontinuity of the initial data: location and one-sided limits.
struct Jump {
    double x = 0.0;
    double left = 0.0;
    double right = 0.0;
};

// Piecewise-smooth initial data on [lo, hi] with finitely many jumps at known
// locations. Derivatives may be supplied analytically; when absent they are
// approximated by centered differences with step 1e-6 * (hi - lo).
struct InitialCondition {
    std::function<double(double)> u0;
    std::function<double(double)> du0;
    std::function<double(double)> ddu0;
    double lo = 0.0;
    double hi = 1.0;
    std::vector<Jump> jumps;
    std::string name = "custom";

    double value(double x) const { return u0(x); }
    double deriv(double x) const;
    double deriv2(double x) const;

    // Throws ConfigError unless the domain is finite and the jumps are
    // strictly increasing and strictly interior.
    void validate() const;

    static InitialCondition gaussian_cosine(double lo, double hi);
    static InitialCondition riemann(double lo, double hi, double x0, double ul, double ur);
    static InitialCondition piecewise_constant(double lo, double hi,
                                               const std::vector<double>& locations,
                                               const std::vector<double>& plateau_values);
    static InitialCondition polynomial(double lo, double hi, const std::vector<double>& coeffs);
};

// n particles total: a uniform grid of spacing h = (hi - lo)/(n - 1), each
// jump represented exactly by a coincident pair carrying the one-sided limits
// (grid nodes landing on a jump are dropped), smooth crossings of flux
// inflection values pinned by root finding, inflection particles enforced.
// Sets h, d_max = 4h/3, d_min = 0 on the result.
ParticleSystem sample_equidistant(const InitialCondition& ic, const FluxModel& flux,
                                  std::size_t n);

// Leading-order interpolation error density of the method on smooth data,
// (f''(w) w'' + f'''(w) w'^2) / (12 f''(w)) with w = u0(x). May be non-finite
// where f'' vanishes along the data; sample_adaptive substitutes the largest
// finite grid value there.
double error_density(const InitialCondition& ic, const FluxModel& flux, double x);

// Same contract as sample_equidistant, but nodes are placed at the inverse-CDF
// quantiles of sqrt(max(|error_density|, floor)), integrated by composite
// trapezoid on a 64n grid. The floor is 1e-8 * max |density|, so regions of
// vanishing density still receive particles.
ParticleSystem sample_adaptive(const InitialCondition& ic, const FluxModel& flux,
                               std::size_t n);

}  // namespace cpm
