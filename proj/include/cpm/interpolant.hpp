#pragma once

#include "cpm/flux.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// The similarity-solution interpolant between two particles:
//
//   x(v) = x1 + (f'(v) - f'(u1)) / (f'(u2) - f'(u1)) * (x2 - x1)
//
// parameterized by the value v between u1 and u2. Requires f'' of one
// sign on [u1, u2] (the inflection bookkeeping guarantees this for
// adjacent particles). The parameterization never divides by f'', so
// an inflection value sitting exactly at an endpoint is harmless.
class Interpolant {
public:
    Interpolant(const FluxModel& flux, double x1, double u1, double x2,
                double u2);

    double x1() const { return x1_; }
    double x2() const { return x2_; }
    double u1() const { return u1_; }
    double u2() const { return u2_; }
    bool vertical() const { return x1_ == x2_; }
    bool constant() const { return u1_ == u2_; }

    // x(v) for v in the closed interval spanned by u1, u2.
    double position_of(double v) const;

    // Inverse of position_of on [x1, x2]; solved by safeguarded Newton
    // on f'(v) to an absolute tolerance of 1e-13 in x. Undefined for
    // vertical segments.
    double value_at(double x) const;

    // Exact area under the interpolant: (x2 - x1) * a(u1, u2).
    double area() const;

private:
    const FluxModel* flux_;
    double x1_, u1_, x2_, u2_;
};

inline Interpolant segment(const ParticleSystem& s, const FluxModel& flux,
                           std::size_t i) {
    return Interpolant(flux, s.x(i), s.u(i), s.x(i + 1), s.u(i + 1));
}

}  // namespace cpm
