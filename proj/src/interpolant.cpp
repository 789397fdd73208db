#include "cpm/interpolant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpm/numerics.hpp"

namespace cpm {

Interpolant::Interpolant(const FluxModel& flux, double x1, double u1,
                         double x2, double u2)
    : flux_(&flux), x1_(x1), u1_(u1), x2_(x2), u2_(u2) {
    if (x2_ < x1_) throw std::invalid_argument("Interpolant: x2 < x1");
}

double Interpolant::position_of(double v) const {
    if (u1_ == u2_)
        throw std::invalid_argument("Interpolant::position_of: u1 == u2");
    const double lo = std::min(u1_, u2_), hi = std::max(u1_, u2_);
    if (v < lo || v > hi)
        throw std::invalid_argument("Interpolant::position_of: v outside range");
    const double p1 = flux_->df(u1_), p2 = flux_->df(u2_);
    const double dp = p2 - p1;
    if (dp == 0.0) {
        // equal end speeds (possible for distinct values of a
        // non-convex flux); the map degenerates, fall back to linear
        return x1_ + (v - u1_) / (u2_ - u1_) * (x2_ - x1_);
    }
    double th = (flux_->df(v) - p1) / dp;
    th = std::clamp(th, 0.0, 1.0);
    return x1_ + th * (x2_ - x1_);
}

double Interpolant::value_at(double x) const {
    if (vertical())
        throw std::invalid_argument("Interpolant::value_at: vertical segment");
    if (x < x1_ || x > x2_)
        throw std::invalid_argument("Interpolant::value_at: x outside segment");
    if (constant()) return u1_;
    const double p1 = flux_->df(u1_), p2 = flux_->df(u2_);
    const double dp = p2 - p1;
    const double w = x2_ - x1_;
    if (dp == 0.0) return u1_ + (x - x1_) / w * (u2_ - u1_);
    // solve f'(v) = p1 + (x - x1)/w * dp for v between the endpoint values
    const double target = p1 + (x - x1_) / w * dp;
    const double lo = std::min(u1_, u2_), hi = std::max(u1_, u2_);
    const double xtol = 1e-13;
    // tolerance on f' corresponding to the x tolerance
    const double ftol = std::abs(dp) / w * xtol;
    auto fn = [&](double v) { return flux_->df(v) - target; };
    auto dfn = [&](double v) { return flux_->ddf(v); };
    return newton_bisect(fn, dfn, lo, hi, 0.5 * (u1_ + u2_), ftol);
}

double Interpolant::area() const {
    return (x2_ - x1_) * flux_->nonlinear_average(u1_, u2_);
}

}  // namespace cpm
