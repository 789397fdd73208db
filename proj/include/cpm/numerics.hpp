#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cpm {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Compensated accumulator (Neumaier variant). Keeps long sums accurate
// enough that conservation audits at 1e-12 are not polluted by roundoff.
class KahanSum {
public:
    void add(double v) {
        double t = s_ + v;
        if (std::abs(s_) >= std::abs(v))
            c_ += (s_ - t) + v;
        else
            c_ += (v - t) + s_;
        s_ = t;
    }
    double value() const { return s_ + c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Safeguarded Newton iteration on a bracketed root. fn must have opposite
// signs at lo and hi. Falls back to bisection whenever the Newton step
// leaves the bracket or the derivative is unusable. Returns the abscissa
// with |fn| <= ftol, or the bracket midpoint once the bracket collapses.
template <class F, class DF>
double newton_bisect(F&& fn, DF&& dfn, double lo, double hi, double x0,
                     double ftol, int max_newton = 25) {
    double flo = fn(lo);
    if (flo == 0.0) return lo;
    double fhi = fn(hi);
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw SolverError("newton_bisect: root not bracketed");

    double x = (x0 > lo && x0 < hi) ? x0 : 0.5 * (lo + hi);
    int newton_left = max_newton;
    for (int it = 0; it < 200; ++it) {
        double fx = fn(x);
        if (std::abs(fx) <= ftol) return x;
        if ((fx > 0) == (fhi > 0)) {
            hi = x; fhi = fx;
        } else {
            lo = x; flo = fx;
        }
        if (hi - lo <= std::numeric_limits<double>::epsilon() *
                           (std::abs(lo) + std::abs(hi) + 1e-300))
            return 0.5 * (lo + hi);
        double xn = kInf;
        if (newton_left-- > 0) {
            double d = dfn(x);
            if (d != 0.0 && std::isfinite(d)) xn = x - fx / d;
        }
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
    }
    return x;
}

// Plain bisection to a function tolerance on a sign change.
template <class F>
double bisect(F&& fn, double lo, double hi, double xtol) {
    double flo = fn(lo);
    if (flo == 0.0) return lo;
    double fhi = fn(hi);
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0))
        throw SolverError("bisect: root not bracketed");
    while (hi - lo > xtol) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double fm = fn(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0) == (fhi > 0)) {
            hi = mid; fhi = fm;
        } else {
            lo = mid; flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

// 4-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr double kGauss4X[4] = {-0.8611363115940526, -0.3399810435848563,
                                       0.3399810435848563, 0.8611363115940526};
inline constexpr double kGauss4W[4] = {0.34785484513745385, 0.6521451548625461,
                                       0.6521451548625461, 0.34785484513745385};

template <class F>
double gauss4(F&& fn, double a, double b) {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < 4; ++i) s += kGauss4W[i] * fn(mid + half * kGauss4X[i]);
    return s * half;
}

}  // namespace cpm
