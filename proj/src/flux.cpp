#include "cpm/flux.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpm/numerics.hpp"

namespace cpm {
namespace {

// Locate sign changes of fn on [lo, hi] by a grid scan followed by
// bisection. Grid zeros that do not separate opposite signs (touch
// points) are not reported.
std::vector<double> sign_changes(const std::function<double(double)>& fn,
                                 double lo, double hi, double xtol) {
    std::vector<double> out;
    if (!(hi > lo)) return out;
    const int n = 8192;
    const double h = (hi - lo) / n;
    double xp = lo;
    double fp = fn(xp);
    for (int i = 1; i <= n; ++i) {
        double x = (i == n) ? hi : lo + i * h;
        double fc = fn(x);
        if (fc == 0.0) continue;  // wait for a strict sign on both sides
        if (fp == 0.0) {
            fp = fc;
            xp = x;
            continue;
        }
        if ((fp > 0) != (fc > 0)) {
            out.push_back(bisect(fn, xp, x, xtol));
        }
        fp = fc;
        xp = x;
    }
    return out;
}

double poly_eval(const std::vector<double>& c, double u) {
    double v = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * u + c[i];
    return v;
}

std::vector<double> poly_derive(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i) d.push_back(c[i] * double(i));
    return d;
}

}  // namespace

FluxModel::FluxModel(std::string name, Fn f, Fn df, Fn ddf, Fn dddf,
                     double scan_lo, double scan_hi, bool quadratic)
    : name_(std::move(name)),
      f_(std::move(f)),
      df_(std::move(df)),
      ddf_(std::move(ddf)),
      dddf_(std::move(dddf)),
      scan_lo_(scan_lo),
      scan_hi_(scan_hi),
      quadratic_(quadratic) {
    if (!(scan_hi_ > scan_lo_))
        throw std::invalid_argument("FluxModel: empty scan range");
    inflections_ = sign_changes(ddf_, scan_lo_, scan_hi_, 1e-12);
    criticals_ = sign_changes(df_, scan_lo_, scan_hi_, 1e-12);
}

double FluxModel::dddf(double u) const {
    if (dddf_) return dddf_(u);
    const double h = 1e-5;
    return (ddf_(u + h) - ddf_(u - h)) / (2.0 * h);
}

double FluxModel::nonlinear_average(double u1, double u2) const {
    if (u1 == u2) return u1;
    if (quadratic_) return 0.5 * (u1 + u2);
    const double p1 = df_(u1), p2 = df_(u2);
    const double dp = p2 - p1;
    if (std::abs(dp) <
        1e-13 * std::max({1.0, std::abs(p1), std::abs(p2)}))
        return 0.5 * (u1 + u2);
    return (legendre(u2) - legendre(u1)) / dp;
}

double FluxModel::d_average_d2(double u1, double u2) const {
    if (quadratic_) return 0.5;
    const double dp = df_(u2) - df_(u1);
    if (std::abs(dp) < 1e-13 * std::max(1.0, std::abs(df_(u1)))) return 0.5;
    return ddf_(u2) * (u2 - nonlinear_average(u1, u2)) / dp;
}

double FluxModel::d_average_d1(double u1, double u2) const {
    if (quadratic_) return 0.5;
    const double dp = df_(u2) - df_(u1);
    if (std::abs(dp) < 1e-13 * std::max(1.0, std::abs(df_(u1)))) return 0.5;
    return ddf_(u1) * (nonlinear_average(u1, u2) - u1) / dp;
}

std::vector<double> FluxModel::inflection_points(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    std::vector<double> out;
    for (double v : inflections_)
        if (v >= lo && v <= hi) out.push_back(v);
    return out;
}

int FluxModel::convexity_sign(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    for (double v : inflections_)
        if (v > lo && v < hi) return 0;
    // probe a few interior points; the range is inflection-free
    const int k = 5;
    for (int i = 0; i <= k; ++i) {
        double u = lo + (hi - lo) * i / k;
        double d = ddf_(u);
        if (d > convexity_tol) return 1;
        if (d < -convexity_tol) return -1;
    }
    return 0;
}

std::pair<double, double> FluxModel::ddf_abs_range(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    double mn = kInf, mx = 0.0;
    const int n = 256;
    for (int i = 0; i <= n; ++i) {
        double u = lo + (hi - lo) * i / n;
        double d = std::abs(ddf_(u));
        mn = std::min(mn, d);
        mx = std::max(mx, d);
    }
    for (double v : inflections_)
        if (v >= lo && v <= hi) mn = 0.0;
    return {mn, mx};
}

double FluxModel::max_abs_df(double lo, double hi) const {
    if (lo > hi) std::swap(lo, hi);
    double mx = std::max(std::abs(df_(lo)), std::abs(df_(hi)));
    // |f'| attains interior extrema where f'' = 0
    for (double v : inflections_)
        if (v > lo && v < hi) mx = std::max(mx, std::abs(df_(v)));
    return mx;
}

FluxModel FluxModel::burgers() {
    return FluxModel(
        "burgers", [](double u) { return 0.5 * u * u; },
        [](double u) { return u; }, [](double) { return 1.0; },
        [](double) { return 0.0; }, -8.0, 8.0, true);
}

FluxModel FluxModel::quartic() {
    return FluxModel(
        "quartic", [](double u) { return 0.25 * u * u * u * u; },
        [](double u) { return u * u * u; }, [](double u) { return 3.0 * u * u; },
        [](double u) { return 6.0 * u; }, -8.0, 8.0, false);
}

FluxModel FluxModel::buckley_leverett() {
    // f(u) = u^2 / (u^2 + (1-u)^2 / 2); one inflection inside (0, 1)
    auto den = [](double u) { return 1.5 * u * u - u + 0.5; };
    return FluxModel(
        "buckley-leverett",
        [den](double u) { return u * u / den(u); },
        [den](double u) {
            double D = den(u);
            return u * (1.0 - u) / (D * D);
        },
        [den](double u) {
            double D = den(u);
            return (3.0 * u * u * u - 4.5 * u * u + 0.5) / (D * D * D);
        },
        [den](double u) {
            double D = den(u);
            double N = 3.0 * u * u * u - 4.5 * u * u + 0.5;
            double Np = 9.0 * u * u - 9.0 * u;
            double Dp = 3.0 * u - 1.0;
            return (Np * D - 3.0 * N * Dp) / (D * D * D * D);
        },
        0.0, 1.0, false);
}

FluxModel FluxModel::polynomial(std::vector<double> coeffs, double scan_lo,
                                double scan_hi) {
    if (coeffs.empty()) throw std::invalid_argument("polynomial: no coefficients");
    auto d1 = poly_derive(coeffs);
    auto d2 = poly_derive(d1);
    auto d3 = poly_derive(d2);
    bool quad = coeffs.size() <= 3;
    return FluxModel(
        "polynomial",
        [c = coeffs](double u) { return poly_eval(c, u); },
        [c = d1](double u) { return poly_eval(c, u); },
        [c = d2](double u) { return poly_eval(c, u); },
        [c = d3](double u) { return poly_eval(c, u); }, scan_lo, scan_hi, quad);
}

FluxModel FluxModel::mirrored_space() const {
    Fn f = f_, df = df_, ddf = ddf_;
    Fn d3;
    if (dddf_) {
        Fn base = dddf_;
        d3 = [base](double u) { return -base(u); };
    }
    return FluxModel(name_ + "(-x)", [f](double u) { return -f(u); },
                     [df](double u) { return -df(u); },
                     [ddf](double u) { return -ddf(u); }, d3, scan_lo_, scan_hi_,
                     quadratic_);
}

FluxModel FluxModel::mirrored_value(double center) const {
    const double c2 = 2.0 * center;
    Fn f = f_, df = df_, ddf = ddf_;
    Fn d3;
    if (dddf_) {
        Fn base = dddf_;
        d3 = [base, c2](double u) { return base(c2 - u); };
    }
    return FluxModel(name_ + "(-u)", [f, c2](double u) { return -f(c2 - u); },
                     [df, c2](double u) { return df(c2 - u); },
                     [ddf, c2](double u) { return -ddf(c2 - u); }, d3,
                     c2 - scan_hi_, c2 - scan_lo_, quadratic_);
}

}  // namespace cpm
