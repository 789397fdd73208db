#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace cpm {

// Flux function f(u) together with its first three derivatives and the
// derived quantities the particle method needs: the Legendre-type
// transform F(u) = f'(u) u - f(u), the nonlinear average of two states,
// and the catalogue of inflection values (sign changes of f'') inside a
// scan range fixed at construction.
class FluxModel {
public:
    using Fn = std::function<double(double)>;

    static constexpr double convexity_tol = 1e-12;

    // dddf may be empty; it is then approximated by central differences
    // of ddf with step 1e-5.
    FluxModel(std::string name, Fn f, Fn df, Fn ddf, Fn dddf,
              double scan_lo, double scan_hi, bool quadratic = false);

    double f(double u) const { return f_(u); }
    double df(double u) const { return df_(u); }
    double ddf(double u) const { return ddf_(u); }
    double dddf(double u) const;

    double legendre(double u) const { return df_(u) * u - f_(u); }

    // a(u1, u2) = [F]_{u1}^{u2} / [f']_{u1}^{u2}. Requires f'' of one
    // sign on the interval. Equal arguments and a degenerate f' spread
    // fall back to the arithmetic mean; fluxes flagged quadratic return
    // the arithmetic mean outright, which is exact for them.
    double nonlinear_average(double u1, double u2) const;

    // Partial derivatives of the average in its first/second argument.
    double d_average_d1(double u1, double u2) const;
    double d_average_d2(double u1, double u2) const;

    const std::vector<double>& inflection_values() const { return inflections_; }
    std::vector<double> inflection_points(double lo, double hi) const;

    // Zeros of f' inside the scan range (used by the Godunov flux).
    const std::vector<double>& critical_values() const { return criticals_; }

    bool is_quadratic() const { return quadratic_; }
    const std::string& name() const { return name_; }
    double scan_lo() const { return scan_lo_; }
    double scan_hi() const { return scan_hi_; }

    // Sign of f'' on [lo, hi]: +1 or -1 when single-signed, 0 when an
    // inflection value lies strictly inside or f'' vanishes throughout.
    int convexity_sign(double lo, double hi) const;

    // {min |f''|, max |f''|} over [lo, hi], by dense sampling.
    std::pair<double, double> ddf_abs_range(double lo, double hi) const;

    // max |f'| over [lo, hi]; includes interior extrema of f'.
    double max_abs_df(double lo, double hi) const;

    static FluxModel burgers();
    static FluxModel quartic();
    static FluxModel buckley_leverett();
    static FluxModel polynomial(std::vector<double> coeffs,
                                double scan_lo = -8.0, double scan_hi = 8.0);

    // x -> -x frame: flux becomes -f. Inflection values are unchanged.
    FluxModel mirrored_space() const;
    // u -> 2c - u frame: flux becomes -f(2c - u). Preserves speeds of
    // reflected states and the sign of f''' at c.
    FluxModel mirrored_value(double center) const;

private:
    std::string name_;
    Fn f_, df_, ddf_, dddf_;
    double scan_lo_, scan_hi_;
    bool quadratic_;
    std::vector<double> inflections_;
    std::vector<double> criticals_;
};

}  // namespace cpm
