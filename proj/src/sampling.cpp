#include "cpm/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "cpm/engine.hpp"
#include "cpm/nonconvex.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

double InitialCondition::deriv(double x) const {
    if (du0) return du0(x);
    double s = 1e-6 * (hi - lo);
    return (u0(x + s) - u0(x - s)) / (2.0 * s);
}

double InitialCondition::deriv2(double x) const {
    if (ddu0) return ddu0(x);
    double s = 1e-6 * (hi - lo);
    return (u0(x + s) - 2.0 * u0(x) + u0(x - s)) / (s * s);
}

void InitialCondition::validate() const {
    if (!u0) throw ConfigError("initial condition: u0 is not set");
    if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
        throw ConfigError("initial condition: domain must be a finite interval");
    double prev = lo;
    for (const auto& j : jumps) {
        if (!(j.x > prev && j.x < hi))
            throw ConfigError(
                "initial condition: jump locations must be strictly increasing "
                "and strictly inside the domain");
        prev = j.x;
        if (!(std::isfinite(j.left) && std::isfinite(j.right)))
            throw ConfigError("initial condition: jump values must be finite");
    }
}

InitialCondition InitialCondition::gaussian_cosine(double lo, double hi) {
    InitialCondition ic;
    ic.lo = lo;
    ic.hi = hi;
    ic.name = "gaussian-cosine";
    ic.u0 = [](double x) {
        return 0.5 + 0.2 * std::exp(-x * x) * std::cos(std::numbers::pi * x);
    };
    ic.du0 = [](double x) {
        const double p = std::numbers::pi;
        return 0.2 * std::exp(-x * x) *
               (-2.0 * x * std::cos(p * x) - p * std::sin(p * x));
    };
    ic.ddu0 = [](double x) {
        const double p = std::numbers::pi;
        return 0.2 * std::exp(-x * x) *
               ((4.0 * x * x - 2.0 - p * p) * std::cos(p * x) +
                4.0 * p * x * std::sin(p * x));
    };
    ic.validate();
    return ic;
}

InitialCondition InitialCondition::piecewise_constant(
    double lo, double hi, const std::vector<double>& locations,
    const std::vector<double>& plateau_values) {
    if (plateau_values.size() != locations.size() + 1)
        throw ConfigError(
            "piecewise-constant initial condition: need exactly one more "
            "plateau value than jump locations");
    InitialCondition ic;
    ic.lo = lo;
    ic.hi = hi;
    ic.name = "piecewise-constant";
    std::vector<double> xs = locations;
    std::vector<double> vals = plateau_values;
    ic.u0 = [xs, vals](double x) {
        std::size_t k = static_cast<std::size_t>(
            std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
        return vals[k];
    };
    ic.du0 = [](double) { return 0.0; };
    ic.ddu0 = [](double) { return 0.0; };
    for (std::size_t i = 0; i < xs.size(); ++i)
        ic.jumps.push_back({xs[i], vals[i], vals[i + 1]});
    ic.validate();
    return ic;
}

InitialCondition InitialCondition::riemann(double lo, double hi, double x0,
                                           double ul, double ur) {
    InitialCondition ic = piecewise_constant(lo, hi, {x0}, {ul, ur});
    ic.name = "riemann";
    return ic;
}

namespace {

std::vector<double> derived_coeffs(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i)
        d.push_back(static_cast<double>(i) * c[i]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

double horner(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

}  // namespace

InitialCondition InitialCondition::polynomial(double lo, double hi,
                                              const std::vector<double>& coeffs) {
    if (coeffs.empty())
        throw ConfigError("polynomial initial condition: coefficient list is empty");
    InitialCondition ic;
    ic.lo = lo;
    ic.hi = hi;
    ic.name = "polynomial";
    std::vector<double> c1 = derived_coeffs(coeffs);
    std::vector<double> c2 = derived_coeffs(c1);
    ic.u0 = [coeffs](double x) { return horner(coeffs, x); };
    ic.du0 = [c1](double x) { return horner(c1, x); };
    ic.ddu0 = [c2](double x) { return horner(c2, x); };
    ic.validate();
    return ic;
}

namespace {

bool near_jump(const InitialCondition& ic, double x) {
    for (const auto& j : ic.jumps)
        if (std::abs(x - j.x) <= 1e-12 * (1.0 + std::abs(j.x))) return true;
    return false;
}

struct Node {
    double x;
    double u;
};

// Locate every strict crossing of an inflection value inside the smooth
// pieces and return exact (x, u*) nodes for them. Jump edges contribute their
// one-sided limits to the straddle scan but are never roots themselves.
std::vector<Node> crossing_nodes(const InitialCondition& ic, const FluxModel& flux,
                                 const std::vector<Node>& smooth) {
    std::vector<Node> extra;
    const std::vector<double>& ustars = flux.inflection_values();
    if (ustars.empty()) return extra;

    std::size_t idx = 0;
    for (std::size_t p = 0; p <= ic.jumps.size(); ++p) {
        std::vector<Node> seq;
        if (p > 0) seq.push_back({ic.jumps[p - 1].x, ic.jumps[p - 1].right});
        while (idx < smooth.size() &&
               (p == ic.jumps.size() || smooth[idx].x < ic.jumps[p].x))
            seq.push_back(smooth[idx++]);
        if (p < ic.jumps.size()) seq.push_back({ic.jumps[p].x, ic.jumps[p].left});

        for (double ustar : ustars) {
            for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
                double fa = seq[k].u - ustar;
                double fb = seq[k + 1].u - ustar;
                if (!(fa * fb < 0.0)) continue;
                double xlo = seq[k].x, xhi = seq[k + 1].x, fhi = fb;
                for (int it = 0; it < 200 && xhi - xlo > 0.0; ++it) {
                    double mid = 0.5 * (xlo + xhi);
                    if (mid <= xlo || mid >= xhi) break;
                    double fm = ic.value(mid) - ustar;
                    if (fm == 0.0) {
                        xlo = xhi = mid;
                        break;
                    }
                    if ((fm > 0) == (fhi > 0)) {
                        xhi = mid;
                        fhi = fm;
                    } else {
                        xlo = mid;
                    }
                }
                extra.push_back({0.5 * (xlo + xhi), ustar});
            }
        }
    }
    std::sort(extra.begin(), extra.end(),
              [](const Node& a, const Node& b) { return a.x < b.x; });
    return extra;
}

ParticleSystem assemble(const InitialCondition& ic, const FluxModel& flux,
                        std::vector<double> nodes, double h) {
    nodes.erase(std::remove_if(nodes.begin(), nodes.end(),
                               [&](double x) { return near_jump(ic, x); }),
                nodes.end());

    std::vector<Node> smooth;
    smooth.reserve(nodes.size() + 8);
    for (double x : nodes) smooth.push_back({x, ic.value(x)});

    std::vector<Node> extra = crossing_nodes(ic, flux, smooth);
    if (!extra.empty()) {
        smooth.insert(smooth.end(), extra.begin(), extra.end());
        std::sort(smooth.begin(), smooth.end(),
                  [](const Node& a, const Node& b) { return a.x < b.x; });
    }

    const std::vector<double>& ustars = flux.inflection_values();
    auto carries_ustar = [&](double u) {
        return std::find(ustars.begin(), ustars.end(), u) != ustars.end();
    };

    std::vector<Particle> parts;
    parts.reserve(smooth.size() + 2 * ic.jumps.size());
    std::size_t jn = 0;
    auto emit_jump = [&](const Jump& j) {
        parts.push_back({j.x, j.left, false, carries_ustar(j.left)});
        parts.push_back({j.x, j.right, false, carries_ustar(j.right)});
    };
    for (const Node& nd : smooth) {
        while (jn < ic.jumps.size() && ic.jumps[jn].x < nd.x) emit_jump(ic.jumps[jn++]);
        parts.push_back({nd.x, nd.u, false, carries_ustar(nd.u)});
    }
    while (jn < ic.jumps.size()) emit_jump(ic.jumps[jn++]);

    ParticleSystem s;
    s.particles = std::move(parts);
    s.time = 0.0;
    s.h = h;
    s.d_max = 4.0 / 3.0 * h;
    s.d_min = 0.0;
    enforce_inflection_particles(s, flux);
    dedupe_coincident(s, flux);
    s.events.clear();
    return s;
}

}  // namespace

ParticleSystem sample_equidistant(const InitialCondition& ic, const FluxModel& flux,
                                  std::size_t n) {
    ic.validate();
    if (n < 2) throw ConfigError("sample_equidistant: need at least two particles");
    double h = (ic.hi - ic.lo) / static_cast<double>(n - 1);
    std::vector<double> nodes(n);
    for (std::size_t i = 0; i < n; ++i)
        nodes[i] = ic.lo + static_cast<double>(i) * h;
    nodes.front() = ic.lo;
    nodes.back() = ic.hi;
    return assemble(ic, flux, std::move(nodes), h);
}

double error_density(const InitialCondition& ic, const FluxModel& flux, double x) {
    double w = ic.value(x);
    double wp = ic.deriv(x);
    double wpp = ic.deriv2(x);
    double d2 = flux.ddf(w);
    double d3 = flux.dddf(w);
    return (d2 * wpp + d3 * wp * wp) / (12.0 * d2);
}

ParticleSystem sample_adaptive(const InitialCondition& ic, const FluxModel& flux,
                               std::size_t n) {
    ic.validate();
    if (n < 2) throw ConfigError("sample_adaptive: need at least two particles");
    double L = ic.hi - ic.lo;
    double h = L / static_cast<double>(n - 1);

    std::size_t m = 64 * n;
    double dx = L / static_cast<double>(m);
    std::vector<double> dens(m + 1);
    double emax = 0.0;
    for (std::size_t i = 0; i <= m; ++i) {
        double x = (i == m) ? ic.hi : ic.lo + static_cast<double>(i) * dx;
        double e = std::abs(error_density(ic, flux, x));
        dens[i] = e;
        if (std::isfinite(e)) emax = std::max(emax, e);
    }
    for (double& e : dens)
        if (!std::isfinite(e)) e = emax;
    double floor = (emax > 0.0) ? 1e-8 * emax : 1.0;

    std::vector<double> cum(m + 1);
    cum[0] = 0.0;
    auto rho = [&](std::size_t i) { return std::sqrt(std::max(dens[i], floor)); };
    for (std::size_t i = 0; i < m; ++i)
        cum[i + 1] = cum[i] + 0.5 * (rho(i) + rho(i + 1)) * dx;
    double total = cum[m];

    std::vector<double> nodes(n);
    nodes[0] = ic.lo;
    nodes[n - 1] = ic.hi;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
        std::size_t j = static_cast<std::size_t>(
            std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
        if (j == 0) j = 1;
        if (j > m) j = m;
        double seg = cum[j] - cum[j - 1];
        double frac = (seg > 0.0) ? (target - cum[j - 1]) / seg : 0.0;
        nodes[k] = ic.lo + (static_cast<double>(j - 1) + frac) * dx;
    }
    return assemble(ic, flux, std::move(nodes), h);
}

}  // namespace cpm
