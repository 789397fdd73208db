#include "cpm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cpm/numerics.hpp"

namespace cpm {

double total_area(const ParticleSystem& s, const FluxModel& flux) {
    KahanSum sum;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double w = s.x(i + 1) - s.x(i);
        if (w != 0.0) sum.add(w * flux.nonlinear_average(s.u(i), s.u(i + 1)));
    }
    return sum.value();
}

double total_variation(const ParticleSystem& s) {
    KahanSum sum;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        sum.add(std::abs(s.u(i + 1) - s.u(i)));
    return sum.value();
}

double evaluate(const ParticleSystem& s, const FluxModel& flux, double x) {
    const auto& p = s.particles;
    if (p.empty()) throw std::invalid_argument("evaluate: empty system");
    if (x <= p.front().x) return p.front().u;
    if (x >= p.back().x) return p.back().u;
    // first particle with position > x
    auto it = std::upper_bound(p.begin(), p.end(), x,
                               [](double v, const Particle& q) { return v < q.x; });
    std::size_t j = std::size_t(it - p.begin());  // p[j-1].x <= x < p[j].x
    std::size_t i = j - 1;
    // p[i] is the last particle at or left of x; at a jump this is the
    // right state
    if (p[i].x == x) return p[i].u;
    return Interpolant(flux, p[i].x, p[i].u, p[j].x, p[j].u).value_at(x);
}

double kruzkov_entropy(const ParticleSystem& s, const FluxModel& flux,
                       double k) {
    KahanSum sum;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double x1 = s.x(i), x2 = s.x(i + 1);
        double w = x2 - x1;
        if (w == 0.0) continue;
        double u1 = s.u(i), u2 = s.u(i + 1);
        double lo = std::min(u1, u2), hi = std::max(u1, u2);
        if (k <= lo || k >= hi) {
            sum.add(std::abs(w * (flux.nonlinear_average(u1, u2) - k)));
        } else {
            double xk = Interpolant(flux, x1, u1, x2, u2).position_of(k);
            sum.add(std::abs((xk - x1) * (flux.nonlinear_average(u1, k) - k)));
            sum.add(std::abs((x2 - xk) * (flux.nonlinear_average(k, u2) - k)));
        }
    }
    return sum.value();
}

L1Result l1_distance(const ParticleSystem& s, const FluxModel& flux,
                     const GridFunction& ref, double window_lo,
                     double window_hi) {
    if (ref.values.empty() || !(window_hi > window_lo))
        throw std::invalid_argument("l1_distance: empty reference or window");
    L1Result r;
    if (window_lo < s.particles.front().x || window_hi > s.particles.back().x)
        r.clamped = true;
    KahanSum sum;
    const double dx = ref.dx();
    for (std::size_t i = 0; i < ref.values.size(); ++i) {
        double xc = ref.center(i);
        if (xc < window_lo || xc > window_hi) continue;
        sum.add(std::abs(evaluate(s, flux, xc) - ref.values[i]) * dx);
    }
    r.value = sum.value();
    return r;
}

PiecewiseCurve particle_curve(const ParticleSystem& s, const FluxModel& flux) {
    PiecewiseCurve c;
    c.breakpoints.reserve(s.size());
    for (const auto& p : s.particles) c.breakpoints.push_back(p.x);
    ParticleSystem copy = s.bare_copy();
    const FluxModel* fp = &flux;
    c.eval = [copy = std::move(copy), fp](double x) {
        return evaluate(copy, *fp, x);
    };
    return c;
}

PiecewiseCurve grid_curve(const GridFunction& g) {
    PiecewiseCurve c;
    const double dx = g.dx();
    for (std::size_t i = 0; i <= g.values.size(); ++i)
        c.breakpoints.push_back(g.lo + dx * double(i));
    GridFunction copy = g;
    c.eval = [copy = std::move(copy)](double x) {
        const double dx2 = copy.dx();
        auto n = std::ptrdiff_t(copy.values.size());
        auto i = std::ptrdiff_t(std::floor((x - copy.lo) / dx2));
        i = std::clamp(i, std::ptrdiff_t(0), n - 1);
        return copy.values[std::size_t(i)];
    };
    return c;
}

namespace {

double panel_l1(const PiecewiseCurve& a, const PiecewiseCurve& b, double lo,
                double hi, int pieces) {
    KahanSum sum;
    double w = (hi - lo) / pieces;
    for (int p = 0; p < pieces; ++p) {
        double plo = lo + p * w, phi = (p + 1 == pieces) ? hi : lo + (p + 1) * w;
        sum.add(gauss4([&](double x) { return std::abs(a.eval(x) - b.eval(x)); },
                       plo, phi));
    }
    return sum.value();
}

std::vector<double> union_breaks(const PiecewiseCurve& a,
                                 const PiecewiseCurve& b, double lo,
                                 double hi) {
    std::vector<double> xs;
    xs.push_back(lo);
    for (double x : a.breakpoints)
        if (x > lo && x < hi) xs.push_back(x);
    for (double x : b.breakpoints)
        if (x > lo && x < hi) xs.push_back(x);
    xs.push_back(hi);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

}  // namespace

double l1_between(const PiecewiseCurve& a, const PiecewiseCurve& b, double lo,
                  double hi, int base_cells) {
    if (!(hi > lo)) return 0.0;
    auto xs = union_breaks(a, b, lo, hi);
    const double hmax = (hi - lo) / base_cells;
    KahanSum sum;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        double w = xs[i + 1] - xs[i];
        if (w <= 0.0) continue;
        int pieces = std::max(1, int(std::ceil(w / hmax)));
        sum.add(panel_l1(a, b, xs[i], xs[i + 1], pieces));
    }
    return sum.value();
}

double l1_between_excluding(
    const PiecewiseCurve& a, const PiecewiseCurve& b, double lo, double hi,
    const std::vector<std::pair<double, double>>& excluded, int base_cells) {
    // assemble kept intervals by sweeping the sorted exclusions
    std::vector<std::pair<double, double>> ex = excluded;
    std::sort(ex.begin(), ex.end());
    double cur = lo;
    double total = 0.0;
    for (auto [elo, ehi] : ex) {
        elo = std::max(elo, lo);
        ehi = std::min(ehi, hi);
        if (ehi <= cur) continue;
        if (elo > cur) total += l1_between(a, b, cur, elo, base_cells);
        cur = std::max(cur, ehi);
    }
    if (cur < hi) total += l1_between(a, b, cur, hi, base_cells);
    return total;
}

std::vector<std::pair<double, double>> sample_curve(const ParticleSystem& s,
                                                    const FluxModel& flux,
                                                    int pts) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        double x1 = s.x(i), x2 = s.x(i + 1);
        double u1 = s.u(i), u2 = s.u(i + 1);
        if (x1 == x2 || u1 == u2 || pts < 2) {
            out.emplace_back(x1, u1);
            continue;
        }
        Interpolant seg(flux, x1, u1, x2, u2);
        for (int j = 0; j < pts; ++j) {
            double v = u1 + (u2 - u1) * double(j) / pts;
            out.emplace_back(seg.position_of(v), v);
        }
    }
    if (!s.particles.empty())
        out.emplace_back(s.particles.back().x, s.particles.back().u);
    return out;
}

std::vector<double> jump_positions(const ParticleSystem& s) {
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        if (s.x(i) == s.x(i + 1) && s.u(i) != s.u(i + 1))
            out.push_back(s.x(i));
    return out;
}

}  // namespace cpm
