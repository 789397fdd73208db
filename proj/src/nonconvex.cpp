#include "cpm/nonconvex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cpm/geometry.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

// Inflection values strictly inside the open value interval of the pair.
std::vector<double> strict_crossings(const FluxModel& flux, double ua,
                                     double ub) {
    const double lo = std::min(ua, ub);
    const double hi = std::max(ua, ub);
    std::vector<double> out;
    if (!(lo < hi)) return out;
    for (double v : flux.inflection_values())
        if (v > lo && v < hi) out.push_back(v);
    return out;
}

}  // namespace

std::size_t enforce_inflection_particles(ParticleSystem& s,
                                         const FluxModel& flux) {
    if (flux.inflection_values().empty()) return 0;
    std::size_t inserted_total = 0;
    std::size_t i = 0;
    while (i + 1 < s.size()) {
        const Particle& a = s.particles[i];
        const Particle& b = s.particles[i + 1];
        std::vector<double> stars = strict_crossings(flux, a.u, b.u);
        if (stars.empty()) {
            ++i;
            continue;
        }
        // order along the traversal from a.u to b.u
        std::sort(stars.begin(), stars.end());
        if (a.u > b.u) std::reverse(stars.begin(), stars.end());

        const double area0 = total_area(s, flux);
        const double tv0 = total_variation(s);
        std::vector<Particle> add;
        add.reserve(stars.size());
        for (double v : stars) {
            Particle p;
            p.u = v;
            p.is_inflection = true;
            if (a.x == b.x) {
                p.x = a.x;
            } else {
                const double th = (v - a.u) / (b.u - a.u);
                p.x = a.x + th * (b.x - a.x);
            }
            add.push_back(p);
        }
        s.particles.insert(s.particles.begin() +
                               static_cast<std::ptrdiff_t>(i + 1),
                           add.begin(), add.end());

        Event ev;
        ev.kind = EventKind::inflection_insert;
        ev.t = s.time;
        ev.x = add.front().x;
        ev.u_before = {a.u, b.u};
        for (const Particle& p : add) ev.u_after.push_back(p.u);
        ev.area_before = area0;
        ev.area_after = total_area(s, flux);
        ev.tv_before = tv0;
        ev.tv_after = tv0;  // inserts lie inside the pair's value interval
        s.events.push_back(std::move(ev));

        inserted_total += add.size();
        i += add.size() + 1;
    }
    return inserted_total;
}

bool is_inflection_merge(const ParticleSystem& s, const FluxModel& flux,
                         std::size_t i) {
    (void)flux;
    if (i + 1 >= s.size()) return false;
    const Particle& a = s.particles[i];
    const Particle& b = s.particles[i + 1];
    if (a.is_inflection == b.is_inflection) return false;
    const std::size_t c = a.is_inflection ? i : i + 1;
    const std::size_t other = a.is_inflection ? i + 1 : i;
    // neighbor on the inflection particle's far side
    std::size_t far;
    if (c == i + 1) {
        if (c + 1 >= s.size()) return false;
        far = c + 1;
    } else {
        if (c == 0) return false;
        far = c - 1;
    }
    const double ustar = s.particles[c].u;
    return (s.particles[other].u - ustar) * (s.particles[far].u - ustar) < 0.0;
}

void merge_with_inflection(ParticleSystem& s, const FluxModel& flux,
                           std::size_t i) {
    if (!is_inflection_merge(s, flux, i))
        throw std::invalid_argument(
            "merge_with_inflection: pair is not an inflection merge");
    const std::size_t m = s.size();
    const std::size_t c = s.particles[i].is_inflection ? i : i + 1;
    const double ustar = s.particles[c].u;
    const bool mirror_x = (c == i);  // collision on the inflection's left

    // slots in canonical order: index 2 is the inflection particle,
    // the collided partner is slot 1
    struct Slot {
        std::size_t sys = npos;  // npos marks a boundary padding copy
        double x0 = 0.0, u0 = 0.0;
        bool shock0 = false, infl0 = false;
        double xc = 0.0, uc = 0.0;  // canonical frame
        bool removed = false;
        bool moved_x = false;
        double new_xc = 0.0;
        bool moved_u = false;
        double new_uc = 0.0;
    };
    Slot sl[5];
    for (int k = 0; k < 5; ++k) {
        const long sys_signed =
            mirror_x ? static_cast<long>(c) + 2 - k
                     : static_cast<long>(c) - 2 + k;
        const std::size_t sys =
            static_cast<std::size_t>(std::clamp<long>(
                sys_signed, 0, static_cast<long>(m) - 1));
        const Particle& p = s.particles[sys];
        Slot& t = sl[k];
        t.sys = (sys_signed < 0 || sys_signed >= static_cast<long>(m))
                    ? npos
                    : sys;
        t.x0 = p.x;
        t.u0 = p.u;
        t.shock0 = p.is_shock;
        t.infl0 = p.is_inflection;
        t.xc = mirror_x ? -p.x : p.x;
        t.uc = p.u;
    }
    const bool mirror_u = sl[1].uc < ustar;
    if (mirror_u)
        for (Slot& t : sl) t.uc = 2.0 * ustar - t.uc;

    FluxModel work = mirror_x ? flux.mirrored_space() : flux;
    if (mirror_u) work = work.mirrored_value(ustar);

    const double x1 = sl[0].xc, x2 = sl[1].xc, x4 = sl[3].xc, x5 = sl[4].xc;
    const double u1 = sl[0].uc, u2 = sl[1].uc, u4 = sl[3].uc, u5 = sl[4].uc;
    const double x3 = sl[2].xc;
    if (!(u2 >= ustar && u4 < ustar))
        throw SolverError("merge_with_inflection: orientation broke down");
    if (!(u1 >= ustar && u5 <= ustar))
        throw SolverError(
            "merge_with_inflection: flank straddles the inflection value "
            "(inflection particles were not enforced)");

    const auto avg = [&work](double a, double b) {
        return work.nonlinear_average(a, b);
    };
    const double a12 = avg(u1, u2);
    const double a23 = avg(u2, ustar);
    const double a34 = avg(ustar, u4);
    const double a45 = avg(u4, u5);
    const double A = (x2 - x1) * a12 + (x3 - x2) * a23 + (x4 - x3) * a34 +
                     (x5 - x4) * a45;
    const double atol = 1e-13 * (1.0 + std::fabs(A));

    // candidate profiles after removing the collided partner:
    // inflection at xi in [x3, x4], then the pair (inflection, slot 3)
    // riding together at eta in [x4, x5]
    const double aU = avg(u1, ustar);
    const double A1_at = (x4 - x1) * aU + (x5 - x4) * a45;
    const double A1_lo = (x3 - x1) * aU + (x4 - x3) * a34 + (x5 - x4) * a45;
    const double A2_hi = (x5 - x1) * aU;

    const double area0 = total_area(s, flux);
    const double tv0 = total_variation(s);

    int attempt = 0;
    if (A <= A1_at + atol) {
        attempt = 1;
        const double slope = aU - a34;  // > 0: u4 strictly below the value
        double xi = slope > 0.0 ? x3 + (A - A1_lo) / slope : x3;
        xi = std::clamp(xi, x1, x4);
        sl[1].removed = true;
        sl[2].moved_x = true;
        sl[2].new_xc = xi;
    } else if (A <= A2_hi + atol) {
        attempt = 2;
        const double slope = aU - a45;
        double eta = slope > 0.0 ? x4 + (A - A1_at) / slope : x4;
        eta = std::clamp(eta, x4, x5);
        sl[1].removed = true;
        sl[2].moved_x = true;
        sl[2].new_xc = eta;
        sl[3].moved_x = true;
        sl[3].new_xc = eta;
    } else {
        attempt = 3;
        // lower the partner's value to sv and park the inflection at x5
        const auto g = [&](double sv) {
            return (x2 - x1) * avg(u1, sv) + (x5 - x2) * avg(sv, ustar) - A;
        };
        const auto dg = [&](double sv) {
            return (x2 - x1) * work.d_average_d2(u1, sv) +
                   (x5 - x2) * work.d_average_d1(sv, ustar);
        };
        const double g_hi = g(u2);
        if (g_hi < -atol)
            throw SolverError(
                "merge_with_inflection: no attempt can match the area");
        const double sv =
            g_hi <= 0.0 ? u2
                        : newton_bisect(g, dg, ustar, u2,
                                        0.5 * (ustar + u2), atol);
        sl[1].moved_u = true;
        sl[1].new_uc = sv;
        sl[2].moved_x = true;
        sl[2].new_xc = x5;
        sl[3].removed = true;
    }

    // map back: fresh positions un-negate under the space mirror, fresh
    // values un-reflect under the value mirror; untouched slots keep
    // their original coordinates bit for bit
    std::vector<Particle> repl;
    std::size_t lo_sys = npos, hi_sys = 0;
    for (int k = 0; k < 5; ++k) {
        const Slot& t = sl[k];
        if (t.sys == npos) continue;
        lo_sys = std::min(lo_sys == npos ? t.sys : lo_sys, t.sys);
        hi_sys = std::max(hi_sys, t.sys);
    }
    const auto emit = [&](const Slot& t) {
        if (t.sys == npos || t.removed) return;
        Particle p;
        p.x = t.moved_x ? (mirror_x ? -t.new_xc : t.new_xc) : t.x0;
        p.u = t.moved_u ? (mirror_u ? 2.0 * ustar - t.new_uc : t.new_uc)
                        : t.u0;
        p.is_shock = t.shock0;
        p.is_inflection = t.infl0;
        repl.push_back(p);
    };
    if (mirror_x)
        for (int k = 4; k >= 0; --k) emit(sl[k]);
    else
        for (int k = 0; k < 5; ++k) emit(sl[k]);

    Event ev;
    ev.kind = EventKind::inflection_merge;
    ev.t = s.time;
    ev.x = s.particles[c].x;
    ev.attempt = attempt;
    for (std::size_t k = lo_sys; k <= hi_sys; ++k)
        ev.u_before.push_back(s.particles[k].u);
    for (const Particle& p : repl) ev.u_after.push_back(p.u);

    s.particles.erase(
        s.particles.begin() + static_cast<std::ptrdiff_t>(lo_sys),
        s.particles.begin() + static_cast<std::ptrdiff_t>(hi_sys + 1));
    s.particles.insert(s.particles.begin() +
                           static_cast<std::ptrdiff_t>(lo_sys),
                       repl.begin(), repl.end());

    ev.area_before = area0;
    ev.area_after = total_area(s, flux);
    ev.tv_before = tv0;
    ev.tv_after = total_variation(s);
    s.events.push_back(std::move(ev));

    if (!s.ordered())
        throw SolverError("merge_with_inflection: ordering violated");
}

}  // namespace cpm
