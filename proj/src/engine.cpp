#include "cpm/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "cpm/geometry.hpp"
#include "cpm/interpolant.hpp"
#include "cpm/kernels.hpp"
#include "cpm/nonconvex.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::insert: return "insert";
        case EventKind::merge: return "merge";
        case EventKind::inflection_merge: return "inflection_merge";
        case EventKind::entropy_insert: return "entropy_insert";
        case EventKind::dedupe: return "dedupe";
        case EventKind::inflection_insert: return "inflection_insert";
        case EventKind::reconstruct: return "reconstruct";
    }
    return "unknown";
}

namespace {

void gather(const ParticleSystem& s, std::vector<double>& xs,
            std::vector<double>& us) {
    const std::size_t n = s.size();
    xs.resize(n);
    us.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs[i] = s.particles[i].x;
        us[i] = s.particles[i].u;
    }
}

// Interpolant-exact midpoint insert on segment (i, i+1); no policy
// checks. Returns the index of the new particle (i + 1).
std::size_t insert_mid(ParticleSystem& s, const FluxModel& flux,
                       std::size_t i, EventKind kind) {
    const Particle& a = s.particles[i];
    const Particle& b = s.particles[i + 1];
    if (!(b.x > a.x))
        throw std::invalid_argument("insert: segment has no width");
    const double xm = 0.5 * (a.x + b.x);
    const Interpolant seg(flux, a.x, a.u, b.x, b.u);
    Particle p;
    p.x = xm;
    p.u = seg.value_at(xm);

    const double area0 = total_area(s, flux);
    const double tv0 = total_variation(s);
    Event ev;
    ev.kind = kind;
    ev.t = s.time;
    ev.x = xm;
    ev.u_before = {a.u, b.u};
    ev.u_after = {p.u};
    ev.area_before = area0;
    ev.tv_before = tv0;

    s.particles.insert(s.particles.begin() + static_cast<std::ptrdiff_t>(i + 1),
                       p);
    ev.area_after = total_area(s, flux);
    ev.tv_after = total_variation(s);
    s.events.push_back(std::move(ev));
    return i + 1;
}

// 64-value k-grid spanning the current data range.
std::vector<double> entropy_kgrid(const ParticleSystem& s) {
    double lo = s.particles.front().u, hi = lo;
    for (const Particle& p : s.particles) {
        lo = std::min(lo, p.u);
        hi = std::max(hi, p.u);
    }
    std::vector<double> ks;
    if (hi <= lo) {
        ks.push_back(lo);
        return ks;
    }
    const int m = 64;
    ks.reserve(m);
    for (int j = 0; j < m; ++j)
        ks.push_back(lo + (hi - lo) * double(j) / double(m - 1));
    return ks;
}

std::vector<double> entropy_samples(const ParticleSystem& s,
                                    const FluxModel& flux,
                                    const std::vector<double>& ks) {
    std::vector<double> out;
    out.reserve(ks.size());
    for (double k : ks) out.push_back(kruzkov_entropy(s, flux, k));
    return out;
}

}  // namespace

Collision next_collision(const ParticleSystem& s, const FluxModel& flux) {
    Collision col;
    col.dt = kInf;
    if (s.size() < 2) return col;
    std::vector<double> xs, us;
    gather(s, xs, us);
    std::vector<double> vs(us.size());
    kernels::map(us, vs, [&flux](double u) { return flux.df(u); });
    const double dt_min = kernels::min_collision(xs, vs);
    if (!(dt_min < kInf)) return col;
    col.dt = std::max(dt_min, 0.0);
    const double tol = dt_min * 1e-12;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double dv = vs[i] - vs[i + 1];
        if (dv > 0.0 && (xs[i + 1] - xs[i]) / dv <= dt_min + tol)
            col.pairs.push_back(i);
    }
    return col;
}

void advance(ParticleSystem& s, const FluxModel& flux, double dt) {
    if (!(dt >= 0.0))
        throw std::invalid_argument("advance: dt must be nonnegative");
    if (s.size() == 0) throw std::invalid_argument("advance: empty system");
    std::vector<double> xs, us;
    gather(s, xs, us);
    std::vector<double> vs(us.size());
    kernels::map(us, vs, [&flux](double u) { return flux.df(u); });
    const double dt_min = kernels::min_collision(xs, vs);
    if (dt > dt_min * (1.0 + 1e-12))
        throw std::invalid_argument("advance: dt passes a collision");
    kernels::advance(xs, vs, dt);
    for (std::size_t i = 0; i < xs.size(); ++i) s.particles[i].x = xs[i];
    s.boundary_flux_integral +=
        dt * (flux.legendre(s.particles.back().u) -
              flux.legendre(s.particles.front().u));
    s.time += dt;
}

std::size_t insert_particle(ParticleSystem& s, const FluxModel& flux,
                            std::size_t i) {
    if (i + 1 >= s.size())
        throw std::invalid_argument("insert_particle: no such pair");
    const Particle& a = s.particles[i];
    const Particle& b = s.particles[i + 1];
    if (flux.df(a.u) > flux.df(b.u))
        throw std::invalid_argument(
            "insert_particle: pair is approaching, not a widening gap");
    if (!(b.x - a.x >= s.d_max) || !(s.d_max > 0.0))
        throw std::invalid_argument(
            "insert_particle: gap below the insertion distance");
    return insert_mid(s, flux, i, EventKind::insert);
}

MergeSolution merge_solve(const ParticleSystem& s, const FluxModel& flux,
                          std::size_t i) {
    if (i + 1 >= s.size())
        throw std::invalid_argument("merge_solve: no such pair");
    const std::size_t m = s.size();
    const double x2 = s.x(i), u2 = s.u(i);
    const double x3 = s.x(i + 1), u3 = s.u(i + 1);
    const double x1 = i > 0 ? s.x(i - 1) : x2;
    const double u1 = i > 0 ? s.u(i - 1) : u2;
    const double x4 = i + 2 < m ? s.x(i + 2) : x3;
    const double u4 = i + 2 < m ? s.u(i + 2) : u3;

    const double lo0 = std::min(std::min(u1, u2), std::min(u3, u4));
    const double hi0 = std::max(std::max(u1, u2), std::max(u3, u4));
    for (double v : flux.inflection_values())
        if (v > lo0 && v < hi0)
            throw SolverError(
                "merge_solve: value hull strictly spans an inflection");

    const auto avg = [&flux](double a, double b) {
        return flux.nonlinear_average(a, b);
    };
    const double A = (x2 - x1) * avg(u1, u2) + (x3 - x2) * avg(u2, u3) +
                     (x4 - x3) * avg(u3, u4);
    const double x23 = 0.5 * (x2 + x3);
    const double wl = x23 - x1, wr = x4 - x23;
    MergeSolution sol;
    sol.x = x23;
    sol.area = A;
    if (wl <= 0.0 && wr <= 0.0) {
        sol.u = 0.5 * (u2 + u3);
        return sol;
    }
    const auto B = [&](double u) {
        return wl * avg(u1, u) + wr * avg(u, u4) - A;
    };
    const auto dB = [&](double u) {
        return wl * flux.d_average_d2(u1, u) + wr * flux.d_average_d1(u, u4);
    };
    const double atol = 1e-13 * (1.0 + std::fabs(A));
    double lo = lo0, hi = hi0;
    if (B(lo) > atol || B(hi) < -atol) {
        // widen to the convexity cell containing the hull
        double cl = flux.scan_lo(), ch = flux.scan_hi();
        for (double v : flux.inflection_values()) {
            if (v <= lo0) cl = std::max(cl, v);
            if (v >= hi0) ch = std::min(ch, v);
        }
        lo = std::min(lo, cl);
        hi = std::max(hi, ch);
        if (B(lo) > atol || B(hi) < -atol)
            throw SolverError("merge_solve: area not attainable");
    }
    if (B(lo) >= -atol) {
        sol.u = lo;
        return sol;
    }
    if (B(hi) <= atol) {
        sol.u = hi;
        return sol;
    }
    sol.u = newton_bisect(B, dB, lo, hi, 0.5 * (u2 + u3), atol);
    return sol;
}

bool merge_is_tvd_safe(const ParticleSystem& s, const FluxModel& flux,
                       std::size_t i) {
    if (i + 1 >= s.size()) return false;
    const std::size_t m = s.size();
    const double gap = s.x(i + 1) - s.x(i);
    if (gap <= 0.0) return true;
    const double u1 = i > 0 ? s.u(i - 1) : s.u(i);
    const double u4 = i + 2 < m ? s.u(i + 2) : s.u(i + 1);
    const double lo = std::min({u1, s.u(i), s.u(i + 1), u4});
    const double hi = std::max({u1, s.u(i), s.u(i + 1), u4});
    const double spread = hi - lo;
    if (spread <= 0.0) return true;
    const double wl = i > 0 ? s.x(i) - s.x(i - 1) : 0.0;
    const double wr = i + 2 < m ? s.x(i + 2) - s.x(i + 1) : 0.0;
    const double wmin = std::min(wl, wr);
    if (wmin <= 0.0) return false;
    const auto [mn, mx] = flux.ddf_abs_range(lo, hi);
    if (mn <= 0.0) return false;
    const double kappa = mx / mn;
    const double k6 = kappa * kappa * kappa;
    const double rhs = 4.0 * k6 * k6 * spread / wmin;
    const double lhs = std::fabs(s.u(i + 1) - s.u(i)) / gap;
    return lhs >= rhs;
}

bool merge_is_entropy_safe(double u1, double u23, double u4,
                           int convexity_sign) {
    const double slack = 1e-12 * (1.0 + std::fabs(u23));
    if (convexity_sign > 0) return u1 >= u23 - slack && u23 >= u4 - slack;
    if (convexity_sign < 0) return u1 <= u23 + slack && u23 <= u4 + slack;
    return false;
}

bool merge_is_entropy_safe(const ParticleSystem& s, const FluxModel& flux,
                           std::size_t i, double u_merge) {
    if (i + 1 >= s.size()) return false;
    const std::size_t m = s.size();
    const double u2 = s.u(i), u3 = s.u(i + 1);
    const bool left_real = i > 0 && s.x(i) > s.x(i - 1);
    const bool right_real = i + 2 < m && s.x(i + 2) > s.x(i + 1);
    const double u1 = i > 0 ? s.u(i - 1) : u2;
    const double u4 = i + 2 < m ? s.u(i + 2) : u3;
    const double lo = std::min({u1, u2, u3, u4});
    const double hi = std::max({u1, u2, u3, u4});
    const int cs = flux.convexity_sign(lo, hi);
    // exempt sides with a zero-width or virtual flank: the profile
    // change there has zero measure
    const double e1 = left_real ? u1 : u_merge;
    const double e4 = right_real ? u4 : u_merge;
    return merge_is_entropy_safe(e1, u_merge, e4, cs);
}

namespace {

std::size_t commit_merge(ParticleSystem& s, const FluxModel& flux,
                         std::size_t i, const MergeSolution& sol) {
    Event ev;
    ev.kind = EventKind::merge;
    ev.t = s.time;
    ev.x = sol.x;
    ev.u_before = {s.u(i), s.u(i + 1)};
    ev.u_after = {sol.u};
    ev.tvd_safe = merge_is_tvd_safe(s, flux, i);
    ev.area_before = total_area(s, flux);
    ev.tv_before = total_variation(s);

    Particle p;
    p.x = sol.x;
    p.u = sol.u;
    p.is_shock = true;
    s.particles.erase(s.particles.begin() + static_cast<std::ptrdiff_t>(i),
                      s.particles.begin() + static_cast<std::ptrdiff_t>(i + 2));
    s.particles.insert(s.particles.begin() + static_cast<std::ptrdiff_t>(i), p);

    ev.area_after = total_area(s, flux);
    ev.tv_after = total_variation(s);
    s.events.push_back(std::move(ev));
    return i;
}

std::size_t entropy_fix_impl(ParticleSystem& s, const FluxModel& flux,
                             std::size_t i, int max_rounds) {
    for (int round = 0;; ++round) {
        const MergeSolution sol = merge_solve(s, flux, i);
        if (merge_is_entropy_safe(s, flux, i, sol.u))
            return commit_merge(s, flux, i, sol);
        if (round >= max_rounds) break;
        bool refined = false;
        if (i > 0 && s.x(i) > s.x(i - 1)) {
            insert_mid(s, flux, i - 1, EventKind::entropy_insert);
            ++i;
            refined = true;
        }
        if (i + 2 < s.size() && s.x(i + 2) > s.x(i + 1)) {
            insert_mid(s, flux, i + 1, EventKind::entropy_insert);
            refined = true;
        }
        if (!refined) break;
    }
    throw SolverError("entropy_fix: no entropy-safe merge after refinement");
}

}  // namespace

std::size_t merge_pair(ParticleSystem& s, const FluxModel& flux,
                       std::size_t i) {
    const MergeSolution sol = merge_solve(s, flux, i);
    return commit_merge(s, flux, i, sol);
}

std::size_t entropy_fix(ParticleSystem& s, const FluxModel& flux,
                        std::size_t i, int max_rounds) {
    return entropy_fix_impl(s, flux, i, max_rounds);
}

std::size_t dedupe_coincident(ParticleSystem& s, const FluxModel& flux) {
    std::size_t removed = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i + 1;
        while (j < s.size() && s.x(j) == s.x(i)) ++j;
        const std::size_t len = j - i;
        if (len < 2 || (len == 2 && s.u(i) != s.u(i + 1))) {
            i = j;
            continue;
        }
        // reduce the run to {min, max, inflection values}
        double lo = s.u(i), hi = s.u(i);
        bool any_shock = false;
        for (std::size_t k = i; k < j; ++k) {
            lo = std::min(lo, s.u(k));
            hi = std::max(hi, s.u(k));
            any_shock = any_shock || s.particles[k].is_shock;
        }
        std::vector<Particle> kept;
        auto push_value = [&](double v, bool infl) {
            for (Particle& q : kept)
                if (q.u == v) {
                    q.is_inflection = q.is_inflection || infl;
                    return;
                }
            Particle q;
            q.x = s.x(i);
            q.u = v;
            q.is_shock = !infl && any_shock;
            q.is_inflection = infl;
            kept.push_back(q);
        };
        push_value(lo, false);
        if (hi != lo) push_value(hi, false);
        for (std::size_t k = i; k < j; ++k)
            if (s.particles[k].is_inflection) push_value(s.u(k), true);
        if (kept.size() == len) {
            i = j;
            continue;
        }
        // order the kept values to bridge the outer neighbors
        std::sort(kept.begin(), kept.end(),
                  [](const Particle& a, const Particle& b) { return a.u < b.u; });
        bool ascending = true;
        if (i > 0 && j < s.size())
            ascending = s.u(i - 1) <= s.u(j);
        else if (i > 0)
            ascending = std::fabs(kept.front().u - s.u(i - 1)) <=
                        std::fabs(kept.back().u - s.u(i - 1));
        else if (j < s.size())
            ascending = std::fabs(kept.back().u - s.u(j)) <=
                        std::fabs(kept.front().u - s.u(j));
        if (!ascending) std::reverse(kept.begin(), kept.end());

        Event ev;
        ev.kind = EventKind::dedupe;
        ev.t = s.time;
        ev.x = s.x(i);
        for (std::size_t k = i; k < j; ++k) ev.u_before.push_back(s.u(k));
        for (const Particle& q : kept) ev.u_after.push_back(q.u);
        ev.area_before = total_area(s, flux);
        ev.tv_before = total_variation(s);

        s.particles.erase(s.particles.begin() + static_cast<std::ptrdiff_t>(i),
                          s.particles.begin() + static_cast<std::ptrdiff_t>(j));
        s.particles.insert(s.particles.begin() + static_cast<std::ptrdiff_t>(i),
                           kept.begin(), kept.end());
        removed += len - kept.size();

        ev.area_after = total_area(s, flux);
        ev.tv_after = total_variation(s);
        s.events.push_back(std::move(ev));
        i += kept.size();
    }
    return removed;
}

namespace {

void snap_pairs(ParticleSystem& s, const std::vector<std::size_t>& pairs) {
    for (std::size_t p : pairs) {
        if (p + 1 >= s.size()) continue;
        Particle& a = s.particles[p];
        Particle& b = s.particles[p + 1];
        const double xm = 0.5 * (a.x + b.x);
        if (std::fabs(b.x - a.x) <= 1e-9 * (1.0 + std::fabs(xm))) {
            a.x = xm;
            b.x = xm;
        }
    }
}

void insertion_scan(ParticleSystem& s, const FluxModel& flux) {
    if (!(s.d_max > 0.0)) return;
    std::size_t guard = 0;
    const std::size_t cap = 1000000 + 100 * s.size();
    std::size_t i = 0;
    while (i + 1 < s.size()) {
        if (++guard > cap)
            throw SolverError("insertion scan did not terminate");
        const double gap = s.x(i + 1) - s.x(i);
        const bool approaching = flux.df(s.u(i)) > flux.df(s.u(i + 1));
        if (!approaching && gap >= s.d_max) {
            insert_mid(s, flux, i, EventKind::insert);
            continue;  // re-examine the halved left gap
        }
        ++i;
    }
}

void merge_scan(ParticleSystem& s, const FluxModel& flux,
                const RunOptions& opt) {
    std::size_t guard = 0;
    const std::size_t cap = 1000000 + 100 * s.size();
    std::size_t i = 0;
    while (i + 1 < s.size()) {
        if (++guard > cap)
            throw SolverError("merge scan did not terminate");
        double gap = s.x(i + 1) - s.x(i);
        if (gap < 0.0) {
            // advance roundoff can invert a nearly collided pair by an
            // ulp; snap it and treat it as coincident
            if (gap < -1e-12 * (1.0 + std::fabs(s.x(i))))
                throw SolverError("merge scan: particle ordering violated");
            const double xm = 0.5 * (s.x(i) + s.x(i + 1));
            s.particles[i].x = xm;
            s.particles[i + 1].x = xm;
            gap = 0.0;
        }
        const bool approaching = flux.df(s.u(i)) > flux.df(s.u(i + 1));
        if (approaching && gap <= std::max(s.d_min, 0.0)) {
            std::vector<double> ks, ent0;
            if (opt.audit_entropy) {
                ks = entropy_kgrid(s);
                ent0 = entropy_samples(s, flux, ks);
            }
            if (is_inflection_merge(s, flux, i)) {
                merge_with_inflection(s, flux, i);
            } else {
                const MergeSolution sol = merge_solve(s, flux, i);
                if (!opt.enable_entropy_fix ||
                    merge_is_entropy_safe(s, flux, i, sol.u))
                    commit_merge(s, flux, i, sol);
                else
                    entropy_fix_impl(s, flux, i, opt.entropy_fix_rounds);
            }
            if (opt.audit_entropy && !s.events.empty()) {
                const std::vector<double> ent1 = entropy_samples(s, flux, ks);
                double gain = 0.0;
                for (std::size_t k = 0; k < ks.size(); ++k)
                    gain = std::max(gain, ent1[k] - ent0[k]);
                for (std::size_t e = s.events.size(); e-- > 0;) {
                    Event& ev = s.events[e];
                    if (ev.kind == EventKind::merge ||
                        ev.kind == EventKind::inflection_merge) {
                        ev.entropy_gain = gain;
                        break;
                    }
                    if (ev.kind != EventKind::entropy_insert) break;
                }
            }
            i = i >= 2 ? i - 2 : 0;
            continue;
        }
        ++i;
    }
}

}  // namespace

void resolve_collisions(ParticleSystem& s, const FluxModel& flux,
                        const std::vector<std::size_t>& pairs,
                        const RunOptions& opt) {
    snap_pairs(s, pairs);
    dedupe_coincident(s, flux);
    enforce_inflection_particles(s, flux);
    if (opt.enable_insertion) insertion_scan(s, flux);
    merge_scan(s, flux, opt);
    dedupe_coincident(s, flux);
}

RunResult run(ParticleSystem s, const FluxModel& flux, const RunOptions& opt) {
    if (s.size() == 0) throw std::invalid_argument("run: empty system");
    if (!s.ordered()) throw std::invalid_argument("run: unordered particles");
    if (!(opt.t_end >= s.time))
        throw std::invalid_argument("run: t_end before the current time");
    const double ttol = 1e-12 * (1.0 + std::fabs(opt.t_end));
    for (std::size_t k = 0; k < opt.output_times.size(); ++k) {
        const double t = opt.output_times[k];
        if (k > 0 && t <= opt.output_times[k - 1])
            throw std::invalid_argument("run: output times not ascending");
        if (t < s.time - ttol || t > opt.t_end + ttol)
            throw std::invalid_argument("run: output time out of range");
    }

    RunResult out;
    std::size_t oi = 0;
    const auto emit_due = [&]() {
        while (oi < opt.output_times.size() &&
               opt.output_times[oi] <= s.time + ttol) {
            Snapshot snap;
            snap.t = opt.output_times[oi];
            snap.system = s;  // keeps the event log accumulated so far
            snap.system.time = snap.t;
            out.snapshots.push_back(std::move(snap));
            ++oi;
        }
    };

    // normalize the initial data; Riemann jumps merge here at dt = 0
    resolve_collisions(s, flux, {}, opt);
    emit_due();

    const std::size_t cap =
        opt.max_events ? opt.max_events : 1000000 + 1000 * s.size();
    std::size_t zero_streak = 0;
    while (s.time < opt.t_end - ttol) {
        const Collision col = next_collision(s, flux);
        const double target = oi < opt.output_times.size()
                                  ? std::min(opt.output_times[oi], opt.t_end)
                                  : opt.t_end;
        const double dt_target = std::max(target - s.time, 0.0);
        const bool collide_now = col.dt <= dt_target;
        const double dt = collide_now ? col.dt : dt_target;
        advance(s, flux, dt);
        if (collide_now)
            resolve_collisions(s, flux, col.pairs, opt);
        else
            s.time = target;
        emit_due();
        if (s.events.size() > cap)
            throw SolverError("run: event cap exceeded");
        zero_streak = dt == 0.0 ? zero_streak + 1 : 0;
        if (zero_streak > 1000 + s.size())
            throw SolverError("run: no temporal progress");
    }
    s.time = opt.t_end;
    emit_due();
    return out;
}

ParticleSystem reconstruct_shocks(const ParticleSystem& s,
                                  const FluxModel& flux) {
    ParticleSystem r = s.bare_copy();
    std::size_t i = 0;
    while (i < r.size()) {
        if (!r.particles[i].is_shock || i == 0 || i + 1 == r.size()) {
            ++i;
            continue;
        }
        const double x1 = r.x(i - 1), u1 = r.u(i - 1);
        const double x2 = r.x(i), u2 = r.u(i);
        const double x3 = r.x(i + 1), u3 = r.u(i + 1);
        if (!(x3 > x1) || u1 == u3) {
            r.particles[i].is_shock = false;
            ++i;
            continue;
        }
        const double S = (x2 - x1) * flux.nonlinear_average(u1, u2) +
                         (x3 - x2) * flux.nonlinear_average(u2, u3);
        double xb = (S + x1 * u1 - x3 * u3) / (u1 - u3);
        xb = std::clamp(xb, x1, x3);

        Event ev;
        ev.kind = EventKind::reconstruct;
        ev.t = r.time;
        ev.x = xb;
        ev.u_before = {u1, u2, u3};
        ev.u_after = {u1, u3};
        ev.area_before = total_area(r, flux);
        ev.tv_before = total_variation(r);

        Particle pl, pr;
        pl.x = xb;
        pl.u = u1;
        pl.is_shock = true;
        pr.x = xb;
        pr.u = u3;
        pr.is_shock = true;
        r.particles.erase(r.particles.begin() + static_cast<std::ptrdiff_t>(i));
        r.particles.insert(r.particles.begin() + static_cast<std::ptrdiff_t>(i),
                           {pl, pr});

        ev.area_after = total_area(r, flux);
        ev.tv_after = total_variation(r);
        r.events.push_back(std::move(ev));
        i += 2;
    }
    return r;
}

}  // namespace cpm
