#include "cpm/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <utility>

#include "cpm/geometry.hpp"
#include "cpm/kernels.hpp"
#include "cpm/nonconvex.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

void SourceModel::validate() const {
    for (std::size_t i = 1; i < x_discontinuities.size(); ++i)
        if (!(x_discontinuities[i] > x_discontinuities[i - 1]))
            throw ConfigError("source: x discontinuities must be strictly increasing");
}

SourceModel SourceModel::none() { return SourceModel{}; }

SourceModel SourceModel::bottom_profile(double lo, double hi) {
    const double p = std::numbers::pi;
    if (!(hi > lo)) throw ConfigError("bottom profile: window must be nonempty");
    if (std::abs(std::cos(p * lo)) > 1e-9 || std::abs(std::cos(p * hi)) > 1e-9)
        throw ConfigError(
            "bottom profile: cos(pi x) must vanish at the window edges so the "
            "bottom stays continuous");
    SourceModel src;
    src.name = "bottom-profile";
    src.x_discontinuities = {lo, hi};
    src.bottom = [lo, hi, p](double x) {
        return (x > lo && x < hi) ? std::cos(p * x) : 0.0;
    };
    src.g = [lo, hi, p](double x, double u) {
        return (x > lo && x < hi) ? -p * std::sin(p * x) * u : 0.0;
    };
    return src;
}

namespace {

double horner(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) r = r * x + c[i];
    return r;
}

std::vector<double> derived_coeffs(const std::vector<double>& c) {
    std::vector<double> d;
    for (std::size_t i = 1; i < c.size(); ++i)
        d.push_back(static_cast<double>(i) * c[i]);
    if (d.empty()) d.push_back(0.0);
    return d;
}

}  // namespace

SourceModel SourceModel::bottom_pieces(const std::vector<double>& edges,
                                       const std::vector<std::vector<double>>& coeffs) {
    if (edges.size() < 2 || coeffs.size() + 1 != edges.size())
        throw ConfigError("bottom pieces: need one coefficient table per edge interval");
    for (std::size_t i = 1; i < edges.size(); ++i)
        if (!(edges[i] > edges[i - 1]))
            throw ConfigError("bottom pieces: edges must be strictly increasing");
    std::vector<std::vector<double>> db;
    for (const auto& c : coeffs) db.push_back(derived_coeffs(c));

    SourceModel src;
    src.name = "bottom-pieces";
    src.x_discontinuities = edges;
    auto locate = [edges](double x) -> std::ptrdiff_t {
        if (!(x > edges.front() && x < edges.back())) return -1;
        auto it = std::upper_bound(edges.begin(), edges.end(), x);
        return (it - edges.begin()) - 1;
    };
    src.bottom = [locate, coeffs](double x) {
        std::ptrdiff_t k = locate(x);
        return (k < 0) ? 0.0 : horner(coeffs[static_cast<std::size_t>(k)], x);
    };
    src.g = [locate, db](double x, double u) {
        std::ptrdiff_t k = locate(x);
        return (k < 0) ? 0.0 : horner(db[static_cast<std::size_t>(k)], x) * u;
    };
    return src;
}

namespace {

struct State {
    double x = 0.0;
    double u = 0.0;
};

State rk4_raw(const FluxModel& flux, const SourceModel& src, State y, double dt) {
    auto rhs = [&](State z) -> State {
        return {flux.df(z.u), src.g ? src.g(z.x, z.u) : 0.0};
    };
    State k1 = rhs(y);
    State k2 = rhs({y.x + 0.5 * dt * k1.x, y.u + 0.5 * dt * k1.u});
    State k3 = rhs({y.x + 0.5 * dt * k2.x, y.u + 0.5 * dt * k2.u});
    State k4 = rhs({y.x + dt * k3.x, y.u + dt * k3.u});
    return {y.x + dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            y.u + dt / 6.0 * (k1.u + 2.0 * k2.u + 2.0 * k3.u + k4.u)};
}

bool finite(State y) { return std::isfinite(y.x) && std::isfinite(y.u); }

// Step with kink handling. A raw step whose stage points straddle a source
// discontinuity mixes the two smooth branches of g and drops to first order,
// so when the trial step heads into a kink the particle instead creeps up to
// it with shrinking substeps (each sized so the whole stage fan stays on the
// near side), lands on the kink exactly, and recurses on the far side.
// Returns NaN state on non-finite values.
State rk4_split(const FluxModel& flux, const SourceModel& src, State y, double dt,
                int depth) {
    constexpr State bad{std::numeric_limits<double>::quiet_NaN(),
                        std::numeric_limits<double>::quiet_NaN()};
    // a start point sitting exactly on a kink steps into its direction of
    // motion, so every stage samples the branch being entered
    for (double d : src.x_discontinuities)
        if (y.x == d) {
            const double v = flux.df(y.u);
            if (v != 0.0)
                y.x = std::nextafter(d, d + (v > 0.0 ? 1.0 : -1.0));
            break;
        }
    State end = rk4_raw(flux, src, y, dt);
    if (!finite(end)) return bad;
    if (depth <= 0 || src.x_discontinuities.empty()) return end;

    double travel = end.x - y.x;
    if (travel == 0.0) return end;
    double dir = travel > 0.0 ? 1.0 : -1.0;
    // margin past the endpoint covering the spread of the stage points
    double reach = std::abs(travel) * 1.25 + 1e-9 * (1.0 + std::abs(y.x));
    double dstar = 0.0;
    bool found = false;
    for (double d : src.x_discontinuities) {
        double ahead = (d - y.x) * dir;
        if (ahead <= 1e-13 * (1.0 + std::abs(d)) || ahead > reach) continue;
        if (!found || ahead < (dstar - y.x) * dir) {
            dstar = d;
            found = true;
        }
    }
    if (!found) return end;

    double left = dt;
    double eps_x = 1e-13 * (1.0 + std::abs(dstar));
    for (int it = 0; it < 200; ++it) {
        double dist = (dstar - y.x) * dir;
        if (dist <= eps_x) break;
        double speed = flux.df(y.u) * dir;
        if (!(speed > 0.0)) {
            // motion stalled or reversed short of the kink
            State rest = rk4_raw(flux, src, y, left);
            return finite(rest) ? rest : bad;
        }
        double tau = 0.5 * dist / speed;
        if (tau >= left) {
            State rest = rk4_raw(flux, src, y, left);
            return finite(rest) ? rest : bad;
        }
        y = rk4_raw(flux, src, y, tau);
        if (!finite(y)) return bad;
        left -= tau;
    }
    // close the last sliver with a forward-Euler move onto the kink
    {
        double speed = flux.df(y.u);
        double dist = dstar - y.x;
        if (dist != 0.0 && speed != 0.0) {
            double tau = dist / speed;
            if (!(tau > 0.0) || tau >= left) {
                State rest = rk4_raw(flux, src, y, left);
                return finite(rest) ? rest : bad;
            }
            y.u += tau * (src.g ? src.g(y.x, y.u) : 0.0);
            left -= tau;
        }
        y.x = dstar;
        if (!finite(y)) return bad;
    }
    // continue one ulp past the kink so every stage samples the far branch
    y.x = std::nextafter(dstar, dstar + dir);
    if (!(left > 0.0)) return y;
    return rk4_split(flux, src, y, left, depth - 1);
}

}  // namespace

Particle rk4_step(const Particle& p, const FluxModel& flux, const SourceModel& source,
                  double dt) {
    if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be positive");
    State y = rk4_split(flux, source, {p.x, p.u}, dt, 32);
    if (!finite(y)) throw SolverError("rk4_step: non-finite state");
    Particle q = p;
    q.x = y.x;
    q.u = y.u;
    return q;
}

namespace {

double worst_entropy_gain(const ParticleSystem& before, const ParticleSystem& after,
                          const FluxModel& flux) {
    double umin = kInf, umax = -kInf;
    for (const Particle& p : before.particles) {
        umin = std::min(umin, p.u);
        umax = std::max(umax, p.u);
    }
    if (!(umax > umin)) return 0.0;
    double worst = -kInf;
    for (int j = 0; j < 64; ++j) {
        double k = umin + (umax - umin) * j / 63.0;
        worst = std::max(worst, kruzkov_entropy(after, flux, k) -
                                    kruzkov_entropy(before, flux, k));
    }
    return worst;
}

void patch_merge_entropy(ParticleSystem& s, std::size_t ev0, double gain) {
    for (std::size_t j = s.events.size(); j-- > ev0;) {
        EventKind k = s.events[j].kind;
        if (k == EventKind::merge || k == EventKind::inflection_merge) {
            s.events[j].entropy_gain = gain;
            return;
        }
    }
}

// Merge approaching pairs with gap <= d_min, overlap included. Collision
// times are unavailable when the characteristics are integrated numerically,
// so proximity stands in for the collision test; pairs that are spreading
// apart are rarefaction data and resolve the crowding on their own.
void proximity_merges(ParticleSystem& s, const FluxModel& flux,
                      const SourceRunOptions& opt) {
    std::size_t guard = 0;
    bool again = true;
    while (again) {
        if (++guard > 100000)
            throw SolverError("run_with_source: merge scan does not settle");
        again = false;
        for (std::size_t i = 0; i + 1 < s.size(); ++i) {
            if (s.size() <= 2) break;
            double gap = s.x(i + 1) - s.x(i);
            if (!(gap <= s.d_min)) continue;
            if (!(flux.df(s.u(i)) > flux.df(s.u(i + 1)))) continue;
            ParticleSystem before;
            if (opt.audit_entropy) before = s;
            std::size_t ev0 = s.events.size();
            if (is_inflection_merge(s, flux, i)) {
                merge_with_inflection(s, flux, i);
            } else if (opt.enable_entropy_fix) {
                MergeSolution sol = merge_solve(s, flux, i);
                if (merge_is_entropy_safe(s, flux, i, sol.u))
                    merge_pair(s, flux, i);
                else
                    entropy_fix(s, flux, i, opt.entropy_fix_rounds);
            } else {
                merge_pair(s, flux, i);
            }
            if (opt.audit_entropy)
                patch_merge_entropy(s, ev0, worst_entropy_gain(before, s, flux));
            again = true;
            break;
        }
    }
}

}  // namespace

RunResult run_with_source(ParticleSystem s, const FluxModel& flux,
                          const SourceModel& source, const SourceRunOptions& opt) {
    source.validate();
    if (s.size() == 0) throw ConfigError("run_with_source: empty system");
    if (!s.ordered()) throw ConfigError("run_with_source: particles not ordered");
    double t0 = s.time;
    double ttol = 1e-12 * (1.0 + std::abs(opt.t_end));
    if (opt.t_end < t0 - ttol)
        throw ConfigError("run_with_source: t_end before current time");
    for (std::size_t i = 0; i < opt.output_times.size(); ++i) {
        double t = opt.output_times[i];
        if (i > 0 && !(t > opt.output_times[i - 1]))
            throw ConfigError("run_with_source: output times must be ascending");
        if (t < t0 - ttol || t > opt.t_end + ttol)
            throw ConfigError("run_with_source: output time outside the run interval");
    }

    if (s.d_min <= 0.0) {
        if (!(s.h > 0.0))
            throw ConfigError("run_with_source: d_min unset and no sampling h to derive it");
        s.d_min = 0.1 * s.h;
    }

    double dt0 = opt.dt;
    if (dt0 <= 0.0) {
        double umin = kInf, umax = -kInf;
        for (const Particle& p : s.particles) {
            umin = std::min(umin, p.u);
            umax = std::max(umax, p.u);
        }
        double vmax = flux.max_abs_df(umin, umax);
        if (!(s.h > 0.0))
            throw ConfigError("run_with_source: dt unset and no sampling h to derive it");
        dt0 = (vmax > 0.0) ? 0.2 * s.h / vmax : (opt.t_end - t0);
        if (!(dt0 > 0.0)) dt0 = ttol > 0.0 ? ttol : 1e-12;
    }

    RunResult out;
    std::size_t next_out = 0;
    auto emit_due = [&]() {
        while (next_out < opt.output_times.size() &&
               opt.output_times[next_out] <= s.time + ttol) {
            Snapshot snap;
            snap.t = opt.output_times[next_out];
            snap.system = s;
            snap.system.time = snap.t;
            out.snapshots.push_back(std::move(snap));
            ++next_out;
        }
    };
    emit_due();

    std::size_t steps = 0;
    std::size_t cap = opt.max_steps ? opt.max_steps : 20000000;
    while (s.time < opt.t_end - ttol) {
        if (++steps > cap) throw SolverError("run_with_source: step limit exceeded");
        double target = opt.t_end;
        if (next_out < opt.output_times.size())
            target = std::min(target, opt.output_times[next_out]);
        double step = std::min(dt0, target - s.time);
        if (!(step > 0.0)) {
            s.time = target;
            emit_due();
            continue;
        }

        std::size_t n = s.size();
        std::vector<double> x0(n), u0(n), xs(n), us(n);
        for (std::size_t i = 0; i < n; ++i) {
            x0[i] = s.particles[i].x;
            u0[i] = s.particles[i].u;
        }
        int halvings = 0;
        for (;;) {
            xs = x0;
            us = u0;
            kernels::pair_map(std::span<double>(xs), std::span<double>(us),
                              [&](double& x, double& u) {
                                  State y = rk4_split(flux, source, {x, u}, step, 32);
                                  x = y.x;
                                  u = y.u;
                              });
            bool ok = true;
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (!std::isfinite(xs[i]) || !std::isfinite(us[i])) {
                    throw SolverError("run_with_source: non-finite state");
                }
                if (i + 1 < n) worst = std::max(worst, xs[i] - xs[i + 1]);
            }
            ok = worst <= s.d_min;
            if (ok) break;
            if (++halvings > 20)
                throw SolverError(
                    "run_with_source: ordering violation persists after 20 halvings");
            step *= 0.5;
        }

        s.boundary_flux_integral +=
            step * (flux.legendre(u0.back()) - flux.legendre(u0.front()));
        // particles that overtook a neighbor within the d_min window snap
        // back to a shared position; the merge scan below consumes the pair
        for (int pass = 0; pass < 50; ++pass) {
            bool sorted = true;
            for (std::size_t i = 0; i + 1 < n; ++i)
                if (xs[i] > xs[i + 1]) {
                    double mid = 0.5 * (xs[i] + xs[i + 1]);
                    xs[i] = xs[i + 1] = mid;
                    sorted = false;
                }
            if (sorted) break;
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (xs[i] > xs[i + 1]) xs[i + 1] = xs[i];
        for (std::size_t i = 0; i < n; ++i) {
            s.particles[i].x = xs[i];
            s.particles[i].u = us[i];
        }
        s.time += step;

        dedupe_coincident(s, flux);
        enforce_inflection_particles(s, flux);
        proximity_merges(s, flux, opt);
        dedupe_coincident(s, flux);
        emit_due();
    }
    s.time = opt.t_end;
    emit_due();
    return out;
}

}  // namespace cpm
