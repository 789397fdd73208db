#include "cpm/fv.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include "cpm/kernels.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

void FvGrid::validate() const {
    if (u.empty()) throw ConfigError("fv grid: no cells");
    if (!(cfl > 0.0 && cfl <= 0.9))
        throw ConfigError("fv grid: CFL must lie in (0, 0.9]");
    if (!(hi > lo)) throw ConfigError("fv grid: empty domain");
    for (double v : u)
        if (!std::isfinite(v)) throw ConfigError("fv grid: non-finite cell average");
}

double godunov_flux(double ul, double ur, const FluxModel& flux) {
    if (ul == ur) return flux.f(ul);
    bool want_min = ul < ur;
    double a = std::min(ul, ur), b = std::max(ul, ur);
    double best = flux.f(ul);
    double fr = flux.f(ur);
    best = want_min ? std::min(best, fr) : std::max(best, fr);
    for (double c : flux.critical_values()) {
        if (!(c > a && c < b)) continue;
        double fc = flux.f(c);
        best = want_min ? std::min(best, fc) : std::max(best, fc);
    }
    return best;
}

FvGrid fv_sample(const InitialCondition& ic, std::size_t cells, double cfl) {
    ic.validate();
    if (cells < 10) throw ConfigError("fv_sample: need at least 10 cells");
    FvGrid g;
    g.lo = ic.lo;
    g.hi = ic.hi;
    g.cfl = cfl;
    g.u.resize(cells);
    double dx = (ic.hi - ic.lo) / static_cast<double>(cells);
    std::size_t jn = 0;
    for (std::size_t i = 0; i < cells; ++i) {
        double a = ic.lo + static_cast<double>(i) * dx;
        double b = (i + 1 == cells) ? ic.hi : a + dx;
        while (jn < ic.jumps.size() && ic.jumps[jn].x <= a) ++jn;
        double acc = 0.0;
        double left = a;
        for (std::size_t k = jn; k < ic.jumps.size() && ic.jumps[k].x < b; ++k) {
            acc += gauss4([&](double x) { return ic.value(x); }, left, ic.jumps[k].x);
            left = ic.jumps[k].x;
        }
        acc += gauss4([&](double x) { return ic.value(x); }, left, b);
        g.u[i] = acc / (b - a);
    }
    g.validate();
    return g;
}

FvResult fv_run(const InitialCondition& ic, const FluxModel& flux,
                const SourceModel& source, std::size_t cells,
                const FvRunOptions& opt) {
    source.validate();
    double ttol = 1e-12 * (1.0 + std::abs(opt.t_end));
    if (opt.t_end < -ttol) throw ConfigError("fv_run: negative t_end");
    for (std::size_t i = 0; i < opt.output_times.size(); ++i) {
        double t = opt.output_times[i];
        if (i > 0 && !(t > opt.output_times[i - 1]))
            throw ConfigError("fv_run: output times must be ascending");
        if (t < -ttol || t > opt.t_end + ttol)
            throw ConfigError("fv_run: output time outside the run interval");
    }

    FvGrid g = fv_sample(ic, cells, opt.cfl);
    double dx = g.dx();
    double t = 0.0;

    FvResult out;
    std::size_t next_out = 0;
    auto emit_due = [&]() {
        while (next_out < opt.output_times.size() &&
               opt.output_times[next_out] <= t + ttol) {
            out.snapshots.push_back({opt.output_times[next_out], g});
            ++next_out;
        }
    };
    emit_due();

    std::vector<double> F(cells + 1);
    auto iface = [&](double ul, double ur) { return godunov_flux(ul, ur, flux); };
    std::size_t steps = 0;
    std::size_t cap = opt.max_steps ? opt.max_steps : 50000000;
    while (t < opt.t_end - ttol) {
        if (++steps > cap) throw SolverError("fv_run: step limit exceeded");
        auto [mn, mx] = std::minmax_element(g.u.begin(), g.u.end());
        double vmax = flux.max_abs_df(*mn, *mx);
        if (!std::isfinite(vmax))
            throw SolverError("fv_run: non-finite wave speed (CFL runaway)");
        double target = opt.t_end;
        if (next_out < opt.output_times.size())
            target = std::min(target, opt.output_times[next_out]);
        double dt = (vmax > 0.0) ? g.cfl * dx / vmax : target - t;
        dt = std::min(dt, target - t);
        if (!(dt > 0.0)) {
            t = target;
            emit_due();
            continue;
        }
        kernels::godunov_sweep(std::span<const double>(g.u), std::span<double>(F),
                               iface);
        kernels::fv_update(std::span<double>(g.u), std::span<const double>(F),
                           dt / dx);
        if (source.g)
            for (std::size_t i = 0; i < cells; ++i)
                g.u[i] += dt * source.g(g.center(i), g.u[i]);
        for (double v : g.u)
            if (!std::isfinite(v))
                throw SolverError("fv_run: non-finite cell average (CFL runaway)");
        t += dt;
        emit_due();
    }
    t = opt.t_end;
    emit_due();
    return out;
}

double l1_error_vs_reference(const FvGrid& coarse, const FvGrid& fine) {
    coarse.validate();
    fine.validate();
    double span = coarse.hi - coarse.lo;
    if (std::abs(coarse.lo - fine.lo) > 1e-9 * (1.0 + span) ||
        std::abs(coarse.hi - fine.hi) > 1e-9 * (1.0 + span))
        throw ConfigError("l1_error_vs_reference: domain mismatch");
    if (fine.cells() != coarse.cells() && fine.cells() < 8 * coarse.cells())
        throw ConfigError("l1_error_vs_reference: reference must be at least 8x finer");

    double dxc = coarse.dx(), dxf = fine.dx();
    KahanSum err;
    for (std::size_t i = 0; i < coarse.cells(); ++i) {
        double a = coarse.lo + static_cast<double>(i) * dxc;
        double b = (i + 1 == coarse.cells()) ? coarse.hi : a + dxc;
        std::size_t j0 = static_cast<std::size_t>(
            std::max(0.0, std::floor((a - fine.lo) / dxf)));
        KahanSum area;
        for (std::size_t j = j0; j < fine.cells(); ++j) {
            double fa = fine.lo + static_cast<double>(j) * dxf;
            double fb = (j + 1 == fine.cells()) ? fine.hi : fa + dxf;
            if (fa >= b) break;
            double ov = std::min(b, fb) - std::max(a, fa);
            if (ov > 0.0) area.add(ov * fine.u[j]);
        }
        err.add(std::abs(coarse.u[i] * (b - a) - area.value()));
    }
    return err.value();
}

L1Result l1_error_vs_reference(const ParticleSystem& s, const FluxModel& flux,
                               const FvGrid& fine) {
    fine.validate();
    if (fine.cells() < 8 * s.size())
        throw ConfigError("l1_error_vs_reference: reference must be at least 8x finer");
    GridFunction ref = fine.as_grid();
    return l1_distance(s, flux, ref, fine.lo, fine.hi);
}

}  // namespace cpm
