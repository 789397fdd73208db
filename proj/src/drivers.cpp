#include "cpm/drivers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>

#include "json.hpp"

#include "cpm/engine.hpp"
#include "cpm/fv.hpp"
#include "cpm/geometry.hpp"
#include "cpm/io.hpp"
#include "cpm/numerics.hpp"

namespace cpm {

std::size_t sweep_workers(std::size_t jobs) {
    if (jobs == 0) return 0;
    std::size_t w = 0;
    if (const char* env = std::getenv("CPM_WORKERS")) {
        char* end = nullptr;
        unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0') w = static_cast<std::size_t>(v);
    }
    if (w == 0) w = std::thread::hardware_concurrency();
    if (w == 0) w = 1;
    return std::min(w, jobs);
}

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

using Windows = std::vector<std::pair<double, double>>;

std::string time_label(double t) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", t);
    return b;
}

std::vector<double> resolved_outputs(const RunConfig& cfg, bool force_end) {
    std::vector<double> outs = cfg.output_times;
    if (outs.empty()) outs = {cfg.t_end};
    double ttol = 1e-12 * (1.0 + std::abs(cfg.t_end));
    if (force_end && std::abs(outs.back() - cfg.t_end) > ttol)
        outs.push_back(cfg.t_end);
    return outs;
}

ParticleSystem sample_mode(const RunConfig& cfg, const FluxModel& flux,
                           const InitialCondition& ic, std::size_t n,
                           const std::string& mode) {
    ParticleSystem s = (mode == "adaptive") ? sample_adaptive(ic, flux, n)
                                            : sample_equidistant(ic, flux, n);
    if (cfg.d_min > 0.0) s.d_min = cfg.d_min;
    if (cfg.d_max > 0.0) s.d_max = cfg.d_max;
    return s;
}

RunResult evolve(const RunConfig& cfg, const FluxModel& flux, const SourceModel& src,
                 ParticleSystem s, const std::vector<double>& outs) {
    if (!src.is_zero()) {
        SourceRunOptions o;
        o.dt = cfg.dt;
        o.t_end = cfg.t_end;
        o.output_times = outs;
        o.enable_entropy_fix = cfg.entropy_fix;
        o.audit_entropy = cfg.audit_entropy;
        return run_with_source(std::move(s), flux, src, o);
    }
    RunOptions o;
    o.t_end = cfg.t_end;
    o.output_times = outs;
    o.enable_insertion = cfg.insertion;
    o.enable_entropy_fix = cfg.entropy_fix;
    o.audit_entropy = cfg.audit_entropy;
    o.max_events = cfg.max_events;
    return run(std::move(s), flux, o);
}

Windows merge_windows(Windows w) {
    std::sort(w.begin(), w.end());
    Windows out;
    for (const auto& iv : w) {
        if (!out.empty() && iv.first <= out.back().second)
            out.back().second = std::max(out.back().second, iv.second);
        else
            out.push_back(iv);
    }
    return out;
}

Windows shock_windows(const ParticleSystem& post, double width) {
    Windows w;
    for (double c : jump_positions(post))
        w.push_back({c - 0.5 * width, c + 0.5 * width});
    return merge_windows(std::move(w));
}

Windows complement(double lo, double hi, const Windows& excl) {
    Windows out;
    double cur = lo;
    for (const auto& iv : excl) {
        if (iv.second <= lo || iv.first >= hi) continue;
        double a = std::max(lo, iv.first);
        if (a > cur) out.push_back({cur, a});
        cur = std::max(cur, std::min(hi, iv.second));
    }
    if (cur < hi) out.push_back({cur, hi});
    return out;
}

double particle_err_vs_grid(const ParticleSystem& s, const FluxModel& flux,
                            const GridFunction& ref, const Windows& excl) {
    if (excl.empty()) return l1_distance(s, flux, ref, ref.lo, ref.hi).value;
    double sum = 0.0;
    for (const auto& iv : complement(ref.lo, ref.hi, excl))
        if (iv.second > iv.first)
            sum += l1_distance(s, flux, ref, iv.first, iv.second).value;
    return sum;
}

bool touches(double a, double b, const Windows& excl) {
    for (const auto& iv : excl)
        if (a < iv.second && b > iv.first) return true;
    return false;
}

double fv_err_vs_grid(const FvGrid& coarse, const FvGrid& fine, const Windows& excl) {
    double dxc = coarse.dx(), dxf = fine.dx();
    KahanSum err;
    for (std::size_t i = 0; i < coarse.cells(); ++i) {
        double a = coarse.lo + static_cast<double>(i) * dxc;
        double b = (i + 1 == coarse.cells()) ? coarse.hi : a + dxc;
        if (touches(a, b, excl)) continue;
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

// least-squares slope of log(err) against log(n); the convergence order is
// its negative
double fit_order(const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (const auto& [n, e] : pts) {
        if (!(e > 0.0) || !(n > 0.0)) continue;
        double x = std::log(n), y = std::log(e);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    double denom = m * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return -(m * sxy - sx * sy) / denom;
}

void run_jobs(std::vector<std::function<void()>> tasks) {
    std::size_t workers = sweep_workers(tasks.size());
    if (workers <= 1) {
        for (auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(tasks.size());
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= tasks.size()) return;
                try {
                    tasks[i]();
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

json snapshot_diag(const Snapshot& snap, const FluxModel& flux, double conserved0,
                   double tv0) {
    double area = total_area(snap.system, flux);
    double conserved = area - snap.system.boundary_flux_integral;
    double tv = total_variation(snap.system);
    json d;
    d["t"] = snap.t;
    d["particles"] = snap.system.size();
    d["area"] = area;
    d["boundary_flux_integral"] = snap.system.boundary_flux_integral;
    d["conserved"] = conserved;
    d["area_drift_rel"] =
        std::abs(conserved - conserved0) / std::max(1.0, std::abs(conserved0));
    d["tv"] = tv;
    d["tv_drift"] = std::max(0.0, tv - tv0);
    d["events_so_far"] = snap.system.events.size();
    return d;
}

constexpr int kErrPanels = 8192;

}  // namespace

void cmd_run(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    FluxModel flux = make_flux(cfg);
    InitialCondition ic = make_ic(cfg);
    SourceModel src = make_source(cfg);

    ParticleSystem s0 = sample_mode(cfg, flux, ic, cfg.n, cfg.sampling);
    double conserved0 = total_area(s0, flux) - s0.boundary_flux_integral;
    double tv0 = total_variation(s0);

    std::vector<double> outs = resolved_outputs(cfg, true);
    RunResult rr = evolve(cfg, flux, src, s0, outs);

    json manifest;
    manifest["config"] = json::parse(config_json(cfg));
    manifest["source_run"] = !src.is_zero();
    manifest["snapshots"] = json::array();
    for (std::size_t i = 0; i < rr.snapshots.size(); ++i) {
        const Snapshot& snap = rr.snapshots[i];
        ParticleSystem out_sys = cfg.postprocess
                                     ? reconstruct_shocks(snap.system, flux)
                                     : snap.system.bare_copy();
        std::string file = "snapshot_" + std::to_string(i) + "_t" +
                           time_label(snap.t) + ".csv";
        write_snapshot_csv(cfg.output_dir + "/" + file, out_sys);
        json d = snapshot_diag(snap, flux, conserved0, tv0);
        d["file"] = file;
        if (cfg.postprocess) d["area_postprocess"] = total_area(out_sys, flux);
        manifest["snapshots"].push_back(std::move(d));
    }
    const std::vector<Event>& events = rr.snapshots.back().system.events;
    write_events_jsonl(cfg.output_dir + "/events.jsonl", events);
    manifest["event_count"] = events.size();
    write_text_file(cfg.output_dir + "/manifest.json", manifest.dump(2));
}

void cmd_sample(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.output_dir);
    FluxModel flux = make_flux(cfg);
    InitialCondition ic = make_ic(cfg);
    ParticleSystem s = sample_mode(cfg, flux, ic, cfg.n, cfg.sampling);
    write_snapshot_csv(cfg.output_dir + "/sample.csv", s);

    PiecewiseCurve truth;
    for (const Jump& j : ic.jumps) truth.breakpoints.push_back(j.x);
    truth.eval = [&ic](double x) { return ic.value(x); };
    double err = l1_between(particle_curve(s, flux), truth, ic.lo, ic.hi, kErrPanels);

    json manifest;
    manifest["config"] = json::parse(config_json(cfg));
    manifest["n"] = cfg.n;
    manifest["mode"] = cfg.sampling;
    manifest["particles"] = s.size();
    manifest["h"] = s.h;
    manifest["l1_t0"] = err;
    manifest["area"] = total_area(s, flux);
    manifest["tv"] = total_variation(s);
    write_text_file(cfg.output_dir + "/manifest.json", manifest.dump(2));
}

namespace {

struct ConvergeRow {
    std::size_t n = 0;
    std::string mode;
    double t = 0.0;
    double err_post = 0.0;
    double err_raw = 0.0;
    double err_noshock = 0.0;
};

}  // namespace

void cmd_converge(const RunConfig& cfg, const std::vector<std::size_t>& resolutions) {
    cfg.validate();
    std::vector<std::size_t> ns = resolutions;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3) throw ConfigError("converge: need at least 3 resolutions");
    if (ns.front() < 2) throw ConfigError("converge: resolutions must be at least 2");
    fs::create_directories(cfg.output_dir);

    FluxModel flux = make_flux(cfg);
    InitialCondition ic = make_ic(cfg);
    SourceModel src = make_source(cfg);
    std::vector<double> outs = resolved_outputs(cfg, false);
    double h_finest =
        (ic.hi - ic.lo) / static_cast<double>(ns.back() - 1);

    std::size_t n_ref = static_cast<std::size_t>(cfg.ref_multiplier) * ns.back();
    RunResult ref =
        evolve(cfg, flux, src, sample_mode(cfg, flux, ic, n_ref, "equidistant"), outs);

    struct RefSlot {
        ParticleSystem post;
        PiecewiseCurve curve;
        Windows windows;
        double lo = 0.0, hi = 0.0;
    };
    std::vector<RefSlot> refs(outs.size());
    for (std::size_t k = 0; k < outs.size(); ++k) {
        refs[k].post = reconstruct_shocks(ref.snapshots[k].system, flux);
        refs[k].curve = particle_curve(refs[k].post, flux);
        refs[k].windows =
            shock_windows(refs[k].post, cfg.shock_window_factor * h_finest);
        refs[k].lo = refs[k].post.x(0);
        refs[k].hi = refs[k].post.x(refs[k].post.size() - 1);
    }

    const std::vector<std::string> modes = {"equidistant", "adaptive"};
    std::vector<ConvergeRow> rows(ns.size() * modes.size() * outs.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t mi = 0; mi < modes.size(); ++mi)
        for (std::size_t ni = 0; ni < ns.size(); ++ni)
            tasks.push_back([&, mi, ni] {
                RunResult rr = evolve(cfg, flux, src,
                                      sample_mode(cfg, flux, ic, ns[ni], modes[mi]),
                                      outs);
                for (std::size_t k = 0; k < outs.size(); ++k) {
                    const RefSlot& R = refs[k];
                    const ParticleSystem& raw = rr.snapshots[k].system;
                    ParticleSystem post = reconstruct_shocks(raw, flux);
                    ConvergeRow row;
                    row.n = ns[ni];
                    row.mode = modes[mi];
                    row.t = outs[k];
                    row.err_post = l1_between(particle_curve(post, flux), R.curve,
                                              R.lo, R.hi, kErrPanels);
                    row.err_raw = l1_between(particle_curve(raw, flux), R.curve,
                                             R.lo, R.hi, kErrPanels);
                    row.err_noshock = R.windows.empty()
                                          ? row.err_post
                                          : l1_between_excluding(
                                                particle_curve(post, flux), R.curve,
                                                R.lo, R.hi, R.windows, kErrPanels);
                    rows[(mi * ns.size() + ni) * outs.size() + k] = std::move(row);
                }
            });
    run_jobs(std::move(tasks));

    std::ostringstream csv;
    csv << "n,mode,t,err_post,err_raw,err_noshock,order_running\n";
    for (std::size_t mi = 0; mi < modes.size(); ++mi)
        for (std::size_t k = 0; k < outs.size(); ++k)
            for (std::size_t ni = 0; ni < ns.size(); ++ni) {
                const ConvergeRow& r = rows[(mi * ns.size() + ni) * outs.size() + k];
                double order = std::numeric_limits<double>::quiet_NaN();
                if (ni > 0) {
                    const ConvergeRow& p =
                        rows[(mi * ns.size() + ni - 1) * outs.size() + k];
                    if (r.err_post > 0.0 && p.err_post > 0.0)
                        order = std::log(p.err_post / r.err_post) /
                                std::log(static_cast<double>(r.n) /
                                         static_cast<double>(p.n));
                }
                csv << r.n << ',' << r.mode << ',' << format_double(r.t) << ','
                    << format_double(r.err_post) << ',' << format_double(r.err_raw)
                    << ',' << format_double(r.err_noshock) << ','
                    << format_double(order) << '\n';
            }
    write_text_file(cfg.output_dir + "/convergence.csv", csv.str());

    std::ostringstream ocsv;
    ocsv << "mode,t,order_post,order_raw,order_noshock\n";
    for (std::size_t mi = 0; mi < modes.size(); ++mi)
        for (std::size_t k = 0; k < outs.size(); ++k) {
            std::vector<std::pair<double, double>> post, raw, noshock;
            for (std::size_t ni = 0; ni < ns.size(); ++ni) {
                const ConvergeRow& r = rows[(mi * ns.size() + ni) * outs.size() + k];
                double nn = static_cast<double>(r.n);
                post.push_back({nn, r.err_post});
                raw.push_back({nn, r.err_raw});
                noshock.push_back({nn, r.err_noshock});
            }
            ocsv << modes[mi] << ',' << format_double(outs[k]) << ','
                 << format_double(fit_order(post)) << ','
                 << format_double(fit_order(raw)) << ','
                 << format_double(fit_order(noshock)) << '\n';
        }
    write_text_file(cfg.output_dir + "/orders.csv", ocsv.str());

    json manifest;
    manifest["config"] = json::parse(config_json(cfg));
    manifest["resolutions"] = ns;
    manifest["reference_particles"] = n_ref;
    manifest["h_finest"] = h_finest;
    manifest["outputs"] = outs;
    manifest["files"] = {"convergence.csv", "orders.csv"};
    write_text_file(cfg.output_dir + "/manifest.json", manifest.dump(2));
}

namespace {

struct CompareRow {
    std::size_t n = 0;
    double t = 0.0;
    double err_particle = 0.0;
    double err_fv = 0.0;
    double err_particle_noshock = 0.0;
    double err_fv_noshock = 0.0;
};

}  // namespace

void cmd_compare(const RunConfig& cfg, const std::vector<std::size_t>& resolutions,
                 bool oracle_self) {
    cfg.validate();
    std::vector<std::size_t> ns = resolutions;
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.size() < 3) throw ConfigError("compare: need at least 3 resolutions");
    if (ns.front() < 10) throw ConfigError("compare: resolutions must be at least 10");
    fs::create_directories(cfg.output_dir);

    FluxModel flux = make_flux(cfg);
    InitialCondition ic = make_ic(cfg);
    SourceModel src = make_source(cfg);
    std::vector<double> outs = resolved_outputs(cfg, false);
    double h_finest = (ic.hi - ic.lo) / static_cast<double>(ns.back() - 1);

    FvRunOptions fopt;
    fopt.t_end = cfg.t_end;
    fopt.output_times = outs;
    fopt.cfl = cfg.fv_cfl;
    std::size_t cells_ref = static_cast<std::size_t>(cfg.ref_multiplier) * ns.back();
    FvResult fine = fv_run(ic, flux, src, cells_ref, fopt);
    for (std::size_t k = 0; k < outs.size(); ++k)
        write_grid_csv(cfg.output_dir + "/reference_t" + time_label(outs[k]) + ".csv",
                       fine.snapshots[k].grid);

    // shock windows come from the finest particle run
    std::vector<Windows> windows(outs.size());
    {
        RunResult finest = evolve(
            cfg, flux, src, sample_mode(cfg, flux, ic, ns.back(), cfg.sampling), outs);
        for (std::size_t k = 0; k < outs.size(); ++k)
            windows[k] =
                shock_windows(reconstruct_shocks(finest.snapshots[k].system, flux),
                              cfg.shock_window_factor * h_finest);
    }

    std::vector<CompareRow> rows(ns.size() * outs.size());
    std::vector<std::function<void()>> tasks;
    for (std::size_t ni = 0; ni < ns.size(); ++ni)
        tasks.push_back([&, ni] {
            std::size_t cells_n = cfg.fv_cells ? cfg.fv_cells : ns[ni];
            FvResult coarse = fv_run(ic, flux, src, cells_n, fopt);
            RunResult rr;
            if (!oracle_self)
                rr = evolve(cfg, flux, src,
                            sample_mode(cfg, flux, ic, ns[ni], cfg.sampling), outs);
            for (std::size_t k = 0; k < outs.size(); ++k) {
                const FvGrid& ref = fine.snapshots[k].grid;
                GridFunction refg = ref.as_grid();
                CompareRow row;
                row.n = ns[ni];
                row.t = outs[k];
                row.err_fv = l1_error_vs_reference(coarse.snapshots[k].grid, ref);
                row.err_fv_noshock =
                    fv_err_vs_grid(coarse.snapshots[k].grid, ref, windows[k]);
                if (oracle_self) {
                    row.err_particle =
                        l1_error_vs_reference(coarse.snapshots[k].grid,
                                              coarse.snapshots[k].grid);
                    row.err_particle_noshock = row.err_particle;
                } else {
                    ParticleSystem sys =
                        cfg.postprocess
                            ? reconstruct_shocks(rr.snapshots[k].system, flux)
                            : rr.snapshots[k].system.bare_copy();
                    row.err_particle = particle_err_vs_grid(sys, flux, refg, {});
                    row.err_particle_noshock =
                        particle_err_vs_grid(sys, flux, refg, windows[k]);
                }
                rows[ni * outs.size() + k] = row;
            }
        });
    run_jobs(std::move(tasks));

    std::ostringstream csv;
    csv << "n,t,err_particle,err_fv,err_particle_noshock,err_fv_noshock\n";
    for (std::size_t k = 0; k < outs.size(); ++k)
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            const CompareRow& r = rows[ni * outs.size() + k];
            csv << r.n << ',' << format_double(r.t) << ','
                << format_double(r.err_particle) << ',' << format_double(r.err_fv)
                << ',' << format_double(r.err_particle_noshock) << ','
                << format_double(r.err_fv_noshock) << '\n';
        }
    write_text_file(cfg.output_dir + "/compare.csv", csv.str());

    std::ostringstream ocsv;
    ocsv << "t,order_particle,order_fv\n";
    for (std::size_t k = 0; k < outs.size(); ++k) {
        std::vector<std::pair<double, double>> pp, pf;
        for (std::size_t ni = 0; ni < ns.size(); ++ni) {
            const CompareRow& r = rows[ni * outs.size() + k];
            pp.push_back({static_cast<double>(r.n), r.err_particle});
            pf.push_back({static_cast<double>(r.n), r.err_fv});
        }
        ocsv << format_double(outs[k]) << ',' << format_double(fit_order(pp)) << ','
             << format_double(fit_order(pf)) << '\n';
    }
    write_text_file(cfg.output_dir + "/compare_orders.csv", ocsv.str());

    json manifest;
    manifest["config"] = json::parse(config_json(cfg));
    manifest["resolutions"] = ns;
    manifest["reference_cells"] = cells_ref;
    manifest["oracle_self"] = oracle_self;
    manifest["outputs"] = outs;
    manifest["files"] = {"compare.csv", "compare_orders.csv"};
    write_text_file(cfg.output_dir + "/manifest.json", manifest.dump(2));
}

}  // namespace cpm
