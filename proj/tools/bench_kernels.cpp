#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <span>
#include <vector>

#include "cpm/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Times each kernel's serial reference against its OpenMP variant on the
// same data and reports the speedup. Usage: bench_kernels [size] [reps].

namespace {

volatile double g_sink = 0.0;

template <class F>
double best_ms(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        auto t1 = std::chrono::steady_clock::now();
        best = std::min(
            best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void report(const char* name, double serial_ms, double omp_ms) {
    std::printf("%-14s %10.3f ms %10.3f ms %8.2fx\n", name, serial_ms, omp_ms,
                serial_ms / omp_ms);
}

double burgers_godunov(double ul, double ur) {
    double a = std::max(ul, 0.0);
    double b = std::min(ur, 0.0);
    return std::max(0.5 * a * a, 0.5 * b * b);
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t n = argc > 1 ? static_cast<std::size_t>(std::atoll(argv[1]))
                             : (std::size_t{1} << 22);
    int reps = argc > 2 ? std::atoi(argv[2]) : 5;

#ifdef _OPENMP
    std::printf("openmp: %d threads, n = %zu, best of %d\n",
                omp_get_max_threads(), n, reps);
#else
    std::printf("openmp: not compiled in, n = %zu, best of %d\n", n, reps);
#endif
    std::printf("%-14s %13s %13s %9s\n", "kernel", "serial", "openmp",
                "speedup");

    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> a(n), b(n), out(n), iface(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = unif(rng);
        b[i] = unif(rng);
    }
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);

    using namespace cpm::kernels;

    report("map",
           best_ms(reps, [&] {
               map_serial(a, std::span<double>(out), [](double v) { return v * v; });
               g_sink = g_sink + out[0];
           }),
           best_ms(reps, [&] {
               map_omp(a, std::span<double>(out), [](double v) { return v * v; });
               g_sink = g_sink + out[0];
           }));

    report("advance",
           best_ms(reps, [&] {
               advance_serial(out, a, 1e-6);
               g_sink = g_sink + out[0];
           }),
           best_ms(reps, [&] {
               advance_omp(out, a, 1e-6);
               g_sink = g_sink + out[0];
           }));

    report("min_collision",
           best_ms(reps, [&] { g_sink = g_sink + min_collision_serial(x, a); }),
           best_ms(reps, [&] { g_sink = g_sink + min_collision_omp(x, a); }));

    report("sum", best_ms(reps, [&] { g_sink = g_sink + sum_serial(a); }),
           best_ms(reps, [&] { g_sink = g_sink + sum_omp(a); }));

    report("godunov_sweep",
           best_ms(reps,
                   [&] {
                       godunov_sweep_serial(a, std::span<double>(iface),
                                            burgers_godunov);
                       g_sink = g_sink + iface[0];
                   }),
           best_ms(reps, [&] {
               godunov_sweep_omp(a, std::span<double>(iface), burgers_godunov);
               g_sink = g_sink + iface[0];
           }));

    report("fv_update",
           best_ms(reps,
                   [&] {
                       fv_update_serial(out, iface, 0.5);
                       g_sink = g_sink + out[0];
                   }),
           best_ms(reps, [&] {
               fv_update_omp(out, iface, 0.5);
               g_sink = g_sink + out[0];
           }));

    auto rk_step = [](double& px, double& pu) {
        for (int s = 0; s < 4; ++s) {
            px += 1e-7 * pu;
            pu += 1e-7 * std::sin(px);
        }
    };
    report("pair_map",
           best_ms(reps,
                   [&] {
                       pair_map_serial(std::span<double>(x),
                                       std::span<double>(b), rk_step);
                       g_sink = g_sink + x[0];
                   }),
           best_ms(reps, [&] {
               pair_map_omp(std::span<double>(x), std::span<double>(b), rk_step);
               g_sink = g_sink + x[0];
           }));

    std::printf("checksum %.3e\n", static_cast<double>(g_sink));
    return 0;
}
