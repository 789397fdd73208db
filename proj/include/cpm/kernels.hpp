#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "cpm/numerics.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

// Data-parallel inner loops, each in an OpenMP variant and a serial
// reference variant. The serial versions are the ground truth used by
// the tests; the dispatching wrappers pick OpenMP when it is compiled
// in. Reductions are accumulated per-thread and combined in thread
// order, so serial and parallel results agree to roundoff.

namespace cpm::kernels {

template <class F>
void map_serial(std::span<const double> in, std::span<double> out, F&& fn) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
}

template <class F>
void map_omp(std::span<const double> in, std::span<double> out, F&& fn) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(in.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = fn(in[i]);
}

template <class F>
void map(std::span<const double> in, std::span<double> out, F&& fn) {
#ifdef _OPENMP
    map_omp(in, out, fn);
#else
    map_serial(in, out, fn);
#endif
}

inline void advance_serial(std::span<double> x, std::span<const double> v,
                           double dt) {
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dt * v[i];
}

inline void advance_omp(std::span<double> x, std::span<const double> v,
                        double dt) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) x[i] += dt * v[i];
}

inline void advance(std::span<double> x, std::span<const double> v, double dt) {
#ifdef _OPENMP
    advance_omp(x, v, dt);
#else
    advance_serial(x, v, dt);
#endif
}

// Earliest pair collision time: min over i of (x[i+1]-x[i])/(v[i]-v[i+1])
// restricted to approaching pairs (v[i] > v[i+1]). Returns +inf when no
// pair approaches.
inline double min_collision_serial(std::span<const double> x,
                                   std::span<const double> v) {
    double best = kInf;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        double dv = v[i] - v[i + 1];
        if (dv > 0.0) {
            double dt = (x[i + 1] - x[i]) / dv;
            if (dt < best) best = dt;
        }
    }
    return best;
}

inline double min_collision_omp(std::span<const double> x,
                                std::span<const double> v) {
    double best = kInf;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size()) - 1;
#pragma omp parallel for schedule(static) reduction(min : best)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        double dv = v[i] - v[i + 1];
        if (dv > 0.0) {
            double dt = (x[i + 1] - x[i]) / dv;
            if (dt < best) best = dt;
        }
    }
    return best;
}

inline double min_collision(std::span<const double> x,
                            std::span<const double> v) {
#ifdef _OPENMP
    return min_collision_omp(x, v);
#else
    return min_collision_serial(x, v);
#endif
}

// Compensated serial sum; the parallel variant reduces per-thread
// compensated partials.
inline double sum_serial(std::span<const double> a) {
    KahanSum s;
    for (double v : a) s.add(v);
    return s.value();
}

inline double sum_omp(std::span<const double> a) {
#ifndef _OPENMP
    return sum_serial(a);
#else
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
    std::vector<double> parts(static_cast<std::size_t>(omp_get_max_threads()),
                              0.0);
#pragma omp parallel
    {
        KahanSum local;
#pragma omp for schedule(static)
        for (std::ptrdiff_t i = 0; i < n; ++i) local.add(a[i]);
        parts[static_cast<std::size_t>(omp_get_thread_num())] = local.value();
    }
    KahanSum total;
    for (double p : parts) total.add(p);
    return total.value();
#endif
}

inline double sum(std::span<const double> a) {
#ifdef _OPENMP
    return sum_omp(a);
#else
    return sum_serial(a);
#endif
}

// First-order Godunov interface sweep: F[i] = flux(u[i-1], u[i]) for
// i = 0..n with constant extrapolation outside [0, n).
template <class Flux>
void godunov_sweep_serial(std::span<const double> u, std::span<double> F,
                          Flux&& flux) {
    const std::size_t n = u.size();
    for (std::size_t i = 0; i <= n; ++i) {
        double ul = (i == 0) ? u[0] : u[i - 1];
        double ur = (i == n) ? u[n - 1] : u[i];
        F[i] = flux(ul, ur);
    }
}

template <class Flux>
void godunov_sweep_omp(std::span<const double> u, std::span<double> F,
                       Flux&& flux) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i <= n; ++i) {
        double ul = (i == 0) ? u[0] : u[i - 1];
        double ur = (i == n) ? u[n - 1] : u[i];
        F[i] = flux(ul, ur);
    }
}

template <class Flux>
void godunov_sweep(std::span<const double> u, std::span<double> F,
                   Flux&& flux) {
#ifdef _OPENMP
    godunov_sweep_omp(u, F, flux);
#else
    godunov_sweep_serial(u, F, flux);
#endif
}

// Conservative cell update u[i] -= (dt/dx) (F[i+1] - F[i]).
inline void fv_update_serial(std::span<double> u, std::span<const double> F,
                             double dt_over_dx) {
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] -= dt_over_dx * (F[i + 1] - F[i]);
}

inline void fv_update_omp(std::span<double> u, std::span<const double> F,
                          double dt_over_dx) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        u[i] -= dt_over_dx * (F[i + 1] - F[i]);
}

inline void fv_update(std::span<double> u, std::span<const double> F,
                      double dt_over_dx) {
#ifdef _OPENMP
    fv_update_omp(u, F, dt_over_dx);
#else
    fv_update_serial(u, F, dt_over_dx);
#endif
}

// Per-element ODE step applied to (x, u) pairs in place; Step is any
// callable mutating a single pair. Used for the batched source-term
// integrator where particles are independent within a step.
template <class Step>
void pair_map_serial(std::span<double> x, std::span<double> u, Step&& step) {
    for (std::size_t i = 0; i < x.size(); ++i) step(x[i], u[i]);
}

template <class Step>
void pair_map_omp(std::span<double> x, std::span<double> u, Step&& step) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) step(x[i], u[i]);
}

template <class Step>
void pair_map(std::span<double> x, std::span<double> u, Step&& step) {
#ifdef _OPENMP
    pair_map_omp(x, u, step);
#else
    pair_map_serial(x, u, step);
#endif
}

}  // namespace cpm::kernels
