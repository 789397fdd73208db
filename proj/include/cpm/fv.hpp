#pragma once

#include <cstddef>
#include <vector>

#include "cpm/flux.hpp"
#include "cpm/geometry.hpp"
#include "cpm/particle.hpp"
#include "cpm/sampling.hpp"
#include "cpm/sources.hpp"

namespace cpm {

// Uniform finite-volume grid of cell averages, the independent oracle the
// particle solution is measured against.
struct FvGrid {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> u;
    double cfl = 0.9;

    std::size_t cells() const { return u.size(); }
    double dx() const { return (hi - lo) / static_cast<double>(u.size()); }
    double center(std::size_t i) const {
        return lo + dx() * (static_cast<double>(i) + 0.5);
    }
    GridFunction as_grid() const { return GridFunction{lo, hi, u}; }

    // CFL in (0, 0.9], at least one cell, finite averages.
    void validate() const;
};

// Exact scalar Riemann interface flux: min of f over [uL, uR] when uL <= uR,
// otherwise max, with interior extrema found from the flux's critical values.
double godunov_flux(double ul, double ur, const FluxModel& flux);

// Cell averages of the initial data; cells containing a jump integrate the
// smooth pieces separately, so discontinuous data is averaged exactly.
FvGrid fv_sample(const InitialCondition& ic, std::size_t cells, double cfl = 0.9);

struct FvSnapshot {
    double t = 0.0;
    FvGrid grid;
};

struct FvRunOptions {
    double t_end = 0.0;
    std::vector<double> output_times;
    double cfl = 0.9;
    std::size_t max_steps = 0;  // 0: internal guard
};

struct FvResult {
    std::vector<FvSnapshot> snapshots;
};

// First-order Godunov evolution with constant-extrapolation boundaries.
// Sources are applied by simple splitting: advect, then add dt * g at the
// cell centers. Aborts on non-finite averages. Needs cells >= 10.
FvResult fv_run(const InitialCondition& ic, const FluxModel& flux,
                const SourceModel& source, std::size_t cells,
                const FvRunOptions& opt);

// Per-cell area error of the coarse grid against a reference grid at least
// 8x finer on the same domain: sum over coarse cells of
// |coarse average * dx - integral of the reference over the cell|.
double l1_error_vs_reference(const FvGrid& coarse, const FvGrid& fine);

// Particle counterpart: midpoint-rule L1 distance to the reference grid over
// the reference domain.
L1Result l1_error_vs_reference(const ParticleSystem& s, const FluxModel& flux,
                               const FvGrid& fine);

}  // namespace cpm
