#pragma once

#include <cstddef>
#include <vector>

#include "cpm/flux.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// Earliest pair collision. dt is +inf when no pair approaches; pairs
// lists the left indices of every pair reaching the minimum (within a
// relative tolerance), so simultaneous collisions are handled in one
// management pass.
struct Collision {
    double dt = 0.0;
    std::vector<std::size_t> pairs;
};

Collision next_collision(const ParticleSystem& s, const FluxModel& flux);

// Move every particle by dt along its characteristic, accumulate the
// boundary flux integral, advance the clock. Throws if dt is negative
// or exceeds the next collision time.
void advance(ParticleSystem& s, const FluxModel& flux, double dt);

// Insert a particle at the x-midpoint of segment (i, i+1), on the
// interpolant, which changes the area only by roundoff. The public
// form enforces the insertion policy: the pair must not be approaching
// and its gap must be at least d_max. Returns the new particle index.
std::size_t insert_particle(ParticleSystem& s, const FluxModel& flux,
                            std::size_t i);

struct MergeSolution {
    double x = 0.0;     // midpoint of the merged pair
    double u = 0.0;     // value matching the three-segment area
    double area = 0.0;  // that area, over the flanked span
};

// Solve the area-matching equation for merging pair (i, i+1) with its
// flanking neighbors (virtual zero-width copies at the boundary).
// Does not modify the system.
MergeSolution merge_solve(const ParticleSystem& s, const FluxModel& flux,
                          std::size_t i);

// Total-variation criterion for the merge: true when the pair's value
// jump per unit width is steep enough, relative to the flank widths
// and the convexity spread, that merging cannot increase the total
// variation beyond its bound. Coincident pairs pass trivially.
bool merge_is_tvd_safe(const ParticleSystem& s, const FluxModel& flux,
                       std::size_t i);

// Entropy criterion: on a convex stretch (positive sign) the merged
// value must lie between the flank values u1 >= u23 >= u4, reversed on
// a concave stretch; a zero sign always fails.
bool merge_is_entropy_safe(double u1, double u23, double u4,
                           int convexity_sign);

// System form of the criterion for merging pair (i, i+1) into u_merge.
// Sides with a zero-width or virtual flank are exempt, since the
// profile change there has zero measure.
bool merge_is_entropy_safe(const ParticleSystem& s, const FluxModel& flux,
                           std::size_t i, double u_merge);

// Solve-and-commit merge of pair (i, i+1) without the entropy guard.
// The merged particle is flagged as a shock. Returns its index.
std::size_t merge_pair(ParticleSystem& s, const FluxModel& flux,
                       std::size_t i);

// Entropy-guarded merge: re-solve after inserting midpoint particles
// on the flank segments until the merged value passes the entropy
// criterion, up to max_rounds refinement rounds; throws SolverError if
// the rounds are exhausted. Returns the merged particle index.
std::size_t entropy_fix(ParticleSystem& s, const FluxModel& flux,
                        std::size_t i, int max_rounds = 10);

// Collapse runs of 3+ particles sharing a position down to at most
// {min value, max value, inflection particles}, ordered to bridge the
// outer neighbors monotonically, and drop exact duplicates in pairs.
// Returns the number of particles removed.
std::size_t dedupe_coincident(ParticleSystem& s, const FluxModel& flux);

struct RunOptions {
    double t_end = 0.0;
    std::vector<double> output_times;  // ascending, within [start, t_end]
    bool enable_insertion = true;
    bool enable_entropy_fix = true;
    // per-merge Kruzkov entropy audit over a 64-value k-grid spanning
    // the data range; fills Event::entropy_gain
    bool audit_entropy = false;
    int entropy_fix_rounds = 10;
    std::size_t max_events = 0;  // 0: size-based default cap
};

struct RunResult {
    std::vector<Snapshot> snapshots;
};

// Snap the listed pairs to coincidence, then run the management
// pipeline: dedupe, inflection enforcement, insertion scan, merge scan
// (entropy-guarded, with the five-point path for inflection pairs),
// final dedupe.
void resolve_collisions(ParticleSystem& s, const FluxModel& flux,
                        const std::vector<std::size_t>& pairs,
                        const RunOptions& opt);

// Event-driven evolution to t_end: advance to the earlier of the next
// collision and the next output time, manage collisions as they occur,
// record a snapshot at each requested output time.
RunResult run(ParticleSystem s, const FluxModel& flux, const RunOptions& opt);

// Post-processing: replace each interior shock-flagged particle by a
// vertical jump between its neighbor values, positioned so the area
// over the neighbor span is unchanged. Returns the modified copy.
ParticleSystem reconstruct_shocks(const ParticleSystem& s,
                                  const FluxModel& flux);

}  // namespace cpm
