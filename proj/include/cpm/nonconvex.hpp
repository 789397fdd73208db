#pragma once

#include <cstddef>

#include "cpm/flux.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// Insert flux-inflection particles wherever an adjacent pair's value
// interval strictly contains an inflection value. Coincident pairs get
// the particle at the shared position; smooth pairs are split at the
// value-space crossing (the interpolant is not available across an
// inflection, so this placement is first-order accurate locally).
// Returns the number of particles inserted.
std::size_t enforce_inflection_particles(ParticleSystem& s,
                                         const FluxModel& flux);

// True when the colliding pair (i, i+1) must be handled by the
// five-point inflection merge: exactly one member carries an
// inflection value and the neighbor on the inflection particle's far
// side lies strictly on the other side of that value. Pairs failing
// this (no separation, missing neighbor) go through the ordinary
// four-point merge.
bool is_inflection_merge(const ParticleSystem& s, const FluxModel& flux,
                         std::size_t i);

// Five-point merge around an inflection particle. The configuration is
// reflected (in x, in u, or both) onto the canonical orientation
// "collision on the left of the slowest particle, value above the
// inflection", the three standard attempts are tried in order, and the
// result is mapped back. Exactly one attempt succeeds; each preserves
// area exactly and removes one particle. The coincident pair the merge
// may leave behind is a rarefaction (deviating), so the merge loop
// never touches it.
void merge_with_inflection(ParticleSystem& s, const FluxModel& flux,
                           std::size_t i);

}  // namespace cpm
