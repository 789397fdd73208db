#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cpm {

struct Particle {
    double x = 0.0;
    double u = 0.0;
    bool is_shock = false;      // produced by a merge; jump candidate
    bool is_inflection = false; // carries an inflection value of the flux
};

enum class EventKind {
    insert,
    merge,
    inflection_merge,
    entropy_insert,
    dedupe,
    inflection_insert,
    reconstruct,
};

const char* to_string(EventKind k);

// One management event. Management is instantaneous, so the area/TV
// fields record the totals immediately before and after.
struct Event {
    EventKind kind{};
    double t = 0.0;
    double x = 0.0;
    std::vector<double> u_before;
    std::vector<double> u_after;
    double area_before = 0.0;
    double area_after = 0.0;
    double tv_before = 0.0;
    double tv_after = 0.0;
    // max increase of the Kruzkov entropy over the audited k-grid;
    // only filled when the entropy audit is enabled
    double entropy_gain = 0.0;
    int attempt = 0;  // inflection merges: which of the three attempts
    bool tvd_safe = true;
};

// Ordered particle list x_0 <= x_1 <= ... plus the management
// parameters and the event log. At most two particles share a
// position, except that a jump straddling an inflection value also
// keeps the pinned inflection particle between the pair.
struct ParticleSystem {
    std::vector<Particle> particles;
    double time = 0.0;
    double d_min = 0.0;   // pair distance at/below which merging applies
    double d_max = 0.0;   // gap size at/above which insertion applies
    double h = 0.0;       // initial sampling spacing
    // integral of F(u_last) - F(u_first) dt accumulated by advance();
    // total_area minus this is the conserved quantity
    double boundary_flux_integral = 0.0;
    std::vector<Event> events;

    std::size_t size() const { return particles.size(); }
    double x(std::size_t i) const { return particles[i].x; }
    double u(std::size_t i) const { return particles[i].u; }

    bool ordered() const {
        for (std::size_t i = 1; i < particles.size(); ++i)
            if (particles[i].x < particles[i - 1].x) return false;
        return true;
    }

    // copy without the event log (used for snapshots)
    ParticleSystem bare_copy() const {
        ParticleSystem s = *this;
        s.events.clear();
        return s;
    }
};

struct Snapshot {
    double t = 0.0;
    ParticleSystem system;
};

}  // namespace cpm
