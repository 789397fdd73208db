#pragma once

#include <string>
#include <vector>

#include "cpm/fv.hpp"
#include "cpm/particle.hpp"

namespace cpm {

// Snapshot CSV, columns x,u,is_shock,is_inflection. Doubles are written with
// 17 significant digits, so a written file reads back bit-exactly.
void write_snapshot_csv(const std::string& path, const ParticleSystem& s);
ParticleSystem read_snapshot_csv(const std::string& path);

// Reference-grid CSV, columns x_center,u_average.
void write_grid_csv(const std::string& path, const FvGrid& g);

// Event log as line-delimited JSON records.
void write_events_jsonl(const std::string& path, const std::vector<Event>& events);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

// Round-trip-safe decimal form of a double (17 significant digits).
std::string format_double(double v);

}  // namespace cpm
