#include "cpm/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cpm/numerics.hpp"

namespace cpm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ConfigError("io: cannot write '" + path + "'");
    out << text;
    if (!out) throw ConfigError("io: write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("io: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_snapshot_csv(const std::string& path, const ParticleSystem& s) {
    std::ostringstream out;
    out << "x,u,is_shock,is_inflection\n";
    for (const Particle& p : s.particles)
        out << format_double(p.x) << ',' << format_double(p.u) << ','
            << (p.is_shock ? 1 : 0) << ',' << (p.is_inflection ? 1 : 0) << '\n';
    write_text_file(path, out.str());
}

ParticleSystem read_snapshot_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("io: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,u,", 0) != 0)
        throw ConfigError("io: '" + path + "' is not a snapshot CSV");
    ParticleSystem s;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        Particle p;
        char* cur = line.data();
        char* end = nullptr;
        p.x = std::strtod(cur, &end);
        if (end == cur || *end != ',')
            throw ConfigError("io: bad row " + std::to_string(lineno) + " in '" + path + "'");
        cur = end + 1;
        p.u = std::strtod(cur, &end);
        if (end == cur || *end != ',')
            throw ConfigError("io: bad row " + std::to_string(lineno) + " in '" + path + "'");
        cur = end + 1;
        long shock = std::strtol(cur, &end, 10);
        if (end == cur || *end != ',')
            throw ConfigError("io: bad row " + std::to_string(lineno) + " in '" + path + "'");
        cur = end + 1;
        long infl = std::strtol(cur, &end, 10);
        if (end == cur)
            throw ConfigError("io: bad row " + std::to_string(lineno) + " in '" + path + "'");
        p.is_shock = shock != 0;
        p.is_inflection = infl != 0;
        s.particles.push_back(p);
    }
    return s;
}

void write_grid_csv(const std::string& path, const FvGrid& g) {
    std::ostringstream out;
    out << "x_center,u_average\n";
    for (std::size_t i = 0; i < g.cells(); ++i)
        out << format_double(g.center(i)) << ',' << format_double(g.u[i]) << '\n';
    write_text_file(path, out.str());
}

void write_events_jsonl(const std::string& path, const std::vector<Event>& events) {
    std::ostringstream out;
    for (const Event& e : events) {
        nlohmann::json rec;
        rec["kind"] = to_string(e.kind);
        rec["t"] = e.t;
        rec["x"] = e.x;
        rec["u_before"] = e.u_before;
        rec["u_after"] = e.u_after;
        rec["area_before"] = e.area_before;
        rec["area_after"] = e.area_after;
        rec["tv_before"] = e.tv_before;
        rec["tv_after"] = e.tv_after;
        rec["entropy_gain"] = e.entropy_gain;
        rec["attempt"] = e.attempt;
        rec["tvd_safe"] = e.tvd_safe;
        out << rec.dump() << '\n';
    }
    write_text_file(path, out.str());
}

}  // namespace cpm
