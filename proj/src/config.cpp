#include "cpm/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cpm/numerics.hpp"

namespace cpm {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError(msg); }

template <class T>
T get_as(const json& doc, const std::string& key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        bad("config: key '" + key + "' has the wrong type");
    }
}

std::size_t get_count(const json& doc, const std::string& key) {
    long long v = get_as<long long>(doc, key);
    if (v < 0) bad("config: key '" + key + "' must be non-negative");
    return static_cast<std::size_t>(v);
}

}  // namespace

void RunConfig::validate() const {
    if (n < 2) bad("config: n must be at least 2");
    if (sampling != "equidistant" && sampling != "adaptive")
        bad("config: sampling must be 'equidistant' or 'adaptive'");
    if (ic.empty()) bad("config: ic is required");
    if (!(domain_hi > domain_lo)) bad("config: domain must be a nonempty interval");
    if (!(t_end >= 0.0)) bad("config: t_end must be non-negative");
    double ttol = 1e-12 * (1.0 + std::abs(t_end));
    for (std::size_t i = 0; i < output_times.size(); ++i) {
        double t = output_times[i];
        if (i > 0 && !(t > output_times[i - 1]))
            bad("config: output_times must be strictly ascending");
        if (t < -ttol || t > t_end + ttol)
            bad("config: output_times must lie within [0, t_end]");
    }
    if (d_min < 0.0 || d_max < 0.0) bad("config: d_min and d_max must be non-negative");
    if (dt < 0.0) bad("config: dt must be non-negative");
    if (ref_multiplier < 8)
        bad("config: ref_multiplier must be at least 8 (reference validity)");
    if (!(shock_window_factor > 0.0)) bad("config: shock_window_factor must be positive");
    if (!(fv_cfl > 0.0 && fv_cfl <= 0.9)) bad("config: fv_cfl must lie in (0, 0.9]");
    if (output_dir.empty()) bad("config: output_dir must be non-empty");
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        bad(std::string("config: invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) bad("config: top level must be a JSON object");

    RunConfig c;
    for (const auto& item : doc.items()) {
        const std::string& key = item.key();
        if (key == "flux") c.flux = get_as<std::string>(doc, key);
        else if (key == "flux_coeffs") c.flux_coeffs = get_as<std::vector<double>>(doc, key);
        else if (key == "ic") c.ic = get_as<std::string>(doc, key);
        else if (key == "domain_lo") c.domain_lo = get_as<double>(doc, key);
        else if (key == "domain_hi") c.domain_hi = get_as<double>(doc, key);
        else if (key == "ic_x0") c.ic_x0 = get_as<double>(doc, key);
        else if (key == "ic_left") c.ic_left = get_as<double>(doc, key);
        else if (key == "ic_right") c.ic_right = get_as<double>(doc, key);
        else if (key == "ic_locations") c.ic_locations = get_as<std::vector<double>>(doc, key);
        else if (key == "ic_values") c.ic_values = get_as<std::vector<double>>(doc, key);
        else if (key == "ic_coeffs") c.ic_coeffs = get_as<std::vector<double>>(doc, key);
        else if (key == "source") c.source = get_as<std::string>(doc, key);
        else if (key == "source_lo") c.source_lo = get_as<double>(doc, key);
        else if (key == "source_hi") c.source_hi = get_as<double>(doc, key);
        else if (key == "source_edges") c.source_edges = get_as<std::vector<double>>(doc, key);
        else if (key == "source_coeffs")
            c.source_coeffs = get_as<std::vector<std::vector<double>>>(doc, key);
        else if (key == "n") c.n = get_count(doc, key);
        else if (key == "sampling") c.sampling = get_as<std::string>(doc, key);
        else if (key == "t_end") c.t_end = get_as<double>(doc, key);
        else if (key == "output_times") c.output_times = get_as<std::vector<double>>(doc, key);
        else if (key == "d_min") c.d_min = get_as<double>(doc, key);
        else if (key == "d_max") c.d_max = get_as<double>(doc, key);
        else if (key == "dt") c.dt = get_as<double>(doc, key);
        else if (key == "postprocess") c.postprocess = get_as<bool>(doc, key);
        else if (key == "insertion") c.insertion = get_as<bool>(doc, key);
        else if (key == "entropy_fix") c.entropy_fix = get_as<bool>(doc, key);
        else if (key == "audit_entropy") c.audit_entropy = get_as<bool>(doc, key);
        else if (key == "max_events") c.max_events = get_count(doc, key);
        else if (key == "ref_multiplier") {
            long long v = get_as<long long>(doc, key);
            if (v < 1) bad("config: ref_multiplier must be positive");
            c.ref_multiplier = static_cast<int>(v);
        } else if (key == "shock_window_factor")
            c.shock_window_factor = get_as<double>(doc, key);
        else if (key == "fv_cells") c.fv_cells = get_count(doc, key);
        else if (key == "fv_cfl") c.fv_cfl = get_as<double>(doc, key);
        else if (key == "output_dir") c.output_dir = get_as<std::string>(doc, key);
        else bad("config: unknown key '" + key + "'");
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_json(const RunConfig& c) {
    json doc;
    doc["flux"] = c.flux;
    doc["flux_coeffs"] = c.flux_coeffs;
    doc["ic"] = c.ic;
    doc["domain_lo"] = c.domain_lo;
    doc["domain_hi"] = c.domain_hi;
    doc["ic_x0"] = c.ic_x0;
    doc["ic_left"] = c.ic_left;
    doc["ic_right"] = c.ic_right;
    doc["ic_locations"] = c.ic_locations;
    doc["ic_values"] = c.ic_values;
    doc["ic_coeffs"] = c.ic_coeffs;
    doc["source"] = c.source;
    doc["source_lo"] = c.source_lo;
    doc["source_hi"] = c.source_hi;
    doc["source_edges"] = c.source_edges;
    doc["source_coeffs"] = c.source_coeffs;
    doc["n"] = c.n;
    doc["sampling"] = c.sampling;
    doc["t_end"] = c.t_end;
    doc["output_times"] = c.output_times;
    doc["d_min"] = c.d_min;
    doc["d_max"] = c.d_max;
    doc["dt"] = c.dt;
    doc["postprocess"] = c.postprocess;
    doc["insertion"] = c.insertion;
    doc["entropy_fix"] = c.entropy_fix;
    doc["audit_entropy"] = c.audit_entropy;
    doc["max_events"] = c.max_events;
    doc["ref_multiplier"] = c.ref_multiplier;
    doc["shock_window_factor"] = c.shock_window_factor;
    doc["fv_cells"] = c.fv_cells;
    doc["fv_cfl"] = c.fv_cfl;
    doc["output_dir"] = c.output_dir;
    return doc.dump(2);
}

FluxModel make_flux(const RunConfig& c) {
    if (c.flux == "burgers") return FluxModel::burgers();
    if (c.flux == "quartic") return FluxModel::quartic();
    if (c.flux == "buckley-leverett") return FluxModel::buckley_leverett();
    if (c.flux == "polynomial") {
        if (c.flux_coeffs.empty()) bad("config: polynomial flux needs flux_coeffs");
        return FluxModel::polynomial(c.flux_coeffs);
    }
    bad("config: unknown flux '" + c.flux + "'");
}

InitialCondition make_ic(const RunConfig& c) {
    if (c.ic == "gaussian-cosine")
        return InitialCondition::gaussian_cosine(c.domain_lo, c.domain_hi);
    if (c.ic == "riemann")
        return InitialCondition::riemann(c.domain_lo, c.domain_hi, c.ic_x0, c.ic_left,
                                        c.ic_right);
    if (c.ic == "buckley-jumps") {
        InitialCondition ic = InitialCondition::piecewise_constant(
            c.domain_lo, c.domain_hi, {0.5, 0.8}, {1.0, 0.0, 0.3});
        ic.name = "buckley-jumps";
        return ic;
    }
    if (c.ic == "piecewise-constant")
        return InitialCondition::piecewise_constant(c.domain_lo, c.domain_hi,
                                                    c.ic_locations, c.ic_values);
    if (c.ic == "polynomial")
        return InitialCondition::polynomial(c.domain_lo, c.domain_hi, c.ic_coeffs);
    bad("config: unknown ic '" + c.ic + "'");
}

SourceModel make_source(const RunConfig& c) {
    if (c.source == "none") return SourceModel::none();
    if (c.source == "bottom-profile")
        return SourceModel::bottom_profile(c.source_lo, c.source_hi);
    if (c.source == "bottom-pieces")
        return SourceModel::bottom_pieces(c.source_edges, c.source_coeffs);
    bad("config: unknown source '" + c.source + "'");
}

}  // namespace cpm
