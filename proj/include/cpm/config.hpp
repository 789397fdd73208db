#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cpm/flux.hpp"
#include "cpm/sampling.hpp"
#include "cpm/sources.hpp"

namespace cpm {

// Flat description of one experiment, loaded from a single JSON document
// whose keys match the field names below. Unknown keys are rejected.
struct RunConfig {
    std::string flux = "burgers";
    std::vector<double> flux_coeffs;

    std::string ic;  // gaussian-cosine | riemann | buckley-jumps |
                     // piecewise-constant | polynomial
    double domain_lo = 0.0;
    double domain_hi = 1.0;
    double ic_x0 = 0.0;
    double ic_left = 0.0;
    double ic_right = 0.0;
    std::vector<double> ic_locations;
    std::vector<double> ic_values;
    std::vector<double> ic_coeffs;

    std::string source = "none";  // none | bottom-profile | bottom-pieces
    double source_lo = 4.5;
    double source_hi = 5.5;
    std::vector<double> source_edges;
    std::vector<std::vector<double>> source_coeffs;

    std::size_t n = 2;
    std::string sampling = "equidistant";  // equidistant | adaptive
    double t_end = 0.0;
    std::vector<double> output_times;

    double d_min = 0.0;  // > 0 overrides the derived default
    double d_max = 0.0;
    double dt = 0.0;  // source-run step; 0 derives 0.2 h / max |f'|

    bool postprocess = true;
    bool insertion = true;
    bool entropy_fix = true;
    bool audit_entropy = false;
    std::size_t max_events = 0;

    int ref_multiplier = 8;
    double shock_window_factor = 10.0;
    std::size_t fv_cells = 0;  // compare-oracle resolution; 0 matches n
    double fv_cfl = 0.9;
    std::string output_dir = "out";

    void validate() const;
};

// Strict parse: unknown keys, wrong types, or invalid values throw
// ConfigError with the offending key in the message.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Resolved-config echo for the run manifest.
std::string config_json(const RunConfig& c);

FluxModel make_flux(const RunConfig& c);
InitialCondition make_ic(const RunConfig& c);
SourceModel make_source(const RunConfig& c);

}  // namespace cpm
