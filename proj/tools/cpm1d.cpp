#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cpm/config.hpp"
#include "cpm/drivers.hpp"
#include "cpm/numerics.hpp"

namespace {

// Exit codes: 0 success, 2 configuration problem, 3 solver abort.
int guarded(const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const cpm::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "cpm1d: characteristic-particle solver for 1D scalar conservation "
        "laws. Sweeps honor the CPM_WORKERS environment variable."};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::size_t> ns = {50, 100, 200, 400, 800};
    bool oracle_self = false;

    auto* run = app.add_subcommand("run", "Evolve one configuration; write snapshots, events, manifest");
    run->add_option("config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* sample = app.add_subcommand("sample", "Sample initial data only; write the t=0 particle set");
    sample->add_option("config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);

    auto* converge = app.add_subcommand("converge", "L1 error vs particle count, both sampling modes");
    converge->add_option("config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    converge->add_option("--n", ns, "comma-separated particle counts")
        ->delimiter(',');

    auto* compare = app.add_subcommand("compare", "Particle method vs finite-volume oracle at matched resolution");
    compare->add_option("config", config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--n", ns, "comma-separated particle counts")
        ->delimiter(',');
    compare->add_flag("--oracle-self", oracle_self,
                      "replace the particle column with the oracle itself");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    return guarded([&] {
        cpm::RunConfig cfg = cpm::load_config(config_path);
        if (run->parsed()) {
            cpm::cmd_run(cfg);
        } else if (sample->parsed()) {
            cpm::cmd_sample(cfg);
        } else if (converge->parsed()) {
            cpm::cmd_converge(cfg, ns);
        } else {
            cpm::cmd_compare(cfg, ns, oracle_self);
        }
    });
}
