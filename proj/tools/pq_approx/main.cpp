#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pqbbh/errors.hpp"
#include "pqbbh_harness/config.hpp"
#include "pqbbh_harness/runner.hpp"

using namespace pqbbh;
using namespace pqbbh::harness;

int main(int argc, char** argv)
{
    CLI::App app{"pq-approx: (p,q)-BBH experiment harness"};
    std::string command;
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::string> mode;
    std::optional<int> resolution;
    std::optional<int> threads;

    app.add_option("command", command, "moments | korovkin | rates | bivariate | density | identities")->required();
    app.add_option("--config", config_path, "TOML experiment file")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--mode", mode, "float | rational");
    app.add_option("--resolution", resolution, "grid resolution R");
    app.add_option("--threads", threads, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const Command cmd = parse_command(command);
        ExperimentConfig config = load_config(config_path, cmd);
        if (out) {
            config.out = *out;
        }
        if (mode) {
            try {
                config.mode = parse_mode(*mode);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        if (resolution) {
            config.resolution = *resolution;
        }
        if (threads) {
            config.threads = *threads;
        }
        const auto result = run(config);
        for (const auto& f : result.files) {
            std::cout << f.string() << '\n';
        }
        std::cout << result.discrepancies.entries().size() << " discrepancies\n";
        return 0;
    } catch (const IoError& e) {
        std::cerr << "pq-approx: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "pq-approx: " << e.what() << '\n';
        return 1;
    } catch (const UnknownNameError& e) {
        std::cerr << "pq-approx: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "pq-approx: " << e.what() << '\n';
        return 1;
    }
}
