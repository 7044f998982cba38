#pragma once

// Experiment configuration read from TOML.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pqbbh/scalar.hpp"

namespace pqbbh::harness {

/// Malformed, incomplete or inconsistent configuration.  Maps to exit code 1.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable input or unwritable output.  Maps to exit code 2.
class IoError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Moments, Korovkin, Rates, Bivariate, Density, Identities };

std::string_view to_string(Command command);
Command parse_command(std::string_view text);

/// One deformation pair: either a fixed (p, q) given as decimal or fraction
/// text, or a named schedule evaluated at each n.
struct ParamSource
{
    std::string schedule;
    std::string p = "9/10";
    std::string q = "1/2";

    bool scheduled() const { return !schedule.empty(); }
};

struct LipschitzConfig
{
    double alpha = 1.0;
    double M = 1.0;
    /// Empty means E = [0, inf).
    std::vector<double> E;
};

struct ExperimentConfig
{
    Command command = Command::Moments;
    ArithmeticMode mode = ArithmeticMode::Float;
    int resolution = 4096;
    int threads = 1;
    std::filesystem::path out = "out";

    std::vector<std::int64_t> n_values;
    /// Evaluation points, kept as text so Rational mode reads them exactly.
    std::vector<std::string> x_values = {"0", "1/2", "1", "2", "10"};
    std::vector<std::string> functions = {"u"};

    ParamSource params;
    ParamSource params2;

    // rates
    std::vector<double> deltas = {0.0, 0.05, 0.1, 0.2, 0.3, 0.5};
    std::vector<std::int64_t> representation_n = {2, 3, 4};
    std::string representation_x = "1";
    std::string gamma = "0";
    std::string beta = "0";
    LipschitzConfig lipschitz;
    /// Evaluate bound checks on every grid point (true) or only on x_values.
    bool full_grid = true;

    // density
    std::vector<std::string> sets = {"squares"};
    std::vector<std::int64_t> horizons = {1000, 10000, 1000000};
    double eps = 0.1;
    double threshold = 0.005;
    std::vector<std::string> st_schedules = {"statonly"};

    // identities
    int random_triples = 0;
    std::uint64_t seed = 1;
    std::int64_t float_n_max = 0;

    // bivariate
    int grid2d = 16;
    int modulus_resolution = 128;
    int bivariate_resolution = 512;
    std::vector<std::string> bivariate_functions = {"tensor(u,u)"};
    LipschitzConfig lipschitz2;
    double alpha2 = 1.0;
};

/// Parses TOML text.  Throws ConfigError on syntax errors, unknown keys,
/// unresolved registry names or violated constraints.  A given command
/// replaces the file's own before validation.
ExperimentConfig parse_config(std::string_view toml_text, std::string_view source_name = "<config>",
                              std::optional<Command> command = std::nullopt);

/// Reads and parses a file.  Throws IoError when it cannot be read.
ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Command> command = std::nullopt);

/// Re-checks every constraint; parse_config calls this after applying the file.
void validate(const ExperimentConfig& config);

} // namespace pqbbh::harness
