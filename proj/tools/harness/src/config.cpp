#include "pqbbh_harness/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "pqbbh/bivariate.hpp"
#include "pqbbh/errors.hpp"
#include "pqbbh/functions.hpp"
#include "pqbbh/statistical.hpp"

namespace pqbbh::harness {

std::string_view to_string(Command command)
{
    switch (command) {
    case Command::Moments:
        return "moments";
    case Command::Korovkin:
        return "korovkin";
    case Command::Rates:
        return "rates";
    case Command::Bivariate:
        return "bivariate";
    case Command::Density:
        return "density";
    case Command::Identities:
        return "identities";
    }
    return "?";
}

Command parse_command(std::string_view text)
{
    for (Command c : {Command::Moments, Command::Korovkin, Command::Rates, Command::Bivariate, Command::Density,
                      Command::Identities}) {
        if (to_string(c) == text) {
            return c;
        }
    }
    throw ConfigError("unknown command '" + std::string(text) + "'");
}

namespace {

void reject_unknown(const toml::table& table, const std::set<std::string>& allowed, const std::string& where)
{
    for (const auto& [key, value] : table) {
        if (!allowed.contains(std::string(key.str()))) {
            throw ConfigError("unknown key '" + std::string(key.str()) + "' in " + where);
        }
    }
}

std::string key_path(const std::string& where, std::string_view key)
{
    return where.empty() ? std::string(key) : where + "." + std::string(key);
}

double as_double(const toml::node& node, const std::string& what)
{
    if (auto v = node.value<double>()) {
        return *v;
    }
    throw ConfigError(what + " must be a number");
}

std::int64_t as_int(const toml::node& node, const std::string& what)
{
    if (auto v = node.as_integer()) {
        return v->get();
    }
    throw ConfigError(what + " must be an integer");
}

// Numbers and strings both become text; strings keep fractions exact.
std::string as_text(const toml::node& node, const std::string& what)
{
    if (auto s = node.as_string()) {
        return s->get();
    }
    if (auto i = node.as_integer()) {
        return std::to_string(i->get());
    }
    if (auto f = node.as_floating_point()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", f->get());
        return buf;
    }
    throw ConfigError(what + " must be a number or a string");
}

bool as_bool(const toml::node& node, const std::string& what)
{
    if (auto b = node.as_boolean()) {
        return b->get();
    }
    throw ConfigError(what + " must be a boolean");
}

const toml::array& as_array(const toml::node& node, const std::string& what)
{
    if (auto a = node.as_array()) {
        return *a;
    }
    throw ConfigError(what + " must be an array");
}

template <typename Fn> auto map_array(const toml::node& node, const std::string& what, Fn&& fn)
{
    const auto& arr = as_array(node, what);
    std::vector<decltype(fn(*arr.get(0), what))> out;
    for (std::size_t i = 0; i < arr.size(); ++i) {
        out.push_back(fn(*arr.get(i), what + "[" + std::to_string(i) + "]"));
    }
    return out;
}

std::vector<std::string> text_array(const toml::node& node, const std::string& what)
{
    return map_array(node, what, as_text);
}

std::vector<std::int64_t> int_array(const toml::node& node, const std::string& what)
{
    return map_array(node, what, as_int);
}

std::vector<double> double_array(const toml::node& node, const std::string& what)
{
    return map_array(node, what, as_double);
}

const toml::table& as_table(const toml::node& node, const std::string& what)
{
    if (auto t = node.as_table()) {
        return *t;
    }
    throw ConfigError(what + " must be a table");
}

void read_params(const toml::table& t, ParamSource& out, const std::string& where)
{
    reject_unknown(t, {"p", "q", "schedule"}, where);
    if (auto n = t.get("schedule")) {
        out.schedule = as_text(*n, key_path(where, "schedule"));
    }
    if (auto n = t.get("p")) {
        out.p = as_text(*n, key_path(where, "p"));
    }
    if (auto n = t.get("q")) {
        out.q = as_text(*n, key_path(where, "q"));
    }
}

void read_lipschitz(const toml::table& t, LipschitzConfig& out, const std::string& where)
{
    if (auto n = t.get("alpha")) {
        out.alpha = as_double(*n, key_path(where, "alpha"));
    }
    if (auto n = t.get("M")) {
        out.M = as_double(*n, key_path(where, "M"));
    }
    if (auto n = t.get("E")) {
        out.E = double_array(*n, key_path(where, "E"));
    }
}

void validate_params(const ParamSource& src, const std::string& where)
{
    if (src.scheduled()) {
        try {
            ParamSchedule::from_name(src.schedule);
        } catch (const UnknownNameError& e) {
            throw ConfigError(where + ": " + e.what());
        }
        return;
    }
    try {
        const PQParams<Rational> params(scalar_from_string<Rational>(src.p), scalar_from_string<Rational>(src.q));
        params.require_strict(where.c_str());
    } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

} // namespace

void validate(const ExperimentConfig& c)
{
    if (c.resolution < 16) {
        throw ConfigError("resolution must be at least 16");
    }
    if (c.threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
    if (c.command != Command::Density) {
        if (c.n_values.empty()) {
            throw ConfigError("the n-range is empty");
        }
        for (auto n : c.n_values) {
            if (n < 1) {
                throw ConfigError("n values must be at least 1");
            }
            if (c.command == Command::Korovkin && n < 2) {
                throw ConfigError("korovkin needs n >= 2");
            }
        }
    }
    for (const auto& x : c.x_values) {
        try {
            if (scalar_from_string<Rational>(x) < 0) {
                throw ConfigError("x values must be nonnegative");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError("bad x value '" + x + "': " + e.what());
        }
    }
    for (const auto& f : c.functions) {
        try {
            function_from_name(f);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    for (const auto& f : c.bivariate_functions) {
        try {
            bivariate_from_name(f);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (c.command == Command::Korovkin && !c.params.scheduled()) {
        throw ConfigError("korovkin needs params.schedule");
    }
    validate_params(c.params, "params");
    validate_params(c.params2, "params2");
    for (const auto& s : c.st_schedules) {
        validate_params(ParamSource{s}, "density.schedules");
    }
    for (const auto& s : c.sets) {
        try {
            index_set_from_name(s);
        } catch (const UnknownNameError& e) {
            throw ConfigError(e.what());
        }
    }
    for (std::size_t i = 0; i < c.horizons.size(); ++i) {
        if (c.horizons[i] < 1 || (i > 0 && c.horizons[i] <= c.horizons[i - 1])) {
            throw ConfigError("density.horizons must be positive and increasing");
        }
    }
    if (c.command == Command::Density && c.horizons.empty()) {
        throw ConfigError("density.horizons is empty");
    }
    if (!(c.eps > 0.0)) {
        throw ConfigError("density.eps must be positive");
    }
    for (auto n : c.representation_n) {
        if (n < 1) {
            throw ConfigError("rates.representation_n values must be at least 1");
        }
    }
    for (double d : c.deltas) {
        if (!(d >= 0.0)) {
            throw ConfigError("rates.deltas must be nonnegative");
        }
    }
    if (c.grid2d < 2 || c.modulus_resolution < 2 || c.bivariate_resolution < 16) {
        throw ConfigError("bivariate grids are too small");
    }
    if (c.random_triples < 0) {
        throw ConfigError("identities.random_triples must be nonnegative");
    }
    try {
        LipschitzSpec{c.lipschitz.alpha, c.lipschitz.M, PointSet::all_nonnegative()}.validate();
        BivariateLipschitzSpec{c.lipschitz2.alpha, c.alpha2, c.lipschitz2.M, PointSet::all_nonnegative()}.validate();
        if (!c.lipschitz.E.empty()) {
            PointSet::finite(c.lipschitz.E);
        }
        if (!c.lipschitz2.E.empty()) {
            PointSet::finite(c.lipschitz2.E);
        }
        scalar_from_string<Rational>(c.gamma);
        if (scalar_from_string<Rational>(c.beta) < 0) {
            throw ConfigError("rates.beta must be nonnegative");
        }
        if (scalar_from_string<Rational>(c.representation_x) <= 0) {
            throw ConfigError("rates.representation_x must be positive");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig parse_config(std::string_view toml_text, std::string_view source_name, std::optional<Command> command)
{
    toml::table root;
    try {
        root = toml::parse(toml_text, source_name);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << e;
        throw ConfigError(msg.str());
    }
    reject_unknown(root,
                   {"command", "mode", "resolution", "threads", "out", "n", "n_from", "n_to", "x", "functions", "params",
                    "params2", "rates", "lipschitz", "density", "identities", "bivariate"},
                   "the top level");

    ExperimentConfig c;
    if (auto n = root.get("command")) {
        c.command = parse_command(as_text(*n, "command"));
    }
    if (auto n = root.get("mode")) {
        try {
            c.mode = parse_mode(as_text(*n, "mode"));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (auto n = root.get("resolution")) {
        c.resolution = static_cast<int>(as_int(*n, "resolution"));
    }
    if (auto n = root.get("threads")) {
        c.threads = static_cast<int>(as_int(*n, "threads"));
    }
    if (auto n = root.get("out")) {
        c.out = as_text(*n, "out");
    }
    if (auto n = root.get("n")) {
        c.n_values = int_array(*n, "n");
    }
    if (root.contains("n_from") || root.contains("n_to")) {
        if (!root.contains("n_from") || !root.contains("n_to") || root.contains("n")) {
            throw ConfigError("give either n = [...] or both n_from and n_to");
        }
        const auto lo = as_int(*root.get("n_from"), "n_from");
        const auto hi = as_int(*root.get("n_to"), "n_to");
        for (auto n = lo; n <= hi; ++n) {
            c.n_values.push_back(n);
        }
    }
    if (auto n = root.get("x")) {
        c.x_values = text_array(*n, "x");
    }
    if (auto n = root.get("functions")) {
        c.functions = text_array(*n, "functions");
    }
    if (auto n = root.get("params")) {
        read_params(as_table(*n, "params"), c.params, "params");
    }
    c.params2 = c.params;
    if (auto n = root.get("params2")) {
        c.params2 = ParamSource{};
        read_params(as_table(*n, "params2"), c.params2, "params2");
    }
    if (auto n = root.get("rates")) {
        const auto& t = as_table(*n, "rates");
        reject_unknown(t, {"deltas", "representation_n", "representation_x", "gamma", "beta", "full_grid"}, "rates");
        if (auto v = t.get("deltas")) {
            c.deltas = double_array(*v, "rates.deltas");
        }
        if (auto v = t.get("representation_n")) {
            c.representation_n = int_array(*v, "rates.representation_n");
        }
        if (auto v = t.get("representation_x")) {
            c.representation_x = as_text(*v, "rates.representation_x");
        }
        if (auto v = t.get("gamma")) {
            c.gamma = as_text(*v, "rates.gamma");
        }
        if (auto v = t.get("beta")) {
            c.beta = as_text(*v, "rates.beta");
        }
        if (auto v = t.get("full_grid")) {
            c.full_grid = as_bool(*v, "rates.full_grid");
        }
    }
    if (auto n = root.get("lipschitz")) {
        const auto& t = as_table(*n, "lipschitz");
        reject_unknown(t, {"alpha", "M", "E"}, "lipschitz");
        read_lipschitz(t, c.lipschitz, "lipschitz");
    }
    if (auto n = root.get("density")) {
        const auto& t = as_table(*n, "density");
        reject_unknown(t, {"sets", "horizons", "eps", "threshold", "schedules"}, "density");
        if (auto v = t.get("sets")) {
            c.sets = text_array(*v, "density.sets");
        }
        if (auto v = t.get("horizons")) {
            c.horizons = int_array(*v, "density.horizons");
        }
        if (auto v = t.get("eps")) {
            c.eps = as_double(*v, "density.eps");
        }
        if (auto v = t.get("threshold")) {
            c.threshold = as_double(*v, "density.threshold");
        }
        if (auto v = t.get("schedules")) {
            c.st_schedules = text_array(*v, "density.schedules");
        }
    }
    if (auto n = root.get("identities")) {
        const auto& t = as_table(*n, "identities");
        reject_unknown(t, {"random_triples", "seed", "float_n_max"}, "identities");
        if (auto v = t.get("random_triples")) {
            c.random_triples = static_cast<int>(as_int(*v, "identities.random_triples"));
        }
        if (auto v = t.get("seed")) {
            c.seed = static_cast<std::uint64_t>(as_int(*v, "identities.seed"));
        }
        if (auto v = t.get("float_n_max")) {
            c.float_n_max = as_int(*v, "identities.float_n_max");
        }
    }
    if (auto n = root.get("bivariate")) {
        const auto& t = as_table(*n, "bivariate");
        reject_unknown(t, {"grid2d", "modulus_resolution", "resolution", "functions", "alpha1", "alpha2", "M", "E"},
                       "bivariate");
        if (auto v = t.get("grid2d")) {
            c.grid2d = static_cast<int>(as_int(*v, "bivariate.grid2d"));
        }
        if (auto v = t.get("modulus_resolution")) {
            c.modulus_resolution = static_cast<int>(as_int(*v, "bivariate.modulus_resolution"));
        }
        if (auto v = t.get("resolution")) {
            c.bivariate_resolution = static_cast<int>(as_int(*v, "bivariate.resolution"));
        }
        if (auto v = t.get("functions")) {
            c.bivariate_functions = text_array(*v, "bivariate.functions");
        }
        if (auto v = t.get("alpha1")) {
            c.lipschitz2.alpha = as_double(*v, "bivariate.alpha1");
        }
        if (auto v = t.get("alpha2")) {
            c.alpha2 = as_double(*v, "bivariate.alpha2");
        }
        if (auto v = t.get("M")) {
            c.lipschitz2.M = as_double(*v, "bivariate.M");
        }
        if (auto v = t.get("E")) {
            c.lipschitz2.E = double_array(*v, "bivariate.E");
        }
    }
    if (command) {
        c.command = *command;
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, std::optional<Command> command)
{
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw IoError("cannot read config '" + path.string() + "'");
    }
    std::ostringstream text;
    text << file.rdbuf();
    return parse_config(text.str(), path.string(), command);
}

} // namespace pqbbh::harness
