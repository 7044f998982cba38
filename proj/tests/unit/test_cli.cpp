#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pqbbh_harness/config.hpp"
#include "pqbbh_harness/csv.hpp"
#include "pqbbh_harness/discrepancy.hpp"
#include "pqbbh_harness/parallel.hpp"
#include "pqbbh_harness/runner.hpp"

using namespace pqbbh;
using namespace pqbbh::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("pqbbh_test_" + name);
    fs::remove_all(dir);
    return dir;
}

} // namespace

TEST_CASE("config parsing")
{
    const auto c = parse_config(R"(
command = "rates"
mode = "rational"
n = [5, 10]
functions = ["u", "u2"]
[params]
p = "19/20"
q = "0.9"
)");
    CHECK(c.command == Command::Rates);
    CHECK(c.mode == ArithmeticMode::Rational);
    CHECK(c.n_values == std::vector<std::int64_t>{5, 10});
    CHECK(c.params.p == "19/20");
    CHECK(c.params2.q == "0.9");

    const auto range = parse_config("command = \"moments\"\nn_from = 3\nn_to = 6\n");
    CHECK(range.n_values == std::vector<std::int64_t>{3, 4, 5, 6});

    const auto overridden = parse_config("command = \"moments\"\nn = [1]\n", "<t>", Command::Density);
    CHECK(overridden.command == Command::Density);

    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = [1]\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = [1]\n[params]\nr = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = [1]\nfunctions = [\"nope\"]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = [1]\nresolution = 8\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = []\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = [1]\n[params]\np = \"1/2\"\nq = \"9/10\"\n"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"korovkin\"\nn = [10]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"moments\"\nn = [1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"sideways\"\nn = [1]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("command = \"density\"\n[density]\nhorizons = [100, 10]\n"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/dir/x.toml"), IoError);
    CHECK_THROWS_AS(parse_command("sideways"), ConfigError);
    CHECK(to_string(Command::Bivariate) == "bivariate");
}

TEST_CASE("csv formatting")
{
    CHECK(fmt(0.1) == "0.10000000000000001");
    CHECK(fmt(std::nan("")) == "nan");
    CHECK(fmt(-INFINITY) == "-inf");
    CHECK(fmt(Rational(3, 4)) == "0.75");
    CHECK(fmt(Rational(1, 10)) == fmt(0.1));
    CHECK(fmt(true) == "true");
    CHECK(fmt(std::int64_t{-7}) == "-7");

    CsvTable t({"name", "value"});
    t.row("plain", 1);
    t.row("a,b", std::string("say \"hi\""));
    t.row("two\nlines", 0.5);
    CHECK(t.str() == "name,value\nplain,1\n\"a,b\",\"say \"\"hi\"\"\"\n\"two\nlines\",0.5\n");
    CHECK_THROWS_AS(t.row("short"), std::invalid_argument);
}

TEST_CASE("discrepancy rules")
{
    DiscrepancyReport r;
    CHECK_FALSE(r.check("f", "loc", "1", "0", Rational(1, 3), Rational(1, 3)));
    CHECK(r.check("f", "loc", "1", "0", Rational(1, 3), Rational(1, 3) + Rational(1, 1000000000) / 1000000000));
    CHECK_FALSE(r.check("f", "loc", "1", "0", 1.0, 1.0 + 1e-13));
    CHECK(r.check("f", "loc", "1", "0", 1.0, 1.0 + 1e-11));
    REQUIRE(r.entries().size() == 2);
    CHECK(r.entries()[0].mode == "rational");
    CHECK(r.entries()[1].mode == "float");
    CHECK(r.entries()[1].abs_gap == doctest::Approx(1e-11).epsilon(1e-3));

    DiscrepancyReport other;
    other.check("g", "elsewhere", "2", "1", 0.0, 1.0);
    r.append(other);
    CHECK(r.entries().size() == 3);
    CHECK(r.table().rows().size() == 3);
}

TEST_CASE("parallel_for fills every slot once")
{
    for (int threads : {1, 2, 7}) {
        std::vector<int> slots(1000, 0);
        parallel_for(slots.size(), threads, [&](std::size_t i) { slots[i] += static_cast<int>(i); });
        for (std::size_t i = 0; i < slots.size(); ++i) {
            CHECK(slots[i] == static_cast<int>(i));
        }
    }
    std::atomic<int> seen{0};
    CHECK_THROWS_WITH(parallel_for(100, 4,
                                   [&](std::size_t i) {
                                       ++seen;
                                       if (i == 17 || i == 60) {
                                           throw std::runtime_error(std::to_string(i));
                                       }
                                   }),
                      "17");
    CHECK(seen == 100);
}

TEST_CASE("run writes deterministic output")
{
    const char* text = R"(
command = "moments"
mode = "float"
n = [3, 20]
[params]
p = "0.95"
q = "0.9"
)";
    auto cfg = parse_config(text);
    cfg.out = scratch("run1");
    cfg.threads = 1;
    const auto a = run(cfg);
    CHECK(fs::exists(cfg.out / "moments.csv"));
    CHECK(fs::exists(cfg.out / "discrepancies.csv"));
    CHECK_FALSE(a.discrepancies.entries().empty());

    auto cfg4 = cfg;
    cfg4.out = scratch("run4");
    cfg4.threads = 4;
    run(cfg4);
    for (const auto& f : a.files) {
        CHECK(slurp(f) == slurp(cfg4.out / f.filename()));
    }
    fs::remove_all(cfg.out);
    fs::remove_all(cfg4.out);

    auto bad = cfg;
    bad.out = "/proc/pqbbh-cannot-write/out";
    CHECK_THROWS_AS(run(bad), IoError);
}

TEST_CASE("standard probes cover the known mismatches")
{
    const auto probes = standard_probes(ArithmeticMode::Rational, 64);
    bool lemma = false;
    bool p_one = false;
    for (const auto& e : probes.entries()) {
        if (e.location.rfind("Lemma 2.1(3)", 0) == 0) {
            lemma = true;
            CHECK(e.mode == "rational");
        }
        p_one = p_one || e.location == "Eq (1.3) vs Eq (1.2) at p = 1";
    }
    CHECK(lemma);
    CHECK(p_one);
}
