// Acceptance suite.  `pqbbh_acceptance <N>` runs criterion N and prints one
// line "criterion N: PASS|FAIL <detail>"; exit status 0 on PASS.  With no
// argument every criterion runs.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "pqbbh/bivariate.hpp"
#include "pqbbh/operators.hpp"
#include "pqbbh/pq_core.hpp"
#include "pqbbh/rates.hpp"
#include "pqbbh/statistical.hpp"
#include "pqbbh_harness/config.hpp"
#include "pqbbh_harness/runner.hpp"

#ifndef PQBBH_SOURCE_DIR
#define PQBBH_SOURCE_DIR "."
#endif

using namespace pqbbh;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and budgets.
constexpr double kEulerFloatRel = 1e-12;
constexpr double kEulerSeconds = 5.0;
constexpr double kMomentFloatRel = 1e-12;
constexpr double kMomentSeconds = 30.0;
constexpr int kRateGrid = 4096;
constexpr double kKorovkinNu1Abs = 1e-10;
constexpr double kKorovkinCoeffMax = 1e-2;
constexpr double kKorovkinSeconds = 60.0;
constexpr int kKorovkinGrid = 4096;
constexpr double kStLimitEps = 0.1;
constexpr double kStLimitFinal = 0.005;
constexpr double kBivariateFloatRel = 1e-12;
constexpr int kChainGrid = 4096;

struct Outcome
{
    bool pass = true;
    std::string detail;
};

class Stopwatch
{
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Rational frac(long a, long b)
{
    Rational r{mpz_class(a), mpz_class(b)};
    r.canonicalize();
    return r;
}

const std::vector<Rational>& x_points()
{
    static const std::vector<Rational> xs = {Rational(0), frac(1, 2), Rational(1), Rational(2), Rational(10)};
    return xs;
}

fs::path config_path(const std::string& name)
{
    return fs::path(PQBBH_SOURCE_DIR) / "configs" / name;
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / ("pqbbh_acceptance_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion1()
{
    Stopwatch clock;
    Outcome o;
    std::mt19937_64 rng(20240601);
    int exact_failures = 0;
    for (int t = 0; t < 50; ++t) {
        const long den = 2 + static_cast<long>(rng() % 99);
        const long a = 2 + static_cast<long>(rng() % static_cast<unsigned long>(den - 1));
        const long b = 1 + static_cast<long>(rng() % static_cast<unsigned long>(a - 1));
        const Rational x = frac(static_cast<long>(rng() % 41), 1 + static_cast<long>(rng() % 8));
        const PQParams<Rational> params(frac(a, den), frac(b, den));
        for (std::int64_t n = 0; n <= 15; ++n) {
            if (euler_sum(n, x, params) != euler_product(n, x, params)) {
                ++exact_failures;
            }
        }
    }
    double worst = 0.0;
    for (auto [p, q] : {std::pair{0.9, 0.5}, std::pair{0.95, 0.9}, std::pair{1.0, 0.7}, std::pair{0.999, 0.998}}) {
        const PQParams<double> params(p, q);
        for (std::int64_t n = 1; n <= 200; ++n) {
            for (double x : {0.0, 0.5, 1.0, 2.0, 10.0, 1000.0}) {
                worst = std::max(worst, euler_identity_relative_error(n, x, params));
            }
        }
    }
    const double secs = clock.seconds();
    o.pass = exact_failures == 0 && worst <= kEulerFloatRel && secs <= kEulerSeconds;
    o.detail = "exact mismatches " + std::to_string(exact_failures) + ", float max rel " + num(worst) + ", " +
               num(secs) + " s";
    return o;
}

Outcome criterion2()
{
    Stopwatch clock;
    Outcome o;
    int exact_failures = 0;
    double worst = 0.0;
    for (auto [p, q] : {std::pair{frac(9, 10), frac(1, 2)}, std::pair{frac(19, 20), frac(9, 10)}}) {
        const PQParams<Rational> r(p, q);
        const auto f = to_float(r);
        for (int nu = 0; nu <= 2; ++nu) {
            for (std::int64_t n = 1; n <= 50; ++n) {
                for (const auto& x : x_points()) {
                    if (moment_closed(nu, n, x, r, MomentVariant::OracleConsistent) !=
                        brute_force_moment(nu, n, x, r)) {
                        ++exact_failures;
                    }
                }
            }
            for (std::int64_t n = 1; n <= 200; ++n) {
                for (const auto& xr : x_points()) {
                    const double x = to_double(xr);
                    worst = std::max(worst, relative_gap(moment_closed(nu, n, x, f, MomentVariant::OracleConsistent),
                                                         brute_force_moment(nu, n, x, f)));
                }
            }
        }
    }
    const double secs = clock.seconds();
    o.pass = exact_failures == 0 && worst <= kMomentFloatRel && secs <= kMomentSeconds;
    o.detail = "exact mismatches " + std::to_string(exact_failures) + ", float max rel " + num(worst) + ", " +
               num(secs) + " s";
    return o;
}

Outcome criterion3()
{
    Outcome o;
    int nonzero = 0;
    int checked = 0;
    for (auto [p, q] : {std::pair{frac(9, 10), frac(1, 2)}, std::pair{frac(1, 1), frac(1, 3)},
                        std::pair{frac(19, 20), frac(9, 10)}}) {
        const PQParams<Rational> r(p, q);
        for (std::int64_t n = 0; n <= 15; ++n) {
            for (std::int64_t k = 0; k <= n; ++k) {
                ++checked;
                nonzero += shift_relation_residual(n, k, r) != 0;
            }
        }
        for (std::int64_t k = 1; k <= 15; ++k) {
            checked += 2;
            nonzero += square_decomposition_residual(k, r) != 0;
            nonzero += step_relation_residual(k, r) != 0;
        }
    }
    o.pass = nonzero == 0;
    o.detail = std::to_string(nonzero) + " nonzero residuals of " + std::to_string(checked);
    return o;
}

Outcome criterion4()
{
    Outcome o;
    const PQParams<double> params(0.95, 0.9);
    const auto xs = x_grid(kRateGrid);
    for (std::int64_t n : {5, 10, 50}) {
        const auto r = rate_bound_check(make_u(), n, params, xs, kRateGrid);
        o.pass = o.pass && r.pass;
        o.detail += "n=" + std::to_string(n) + " worst margin " + num(r.worst_margin) + "; ";
    }
    return o;
}

Outcome criterion5()
{
    Stopwatch clock;
    Outcome o;
    const auto smooth = ParamSchedule::from_name("smooth");
    std::array<double, 3> prev = {INFINITY, INFINITY, INFINITY};
    double worst_nu1 = 0.0;
    KorovkinDiagnostics last;
    for (std::int64_t n : {10, 50, 200, 400}) {
        last = korovkin_battery(smooth, n, kKorovkinGrid);
        for (std::size_t nu = 0; nu < 3; ++nu) {
            o.pass = o.pass && last.supnorms[nu] < prev[nu];
            prev[nu] = last.supnorms[nu];
        }
        worst_nu1 = std::max(worst_nu1, std::fabs(last.supnorms[1] - last.nu1_analytic));
    }
    const double secs = clock.seconds();
    o.pass = o.pass && worst_nu1 <= kKorovkinNu1Abs && last.alpha_n <= kKorovkinCoeffMax &&
             last.beta_n <= kKorovkinCoeffMax && last.gamma_n <= kKorovkinCoeffMax && secs <= kKorovkinSeconds;
    o.detail = "nu1 gap " + num(worst_nu1) + ", alpha/beta/gamma at 400 " + num(last.alpha_n) + "/" +
               num(last.beta_n) + "/" + num(last.gamma_n) + ", " + num(secs) + " s";
    return o;
}

Outcome criterion6()
{
    Outcome o;
    const auto d = natural_density(index_set_from_name("squares"), 1000000);
    const auto statonly = ParamSchedule::from_name("statonly");
    const std::vector<std::int64_t> horizons = {1000, 10000, 1000000};
    const auto st = st_limit_check([&](std::int64_t n) { return statonly.at<double>(n).p(); }, 1.0, kStLimitEps,
                                   horizons, kStLimitFinal);
    std::int64_t witness = 0;
    for (std::int64_t n = 1000000; n > 100000; --n) {
        if (statonly.at<Rational>(n).p() == frac(1, 2)) {
            witness = n;
            break;
        }
    }
    const double final_density = st.densities.back().density;
    o.pass = d.density == 0.001 && st.consistent && final_density <= kStLimitFinal && witness > 100000;
    o.detail = "density " + num(d.density) + ", final st density " + num(final_density) + ", witness n = " +
               std::to_string(witness);
    return o;
}

Outcome criterion7()
{
    Outcome o;
    int exact_failures = 0;
    int tensor_failures = 0;
    double worst = 0.0;
    const PQParams<Rational> a(frac(9, 10), frac(1, 2));
    const PQParams<Rational> b(frac(19, 20), frac(7, 10));
    const std::vector<std::pair<Rational, Rational>> pts = {
        {Rational(0), Rational(0)}, {frac(1, 2), Rational(2)}, {Rational(1), Rational(1)}, {Rational(10), frac(1, 2)}};
    std::vector<BivariateFunction> gs;
    for (int j = 0; j < 4; ++j) {
        gs.push_back(make_korovkin_function(j));
    }
    const auto u = make_u();
    const auto u2 = make_u_squared();
    const auto tensor = make_tensor(u, u2);
    for (std::int64_t n1 = 1; n1 <= 10; ++n1) {
        for (std::int64_t n2 = 1; n2 <= 10; ++n2) {
            const BivariateParams<Rational> bp{n1, n2, a, b};
            for (int j = 0; j < 4; ++j) {
                if (j == 3 && (n1 < 2 || n2 < 2)) {
                    continue;
                }
                const BivariateOperator<Rational> op(gs[static_cast<std::size_t>(j)], bp);
                for (const auto& [x, y] : pts) {
                    exact_failures += bivariate_moment(j, bp, x, y, MomentVariant::OracleConsistent) != op(x, y);
                }
            }
            const BivariateOperator<Rational> top(tensor, bp);
            for (const auto& [x, y] : pts) {
                tensor_failures += top(x, y) != bbh_pq(u, n1, x, a) * bbh_pq(u2, n2, y, b);
            }
        }
    }
    const auto fa = to_float(a);
    const auto fb = to_float(b);
    for (std::int64_t n1 = 1; n1 <= 30; ++n1) {
        for (std::int64_t n2 = 1; n2 <= 30; ++n2) {
            const BivariateParams<double> bp{n1, n2, fa, fb};
            for (int j = 0; j < 4; ++j) {
                if (j == 3 && (n1 < 2 || n2 < 2)) {
                    continue;
                }
                const BivariateOperator<double> op(gs[static_cast<std::size_t>(j)], bp);
                for (const auto& [xr, yr] : pts) {
                    const double x = to_double(xr);
                    const double y = to_double(yr);
                    worst = std::max(
                        worst, relative_gap(bivariate_moment(j, bp, x, y, MomentVariant::OracleConsistent), op(x, y)));
                }
            }
        }
    }
    o.pass = exact_failures == 0 && tensor_failures == 0 && worst <= kBivariateFloatRel;
    o.detail = "exact mismatches " + std::to_string(exact_failures) + ", tensor mismatches " +
               std::to_string(tensor_failures) + ", float max rel " + num(worst);
    return o;
}

Outcome criterion8()
{
    Outcome o;
    for (std::int64_t n : {5, 10, 50, 100}) {
        const auto r = remark58_check(n, schedule<double>("smooth", n), kChainGrid);
        o.pass = o.pass && r.pass;
        o.detail += "n=" + std::to_string(n) + " sup " + num(r.grid_sup) + " vs 1/(n+1)^2 " + num(r.chain_final) +
                    "; ";
    }
    return o;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream s(line);
    std::string cell;
    while (std::getline(s, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

Outcome criterion9()
{
    Outcome o;
    auto cfg = harness::load_config(config_path("representation.toml"));
    cfg.out = scratch("c9");
    const auto result = harness::run(cfg);

    const std::string disc = slurp(cfg.out / "discrepancies.csv");
    auto has = [&](const std::string& prefix) {
        for (const auto& e : result.discrepancies.entries()) {
            if (e.location.rfind(prefix, 0) == 0 && e.abs_gap > 0.0 && disc.find(e.location) != std::string::npos) {
                return true;
            }
        }
        return false;
    };
    const bool a = has("Eq (1.3) vs Eq (1.2) at p = 1");
    const bool b = has("Theorem 2.2 (proof, nu = 1)");
    const bool c = has("Lemma 5.2(");

    std::set<std::string> seen;
    std::istringstream rep(slurp(cfg.out / "representation.csv"));
    std::string line;
    std::getline(rep, line);
    while (std::getline(rep, line)) {
        const auto cells = split(line);
        if (cells.size() >= 3 && cells[1] == "rational") {
            seen.insert(cells[2]);
        }
    }
    const bool d = seen.count("2") && seen.count("3") && seen.count("4");
    fs::remove_all(cfg.out);
    o.pass = a && b && c && d;
    o.detail = std::string("p=1 prefactor ") + (a ? "yes" : "no") + ", nu=1 coefficient " + (b ? "yes" : "no") +
               ", bivariate moments " + (c ? "yes" : "no") + ", representation n=2,3,4 " + (d ? "yes" : "no");
    return o;
}

Outcome criterion10()
{
    Outcome o;
    int files = 0;
    int differing = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(PQBBH_SOURCE_DIR) / "configs")) {
        if (entry.path().extension() != ".toml") {
            continue;
        }
        const std::string stem = entry.path().stem().string();
        auto one = harness::load_config(entry.path());
        auto again = one;
        auto four = one;
        one.threads = 1;
        one.out = scratch("c10_" + stem + "_1");
        again.threads = 1;
        again.out = scratch("c10_" + stem + "_1b");
        four.threads = 4;
        four.out = scratch("c10_" + stem + "_4");
        const auto r1 = harness::run(one);
        harness::run(again);
        harness::run(four);
        for (const auto& f : r1.files) {
            ++files;
            const std::string base = slurp(f);
            for (const auto& other : {again.out, four.out}) {
                if (base != slurp(other / f.filename())) {
                    ++differing;
                    o.detail += stem + "/" + f.filename().string() + " differs in " + other.filename().string() + "; ";
                }
            }
        }
        fs::remove_all(again.out);
        fs::remove_all(one.out);
        fs::remove_all(four.out);
    }
    o.pass = differing == 0 && files > 0;
    o.detail += std::to_string(files) + " files compared, " + std::to_string(differing) + " differ";
    return o;
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                            criterion5, criterion6, criterion7, criterion8,
                                                            criterion9, criterion10};
    std::vector<int> which;
    if (argc > 1) {
        which.push_back(std::atoi(argv[1]));
    } else {
        for (int i = 1; i <= 10; ++i) {
            which.push_back(i);
        }
    }
    bool all = true;
    for (int i : which) {
        if (i < 1 || i > static_cast<int>(criteria.size())) {
            std::fprintf(stderr, "unknown criterion %d\n", i);
            return 2;
        }
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(i - 1)]();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("criterion %d: %s %s\n", i, o.pass ? "PASS" : "FAIL", o.detail.c_str());
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
