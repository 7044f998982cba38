#include "pqbbh_harness/runner.hpp"

#include <algorithm>
#include <deque>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <system_error>

#include "pqbbh/bivariate.hpp"
#include "pqbbh/errors.hpp"
#include "pqbbh/functions.hpp"
#include "pqbbh/lipschitz.hpp"
#include "pqbbh/operators.hpp"
#include "pqbbh/pq_core.hpp"
#include "pqbbh/rates.hpp"
#include "pqbbh/statistical.hpp"
#include "pqbbh_harness/csv.hpp"
#include "pqbbh_harness/parallel.hpp"

namespace pqbbh::harness {

namespace {

// Output of one independent cell; merged in cell order afterwards.
struct CellOut
{
    std::vector<CsvTable> tables;
    DiscrepancyReport disc;
};

struct Output
{
    std::deque<std::pair<std::string, CsvTable>> tables;
    DiscrepancyReport disc;

    CsvTable& add(std::string file, std::vector<std::string> header)
    {
        tables.emplace_back(std::move(file), CsvTable(std::move(header)));
        return tables.back().second;
    }
};

template <typename Fn>
void run_cells(Output& out, std::size_t first_table, std::size_t cells, int threads, Fn&& fn)
{
    std::vector<CellOut> slots(cells);
    parallel_for(cells, threads, [&](std::size_t i) {
        for (std::size_t t = first_table; t < out.tables.size(); ++t) {
            slots[i].tables.emplace_back(out.tables[t].second.header());
        }
        fn(i, slots[i]);
    });
    for (auto& slot : slots) {
        for (std::size_t t = 0; t < slot.tables.size(); ++t) {
            for (auto& r : slot.tables[t].rows()) {
                out.tables[first_table + t].second.add(r);
            }
        }
        out.disc.append(slot.disc);
    }
}

template <Scalar T> PQParams<T> resolve(const ParamSource& src, std::int64_t n)
{
    if (src.scheduled()) {
        return ParamSchedule::from_name(src.schedule).at<T>(n);
    }
    return PQParams<T>(scalar_from_string<T>(src.p), scalar_from_string<T>(src.q));
}

std::string mode_name(ArithmeticMode mode)
{
    return std::string(to_string(mode));
}

template <Scalar T> std::string label(const T& v)
{
    if constexpr (std::same_as<T, Rational>) {
        return v.get_str();
    } else {
        return fmt(v);
    }
}

std::vector<double> eval_points(const ExperimentConfig& c)
{
    if (c.full_grid) {
        return x_grid(c.resolution);
    }
    std::vector<double> xs;
    for (const auto& x : c.x_values) {
        xs.push_back(scalar_from_string<double>(x));
    }
    return xs;
}

// ---------------------------------------------------------------- identities

template <Scalar T> void identities(const ExperimentConfig& c, Output& out)
{
    const std::string mode = mode_name(c.mode);
    const std::vector<std::string> header = {"identity", "mode", "n", "k", "p", "q", "x", "residual"};
    out.add("identities.csv", header);

    run_cells(out, 0, c.n_values.size(), c.threads, [&](std::size_t i, CellOut& cell) {
        const auto n = c.n_values[i];
        const auto params = resolve<T>(c.params, n);
        auto& t = cell.tables[0];
        const auto p = label(params.p());
        const auto q = label(params.q());
        for (std::int64_t k = 0; k <= n; ++k) {
            t.row("E1_shift", mode, n, k, p, q, "", shift_relation_residual(n, k, params));
        }
        for (std::int64_t k = 1; k <= n; ++k) {
            t.row("E2_square", mode, n, k, p, q, "", square_decomposition_residual(k, params));
            t.row("E3_step", mode, n, k, p, q, "", step_relation_residual(k, params));
        }
        for (const auto& xs : c.x_values) {
            const T x = scalar_from_string<T>(xs);
            if constexpr (std::same_as<T, Rational>) {
                t.row("euler", mode, n, "", p, q, xs, Rational(euler_sum(n, x, params) - euler_product(n, x, params)));
            } else {
                t.row("euler", mode, n, "", p, q, xs, euler_identity_relative_error(n, x, params));
            }
        }
    });

    // Random (p, q, x) triples; drawn serially so the stream never depends on threads.
    struct Triple
    {
        Rational p, q, x;
    };
    std::vector<Triple> triples;
    std::mt19937_64 rng(c.seed);
    for (int i = 0; i < c.random_triples; ++i) {
        const std::uint64_t den = 2 + rng() % 98;
        const std::uint64_t a = 2 + rng() % (den - 1);
        const std::uint64_t b = 1 + rng() % (a - 1);
        const std::uint64_t xn = rng() % 41;
        const std::uint64_t xd = 1 + rng() % 10;
        Triple tr{Rational(mpz_class(a), mpz_class(den)), Rational(mpz_class(b), mpz_class(den)),
                  Rational(mpz_class(xn), mpz_class(xd))};
        tr.p.canonicalize();
        tr.q.canonicalize();
        tr.x.canonicalize();
        triples.push_back(tr);
    }
    if (!triples.empty()) {
        out.add("identities_random.csv", {"triple", "mode", "n", "p", "q", "x", "residual"});
        const std::size_t first = out.tables.size() - 1;
        run_cells(out, first, triples.size(), c.threads, [&](std::size_t i, CellOut& cell) {
            const auto& tr = triples[i];
            for (auto n : c.n_values) {
                if constexpr (std::same_as<T, Rational>) {
                    const PQParams<Rational> params(tr.p, tr.q);
                    cell.tables[0].row(static_cast<std::int64_t>(i), mode, n, tr.p.get_str(), tr.q.get_str(),
                                       tr.x.get_str(),
                                       Rational(euler_sum(n, tr.x, params) - euler_product(n, tr.x, params)));
                } else {
                    const PQParams<double> params(to_double(tr.p), to_double(tr.q));
                    cell.tables[0].row(static_cast<std::int64_t>(i), mode, n, tr.p.get_str(), tr.q.get_str(),
                                       tr.x.get_str(), euler_identity_relative_error(n, to_double(tr.x), params));
                }
            }
        });
    }

    if (c.float_n_max > 0) {
        out.add("identities_float.csv", {"n", "p", "q", "x", "relative_error"});
        const std::size_t first = out.tables.size() - 1;
        run_cells(out, first, static_cast<std::size_t>(c.float_n_max), c.threads, [&](std::size_t i, CellOut& cell) {
            const auto n = static_cast<std::int64_t>(i) + 1;
            const auto params = resolve<double>(c.params, n);
            for (const auto& xs : c.x_values) {
                cell.tables[0].row(n, params.p(), params.q(), xs,
                                   euler_identity_relative_error(n, scalar_from_string<double>(xs), params));
            }
        });
    }
}

// ------------------------------------------------------------------- moments

const char* lemma21_location(int nu)
{
    static const char* names[] = {"Lemma 2.1(1)", "Lemma 2.1(2)", "Lemma 2.1(3)"};
    return names[nu];
}

template <Scalar T> void moments(const ExperimentConfig& c, Output& out)
{
    out.add("moments.csv", {"n", "p", "q", "x", "nu", "printed", "oracle", "brute", "gap", "printed_gap"});
    run_cells(out, 0, c.n_values.size(), c.threads, [&](std::size_t i, CellOut& cell) {
        const auto n = c.n_values[i];
        const auto params = resolve<T>(c.params, n);
        const NodeWeightTable<T> table(n, params);
        for (const auto& xs : c.x_values) {
            const T x = scalar_from_string<T>(xs);
            for (int nu = 0; nu <= 2; ++nu) {
                const T printed = moment_closed(nu, n, x, params, MomentVariant::PaperPrinted);
                const T oracle = moment_closed(nu, n, x, params, MomentVariant::OracleConsistent);
                const T brute = table.apply(make_upow(nu), x);
                cell.tables[0].row(n, params.p(), params.q(), xs, nu, printed, oracle, brute,
                                   relative_gap(oracle, brute), relative_gap(printed, oracle));
                cell.disc.check("L_n(u^" + std::to_string(nu) + ") closed form", lemma21_location(nu),
                                std::to_string(n), xs, printed, oracle,
                                nu == 2 ? "printed coefficient p^2 q^3; direct summation gives p^3 q^3" : "");
            }
        }
    });
}

// ------------------------------------------------------------------ korovkin

template <Scalar T> T nu1_coefficient(std::int64_t n, const PQParams<T>& params, int p_power)
{
    const T ratio = pq_integer(n, params) / pq_integer(n + 1, params);
    return T(1) - ipow(params.p(), p_power) * params.q() * ratio;
}

template <Scalar T> void korovkin(const ExperimentConfig& c, Output& out)
{
    const auto schedule = ParamSchedule::from_name(c.params.schedule);
    out.add("korovkin.csv", {"n", "p", "q", "sup_nu0", "sup_nu1", "sup_nu2", "alpha", "beta", "gamma",
                             "nu0_analytic", "nu1_analytic", "nu1_proof", "nu1_gap"});
    std::vector<KorovkinDiagnostics> diags(c.n_values.size());
    run_cells(out, 0, c.n_values.size(), c.threads, [&](std::size_t i, CellOut& cell) {
        const auto n = c.n_values[i];
        const auto d = korovkin_battery(schedule, n, c.resolution);
        diags[i] = d;
        cell.tables[0].row(n, d.p, d.q, d.supnorms[0], d.supnorms[1], d.supnorms[2], d.alpha_n, d.beta_n,
                           d.gamma_n, d.nu0_analytic, d.nu1_analytic, d.nu1_proof,
                           std::fabs(d.supnorms[1] - d.nu1_analytic));
        const auto params = schedule.at<T>(n);
        cell.disc.check("nu = 1 coefficient", "Theorem 2.2 (proof, nu = 1)", std::to_string(n), "",
                        nu1_coefficient(n, params, 1), nu1_coefficient(n, params, 2),
                        "proof uses pq[n]/[n+1]; Lemma 2.1(2) gives p^2 q [n]/[n+1]");
    });
    auto& plot = out.add("korovkin_plot.csv", {"series", "n", "value"});
    for (int nu = 0; nu < 3; ++nu) {
        for (const auto& d : diags) {
            plot.row("nu" + std::to_string(nu), d.n, d.supnorms[nu]);
        }
    }
}

// --------------------------------------------------------------------- rates

// One entry for the worst violated point of a failed univariate bound check.
void flag_worst(DiscrepancyReport& disc, const BoundReport& report, const std::string& formula,
                const std::string& location, std::int64_t n)
{
    const BoundPoint* worst = nullptr;
    for (const auto& b : report.points) {
        if (!b.pass && (worst == nullptr || b.margin < worst->margin)) {
            worst = &b;
        }
    }
    if (worst != nullptr) {
        disc.check(formula, location, std::to_string(n), fmt(worst->x), worst->rhs, worst->lhs,
                   "worst violated grid point; printed = bound, oracle = |L f - f|");
    }
}

template <Scalar T> void rates(const ExperimentConfig& c, Output& out)
{
    std::vector<RealFunction> fns;
    for (const auto& name : c.functions) {
        fns.push_back(function_from_name(name));
    }
    const auto xs = eval_points(c);
    const PointSet E = c.lipschitz.E.empty() ? PointSet::all_nonnegative() : PointSet::finite(c.lipschitz.E);
    const LipschitzSpec spec{c.lipschitz.alpha, c.lipschitz.M, E};
    const LipschitzSpec spec_all{c.lipschitz.alpha, c.lipschitz.M, PointSet::all_nonnegative()};
    const int member_res = std::min(c.resolution, 512);
    std::vector<bool> member(fns.size());
    std::vector<bool> member_all(fns.size());
    for (std::size_t f = 0; f < fns.size(); ++f) {
        member[f] = lipschitz_membership(spec, fns[f], member_res).member;
        member_all[f] = lipschitz_membership(spec_all, fns[f], member_res).member;
    }

    out.add("rates.csv", {"function", "n", "p", "q", "x", "lhs", "rhs", "slack", "margin", "pass"});
    out.add("delta_profile.csv", {"n", "p", "q", "x", "u", "delta_n", "second_moment", "excess"});
    out.add("theorem32.csv", {"function", "member", "n", "p", "q", "x", "lhs", "rhs", "margin", "pass"});
    out.add("generalized.csv", {"function", "member", "n", "p", "q", "x", "gamma", "beta", "value", "plain",
                                "lhs", "term1", "term2", "term3", "bound", "pass"});
    const std::vector<double> profile_points = std::same_as<T, double> ? xs : std::vector<double>{};

    run_cells(out, 0, c.n_values.size(), c.threads, [&](std::size_t i, CellOut& cell) {
        const auto n = c.n_values[i];
        const auto pf = resolve<double>(c.params, n);
        const auto pt = resolve<T>(c.params, n);
        for (std::size_t f = 0; f < fns.size(); ++f) {
            const auto report = rate_bound_check(fns[f], n, pf, xs, c.resolution);
            for (const auto& b : report.points) {
                cell.tables[0].row(fns[f].name(), n, pf.p(), pf.q(), b.x, b.lhs, b.rhs, b.slack, b.margin, b.pass);
            }
            flag_worst(cell.disc, report, "rate bound [" + fns[f].name() + "]", "Theorem 3.1", n);
            const auto r32 = theorem32_bound_check(spec, fns[f], n, pf, xs);
            for (const auto& b : r32.points) {
                cell.tables[2].row(fns[f].name(), static_cast<bool>(member[f]), n, pf.p(), pf.q(), b.x, b.lhs,
                                   b.rhs, b.margin, b.pass);
            }
            if (member[f]) {
                flag_worst(cell.disc, r32, "Lipschitz-type bound [" + fns[f].name() + "]", "Theorem 3.2", n);
            }
        }

        auto profile_row = [&](const T& x, const std::string& xl) {
            const T d = delta_n(x, n, pt);
            const T m = central_second_moment_closed(x, n, pt);
            cell.tables[1].row(n, pt.p(), pt.q(), xl, to_u(x), d, m, delta_n_excess(x, n, pt));
        };
        if constexpr (std::same_as<T, double>) {
            for (double x : profile_points) {
                profile_row(x, fmt(x));
            }
        } else {
            for (const auto& xl : c.x_values) {
                profile_row(scalar_from_string<T>(xl), xl);
            }
        }
        for (const auto& xl : c.x_values) {
            const T x = scalar_from_string<T>(xl);
            cell.disc.check("delta_n vs L((u(t)-u(x))^2)", "Theorem 3.1", std::to_string(n), xl, delta_n(x, n, pt),
                            central_second_moment_closed(x, n, pt),
                            "displayed delta_n exceeds the second central moment");
        }

        GeneralizedSpec<T> gspec;
        gspec.gamma = scalar_from_string<T>(c.gamma);
        gspec.beta = scalar_from_string<T>(c.beta);
        gspec.validate(n, pt);
        for (std::size_t f = 0; f < fns.size(); ++f) {
            const auto bound = theorem41_bound(spec_all, n, pt, gspec);
            for (const auto& xl : c.x_values) {
                const T x = scalar_from_string<T>(xl);
                const T value = bbh_pq_generalized(fns[f], n, x, pt, gspec);
                const T plain = bbh_pq(fns[f], n, x, pt);
                const double lhs = std::fabs(to_double(value) - fns[f](to_double(x)));
                cell.tables[3].row(fns[f].name(), static_cast<bool>(member_all[f]), n, pt.p(), pt.q(), xl,
                                   gspec.gamma, gspec.beta, value, plain, lhs, bound.terms[0], bound.terms[1],
                                   bound.terms[2], bound.value, lhs <= bound.value + 1e-12);
            }
        }
    });

    auto& mod = out.add("modulus.csv", {"function", "delta", "value", "resolution"});
    for (const auto& f : fns) {
        const ModulusTable table(f, c.resolution);
        for (double d : c.deltas) {
            mod.row(f.name(), d, table(d), c.resolution);
        }
    }

    auto& rep = out.add("representation.csv", {"function", "mode", "n", "p", "q", "x", "lhs", "rhs", "residual"});
    const T rx = scalar_from_string<T>(c.representation_x);
    for (const auto& f : fns) {
        for (auto n : c.representation_n) {
            const auto pt = resolve<T>(c.params, n);
            const auto r = representation_residual(f, n, rx, pt);
            rep.row(f.name(), mode_name(c.mode), n, pt.p(), pt.q(), c.representation_x,
                                             r.lhs, r.rhs, r.residual);
            out.disc.check("divided-difference representation of L(f;x) - f(px/q) [" + f.name() + "]",
                           "Theorem 3.3 (Eq 3.4)", std::to_string(n), c.representation_x, r.rhs, r.lhs);
        }
    }
}

// ----------------------------------------------------------------- bivariate

template <Scalar T> T delta_n2_literal(const T& y, std::int64_t n1, std::int64_t n2, const PQParams<T>& params1,
                                      const PQParams<T>& params2)
{
    // As displayed: q_{n1} in (p_{n2} + q y) and [n1+1] in the first denominator.
    const T& p = params2.p();
    const T& q = params2.q();
    const T a = pq_integer(n2, params2);
    const T am = pq_integer(n2 - 1, params2);
    const T b = pq_integer(n2 + 1, params2);
    const T b1 = pq_integer(n1 + 1, params2);
    const T v = to_u(y);
    return T(v * v * (p * p * q * q * (1 + y) / (p + params1.q() * y) * a * am / (b1 * b1) - 2 * a / b + 1) +
             v * a / (b * b));
}

template <Scalar T> void bivariate(const ExperimentConfig& c, Output& out)
{
    std::vector<BivariateFunction> fns;
    for (const auto& name : c.bivariate_functions) {
        fns.push_back(bivariate_from_name(name));
    }
    const auto grid = x_grid(c.grid2d);
    const PointSet E = c.lipschitz2.E.empty() ? PointSet::all_nonnegative() : PointSet::finite(c.lipschitz2.E);
    const BivariateLipschitzSpec spec{c.lipschitz2.alpha, c.alpha2, c.lipschitz2.M, E};
    spec.validate();
    const auto lip = make_lip2(spec.alpha1, spec.alpha2, spec.M);
    const bool scheduled = c.params.scheduled();

    out.add("bivariate_moments.csv", {"n1", "n2", "p1", "q1", "p2", "q2", "x", "y", "j", "printed", "oracle",
                                      "brute", "gap", "printed_gap"});
    out.add("theorem54.csv", {"function", "n1", "n2", "x", "y", "lhs", "rhs", "slack", "margin", "pass"});
    out.add("theorem55.csv", {"function", "n1", "n2", "x", "y", "lhs", "rhs", "rhs_alt", "margin", "pass"});
    out.add("remark58.csv", {"n", "p", "q", "grid_sup", "chain_middle", "chain_final", "first_link", "second_link",
                             "pass"});
    out.add("bivariate_korovkin.csv", {"n1", "n2", "sup_g0", "sup_g1", "sup_g2", "sup_g3", "g0_analytic"});
    std::vector<BivariateKorovkin> batteries(c.n_values.size());

    run_cells(out, 0, c.n_values.size(), c.threads, [&](std::size_t i, CellOut& cell) {
        const auto n = c.n_values[i];
        const BivariateParams<T> bp{n, n, resolve<T>(c.params, n), resolve<T>(c.params2, n)};
        bp.validate();
        const BivariateParams<double> bpf{n, n, resolve<double>(c.params, n), resolve<double>(c.params2, n)};

        for (int j = 0; j <= 3; ++j) {
            if (j == 3 && n < 2) {
                continue;
            }
            const BivariateOperator<T> op(make_korovkin_function(j), bp);
            for (const auto& xl : c.x_values) {
                for (const auto& yl : c.x_values) {
                    const T x = scalar_from_string<T>(xl);
                    const T y = scalar_from_string<T>(yl);
                    const T printed = bivariate_moment(j, bp, x, y, MomentVariant::PaperPrinted);
                    const T oracle = bivariate_moment(j, bp, x, y, MomentVariant::OracleConsistent);
                    const T brute = op(x, y);
                    cell.tables[0].row(n, n, bp.params1.p(), bp.params1.q(), bp.params2.p(), bp.params2.q(), xl, yl,
                                       j, printed, oracle, brute, relative_gap(oracle, brute),
                                       relative_gap(printed, oracle));
                    cell.disc.check("L(g" + std::to_string(j) + ") closed form",
                                    "Lemma 5.2(" + std::to_string(j + 1) + ")",
                                    std::to_string(n) + ";" + std::to_string(n), xl + ";" + yl, printed, oracle,
                                    "univariate moment lacks the partner's p q factor");
                }
            }
        }

        for (const auto& f : fns) {
            const auto r = theorem54_bound_check(f, bpf, grid, grid, c.modulus_resolution);
            const BoundPoint2* worst = nullptr;
            for (const auto& b : r.points) {
                cell.tables[1].row(f.name(), n, n, b.x, b.y, b.lhs, b.rhs, b.slack, b.margin, b.pass);
                if (!b.pass && (worst == nullptr || b.margin < worst->margin)) {
                    worst = &b;
                }
            }
            if (worst != nullptr) {
                cell.disc.check("bivariate rate bound [" + f.name() + "]", "Theorem 5.4", std::to_string(n) + ";" +
                                std::to_string(n), fmt(worst->x) + ";" + fmt(worst->y), worst->rhs, worst->lhs,
                                "worst violated grid point; printed = bound, oracle = |L f - f|");
            }
        }
        const auto r55 = theorem55_bound_check(spec, lip, bpf, grid, grid);
        const BoundPoint2* worst55 = nullptr;
        for (const auto& b : r55.points) {
            cell.tables[2].row(lip.name(), n, n, b.x, b.y, b.lhs, b.rhs, b.rhs_alt, b.margin, b.pass);
            if (!b.pass && (worst55 == nullptr || b.margin < worst55->margin)) {
                worst55 = &b;
            }
        }
        if (worst55 != nullptr) {
            cell.disc.check("bivariate Lipschitz bound [" + lip.name() + "]", "Theorem 5.5",
                            std::to_string(n) + ";" + std::to_string(n), fmt(worst55->x) + ";" + fmt(worst55->y),
                            worst55->rhs, worst55->lhs, "worst violated grid point");
        }

        {
            double lowest = 0.0;
            double at = 0.0;
            for (double x : x_grid(c.resolution)) {
                const double d = delta_n1(x, n, bpf.params1, MomentVariant::PaperPrinted);
                if (d < lowest) {
                    lowest = d;
                    at = x;
                }
            }
            if (lowest < 0.0) {
                cell.disc.check("delta_n1 sign", "Theorem 5.4", std::to_string(n), fmt(at), lowest,
                                delta_n1(at, n, bpf.params1, MomentVariant::OracleConsistent),
                                "displayed delta_n1 is negative at its grid minimum; bounds clamp it to 0");
            }
        }

        const auto r58 = remark58_check(n, bpf.params1, c.resolution);
        cell.tables[3].row(n, bpf.params1.p(), bpf.params1.q(), r58.grid_sup, r58.chain_middle, r58.chain_final,
                           r58.first_link, r58.second_link, r58.pass);
        if (!r58.pass) {
            cell.disc.check("sup delta_n1 <= 1/(n+1)^2", "Remark 5.8", std::to_string(n), "grid sup",
                            r58.chain_final, r58.grid_sup, "grid sup exceeds the final bound");
        }

        for (const auto& xl : c.x_values) {
            const T x = scalar_from_string<T>(xl);
            cell.disc.check("delta_n1 vs L((u(t)-u(x))^2)", "Theorem 5.4", std::to_string(n), xl,
                            delta_n1(x, n, bp.params1, MomentVariant::PaperPrinted),
                            delta_n1(x, n, bp.params1, MomentVariant::OracleConsistent));
        }

        if (scheduled) {
            const auto s1 = ParamSchedule::from_name(c.params.schedule);
            const auto s2 = ParamSchedule::from_name(c.params2.scheduled() ? c.params2.schedule : c.params.schedule);
            const auto k = bivariate_korovkin_battery(s1, s2, n, n, c.bivariate_resolution);
            batteries[i] = k;
            cell.tables[4].row(n, n, k.supnorms[0], k.supnorms[1], k.supnorms[2], k.supnorms[3], k.j0_analytic);
        }
    });

    if (scheduled) {
        auto& plot = out.add("bivariate_korovkin_plot.csv", {"series", "n", "value"});
        for (int j = 0; j < 4; ++j) {
            for (const auto& k : batteries) {
                plot.row("g" + std::to_string(j), k.n1, k.supnorms[j]);
            }
        }
    }
}

// ------------------------------------------------------------------- density

void density(const ExperimentConfig& c, Output& out)
{
    auto& dens = out.add("density.csv", {"set", "horizon", "count", "density"});
    auto& plot = out.add("density_plot.csv", {"series", "horizon", "density"});
    for (const auto& name : c.sets) {
        const auto K = index_set_from_name(name);
        for (auto h : c.horizons) {
            const auto r = natural_density(K, h);
            dens.row(name, r.horizon, r.count, r.density);
            plot.row("set:" + name, r.horizon, r.density);
        }
    }

    auto& st = out.add("stlimit.csv", {"schedule", "sequence", "limit", "eps", "horizon", "count", "density",
                                       "nonincreasing", "consistent"});
    auto& wit = out.add("stlimit_witness.csv", {"schedule", "n", "p", "q", "exceptional"});
    for (const auto& name : c.st_schedules) {
        const auto s = ParamSchedule::from_name(name);
        for (int which = 0; which < 2; ++which) {
            const std::string seq_name = which == 0 ? "p" : "q";
            auto seq = [&](std::int64_t n) {
                const auto params = s.at<double>(n);
                return which == 0 ? params.p() : params.q();
            };
            const auto r = st_limit_check(seq, 1.0, c.eps, c.horizons, c.threshold);
            for (const auto& d : r.densities) {
                st.row(name, seq_name, 1.0, c.eps, d.horizon, d.count, d.density, r.nonincreasing, r.consistent);
                plot.row("st:" + name + ":" + seq_name, d.horizon, d.density);
            }
        }
        for (std::int64_t n = c.horizons.back(); n >= 1; --n) {
            if (s.exceptional(n)) {
                const auto params = s.at<Rational>(n);
                wit.row(name, n, params.p().get_str(), params.q().get_str(), true);
                break;
            }
        }
    }
}

// ---------------------------------------------------------------- probes

template <Scalar T> T lit(long num, long den)
{
    Rational r{mpz_class(num), mpz_class(den)};
    r.canonicalize();
    if constexpr (std::same_as<T, Rational>) {
        return r;
    } else {
        return to_double(r);
    }
}

template <Scalar T> DiscrepancyReport probes(int resolution)
{
    DiscrepancyReport d;
    const auto u = make_u();

    {
        const T q = lit<T>(1, 2);
        const T x = lit<T>(1, 1);
        d.check("(p,q) operator at p = 1 vs q-operator", "Eq (1.3) vs Eq (1.2) at p = 1", "5", "1",
                bbh_q(u, 5, x, q), bbh_pq(u, 5, x, PQParams<T>(T(1), q)),
                "prefactor pq leaves a factor q at p = 1; f = u, q = 1/2");
    }

    const PQParams<T> base(lit<T>(9, 10), lit<T>(1, 2));
    const T one = lit<T>(1, 1);
    {
        const T n5 = pq_integer(5, base);
        const T n6 = pq_integer(6, base);
        const T uu = to_u(one);
        d.check("nu = 1 coefficient times u", "Theorem 2.2 (proof, nu = 1)", "5", "1",
                T(base.p() * base.q() * n5 / n6 * uu), moment_closed(1, 5, one, base, MomentVariant::OracleConsistent),
                "proof uses pq[n]/[n+1]; Lemma 2.1(2) gives p^2 q [n]/[n+1]; p = 9/10, q = 1/2");
        d.check("L_n(u^2) closed form", "Lemma 2.1(3)", "5", "1",
                moment_closed(2, 5, one, base, MomentVariant::PaperPrinted),
                brute_force_moment(2, 5, one, base), "printed p^2 q^3, summation gives p^3 q^3; p = 9/10, q = 1/2");
    }

    {
        const BivariateParams<T> bp{5, 4, PQParams<T>(lit<T>(9, 10), lit<T>(8, 10)),
                                    PQParams<T>(lit<T>(95, 100), lit<T>(7, 10))};
        const T x = lit<T>(2, 1);
        const T y = lit<T>(1, 1);
        for (int j = 1; j <= 3; ++j) {
            d.check("L(g" + std::to_string(j) + ") closed form", "Lemma 5.2(" + std::to_string(j + 1) + ")", "5;4",
                    "2;1", bivariate_moment(j, bp, x, y, MomentVariant::PaperPrinted),
                    bbh_pq_2d(make_korovkin_function(j), bp, x, y),
                    "p1 = 9/10, q1 = 4/5, p2 = 19/20, q2 = 7/10");
        }
    }

    d.check("delta_n vs L((u(t)-u(x))^2)", "Theorem 3.1", "5", "1", delta_n(one, 5, base),
            central_second_moment(one, 5, base), "p = 9/10, q = 1/2");

    {
        const PQParams<double> pf(0.9, 0.5);
        const double n5 = pq_integer(5, pf);
        const double n4 = pq_integer(4, pf);
        const double n6 = pq_integer(6, pf);
        const double pq = pf.p() * pf.q();
        const double third = 1.0 - 2.0 * pq * n5 / n6 + pq * n5 * n4 / (n6 * n6);
        double sup = 0.0;
        for (double x : x_grid(resolution)) {
            sup = std::max(sup, central_second_moment(x, 5, pf));
        }
        d.check("third term vs grid sup of L((u(t)-u(x))^2)", "Theorem 4.1", "5", "grid sup", third, sup,
                "p = 0.9, q = 0.5");
    }

    for (std::int64_t n : {2, 3, 4}) {
        const auto r = representation_residual(u, n, one, base);
        d.check("divided-difference representation of L(f;x) - f(px/q) [u]", "Theorem 3.3 (Eq 3.4)",
                std::to_string(n), "1", r.rhs, r.lhs, "p = 9/10, q = 1/2");
    }

    {
        const PQParams<double> pf(0.95, 0.9);
        const auto r = remark58_check(10, pf, resolution);
        if (!r.first_link) {
            d.check("sup delta_n1 <= p^2n q^2n/[n+1]^2", "Remark 5.8", "10", "grid sup", r.chain_middle, r.grid_sup,
                    "first link; p = 0.95, q = 0.9");
        }
        if (!r.pass) {
            d.check("sup delta_n1 <= 1/(n+1)^2", "Remark 5.8", "10", "grid sup", r.chain_final, r.grid_sup,
                    "p = 0.95, q = 0.9");
        }
    }

    {
        const PQParams<T> p1(lit<T>(95, 100), lit<T>(9, 10));
        d.check("delta_n1 vs L((u(t)-u(x))^2)", "Theorem 5.4", "10", "1",
                delta_n1(one, 10, p1, MomentVariant::PaperPrinted),
                delta_n1(one, 10, p1, MomentVariant::OracleConsistent), "p = 0.95, q = 0.9");
        const PQParams<T> pa(lit<T>(9, 10), lit<T>(8, 10));
        const PQParams<T> pb(lit<T>(95, 100), lit<T>(7, 10));
        d.check("delta_n2 as displayed vs symmetric reading", "Theorem 5.4", "5;4", "1",
                delta_n2_literal(one, 5, 4, pa, pb), delta_n2(one, 4, pb, MomentVariant::PaperPrinted),
                "displayed form mixes q_{n1} and [n1+1] into delta_n2");
    }

    {
        const PQParams<double> pf(0.95, 0.9);
        const double dd = delta_n1(1.0, 10, pf, MomentVariant::PaperPrinted);
        const double P = std::pow(pf.p() * pf.q(), 2.0);
        const double a = std::sqrt(dd);
        const double theorem = P * (P * a * a);
        const double remark = std::pow(P, 3.0) * a * a;
        d.check("E = [0,inf) bound", "Theorem 5.5 vs Remark 5.6", "10;10", "1;1", theorem, remark,
                "alpha1 = alpha2 = 1, M = 1, p = 0.95, q = 0.9 in both variables");
    }

    d.check("test function g0", "Theorem 5.1 (Eq 5.1)", "", "", 0.0, 1.0,
            "printed g0 = 0; the Korovkin set needs the constant 1");
    return d;
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory '" + dir.string() + "'");
    }
}

template <Scalar T> void dispatch(const ExperimentConfig& c, Output& out)
{
    switch (c.command) {
    case Command::Identities:
        identities<T>(c, out);
        break;
    case Command::Moments:
        moments<T>(c, out);
        break;
    case Command::Korovkin:
        korovkin<T>(c, out);
        break;
    case Command::Rates:
        rates<T>(c, out);
        break;
    case Command::Bivariate:
        bivariate<T>(c, out);
        break;
    case Command::Density:
        density(c, out);
        break;
    }
}

} // namespace

DiscrepancyReport standard_probes(ArithmeticMode mode, int resolution)
{
    return mode == ArithmeticMode::Rational ? probes<Rational>(resolution) : probes<double>(resolution);
}

RunResult run(const ExperimentConfig& config)
{
    validate(config);
    Output out;
    try {
        if (config.mode == ArithmeticMode::Rational) {
            dispatch<Rational>(config, out);
        } else {
            dispatch<double>(config, out);
        }
    } catch (const IoError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        // Inputs that are only rejected once evaluated (no exact form, a
        // negative generalized node, a failed consistency condition).
        throw ConfigError(std::string(to_string(config.command)) + ": " + e.what());
    }

    RunResult result;
    result.discrepancies = standard_probes(config.mode, config.resolution);
    result.discrepancies.append(out.disc);

    ensure_dir(config.out);
    for (const auto& [file, table] : out.tables) {
        const auto path = config.out / file;
        table.write(path);
        result.files.push_back(path);
    }
    const auto path = config.out / "discrepancies.csv";
    result.discrepancies.table().write(path);
    result.files.push_back(path);
    return result;
}

} // namespace pqbbh::harness
