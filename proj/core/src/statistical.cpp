#include "pqbbh/statistical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pqbbh/errors.hpp"
#include "pqbbh/operators.hpp"

namespace pqbbh {

bool is_perfect_square(std::int64_t n)
{
    if (n < 0) {
        return false;
    }
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) {
        --r;
    }
    while ((r + 1) * (r + 1) <= n) {
        ++r;
    }
    return r * r == n;
}

IndexPredicate index_set_from_name(std::string_view name)
{
    if (name == "squares") {
        return is_perfect_square;
    }
    if (name == "evens") {
        return [](std::int64_t k) { return k % 2 == 0; };
    }
    if (name == "all") {
        return [](std::int64_t) { return true; };
    }
    if (name == "none") {
        return [](std::int64_t) { return false; };
    }
    throw UnknownNameError("unknown index set '" + std::string(name) + "'");
}

DensityReport natural_density(const IndexPredicate& K, std::int64_t horizon)
{
    if (horizon < 1) {
        throw PreconditionError("natural_density: horizon must be at least 1");
    }
    std::int64_t count = 0;
    for (std::int64_t k = 1; k <= horizon; ++k) {
        if (K(k)) {
            ++count;
        }
    }
    return {horizon, count, static_cast<double>(count) / static_cast<double>(horizon)};
}

StLimitReport st_limit_check(const std::function<double(std::int64_t)>& seq, double l, double eps,
                             std::span<const std::int64_t> horizons, double threshold)
{
    if (!(eps > 0.0)) {
        throw PreconditionError("st_limit_check: eps must be positive");
    }
    if (horizons.empty()) {
        throw PreconditionError("st_limit_check: need at least one horizon");
    }
    for (std::size_t i = 0; i < horizons.size(); ++i) {
        if (horizons[i] < 1 || (i > 0 && horizons[i] <= horizons[i - 1])) {
            throw PreconditionError("st_limit_check: horizons must be positive and increasing");
        }
    }
    StLimitReport report;
    report.threshold = threshold;
    std::int64_t count = 0;
    std::int64_t k = 1;
    for (std::int64_t horizon : horizons) {
        for (; k <= horizon; ++k) {
            if (std::fabs(seq(k) - l) >= eps) {
                ++count;
            }
        }
        report.densities.push_back({horizon, count, static_cast<double>(count) / static_cast<double>(horizon)});
    }
    for (std::size_t i = 1; i < report.densities.size(); ++i) {
        if (report.densities[i].density > report.densities[i - 1].density) {
            report.nonincreasing = false;
        }
    }
    report.consistent = report.nonincreasing && report.densities.back().density <= threshold;
    return report;
}

ParamSchedule ParamSchedule::from_name(std::string_view rule)
{
    if (rule == "smooth" || rule == "statonly") {
        return ParamSchedule(std::string(rule));
    }
    throw UnknownNameError("unknown schedule '" + std::string(rule) + "'");
}

bool ParamSchedule::exceptional(std::int64_t n) const
{
    return rule_ == "statonly" && is_perfect_square(n);
}

template <Scalar T> PQParams<T> ParamSchedule::at(std::int64_t n) const
{
    if (n < 1) {
        throw PreconditionError("schedule: n must be at least 1");
    }
    if (exceptional(n)) {
        if constexpr (std::same_as<T, Rational>) {
            return PQParams<T>(Rational(1, 2), Rational(1, 4));
        } else {
            return PQParams<T>(0.5, 0.25);
        }
    }
    if constexpr (std::same_as<T, Rational>) {
        const mpz_class m(static_cast<long>(n));
        Rational p(mpz_class(2 * m + 1), mpz_class(2 * m + 2));
        Rational q(m, mpz_class(m + 1));
        p.canonicalize();
        q.canonicalize();
        return PQParams<T>(p, q);
    } else {
        const double nd = static_cast<double>(n);
        // One division of exact integers: the nearest double to the rational value.
        return PQParams<T>((2.0 * nd + 1.0) / (2.0 * nd + 2.0), nd / (nd + 1.0));
    }
}

template PQParams<double> ParamSchedule::at<double>(std::int64_t) const;
template PQParams<Rational> ParamSchedule::at<Rational>(std::int64_t) const;

std::vector<std::string> schedule_names()
{
    return {"smooth", "statonly"};
}

KorovkinDiagnostics korovkin_battery(const ParamSchedule& schedule, std::int64_t n, int resolution)
{
    if (n < 2) {
        throw PreconditionError("korovkin_battery: n must be at least 2");
    }
    const auto params = schedule.at<double>(n);
    const NodeWeightTable<double> table(n, params);
    const double p = params.p();
    const double q = params.q();

    std::array<std::vector<double>, 3> values;
    for (int nu = 0; nu < 3; ++nu) {
        const auto f = make_upow(nu);
        values[nu].resize(table.nodes().size());
        for (std::size_t k = 0; k < table.nodes().size(); ++k) {
            values[nu][k] = f(table.nodes()[k]);
        }
    }

    KorovkinDiagnostics d;
    d.n = n;
    d.p = p;
    d.q = q;
    const auto xs = x_grid(resolution);
    for (double x : xs) {
        const double u = to_u(x);
        const auto basis = table.basis(x);
        for (int nu = 0; nu < 3; ++nu) {
            CompensatedSum acc;
            for (std::size_t k = 0; k < basis.size(); ++k) {
                acc += values[nu][k] * basis[k];
            }
            const double diff = p * q * acc.value() - std::pow(u, nu);
            d.supnorms[nu] = std::max(d.supnorms[nu], std::fabs(diff));
        }
    }

    const double n0 = pq_integer(n, params);
    const double n1 = pq_integer(n + 1, params);
    const double pn = std::pow(p, static_cast<double>(n));
    d.alpha_n = 1.0 - p * p;
    d.beta_n = pn * p * p * (1.0 / n1 - pn / (n1 * n1));
    d.gamma_n = pn * p * (q / n1 - (p * p + pn * q) / (n1 * n1));
    d.max_grid_u = static_cast<double>(resolution - 1) / resolution;
    d.nu0_analytic = std::fabs(p * q - 1.0);
    d.nu1_analytic = (1.0 - p * p * q * n0 / n1) * d.max_grid_u;
    d.nu1_proof = (1.0 - p * q * n0 / n1) * d.max_grid_u;
    return d;
}

} // namespace pqbbh
