#pragma once

// Natural density, finite-horizon statistical limits, (p_n, q_n) schedules and
// the univariate Korovkin battery.

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pqbbh/pq_core.hpp"
#include "pqbbh/rates.hpp"

namespace pqbbh {

using IndexPredicate = std::function<bool(std::int64_t)>;

bool is_perfect_square(std::int64_t n);

/// "squares", "evens", "all" or "none".
IndexPredicate index_set_from_name(std::string_view name);

struct DensityReport
{
    std::int64_t horizon = 0;
    std::int64_t count = 0;
    /// count / horizon.
    double density = 0.0;
};

/// Counts members of K in [1, horizon].
DensityReport natural_density(const IndexPredicate& K, std::int64_t horizon);

inline constexpr double kDefaultDensityThreshold = 0.005;

struct StLimitReport
{
    std::vector<DensityReport> densities;
    bool nonincreasing = true;
    double threshold = kDefaultDensityThreshold;
    /// nonincreasing and the last density is at most threshold.
    bool consistent = false;
};

/// Empirical density of {k <= N : |seq(k) - l| >= eps} at each horizon N.
/// Horizons must be positive and strictly increasing.
StLimitReport st_limit_check(const std::function<double(std::int64_t)>& seq, double l, double eps,
                             std::span<const std::int64_t> horizons,
                             double threshold = kDefaultDensityThreshold);

/// A named rule n -> (p_n, q_n) with 0 < q_n < p_n <= 1.
///   smooth:   p_n = 1 - 1/(2(n+1)), q_n = 1 - 1/(n+1)
///   statonly: as smooth, except (1/2, 1/4) when n is a perfect square
class ParamSchedule
{
public:
    /// Throws UnknownNameError for an unregistered rule.
    static ParamSchedule from_name(std::string_view rule);

    const std::string& rule() const { return rule_; }

    /// Membership in the exceptional (density-zero) set.
    bool exceptional(std::int64_t n) const;

    template <Scalar T> PQParams<T> at(std::int64_t n) const;

private:
    explicit ParamSchedule(std::string rule) : rule_(std::move(rule)) {}

    std::string rule_;
};

std::vector<std::string> schedule_names();

template <Scalar T> PQParams<T> schedule(std::string_view rule, std::int64_t n)
{
    return ParamSchedule::from_name(rule).at<T>(n);
}

struct KorovkinDiagnostics
{
    std::int64_t n = 0;
    double p = 0.0;
    double q = 0.0;
    /// Grid sup of |L(u^nu) - u^nu| for nu = 0, 1, 2.
    std::array<double, 3> supnorms{};
    double alpha_n = 0.0;
    double beta_n = 0.0;
    double gamma_n = 0.0;
    /// |pq - 1|.
    double nu0_analytic = 0.0;
    /// (1 - p^2 q [n]/[n+1]) * max grid u, from the first moment.
    double nu1_analytic = 0.0;
    /// (1 - p q [n]/[n+1]) * max grid u, the coefficient written in the convergence proof.
    double nu1_proof = 0.0;
    double max_grid_u = 0.0;
};

/// Requires n >= 2.
KorovkinDiagnostics korovkin_battery(const ParamSchedule& schedule, std::int64_t n,
                                     int resolution = kDefaultResolution);

} // namespace pqbbh
