#pragma once

#include <span>
#include <vector>

#include "pqbbh/functions.hpp"

namespace pqbbh {

/// The set E in the Lipschitz-type maximal space: a finite set of points or all of [0, inf).
class PointSet
{
public:
    static PointSet all_nonnegative() { return PointSet(true, {}); }
    /// Throws PreconditionError when points is empty or has a negative entry.
    static PointSet finite(std::vector<double> points);

    bool is_all() const { return all_; }
    std::span<const double> points() const { return points_; }

private:
    PointSet(bool all, std::vector<double> points) : all_(all), points_(std::move(points)) {}

    bool all_;
    std::vector<double> points_;
};

/// inf over y in E of |x - y|; 0 for E = [0, inf).
double distance_to_set(double x, const PointSet& E);

/// f in W_{alpha,E}: |f(t) - f(y)| <= M |u(t) - u(y)|^alpha for t >= 0, y in E.
struct LipschitzSpec
{
    double alpha = 1.0;
    double M = 1.0;
    PointSet E = PointSet::all_nonnegative();

    /// Throws PreconditionError unless 0 < alpha <= 1 and M > 0.
    void validate() const;
};

struct LipschitzMembership
{
    /// Largest sampled ratio |f(t) - f(y)| / |u(t) - u(y)|^alpha.
    double estimated_constant = 0.0;
    bool member = false;
};

/// Samples t on the uniform u-grid of the given resolution (and y on the same
/// grid when E is all of [0, inf)).  Membership allows a relative tolerance of 1e-9.
LipschitzMembership lipschitz_membership(const LipschitzSpec& spec, const RealFunction& f, int resolution);

/// Two-variable analogue with exponents alpha1, alpha2 on E x E.
struct BivariateLipschitzSpec
{
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double M = 1.0;
    PointSet E = PointSet::all_nonnegative();

    void validate() const;
};

} // namespace pqbbh
