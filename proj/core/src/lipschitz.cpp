#include "pqbbh/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pqbbh/errors.hpp"

namespace pqbbh {

PointSet PointSet::finite(std::vector<double> points)
{
    if (points.empty()) {
        throw PreconditionError("PointSet: E must be nonempty");
    }
    for (double y : points) {
        if (!(y >= 0.0) || !std::isfinite(y)) {
            throw PreconditionError("PointSet: points must be finite and nonnegative");
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return PointSet(false, std::move(points));
}

double distance_to_set(double x, const PointSet& E)
{
    if (E.is_all()) {
        return 0.0;
    }
    const auto pts = E.points();
    if (pts.empty()) {
        throw PreconditionError("distance_to_set: E must be nonempty");
    }
    double best = std::numeric_limits<double>::infinity();
    for (double y : pts) {
        best = std::min(best, std::fabs(x - y));
    }
    return best;
}

void LipschitzSpec::validate() const
{
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw PreconditionError("LipschitzSpec: alpha must lie in (0, 1]");
    }
    if (!(M > 0.0)) {
        throw PreconditionError("LipschitzSpec: M must be positive");
    }
}

void BivariateLipschitzSpec::validate() const
{
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0) || !(alpha2 >= 0.0 && alpha2 <= 1.0)) {
        throw PreconditionError("BivariateLipschitzSpec: exponents must lie in [0, 1]");
    }
    if (!(M > 0.0)) {
        throw PreconditionError("BivariateLipschitzSpec: M must be positive");
    }
}

LipschitzMembership lipschitz_membership(const LipschitzSpec& spec, const RealFunction& f, int resolution)
{
    spec.validate();
    if (resolution < 2) {
        throw PreconditionError("lipschitz_membership: resolution must be at least 2");
    }
    std::vector<double> us(static_cast<std::size_t>(resolution));
    std::vector<double> fs(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        us[i] = static_cast<double>(i) / resolution;
        fs[i] = f(us[i] / (1.0 - us[i]));
    }
    std::vector<double> anchors_u;
    std::vector<double> anchors_f;
    if (spec.E.is_all()) {
        anchors_u = us;
        anchors_f = fs;
    } else {
        for (double y : spec.E.points()) {
            anchors_u.push_back(y / (1.0 + y));
            anchors_f.push_back(f(y));
        }
    }
    double worst = 0.0;
    for (std::size_t a = 0; a < anchors_u.size(); ++a) {
        for (std::size_t i = 0; i < us.size(); ++i) {
            const double du = std::fabs(us[i] - anchors_u[a]);
            if (du == 0.0) {
                continue;
            }
            worst = std::max(worst, std::fabs(fs[i] - anchors_f[a]) / std::pow(du, spec.alpha));
        }
    }
    return {worst, worst <= spec.M * (1.0 + 1e-9)};
}

} // namespace pqbbh
