#pragma once

// Moduli of continuity, the delta_n rate functional and the pointwise bound
// checks built on them.  Every sup is taken over the uniform grid u_i = i/R,
// i = 0..R-1, in u = x/(1+x), mapped back through x = u/(1-u).

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pqbbh/functions.hpp"
#include "pqbbh/lipschitz.hpp"
#include "pqbbh/operators.hpp"
#include "pqbbh/pq_core.hpp"

namespace pqbbh {

inline constexpr int kDefaultResolution = 4096;

/// u_i = i/R for i = 0..R-1.
std::vector<double> u_grid(int resolution);

/// x_i = u_i/(1-u_i) for the same grid.
std::vector<double> x_grid(int resolution);

/// Lag table for the grid modulus of one function: after an O(R^2) build,
/// value(delta) is the largest |f(t) - f(x)| over grid pairs with |u(t) - u(x)| <= delta.
class ModulusTable
{
public:
    ModulusTable(const RealFunction& f, int resolution);

    double operator()(double delta) const;

    int resolution() const { return resolution_; }

    /// 2 * (u-modulus bound at 1/R), the allowance for sampling the sup on a grid.
    double slack() const { return slack_; }

private:
    int resolution_;
    double slack_;
    std::vector<double> prefix_max_;
};

struct ModulusEstimate
{
    std::string function;
    double delta = 0.0;
    double value = 0.0;
    int grid_resolution = 0;
};

double modulus_tilde(const RealFunction& f, double delta, int resolution = kDefaultResolution);

ModulusEstimate modulus_estimate(const RealFunction& f, double delta, int resolution = kDefaultResolution);

/// The rate functional exactly as displayed:
///   u^2 (p^2 q^3 [n][n-1]/[n+1]^2 (1+x)/(p+qx) - 2pq[n]/[n+1] + 1) + p^{n+2} q [n]/[n+1]^2 u,  u = x/(1+x).
template <Scalar T> T delta_n(const T& x, std::int64_t n, const PQParams<T>& params);

/// L((u(t) - u(x))^2; x) by direct summation over the operator's nodes.
template <Scalar T> T central_second_moment(const T& x, std::int64_t n, const PQParams<T>& params);

/// The same moment from the oracle-consistent closed forms:
///   M2 - 2 u M1 + pq u^2.
template <Scalar T> T central_second_moment_closed(const T& x, std::int64_t n, const PQParams<T>& params);

/// delta_n - central_second_moment in closed form:
///   (1-p) p^2 q^3 [n][n-1]/[n+1]^2 u^2 (1+x)/(p+qx) + u^2 ((1 - pq) - 2pq(1-p)[n]/[n+1]).
/// Nonnegative, so the displayed functional dominates the true second moment.
template <Scalar T> T delta_n_excess(const T& x, std::int64_t n, const PQParams<T>& params);

struct BoundPoint
{
    double x = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double slack = 0.0;
    /// rhs - lhs.
    double margin = 0.0;
    bool pass = false;
};

struct BoundReport
{
    std::vector<BoundPoint> points;
    double worst_margin = 0.0;
    bool pass = true;
};

/// |L(f;x) - f(x)| <= 2 modulus_tilde(f, sqrt(delta_n(x))) at each x; a point
/// passes when margin >= -slack with slack = 2 * modulus_u(f, 1/R).
BoundReport rate_bound_check(const RealFunction& f, std::int64_t n, const PQParams<double>& params,
                             std::span<const double> xs, int resolution = kDefaultResolution);

/// M (delta_n(x)^{alpha/2} + 2 d(x,E)^alpha).
double theorem32_bound(const LipschitzSpec& spec, std::int64_t n, const PQParams<double>& params, double x);

/// M delta_n(x)^{alpha/2}, the E = [0, inf) case.
double corollary31_bound(const LipschitzSpec& spec, std::int64_t n, const PQParams<double>& params, double x);

/// |L(f;x) - f(x)| <= theorem32_bound at each x, with a 1e-12 absolute allowance.
BoundReport theorem32_bound_check(const LipschitzSpec& spec, const RealFunction& f, std::int64_t n,
                                  const PQParams<double>& params, std::span<const double> xs);

/// [a;b;f] for two points, {a;b;c;f} for three.  Throws PreconditionError on
/// coincident points or a wrong count.
template <Scalar T> T divided_difference(std::span<const T> points, const RealFunction& f);

template <Scalar T> struct RepresentationResidual
{
    /// L(f;x) - f(px/q).
    T lhs;
    /// The displayed divided-difference expansion.
    T rhs;
    /// |lhs - rhs|.
    T residual;
};

/// Evaluates both sides of the divided-difference representation of L(f;x) - f(px/q).
/// Throws DomainError for x <= 0 or x equal to a node t_{n,k}.
template <Scalar T>
RepresentationResidual<T> representation_residual(const RealFunction& f, std::int64_t n, const T& x,
                                                  const PQParams<T>& params);

/// max |g(x_i)| over the x-grid of the given resolution.
double sup_norm(const std::function<double(double)>& g, int resolution = kDefaultResolution);

} // namespace pqbbh
