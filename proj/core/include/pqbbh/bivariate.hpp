#pragma once

// The tensor-product (p,q) operator on [0, inf)^2, its moments, the
// delta_{n1}/delta_{n2} functionals and the two-variable bound checks.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pqbbh/functions.hpp"
#include "pqbbh/lipschitz.hpp"
#include "pqbbh/operators.hpp"
#include "pqbbh/statistical.hpp"

namespace pqbbh {

template <Scalar T> struct BivariateParams
{
    std::int64_t n1 = 1;
    std::int64_t n2 = 1;
    PQParams<T> params1;
    PQParams<T> params2;

    /// p1 p2 q1 q2.
    T prefactor() const { return params1.p() * params2.p() * params1.q() * params2.q(); }

    /// Throws PreconditionError for n < 1, DomainError when either pair has q >= p.
    void validate() const;
};

class BivariateFunction
{
public:
    using FloatEval = std::function<double(double, double)>;
    using ExactEval = std::function<Rational(const Rational&, const Rational&)>;
    /// (h1, h2) -> upper bound of |f(t,s) - f(x,y)| over |du| <= h1, |dv| <= h2.
    using UModulus = std::function<double(double, double)>;

    BivariateFunction(std::string name, FloatEval eval, ExactEval exact, UModulus modulus);

    const std::string& name() const { return name_; }
    double operator()(double t, double s) const { return eval_(t, s); }
    /// Throws DomainError without an exact form.
    Rational operator()(const Rational& t, const Rational& s) const;
    bool has_exact() const { return static_cast<bool>(exact_); }
    double u_modulus(double h1, double h2) const { return modulus_(h1, h2); }

private:
    std::string name_;
    FloatEval eval_;
    ExactEval exact_;
    UModulus modulus_;
};

/// g(t) h(s).
BivariateFunction make_tensor(const RealFunction& g, const RealFunction& h);

/// The Korovkin test set: g0 = 1, g1 = u(x), g2 = u(y), g3 = u(x)^2 + u(y)^2.
BivariateFunction make_korovkin_function(int j);

/// M u(t)^alpha1 u(s)^alpha2, which satisfies
/// |f(t,s) - f(x,y)| <= M (|du|^alpha1 + |dv|^alpha2).
BivariateFunction make_lip2(double alpha1, double alpha2, double M);

/// Parses g0..g3, tensor(f,g) with univariate registry names, lip(a1,a2,M).
BivariateFunction bivariate_from_name(std::string_view name);

/// Precomputed tensor operator: node values F[k1][k2] and both univariate tables.
template <Scalar T> class BivariateOperator
{
public:
    BivariateOperator(const BivariateFunction& f, const BivariateParams<T>& bp);

    T operator()(const T& x, const T& y) const;

    /// Row-major values at every (xs[i], ys[j]); computed as W1 F W2^T.
    std::vector<T> grid(std::span<const T> xs, std::span<const T> ys) const;

    const NodeWeightTable<T>& table1() const { return table1_; }
    const NodeWeightTable<T>& table2() const { return table2_; }

private:
    BivariateParams<T> bp_;
    NodeWeightTable<T> table1_;
    NodeWeightTable<T> table2_;
    std::size_t cols_;
    std::vector<T> values_;
};

template <Scalar T> T bbh_pq_2d(const BivariateFunction& f, const BivariateParams<T>& bp, const T& x, const T& y);

/// Lemma-type closed forms for j = 0..3 (f_j = g_j).  PaperPrinted gives the
/// forms as displayed; OracleConsistent multiplies the univariate moments by
/// the partner's p q.  j = 3 needs n1, n2 >= 2.
template <Scalar T>
T bivariate_moment(int j, const BivariateParams<T>& bp, const T& x, const T& y, MomentVariant variant);

/// Displayed form  u^2 (p^2 q^2 (1+x)/(p+qx) [n][n-1]/[n+1]^2 - 2[n]/[n+1] + 1) + u [n]/[n+1]^2
/// (PaperPrinted) or the univariate central second moment (OracleConsistent).
template <Scalar T> T delta_n1(const T& x, std::int64_t n1, const PQParams<T>& params1, MomentVariant variant);

/// Same functional in the second variable, read with the second variable's
/// own parameters and degree throughout.
template <Scalar T> T delta_n2(const T& y, std::int64_t n2, const PQParams<T>& params2, MomentVariant variant);

/// Grid modulus in two variables on the R x R (u,v)-grid.  Build is O(R^4).
class Modulus2Table
{
public:
    Modulus2Table(const BivariateFunction& f, int resolution);

    double operator()(double delta1, double delta2) const;

    int resolution() const { return resolution_; }
    double slack() const { return slack_; }

private:
    int resolution_;
    double slack_;
    // (lag1, |lag2|) -> prefix max, row-major R x R.
    std::vector<double> prefix_;
};

inline constexpr int kDefaultModulus2Resolution = 128;
inline constexpr int kDefaultBivariateGrid = 512;

struct BoundPoint2
{
    double x = 0.0;
    double y = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Alternate right side: the other displayed form where two exist, NaN otherwise.
    double rhs_alt = 0.0;
    double slack = 0.0;
    double margin = 0.0;
    bool pass = false;
};

struct BoundReport2
{
    std::vector<BoundPoint2> points;
    double worst_margin = 0.0;
    bool pass = true;
};

/// |L f - f| <= 4 p1^2 p2^2 q1^2 q2^2 omega2(f; sqrt(delta_n1(x)), sqrt(delta_n2(y)))
/// at every (xs[i], ys[j]).  The deltas are the displayed ones.
BoundReport2 theorem54_bound_check(const BivariateFunction& f, const BivariateParams<double>& bp,
                                   std::span<const double> xs, std::span<const double> ys,
                                   int modulus_resolution = kDefaultModulus2Resolution);

/// With P = p1 p2 q1 q2, a = delta_n1^{alpha1/2}, b = delta_n2^{alpha2/2}, dx = d(x,E)^alpha1, dy = d(y,E)^alpha2:
///   displayed:   M P (P a b + a dy + b dx + 2 dx dy)
///   E = [0,inf): M P^{4 - (alpha1+alpha2)/2} a b
/// rhs is the E = [0, inf) form when E is all of [0, inf) and the displayed
/// form otherwise; rhs_alt holds the displayed form in the first case.
BoundReport2 theorem55_bound_check(const BivariateLipschitzSpec& spec, const BivariateFunction& f,
                                   const BivariateParams<double>& bp, std::span<const double> xs,
                                   std::span<const double> ys);

struct BivariateKorovkin
{
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    /// Grid sup of |L(g_j) - g_j| for j = 0..3.
    std::array<double, 4> supnorms{};
    /// |p1 p2 q1 q2 - 1|.
    double j0_analytic = 0.0;
};

BivariateKorovkin bivariate_korovkin_battery(const ParamSchedule& schedule1, const ParamSchedule& schedule2,
                                             std::int64_t n1, std::int64_t n2,
                                             int resolution = kDefaultBivariateGrid);

/// Grid sup of the displayed delta_n1 and the two links of the printed chain
/// sup delta_n1 <= p^{2n} q^{2n} / [n+1]^2 <= 1/(n+1)^2.
struct Remark58Check
{
    std::int64_t n = 0;
    double grid_sup = 0.0;
    double chain_middle = 0.0;
    double chain_final = 0.0;
    bool first_link = false;
    bool second_link = false;
    /// grid_sup <= chain_final.
    bool pass = false;
};

Remark58Check remark58_check(std::int64_t n, const PQParams<double>& params, int resolution = kDefaultResolution);

} // namespace pqbbh
