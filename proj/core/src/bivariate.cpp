#include "pqbbh/bivariate.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "pqbbh/errors.hpp"
#include "pqbbh/rates.hpp"

namespace pqbbh {

namespace {

template <Scalar T> void canonical(T& v)
{
    if constexpr (std::same_as<T, Rational>) {
        v.canonicalize();
    }
}

// Grid sup of |g| plus its modulus at one grid step.
double sup_bound(const RealFunction& g)
{
    return sup_norm([&g](double t) { return g(t); }, kDefaultResolution) + g.u_modulus(1.0 / kDefaultResolution);
}

std::string strip(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            out.push_back(c);
        }
    }
    return out;
}

// Arguments of "head(...)" split on top-level commas.
std::optional<std::vector<std::string>> call_args(const std::string& s, std::string_view head)
{
    if (s.size() < head.size() + 2 || s.compare(0, head.size(), head) != 0 || s[head.size()] != '(' ||
        s.back() != ')') {
        return std::nullopt;
    }
    std::vector<std::string> args;
    std::string current;
    int depth = 0;
    for (std::size_t i = head.size() + 1; i + 1 < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            --depth;
        }
        if (c == ',' && depth == 0) {
            args.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    args.push_back(current);
    return args;
}

void finish(BoundReport2& report)
{
    report.pass = true;
    report.worst_margin = report.points.empty() ? 0.0 : report.points.front().margin;
    for (const auto& pt : report.points) {
        report.worst_margin = std::min(report.worst_margin, pt.margin);
        report.pass = report.pass && pt.pass;
    }
}

} // namespace

template <Scalar T> void BivariateParams<T>::validate() const
{
    if (n1 < 1 || n2 < 1) {
        throw PreconditionError("BivariateParams: n1 and n2 must be at least 1");
    }
    params1.require_strict("BivariateParams (first variable)");
    params2.require_strict("BivariateParams (second variable)");
}

template struct BivariateParams<double>;
template struct BivariateParams<Rational>;

BivariateFunction::BivariateFunction(std::string name, FloatEval eval, ExactEval exact, UModulus modulus)
    : name_(std::move(name)), eval_(std::move(eval)), exact_(std::move(exact)), modulus_(std::move(modulus))
{
}

Rational BivariateFunction::operator()(const Rational& t, const Rational& s) const
{
    if (!exact_) {
        throw DomainError("function '" + name_ + "' has no exact rational evaluation");
    }
    return exact_(t, s);
}

BivariateFunction make_tensor(const RealFunction& g, const RealFunction& h)
{
    BivariateFunction::ExactEval exact;
    if (g.has_exact() && h.has_exact()) {
        exact = [g, h](const Rational& t, const Rational& s) -> Rational { return g(t) * h(s); };
    }
    const double sg = sup_bound(g);
    const double sh = sup_bound(h);
    return BivariateFunction(
        "tensor(" + g.name() + "," + h.name() + ")", [g, h](double t, double s) { return g(t) * h(s); },
        std::move(exact),
        [g, h, sg, sh](double h1, double h2) { return g.u_modulus(h1) * sh + sg * h.u_modulus(h2); });
}

BivariateFunction make_korovkin_function(int j)
{
    switch (j) {
    case 0:
        return BivariateFunction(
            "g0", [](double, double) { return 1.0; }, [](const Rational&, const Rational&) { return Rational(1); },
            [](double, double) { return 0.0; });
    case 1:
        return BivariateFunction(
            "g1", [](double t, double) { return t / (1.0 + t); },
            [](const Rational& t, const Rational&) -> Rational { return to_u(t); },
            [](double h1, double) { return h1; });
    case 2:
        return BivariateFunction(
            "g2", [](double, double s) { return s / (1.0 + s); },
            [](const Rational&, const Rational& s) -> Rational { return to_u(s); },
            [](double, double h2) { return h2; });
    case 3:
        return BivariateFunction(
            "g3",
            [](double t, double s) {
                const double u = t / (1.0 + t);
                const double v = s / (1.0 + s);
                return u * u + v * v;
            },
            [](const Rational& t, const Rational& s) -> Rational {
                const Rational u = to_u(t);
                const Rational v = to_u(s);
                return u * u + v * v;
            },
            [](double h1, double h2) { return 2.0 * h1 + 2.0 * h2; });
    default:
        throw PreconditionError("make_korovkin_function: j must be 0..3");
    }
}

BivariateFunction make_lip2(double alpha1, double alpha2, double M)
{
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0) || !(alpha2 >= 0.0 && alpha2 <= 1.0) || !(M > 0.0)) {
        throw PreconditionError("lip: need exponents in [0, 1] and M > 0");
    }
    std::ostringstream name;
    name << "lip(" << alpha1 << ',' << alpha2 << ',' << M << ')';
    BivariateFunction::ExactEval exact;
    const bool integral = (alpha1 == 0.0 || alpha1 == 1.0) && (alpha2 == 0.0 || alpha2 == 1.0);
    if (integral) {
        const Rational rm(M);
        const auto e1 = static_cast<std::int64_t>(alpha1);
        const auto e2 = static_cast<std::int64_t>(alpha2);
        exact = [rm, e1, e2](const Rational& t, const Rational& s) -> Rational {
            return rm * ipow<Rational>(to_u(t), e1) * ipow<Rational>(to_u(s), e2);
        };
    }
    return BivariateFunction(
        name.str(),
        [alpha1, alpha2, M](double t, double s) {
            return M * std::pow(t / (1.0 + t), alpha1) * std::pow(s / (1.0 + s), alpha2);
        },
        std::move(exact),
        [alpha1, alpha2, M](double h1, double h2) { return M * (std::pow(h1, alpha1) + std::pow(h2, alpha2)); });
}

BivariateFunction bivariate_from_name(std::string_view raw)
{
    const std::string s = strip(raw);
    if (s.size() == 2 && s[0] == 'g' && s[1] >= '0' && s[1] <= '3') {
        return make_korovkin_function(s[1] - '0');
    }
    try {
        if (auto args = call_args(s, "tensor"); args && args->size() == 2) {
            return make_tensor(function_from_name((*args)[0]), function_from_name((*args)[1]));
        }
        if (auto args = call_args(s, "lip"); args && args->size() == 3) {
            return make_lip2(scalar_from_string<double>((*args)[0]), scalar_from_string<double>((*args)[1]),
                             scalar_from_string<double>((*args)[2]));
        }
    } catch (const UnknownNameError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw UnknownNameError("bad bivariate function '" + s + "': " + e.what());
    }
    throw UnknownNameError("unknown bivariate function '" + s + "'");
}

template <Scalar T>
BivariateOperator<T>::BivariateOperator(const BivariateFunction& f, const BivariateParams<T>& bp)
    : bp_(bp), table1_((bp.validate(), bp.n1), bp.params1), table2_(bp.n2, bp.params2),
      cols_(static_cast<std::size_t>(bp.n2) + 1)
{
    const auto t1 = table1_.nodes();
    const auto t2 = table2_.nodes();
    values_.resize(t1.size() * cols_);
    for (std::size_t a = 0; a < t1.size(); ++a) {
        for (std::size_t b = 0; b < cols_; ++b) {
            values_[a * cols_ + b] = f(t1[a], t2[b]);
        }
    }
}

template <Scalar T> T BivariateOperator<T>::operator()(const T& x, const T& y) const
{
    const auto w1 = table1_.basis(x);
    const auto w2 = table2_.basis(y);
    Accumulator<T> outer;
    for (std::size_t a = 0; a < w1.size(); ++a) {
        Accumulator<T> inner;
        for (std::size_t b = 0; b < cols_; ++b) {
            inner += values_[a * cols_ + b] * w2[b];
        }
        outer += w1[a] * inner.value();
    }
    T result = bp_.prefactor() * outer.value();
    canonical(result);
    return result;
}

template <Scalar T> std::vector<T> BivariateOperator<T>::grid(std::span<const T> xs, std::span<const T> ys) const
{
    const std::size_t rows = table1_.nodes().size();
    // G[a][j] = sum_b F[a][b] w2_j[b]
    std::vector<T> G(rows * ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        const auto w2 = table2_.basis(ys[j]);
        for (std::size_t a = 0; a < rows; ++a) {
            Accumulator<T> acc;
            for (std::size_t b = 0; b < cols_; ++b) {
                acc += values_[a * cols_ + b] * w2[b];
            }
            G[a * ys.size() + j] = acc.value();
        }
    }
    const T pref = bp_.prefactor();
    std::vector<T> out(xs.size() * ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto w1 = table1_.basis(xs[i]);
        for (std::size_t j = 0; j < ys.size(); ++j) {
            Accumulator<T> acc;
            for (std::size_t a = 0; a < rows; ++a) {
                acc += w1[a] * G[a * ys.size() + j];
            }
            T v = pref * acc.value();
            canonical(v);
            out[i * ys.size() + j] = v;
        }
    }
    return out;
}

template class BivariateOperator<double>;
template class BivariateOperator<Rational>;

template <Scalar T> T bbh_pq_2d(const BivariateFunction& f, const BivariateParams<T>& bp, const T& x, const T& y)
{
    if (!(x >= 0) || !(y >= 0)) {
        throw PreconditionError("bbh_pq_2d: x and y must be nonnegative");
    }
    return BivariateOperator<T>(f, bp)(x, y);
}

template <Scalar T>
T bivariate_moment(int j, const BivariateParams<T>& bp, const T& x, const T& y, MomentVariant variant)
{
    bp.validate();
    if (j == 3 && (bp.n1 < 2 || bp.n2 < 2)) {
        throw PreconditionError("bivariate_moment: j = 3 needs n1, n2 >= 2");
    }
    const T P = bp.prefactor();
    const auto& a = bp.params1;
    const auto& b = bp.params2;
    const T pq1 = a.p() * a.q();
    const T pq2 = b.p() * b.q();
    T result;
    if (variant == MomentVariant::OracleConsistent) {
        switch (j) {
        case 0:
            result = P;
            break;
        case 1:
            result = moment_closed(1, bp.n1, x, a, variant) * pq2;
            break;
        case 2:
            result = moment_closed(1, bp.n2, y, b, variant) * pq1;
            break;
        case 3:
            result = moment_closed(2, bp.n1, x, a, variant) * pq2 + moment_closed(2, bp.n2, y, b, variant) * pq1;
            break;
        default:
            throw PreconditionError("bivariate_moment: j must be 0..3");
        }
    } else {
        const T m1 = pq_integer(bp.n1, a);
        const T m1p = pq_integer(bp.n1 + 1, a);
        const T m2 = pq_integer(bp.n2, b);
        const T m2p = pq_integer(bp.n2 + 1, b);
        switch (j) {
        case 0:
            result = P;
            break;
        case 1:
            result = P * m1 / m1p * to_u(x);
            break;
        case 2:
            result = P * m2 / m2p * to_u(y);
            break;
        case 3: {
            const T c1 = pq1 * pq1 * pq1 * pq2;
            const T c2 = pq1 * pq2 * pq2 * pq2;
            result = c1 * m1 * pq_integer(bp.n1 - 1, a) / (m1p * m1p) * x * x / ((1 + x) * (a.p() + a.q() * x)) +
                     P * m1 / (m1p * m1p) * to_u(x) +
                     c2 * m2 * pq_integer(bp.n2 - 1, b) / (m2p * m2p) * y * y / ((1 + y) * (b.p() + b.q() * y)) +
                     P * m2 / m2p * to_u(y);
            break;
        }
        default:
            throw PreconditionError("bivariate_moment: j must be 0..3");
        }
    }
    canonical(result);
    return result;
}

namespace {

template <Scalar T> T delta_displayed(const T& x, std::int64_t n, const PQParams<T>& params)
{
    if (n < 1 || !(x >= 0)) {
        throw PreconditionError("delta_n1/delta_n2: need n >= 1 and x >= 0");
    }
    const T& p = params.p();
    const T& q = params.q();
    const T n0 = pq_integer(n, params);
    const T n1 = pq_integer(n + 1, params);
    const T nm = pq_integer(n - 1, params);
    const T u = to_u(x);
    T result = u * u * (p * p * q * q * (1 + x) / (p + q * x) * n0 * nm / (n1 * n1) - 2 * n0 / n1 + 1) +
               u * n0 / (n1 * n1);
    canonical(result);
    return result;
}

} // namespace

template <Scalar T> T delta_n1(const T& x, std::int64_t n1, const PQParams<T>& params1, MomentVariant variant)
{
    if (variant == MomentVariant::OracleConsistent) {
        return central_second_moment_closed(x, n1, params1);
    }
    return delta_displayed(x, n1, params1);
}

template <Scalar T> T delta_n2(const T& y, std::int64_t n2, const PQParams<T>& params2, MomentVariant variant)
{
    return delta_n1(y, n2, params2, variant);
}

Modulus2Table::Modulus2Table(const BivariateFunction& f, int resolution) : resolution_(resolution), slack_(0.0)
{
    if (resolution < 2) {
        throw PreconditionError("Modulus2Table: resolution must be at least 2");
    }
    const auto R = static_cast<std::size_t>(resolution);
    slack_ = 2.0 * f.u_modulus(1.0 / resolution, 1.0 / resolution);
    const auto xs = x_grid(resolution);
    std::vector<double> F(R * R);
    for (std::size_t i = 0; i < R; ++i) {
        for (std::size_t j = 0; j < R; ++j) {
            F[i * R + j] = f(xs[i], xs[j]);
        }
    }
    // D[m1][|m2|] = max |F[i+m1][j+m2] - F[i][j]| over both signs of m2.
    std::vector<double> D(R * R, 0.0);
    for (std::size_t m1 = 0; m1 < R; ++m1) {
        for (std::size_t m2 = 0; m2 < R; ++m2) {
            double best = 0.0;
            for (std::size_t i = 0; i + m1 < R; ++i) {
                const double* lo = &F[i * R];
                const double* hi = &F[(i + m1) * R];
                for (std::size_t j = 0; j + m2 < R; ++j) {
                    best = std::max(best, std::fabs(hi[j + m2] - lo[j]));
                    best = std::max(best, std::fabs(hi[j] - lo[j + m2]));
                }
            }
            D[m1 * R + m2] = best;
        }
    }
    prefix_ = D;
    for (std::size_t a = 0; a < R; ++a) {
        for (std::size_t b = 0; b < R; ++b) {
            double v = prefix_[a * R + b];
            if (a > 0) {
                v = std::max(v, prefix_[(a - 1) * R + b]);
            }
            if (b > 0) {
                v = std::max(v, prefix_[a * R + b - 1]);
            }
            prefix_[a * R + b] = v;
        }
    }
}

double Modulus2Table::operator()(double delta1, double delta2) const
{
    if (!(delta1 >= 0.0) || !(delta2 >= 0.0)) {
        throw PreconditionError("omega2: deltas must be nonnegative");
    }
    const double top = static_cast<double>(resolution_ - 1);
    const auto a = static_cast<std::size_t>(std::min(std::floor(delta1 * resolution_ + 1e-9), top));
    const auto b = static_cast<std::size_t>(std::min(std::floor(delta2 * resolution_ + 1e-9), top));
    return prefix_[a * static_cast<std::size_t>(resolution_) + b];
}

BoundReport2 theorem54_bound_check(const BivariateFunction& f, const BivariateParams<double>& bp,
                                   std::span<const double> xs, std::span<const double> ys, int modulus_resolution)
{
    const BivariateOperator<double> op(f, bp);
    const Modulus2Table omega(f, modulus_resolution);
    const auto values = op.grid(xs, ys);
    const double P = bp.prefactor();
    BoundReport2 report;
    report.points.reserve(xs.size() * ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double d1 = std::max(0.0, delta_n1(xs[i], bp.n1, bp.params1, MomentVariant::PaperPrinted));
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double d2 = std::max(0.0, delta_n2(ys[j], bp.n2, bp.params2, MomentVariant::PaperPrinted));
            BoundPoint2 pt;
            pt.x = xs[i];
            pt.y = ys[j];
            pt.lhs = std::fabs(values[i * ys.size() + j] - f(xs[i], ys[j]));
            pt.rhs = 4.0 * P * P * omega(std::sqrt(d1), std::sqrt(d2));
            pt.rhs_alt = std::numeric_limits<double>::quiet_NaN();
            pt.slack = omega.slack();
            pt.margin = pt.rhs - pt.lhs;
            pt.pass = pt.margin >= -pt.slack;
            report.points.push_back(pt);
        }
    }
    finish(report);
    return report;
}

BoundReport2 theorem55_bound_check(const BivariateLipschitzSpec& spec, const BivariateFunction& f,
                                   const BivariateParams<double>& bp, std::span<const double> xs,
                                   std::span<const double> ys)
{
    spec.validate();
    const BivariateOperator<double> op(f, bp);
    const auto values = op.grid(xs, ys);
    const double P = bp.prefactor();
    const double power = 4.0 - (spec.alpha1 + spec.alpha2) / 2.0;
    BoundReport2 report;
    report.points.reserve(xs.size() * ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double a = std::pow(std::max(0.0, delta_n1(xs[i], bp.n1, bp.params1, MomentVariant::PaperPrinted)),
                                  spec.alpha1 / 2.0);
        const double dx = std::pow(distance_to_set(xs[i], spec.E), spec.alpha1);
        for (std::size_t j = 0; j < ys.size(); ++j) {
            const double b = std::pow(
                std::max(0.0, delta_n2(ys[j], bp.n2, bp.params2, MomentVariant::PaperPrinted)), spec.alpha2 / 2.0);
            const double dy = std::pow(distance_to_set(ys[j], spec.E), spec.alpha2);
            const double displayed = spec.M * P * (P * a * b + a * dy + b * dx + 2.0 * dx * dy);
            BoundPoint2 pt;
            pt.x = xs[i];
            pt.y = ys[j];
            pt.lhs = std::fabs(values[i * ys.size() + j] - f(xs[i], ys[j]));
            if (spec.E.is_all()) {
                pt.rhs = spec.M * std::pow(P, power) * a * b;
                pt.rhs_alt = displayed;
            } else {
                pt.rhs = displayed;
                pt.rhs_alt = std::numeric_limits<double>::quiet_NaN();
            }
            pt.slack = 1e-12;
            pt.margin = pt.rhs - pt.lhs;
            pt.pass = pt.margin >= -pt.slack;
            report.points.push_back(pt);
        }
    }
    finish(report);
    return report;
}

BivariateKorovkin bivariate_korovkin_battery(const ParamSchedule& schedule1, const ParamSchedule& schedule2,
                                             std::int64_t n1, std::int64_t n2, int resolution)
{
    const BivariateParams<double> bp{n1, n2, schedule1.at<double>(n1), schedule2.at<double>(n2)};
    const auto xs = x_grid(resolution);
    BivariateKorovkin out;
    out.n1 = n1;
    out.n2 = n2;
    out.j0_analytic = std::fabs(bp.prefactor() - 1.0);
    for (int j = 0; j < 4; ++j) {
        const auto g = make_korovkin_function(j);
        const auto values = BivariateOperator<double>(g, bp).grid(xs, xs);
        double best = 0.0;
        for (std::size_t a = 0; a < xs.size(); ++a) {
            for (std::size_t b = 0; b < xs.size(); ++b) {
                best = std::max(best, std::fabs(values[a * xs.size() + b] - g(xs[a], xs[b])));
            }
        }
        out.supnorms[static_cast<std::size_t>(j)] = best;
    }
    return out;
}

Remark58Check remark58_check(std::int64_t n, const PQParams<double>& params, int resolution)
{
    Remark58Check out;
    out.n = n;
    for (double x : x_grid(resolution)) {
        out.grid_sup = std::max(out.grid_sup, delta_n1(x, n, params, MomentVariant::PaperPrinted));
    }
    const double n1 = pq_integer(n + 1, params);
    const double pq_n = std::pow(params.p() * params.q(), static_cast<double>(n));
    out.chain_middle = pq_n * pq_n / (n1 * n1);
    out.chain_final = 1.0 / (static_cast<double>(n + 1) * static_cast<double>(n + 1));
    out.first_link = out.grid_sup <= out.chain_middle;
    out.second_link = out.chain_middle <= out.chain_final;
    out.pass = out.grid_sup <= out.chain_final;
    return out;
}

#define PQBBH_INSTANTIATE(T)                                                                                   \
    template T bbh_pq_2d<T>(const BivariateFunction&, const BivariateParams<T>&, const T&, const T&);          \
    template T bivariate_moment<T>(int, const BivariateParams<T>&, const T&, const T&, MomentVariant);         \
    template T delta_n1<T>(const T&, std::int64_t, const PQParams<T>&, MomentVariant);                         \
    template T delta_n2<T>(const T&, std::int64_t, const PQParams<T>&, MomentVariant);

PQBBH_INSTANTIATE(double)
PQBBH_INSTANTIATE(Rational)

#undef PQBBH_INSTANTIATE

} // namespace pqbbh
