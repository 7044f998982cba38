#include <doctest.h>

#include <cmath>
#include <random>

#include "naive_oracle.hpp"
#include "pqbbh/errors.hpp"
#include "pqbbh/rates.hpp"

using namespace pqbbh;
using naive::frac;

TEST_CASE("grids")
{
    const auto us = u_grid(16);
    const auto xs = x_grid(16);
    REQUIRE(us.size() == 16);
    CHECK(us.front() == 0.0);
    CHECK(us.back() == 15.0 / 16.0);
    CHECK(xs.back() == doctest::Approx(15.0));
    CHECK_THROWS_AS(u_grid(1), PreconditionError);
}

TEST_CASE("modulus of continuity")
{
    const auto u = make_u();
    CHECK(modulus_tilde(u, 0.0) == 0.0);
    CHECK(modulus_tilde(make_constant(frac(7, 3)), 0.4) == 0.0);
    CHECK(std::fabs(modulus_tilde(u, 0.3) - 0.3) <= 2.0 / kDefaultResolution);
    CHECK_THROWS_AS(modulus_tilde(u, -0.1), PreconditionError);

    const auto est = modulus_estimate(make_sinu(), 0.25, 512);
    CHECK(est.function == "sinu");
    CHECK(est.grid_resolution == 512);

    for (const char* name : {"u2", "sinu", "expneg", "lip(0.5,1)"}) {
        const auto f = function_from_name(name);
        const ModulusTable table(f, 1024);
        double prev = 0.0;
        for (double d = 0.0; d <= 1.0; d += 0.01) {
            const double v = table(d);
            CHECK(v >= prev);
            prev = v;
        }
        CHECK(table(0.0) == 0.0);
        for (double a : {0.05, 0.1, 0.3}) {
            for (double b : {0.02, 0.2}) {
                CHECK(table(a + b) <= table(a) + table(b) + table.slack());
            }
        }
    }
}

TEST_CASE("delta_n")
{
    const PQParams<Rational> r(frac(9, 10), frac(8, 10));
    CHECK(delta_n(Rational(0), 5, r) == 0);
    CHECK(delta_n(Rational(1), 5, r) == Rational(mpz_class("558160767061"), mpz_class("7252087420900")));
    CHECK(delta_n(1.0, 5, to_float(r)) == doctest::Approx(0.076965532082862151).epsilon(1e-14));

    double prev = 1e9;
    for (std::int64_t n : {5, 20, 80, 320, 1280}) {
        const double nd = static_cast<double>(n);
        const PQParams<double> s(1.0 - 1.0 / (2.0 * (nd + 1.0)), 1.0 - 1.0 / (nd + 1.0));
        const double v = delta_n(1.0, n, s);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("delta_n dominates the second central moment")
{
    std::mt19937_64 rng(31);
    for (int t = 0; t < 25; ++t) {
        const auto tr = naive::random_triple(rng);
        const PQParams<Rational> r(tr.p, tr.q);
        for (std::int64_t n = 1; n <= 9; ++n) {
            const Rational moment = central_second_moment(tr.x, n, r);
            const Rational ux = naive::u(tr.x);
            const Rational direct = naive::L(
                [&](const naive::Q& s) { return naive::Q((naive::u(s) - ux) * (naive::u(s) - ux)); }, n, tr.x,
                tr.p, tr.q);
            CHECK(moment == direct);
            CHECK(central_second_moment_closed(tr.x, n, r) == moment);
            CHECK(delta_n_excess(tr.x, n, r) == Rational(delta_n(tr.x, n, r) - moment));
            CHECK(delta_n_excess(tr.x, n, r) >= 0);
            CHECK(delta_n(tr.x, n, r) >= 0);
        }
    }
}

TEST_CASE("rate bound, f = u")
{
    const PQParams<double> params(0.95, 0.9);
    const std::vector<double> xs = {0.0, 0.5, 1.0, 2.0, 5.0};
    const auto report = rate_bound_check(make_u(), 10, params, xs);
    CHECK(report.pass);
    for (const auto& pt : report.points) {
        CHECK(pt.margin >= 0.0);
        CHECK(pt.rhs == doctest::Approx(2.0 * std::sqrt(delta_n(pt.x, 10, params))).epsilon(1e-3));
    }
}

TEST_CASE("rate bound, f = const(1) shows the prefactor")
{
    const PQParams<double> params(0.95, 0.9);
    const std::vector<double> xs = {0.0, 1.0};
    const auto report = rate_bound_check(make_constant(Rational(1)), 10, params, xs);
    CHECK(report.points[0].lhs == doctest::Approx(1.0 - 0.95 * 0.9));
    CHECK(report.points[0].rhs == 0.0);
    CHECK_FALSE(report.pass);
}

TEST_CASE("distance to E")
{
    CHECK(distance_to_set(2.0, PointSet::finite({1.0, 3.0})) == 1.0);
    CHECK(distance_to_set(7.0, PointSet::all_nonnegative()) == 0.0);
    CHECK(distance_to_set(5.0, PointSet::finite({0.0})) == 5.0);
    CHECK_THROWS_AS(PointSet::finite({}), PreconditionError);
    CHECK_THROWS_AS(PointSet::finite({-1.0}), PreconditionError);
}

TEST_CASE("Lipschitz-type bounds")
{
    const PQParams<double> params(0.95, 0.9);
    const auto xs = x_grid(256);

    const LipschitzSpec one{1.0, 1.0, PointSet::all_nonnegative()};
    const auto r1 = theorem32_bound_check(one, make_lip(1.0, 1.0), 10, params, xs);
    CHECK(r1.pass);
    for (const auto& pt : r1.points) {
        CHECK(pt.rhs == doctest::Approx(std::sqrt(delta_n(pt.x, 10, params))));
        CHECK(theorem32_bound(one, 10, params, pt.x) == corollary31_bound(one, 10, params, pt.x));
    }

    const LipschitzSpec half{0.5, 1.0, PointSet::all_nonnegative()};
    const auto f = make_lip(0.5, 1.0);
    CHECK(lipschitz_membership(half, f, 256).member);
    CHECK_FALSE(lipschitz_membership(one, f, 256).member);
    CHECK(theorem32_bound_check(half, f, 20, params, xs).pass);

    const LipschitzSpec finite{0.5, 1.0, PointSet::finite({1.0, 3.0})};
    CHECK(theorem32_bound(finite, 20, params, 3.0) == doctest::Approx(std::pow(delta_n(3.0, 20, params), 0.25)));
    CHECK(theorem32_bound(finite, 20, params, 2.0) >
          theorem32_bound(finite, 20, params, 3.0) + 1.9);
    CHECK_THROWS_AS((LipschitzSpec{1.5, 1.0}.validate()), PreconditionError);
}

TEST_CASE("divided differences")
{
    const RealFunction sq("t^2", [](double t) { return t * t; }, [](const Rational& t) { return Rational(t * t); },
                          [](double) { return 1.0; });
    const RealFunction lin("3t+1", [](double t) { return 3 * t + 1; },
                           [](const Rational& t) { return Rational(3 * t + 1); }, [](double) { return 1.0; });
    const std::vector<Rational> ab = {Rational(2), Rational(5)};
    CHECK(divided_difference<Rational>(ab, sq) == 7);
    const std::vector<Rational> abc = {Rational(1), Rational(4), frac(9, 2)};
    CHECK(divided_difference<Rational>(abc, lin) == 0);
    const std::vector<Rational> one_two = {Rational(1), Rational(2)};
    CHECK(divided_difference<Rational>(one_two, make_u()) == frac(1, 6));
    const std::vector<double> same = {1.0, 1.0};
    CHECK_THROWS_AS(divided_difference<double>(same, make_u()), PreconditionError);
}

TEST_CASE("representation residuals")
{
    const PQParams<Rational> r(frac(9, 10), frac(1, 2));
    const auto u = make_u();

    const auto r2 = representation_residual(u, 2, Rational(1), r);
    CHECK(r2.lhs == frac(-9621, 21140));
    CHECK(r2.rhs == frac(1105, 5488));
    CHECK(r2.residual == frac(2719991, 4143440));

    const auto r3 = representation_residual(u, 3, Rational(1), r);
    CHECK(r3.lhs == frac(-25929, 59360));
    CHECK(r3.rhs == Rational(mpz_class("15030663335"), mpz_class("65177968576")));

    const auto r4 = representation_residual(u, 4, Rational(1), r);
    CHECK(r4.lhs == frac(-209394, 489335));
    CHECK(r4.rhs == Rational(mpz_class("24324403959270095"), mpz_class("111172887796648832")));

    const auto sq = representation_residual(make_u_squared(), 3, Rational(2), r);
    CHECK(sq.residual == Rational(mpz_class("23368580125693959"), mpz_class("30649497443791520")));

    const auto c = representation_residual(make_constant(Rational(1)), 3, Rational(2), r);
    CHECK(c.rhs == 0);
    CHECK(c.residual == 1 - frac(9, 20));

    CHECK_THROWS_AS(representation_residual(u, 3, Rational(0), r), DomainError);
    const auto fr = representation_residual(u, 2, 1.0, to_float(r));
    CHECK(fr.residual == doctest::Approx(to_double(r2.residual)).epsilon(1e-12));
}

TEST_CASE("sup norm")
{
    CHECK(sup_norm([](double) { return -2.5; }, 64) == 2.5);
    CHECK(sup_norm([](double x) { return x / (1 + x); }, 64) == doctest::Approx(63.0 / 64.0));
    const PQParams<double> params(0.95, 0.9);
    const double c = 0.95 * 0.95 * 0.9 * pq_integer(10, params) / pq_integer(11, params);
    const double s = sup_norm([&](double x) { return bbh_pq(make_u(), 10, x, params) - to_u(x); }, 1024);
    CHECK(s == doctest::Approx((1.0 - c) * 1023.0 / 1024.0).epsilon(1e-12));
}
