#include <doctest.h>

#include <cmath>
#include <random>

#include "naive_oracle.hpp"
#include "pqbbh/errors.hpp"
#include "pqbbh/pq_core.hpp"

using namespace pqbbh;
using naive::frac;

TEST_CASE("pq_integer small cases")
{
    const PQParams<Rational> a(frac(1, 1), frac(1, 2));
    CHECK(pq_integer(0, a) == 0);
    CHECK(pq_integer(1, a) == 1);
    CHECK(pq_integer(3, a) == frac(7, 4));

    const PQParams<double> f(0.9, 0.5);
    CHECK(pq_integer(0, f) == 0.0);
    CHECK(pq_integer(1, f) == 1.0);
}

TEST_CASE("pq_integer against the quotient form")
{
    std::mt19937_64 rng(7);
    for (int t = 0; t < 40; ++t) {
        const auto tr = naive::random_triple(rng);
        const PQParams<Rational> params(tr.p, tr.q);
        for (long n = 0; n <= 20; ++n) {
            const Rational v = pq_integer(n, params);
            CHECK(v == naive::pqi(n, tr.p, tr.q));
            CHECK((n == 0 ? v == 0 : v > 0));
        }
    }
}

TEST_CASE("p == q is the continuous extension n p^(n-1)")
{
    const PQParams<Rational> r(frac(3, 4), frac(3, 4));
    CHECK(pq_integer(5, r) == 5 * naive::pow(frac(3, 4), 4));
    const PQParams<double> f(0.75, 0.75);
    CHECK(pq_integer(5, f) == doctest::Approx(5 * std::pow(0.75, 4)).epsilon(1e-15));
    CHECK_FALSE(r.strict());
    CHECK_THROWS_AS(r.require_strict("test"), DomainError);
}

TEST_CASE("PQParams rejects inadmissible pairs")
{
    CHECK_THROWS_AS(PQParams<double>(0.5, 0.9), DomainError);
    CHECK_THROWS_AS(PQParams<double>(1.2, 0.5), DomainError);
    CHECK_THROWS_AS(PQParams<double>(0.5, 0.0), DomainError);
    CHECK_THROWS_AS(PQParams<Rational>(frac(1, 2), frac(-1, 2)), DomainError);
    CHECK_THROWS_AS(PQParams<double>(NAN, 0.5), DomainError);
}

TEST_CASE("factorials and binomials")
{
    const PQParams<Rational> a(frac(1, 1), frac(1, 2));
    CHECK(pq_factorial(0, a) == 1);
    CHECK(pq_factorial(1, a) == 1);
    CHECK(pq_factorial(3, a) == frac(21, 8));

    const PQParams<Rational> b(frac(9, 10), frac(1, 2));
    for (long n = 0; n <= 6; ++n) {
        CHECK(pq_binomial(n, 0, b) == 1);
    }
    CHECK(pq_binomial(3, 1, b) == frac(151, 100));
    CHECK(pq_binomial(4, 5, b) == 0);
    CHECK(pq_binomial(4, -1, b) == 0);
    CHECK(pq_binomial(3, 1, PQParams<double>(0.9, 0.5)) == doctest::Approx(1.51).epsilon(1e-14));

    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        const auto tr = naive::random_triple(rng);
        const PQParams<Rational> params(tr.p, tr.q);
        for (long n = 0; n <= 12; ++n) {
            const auto row = pq_binomial_row(n, params);
            REQUIRE(row.size() == static_cast<std::size_t>(n + 1));
            for (long k = 0; k <= n; ++k) {
                CHECK(row[k] == naive::binom(n, k, tr.p, tr.q));
                CHECK(pq_binomial(n, k, params) == row[k]);
            }
        }
    }
}

TEST_CASE("Euler product and sum")
{
    const PQParams<double> f(0.9, 0.5);
    CHECK(euler_product(0, 3.0, f) == 1.0);
    CHECK(euler_sum(0, 3.0, f) == 1.0);
    CHECK(euler_product(2, 1.0, f) == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(euler_sum(2, 1.0, f) == doctest::Approx(2.8).epsilon(1e-15));
    CHECK(euler_product(3, 0.0, f) == doctest::Approx(0.729).epsilon(1e-15));

    const PQParams<Rational> r(frac(9, 10), frac(1, 2));
    CHECK(euler_sum(5, Rational(2), r) == euler_product(5, Rational(2), r));
    CHECK(euler_product(5, Rational(2), r) == frac(57099917523L, 10000000000L));
    CHECK(euler_product(5, Rational(2), r) == naive::ell(5, 2, frac(9, 10), frac(1, 2)));
}

TEST_CASE("Euler identity, exact, random triples")
{
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 30; ++t) {
        const auto tr = naive::random_triple(rng);
        const PQParams<Rational> params(tr.p, tr.q);
        for (long n = 0; n <= 15; ++n) {
            CHECK(euler_sum(n, tr.x, params) == euler_product(n, tr.x, params));
        }
    }
}

TEST_CASE("Euler identity in the log domain up to n = 200")
{
    for (auto [p, q] : {std::pair{0.9, 0.5}, std::pair{0.99, 0.98}, std::pair{1.0, 0.3}}) {
        const PQParams<double> params(p, q);
        for (std::int64_t n : {1, 10, 64, 65, 120, 200}) {
            for (double x : {0.0, 0.5, 1.0, 2.0, 10.0, 1e4}) {
                CHECK(euler_identity_relative_error(n, x, params) <= 1e-12);
            }
        }
    }
}

TEST_CASE("reduced logs agree with exact values")
{
    const PQParams<Rational> r(frac(9, 10), frac(1, 2));
    const auto f = to_float(r);
    for (std::int64_t n : {3, 8, 20}) {
        const auto logs = log_reduced_binomial_row(n, f);
        for (std::int64_t k = 0; k <= n; ++k) {
            const double exact = to_double(naive::binom(n, k, Rational(1), frac(5, 9)));
            CHECK(std::exp(logs[k]) == doctest::Approx(exact).epsilon(1e-13));
        }
        const Rational x = frac(3, 2);
        const double reduced = to_double(Rational(naive::ell(n, x, frac(9, 10), frac(1, 2)) /
                                                  naive::pow(frac(9, 10), n * (n - 1) / 2)));
        CHECK(std::exp(euler_product_log_reduced(n, 1.5, f)) == doctest::Approx(reduced).epsilon(1e-13));
        CHECK(std::exp(euler_sum_log_reduced(n, 1.5, f)) == doctest::Approx(reduced).epsilon(1e-13));
    }
}

TEST_CASE("shift, square and step identities")
{
    const PQParams<Rational> r(frac(9, 10), frac(1, 2));
    for (long n = 0; n <= 15; ++n) {
        CHECK(shift_relation_residual(n, 0, r) == 0);
        for (long k = 0; k <= n; ++k) {
            CHECK(shift_relation_residual(n, k, r) == 0);
        }
    }
    CHECK(shift_relation_residual(4, 2, r) == 0);
    for (long k = 1; k <= 15; ++k) {
        CHECK(square_decomposition_residual(k, r) == 0);
        CHECK(step_relation_residual(k, r) == 0);
    }
    const PQParams<double> f(0.9, 0.5);
    CHECK(std::fabs(shift_relation_residual(10, 7, f)) <= 1e-14);
    CHECK_THROWS_AS(shift_relation_residual(3, 4, r), PreconditionError);
    CHECK_THROWS_AS(square_decomposition_residual(0, r), PreconditionError);
}

TEST_CASE("q-integer closed form at p = 1")
{
    const PQParams<double> f(1.0, 0.7);
    for (std::int64_t n = 0; n <= 30; ++n) {
        CHECK(pq_integer(n, f) == doctest::Approx(q_integer_closed(n, 0.7)).epsilon(1e-14));
    }
}

TEST_CASE("Float and Rational backends agree")
{
    std::mt19937_64 rng(99);
    for (int t = 0; t < 20; ++t) {
        const auto tr = naive::random_triple(rng);
        const PQParams<Rational> r(tr.p, tr.q);
        const auto f = to_float(r);
        for (long n = 1; n <= 30; ++n) {
            CHECK(pq_integer(n, f) == doctest::Approx(to_double(pq_integer(n, r))).epsilon(1e-14));
        }
    }
}

TEST_CASE("to_double rounds to nearest")
{
    CHECK(to_double(frac(9, 10)) == 0.9);
    CHECK(to_double(frac(1, 3)) == 1.0 / 3.0);
    CHECK(to_double(frac(-7, 10)) == -0.7);
    CHECK(scalar_from_string<double>("0.95") == 0.95);
    CHECK(scalar_from_string<Rational>("0.95") == frac(19, 20));
    CHECK(scalar_from_string<Rational>("9/10") == frac(9, 10));
    CHECK(scalar_from_string<Rational>("1e-2") == frac(1, 100));
    CHECK_THROWS(scalar_from_string<Rational>("abc"));
    CHECK_THROWS(scalar_from_string<Rational>("1/0"));
}
