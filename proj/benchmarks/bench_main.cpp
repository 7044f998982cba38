#include <benchmark/benchmark.h>

#include "pqbbh/bivariate.hpp"
#include "pqbbh/operators.hpp"
#include "pqbbh/pq_core.hpp"
#include "pqbbh/rates.hpp"
#include "pqbbh/statistical.hpp"

using namespace pqbbh;

namespace {

const PQParams<double> kFloat(0.95, 0.9);
const PQParams<Rational> kExact(Rational(19, 20), Rational(9, 10));

void BM_PqIntegerFloat(benchmark::State& state)
{
    const auto n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pq_integer(n, kFloat));
    }
}
BENCHMARK(BM_PqIntegerFloat)->Arg(10)->Arg(200)->Arg(2000);

void BM_PqIntegerRational(benchmark::State& state)
{
    const auto n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pq_integer(n, kExact));
    }
}
BENCHMARK(BM_PqIntegerRational)->Arg(10)->Arg(50);

// Tables below and above the log-domain threshold.
void BM_TableBuild(benchmark::State& state)
{
    const auto n = state.range(0);
    for (auto _ : state) {
        NodeWeightTable<double> table(n, kFloat);
        benchmark::DoNotOptimize(table.nodes().data());
    }
}
BENCHMARK(BM_TableBuild)->Arg(32)->Arg(kLogDomainDegree)->Arg(kLogDomainDegree + 1)->Arg(400);

void BM_Apply(benchmark::State& state)
{
    const auto n = state.range(0);
    const NodeWeightTable<double> table(n, kFloat);
    const auto u = make_u();
    double x = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(table.apply(u, x));
        x = x > 100.0 ? 0.0 : x + 0.37;
    }
}
BENCHMARK(BM_Apply)->Arg(32)->Arg(kLogDomainDegree)->Arg(kLogDomainDegree + 1)->Arg(400);

void BM_ApplyRational(benchmark::State& state)
{
    const auto n = state.range(0);
    const NodeWeightTable<Rational> table(n, kExact);
    const auto u = make_u();
    const Rational x(3, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(table.apply(u, x));
    }
}
BENCHMARK(BM_ApplyRational)->Arg(10)->Arg(50);

void BM_MomentClosedVsBrute(benchmark::State& state)
{
    const auto n = state.range(0);
    const bool brute = state.range(1) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute ? brute_force_moment(2, n, 1.5, kFloat)
                                       : moment_closed(2, n, 1.5, kFloat, MomentVariant::OracleConsistent));
    }
}
BENCHMARK(BM_MomentClosedVsBrute)->Args({200, 0})->Args({200, 1});

void BM_Modulus2Table(benchmark::State& state)
{
    const auto f = make_korovkin_function(3);
    const auto r = static_cast<int>(state.range(0));
    for (auto _ : state) {
        Modulus2Table table(f, r);
        benchmark::DoNotOptimize(table(0.1, 0.1));
    }
}
BENCHMARK(BM_Modulus2Table)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_KorovkinBattery(benchmark::State& state)
{
    const auto smooth = ParamSchedule::from_name("smooth");
    const auto n = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(korovkin_battery(smooth, n, 4096));
    }
}
BENCHMARK(BM_KorovkinBattery)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_BivariateGrid(benchmark::State& state)
{
    const auto n = state.range(0);
    const BivariateParams<double> bp{n, n, kFloat, kFloat};
    const auto g = make_korovkin_function(3);
    const auto xs = x_grid(128);
    for (auto _ : state) {
        benchmark::DoNotOptimize(BivariateOperator<double>(g, bp).grid(xs, xs));
    }
}
BENCHMARK(BM_BivariateGrid)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
