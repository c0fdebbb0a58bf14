#include "examples.hpp"
#include "random_models.hpp"

#include <benchmark/benchmark.h>

using namespace linfty;
using namespace linfty::testing;

namespace {

RandomInstance instance(int amplitude, unsigned seed) {
    std::mt19937 rng(seed);
    RandomOptions o;
    o.amplitude = amplitude;
    o.max_per_degree = 5;
    return random_instance(rng, o);
}

void BM_Circ(benchmark::State& st) {
    auto inst = instance((int)st.range(0), 1);
    Family D = inst.alg.total();
    for (auto _ : st) benchmark::DoNotOptimize(circ(D, D));
}
BENCHMARK(BM_Circ)->DenseRange(2, 4);

void BM_CircLiteral(benchmark::State& st) {
    auto inst = instance((int)st.range(0), 1);
    Family D = inst.alg.total();
    for (auto _ : st) benchmark::DoNotOptimize(circ(D, D, SumMode::Literal));
}
BENCHMARK(BM_CircLiteral)->DenseRange(2, 4);

void BM_Bullet(benchmark::State& st) {
    auto inst = instance((int)st.range(0), 2);
    auto t = transfer(inst.contraction(), inst.alg.lambda);
    for (auto _ : st) benchmark::DoNotOptimize(bullet(inst.alg.total(), t.phi));
}
BENCHMARK(BM_Bullet)->DenseRange(2, 4);

void BM_CheckMC(benchmark::State& st) {
    auto inst = instance((int)st.range(0), 3);
    for (auto _ : st) benchmark::DoNotOptimize(check_mc(inst.alg));
}
BENCHMARK(BM_CheckMC)->DenseRange(1, 4);

void BM_TransferRecursive(benchmark::State& st) {
    auto inst = instance((int)st.range(0), 4);
    auto c = inst.contraction();
    for (auto _ : st) benchmark::DoNotOptimize(transfer(c, inst.alg.lambda));
}
BENCHMARK(BM_TransferRecursive)->DenseRange(1, 4);

void BM_TransferTrees(benchmark::State& st) {
    auto inst = instance((int)st.range(0), 4);
    auto c = inst.contraction();
    for (auto _ : st) benchmark::DoNotOptimize(transfer_trees(c, inst.alg.lambda));
}
BENCHMARK(BM_TransferTrees)->DenseRange(1, 4);

void BM_PathSpaceQuasiSmooth(benchmark::State& st) {
    auto b = quasi_smooth_x2();
    for (auto _ : st) benchmark::DoNotOptimize(derived_path_space(b));
}
BENCHMARK(BM_PathSpaceQuasiSmooth);

void BM_PathSpaceAmplitude2(benchmark::State& st) {
    auto b = amplitude2_model();
    for (auto _ : st) benchmark::DoNotOptimize(derived_path_space(b));
}
BENCHMARK(BM_PathSpaceAmplitude2);

void BM_PathSpaceManifold(benchmark::State& st) {
    auto b = manifold((int)st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(derived_path_space(b));
}
BENCHMARK(BM_PathSpaceManifold)->DenseRange(1, 3);

void BM_FactorizeCircle(benchmark::State& st) {
    auto b = circle_model();
    for (auto _ : st) benchmark::DoNotOptimize(factorize_diagonal(b));
}
BENCHMARK(BM_FactorizeCircle);

}  // namespace

BENCHMARK_MAIN();
