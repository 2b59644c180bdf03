#include <benchmark/benchmark.h>

#include <cmath>

#include "fockdyson/assumptions.hpp"
#include "fockdyson/dyson.hpp"
#include "fockdyson/field.hpp"
#include "fockdyson/fock.hpp"

using namespace fockdyson;

namespace {

void BM_FockBasis(benchmark::State& state) {
    const auto modes = state.range(0);
    for (auto _ : state) benchmark::DoNotOptimize(fock::FockBasis::build(modes, 3).size());
}
BENCHMARK(BM_FockBasis)->Arg(8)->Arg(32)->Arg(54);

void BM_SegalField(benchmark::State& state) {
    const auto basis = fock::FockBasis::build(state.range(0), 3);
    const fock::PhotonVector f(CVector::Ones(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(fock::segal_field(basis, f).nnz());
}
BENCHMARK(BM_SegalField)->Arg(8)->Arg(32);

void BM_DiracMaxwellBundle(benchmark::State& state) {
    field::DiracMaxwellParams p;
    p.points_per_axis = static_cast<int>(state.range(0));
    p.charge = std::sqrt(1.0 / 137.035999);
    p.n_max = 2;
    for (auto _ : state) benchmark::DoNotOptimize(field::total_hamiltonian(p).bundle.dim());
}
BENCHMARK(BM_DiracMaxwellBundle)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_CertifyToy(benchmark::State& state) {
    const auto toy = field::single_mode_toy(1.0, 0.1, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(assumptions::certify(toy).all_pass);
}
BENCHMARK(BM_CertifyToy)->Arg(14)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_DysonToy(benchmark::State& state) {
    const auto toy = field::single_mode_toy(1.0, 0.1, 14);
    const dyson::DysonEngine engine(toy);
    const CVector xi = dyson::basis_vector(toy.dim(), 0);
    const int order = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(engine.propagator(xi, 1.0, 0.0, order, 16).norm());
}
BENCHMARK(BM_DysonToy)->Arg(4)->Arg(12);

}  // namespace

BENCHMARK_MAIN();
