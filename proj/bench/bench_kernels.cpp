// Dense reference vs structured OpenMP right-hand side.

#include "sonoheat/core.hpp"
#include "sonoheat/hamiltonian.hpp"
#include "sonoheat/kernels.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

namespace {

using namespace sonoheat;

PhysParams anchor() {
    PhysParams p;
    p.omega0 = 1e3;
    p.nu = 1.0;
    p.omega_rabi = 0.05;
    p.lambda_coupling = 50.0;
    p.gamma = 10.0;
    return p;
}

CMatrix random_state(const FockSpace& space) {
    const CMatrix a = CMatrix::Random(space.dim(), space.dim());
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace();
}

void BM_reference(benchmark::State& state) {
    const FockSpace space(static_cast<int>(state.range(0)));
    const PhysParams p = anchor();
    const CMatrix h = build_hamiltonian(hamiltonian_terms(p, DriveKind::field), space);
    const AtomicOps at = atomic_ops(space);
    const CMatrix rho = random_state(space);
    for (auto _ : state) {
        CMatrix out = kernels::lindblad_rhs_reference(rho, h, p.gamma, at.lower, at.raise);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_structured(benchmark::State& state) {
    const FockSpace space(static_cast<int>(state.range(0)));
    const PhysParams p = anchor();
    const HamiltonianTerms terms = hamiltonian_terms(p, DriveKind::field);
    const CMatrix rho = random_state(space);
    CMatrix out;
    omp_set_num_threads(static_cast<int>(state.range(1)));
    for (auto _ : state) {
        kernels::lindblad_rhs(rho, terms, p.gamma, space, out);
        benchmark::DoNotOptimize(out.data());
    }
    omp_set_num_threads(omp_get_num_procs());
}

}  // namespace

BENCHMARK(BM_reference)->Arg(15)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_structured)
    ->ArgsProduct({{15, 30, 60, 120, 240}, {1, 2, 4}})
    ->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
