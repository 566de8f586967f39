#include "doctest.h"
#include "helpers.hpp"

#include "sonoheat/hamiltonian.hpp"
#include "sonoheat/kernels.hpp"

#include <omp.h>

#include <vector>

using namespace sonoheat;

namespace {

HamiltonianTerms random_terms() {
    return {testutil::uniform(-5.0, 5.0), testutil::uniform(0.1, 2.0), testutil::uniform(0.0, 1.0),
            testutil::uniform(0.0, 3.0)};
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("structured kernel matches the dense reference") {
    for (int cutoff : {1, 2, 5, 17, 40}) {
        const FockSpace s(cutoff);
        const HamiltonianTerms terms = random_terms();
        const double gamma = testutil::uniform(0.0, 3.0);
        const CMatrix rho = testutil::random_density(s.dim());
        const AtomicOps at = atomic_ops(s);
        const CMatrix want =
            kernels::lindblad_rhs_reference(rho, build_hamiltonian(terms, s), gamma, at.lower, at.raise);
        CMatrix got;
        kernels::lindblad_rhs(rho, terms, gamma, s, got);
        CAPTURE(cutoff);
        CHECK(testutil::max_abs(got - want) <= 1e-12 * std::max(1.0, testutil::max_abs(want)));
    }
}

TEST_CASE("structured kernel handles non-Hermitian input linearly") {
    const FockSpace s(6);
    const HamiltonianTerms terms = random_terms();
    const CMatrix x = testutil::random_complex(s.dim(), s.dim());
    const AtomicOps at = atomic_ops(s);
    const CMatrix want = kernels::lindblad_rhs_reference(x, build_hamiltonian(terms, s), 0.7, at.lower, at.raise);
    CMatrix got;
    kernels::lindblad_rhs(x, terms, 0.7, s, got);
    CHECK(testutil::max_abs(got - want) < 1e-11);
}

TEST_CASE("result does not depend on the thread count") {
    const FockSpace s(30);
    const HamiltonianTerms terms = random_terms();
    const CMatrix rho = testutil::random_density(s.dim());
    CMatrix one, many;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    kernels::lindblad_rhs(rho, terms, 1.5, s, one);
    omp_set_num_threads(4);
    kernels::lindblad_rhs(rho, terms, 1.5, s, many);
    omp_set_num_threads(saved);
    CHECK((one - many).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension mismatch") {
    CMatrix out;
    CHECK_THROWS_AS(kernels::lindblad_rhs(CMatrix::Zero(3, 3), {}, 0.0, FockSpace(2), out), ValidationError);
}

TEST_CASE("combine and scaled error") {
    const CMatrix y = CMatrix::Constant(2, 2, cplx(1.0, 0.0));
    const CMatrix a = CMatrix::Constant(2, 2, cplx(0.0, 2.0));
    const CMatrix b = CMatrix::Constant(2, 2, cplx(3.0, 0.0));
    const double coeffs[3] = {0.5, 0.0, 2.0};
    const CMatrix* stages[3] = {&a, nullptr, &b};
    CMatrix out;
    kernels::combine(y, 0.1, coeffs, stages, out);
    CHECK(std::abs(out(1, 0) - cplx(1.6, 0.1)) < 1e-15);

    const CMatrix err = CMatrix::Constant(2, 2, cplx(1e-6, 0.0));
    const double e = kernels::scaled_error(err, y, 2.0 * y, 1e-6, 1e-3);
    CHECK(e == doctest::Approx(1e-6 / (1e-6 + 2e-3)));
}

}
