#include "doctest.h"
#include "helpers.hpp"

#include "sonoheat/core.hpp"

#include <cmath>

using namespace sonoheat;
using testutil::max_abs;

TEST_SUITE("core") {

TEST_CASE("fock space layout") {
    const FockSpace s(4);
    CHECK(s.levels() == 5);
    CHECK(s.dim() == 10);
    CHECK(s.index(0, 3) == 3);
    CHECK(s.index(1, 0) == 5);
    CHECK_THROWS_AS(FockSpace(0), ValidationError);
}

TEST_CASE("annihilation lowers a number state") {
    const FockSpace s(6);
    const CMatrix b = annihilation(s);
    const CVector v3 = fock_state(s, 0, 3).amplitudes();
    const CVector out = b * v3;
    CVector expected = CVector::Zero(s.dim());
    expected(s.index(0, 2)) = std::sqrt(3.0);
    CHECK(max_abs(out - expected) == doctest::Approx(0.0));

    const CVector vac = fock_state(s, 1, 0).amplitudes();
    CHECK(max_abs(b * vac) == 0.0);
}

TEST_CASE("number operator matches index arithmetic") {
    const FockSpace s(7);
    const CMatrix b = annihilation(s);
    const CMatrix n = creation(s) * b;
    const CVector v5 = fock_state(s, 1, 5).amplitudes();
    CHECK(max_abs(n * v5 - 5.0 * v5) < 1e-14);
    CHECK(max_abs(n - number_operator(s)) < 1e-14);
}

TEST_CASE("truncated commutator deviates only at the top level") {
    const FockSpace s(5);
    const CMatrix b = annihilation(s);
    const CMatrix comm = b * b.adjoint() - b.adjoint() * b;
    for (int a = 0; a < 2; ++a)
        for (int m = 0; m <= s.cutoff(); ++m) {
            const auto i = s.index(a, m);
            const cplx want = m < s.cutoff() ? cplx(1.0) : cplx(-static_cast<double>(s.cutoff()));
            CHECK(std::abs(comm(i, i) - want) < 1e-12);
        }
    CMatrix off = comm;
    off.diagonal().setZero();
    CHECK(max_abs(off) == 0.0);
}

TEST_CASE("atomic operators") {
    const FockSpace s(3);
    const AtomicOps at = atomic_ops(s);
    CHECK((at.raise - at.lower.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    const CVector e2 = fock_state(s, 1, 2).amplitudes();
    CHECK(max_abs(at.excited * e2 - e2) == 0.0);
    CHECK(max_abs(at.lower * e2 - fock_state(s, 0, 2).amplitudes()) == 0.0);
    CHECK(max_abs(at.lower * fock_state(s, 0, 2).amplitudes()) == 0.0);
    CHECK(max_abs(at.lower * at.raise + at.raise * at.lower - identity(s)) == 0.0);
    CHECK(max_abs(at.raise * at.raise) == 0.0);
}

TEST_CASE("expectation values") {
    const FockSpace s(6);
    const CMatrix rho = testutil::random_density(s.dim());
    CHECK(std::abs(expectation(identity(s), rho) - 1.0) < 1e-12);

    const DensityMatrix f4 = DensityMatrix::pure(fock_state(s, 0, 4));
    CHECK(expectation(number_operator(s), f4).real() == doctest::Approx(4.0));

    const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
    const DensityMatrix mix = diagonal_mixture(s, 0, w);
    // (0*1 + 1*2 + 2*3 + 3*4) / 10
    CHECK(expectation(number_operator(s), mix).real() == doctest::Approx(2.0));

    CHECK_THROWS_AS((void)expectation(identity(FockSpace(2)), rho), ValidationError);
}

TEST_CASE("hermitian expectations are real and linear") {
    const FockSpace s(4);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix rho = testutil::random_density(s.dim());
        const CMatrix a = testutil::random_hermitian(s.dim());
        const CMatrix b = testutil::random_hermitian(s.dim());
        const cplx ea = expectation(a, rho);
        CHECK(std::abs(ea.imag()) <= 1e-10 * std::max(1.0, std::abs(ea)));
        const cplx lin = expectation(2.0 * a - 3.0 * b, rho) - (2.0 * ea - 3.0 * expectation(b, rho));
        CHECK(std::abs(lin) < 1e-12);
    }
}

TEST_CASE("density matrix validation") {
    const FockSpace s(2);
    const CMatrix good = testutil::random_density(s.dim());
    CHECK_NOTHROW((void)DensityMatrix::from(good));

    CMatrix nonherm = good;
    nonherm(0, 1) += cplx(1e-6, 0.0);
    CHECK_THROWS_AS((void)DensityMatrix::from(nonherm), ValidationError);

    CHECK_THROWS_AS((void)DensityMatrix::from(1.01 * good), ValidationError);

    CMatrix neg = CMatrix::Zero(s.dim(), s.dim());
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    CHECK_THROWS_AS((void)DensityMatrix::from(neg), ValidationError);

    const DensityMatrix p = DensityMatrix::pure(fock_state(s, 1, 1));
    CHECK(p.purity() == doctest::Approx(1.0));
    CHECK(p.trace_error() == 0.0);
}

TEST_CASE("pure state normalization") {
    CVector v = CVector::Zero(4);
    v(0) = 1.0;
    v(1) = 1.0;
    CHECK_THROWS_AS((void)PureState::from(v), ValidationError);
    CHECK_NOTHROW((void)PureState::from(v / std::sqrt(2.0)));
}

TEST_CASE("parameter validation") {
    PhysParams p;
    p.omega0 = 1.0;
    p.nu = 1.0;
    CHECK_NOTHROW(p.validate(DriveKind::field));
    p.gamma = -1.0;
    CHECK_THROWS_WITH_AS(p.validate(DriveKind::field), "params.gamma: must be >= 0", ValidationError);
    p.gamma = 0.0;
    p.eta = 1.0;
    CHECK_THROWS_AS(p.validate(DriveKind::laser), ValidationError);
    p.eta = 0.1;
    p.omega0 = 0.0;
    CHECK_THROWS_AS(p.validate(DriveKind::field), ValidationError);
    CHECK_NOTHROW(p.validate(DriveKind::laser));
    p.nu = std::nan("");
    CHECK_THROWS_AS(p.validate(DriveKind::laser), ValidationError);
}

TEST_CASE("drive kind names") {
    CHECK(drive_kind_from_string(to_string(DriveKind::laser)) == DriveKind::laser);
    CHECK_THROWS_AS((void)drive_kind_from_string("maser"), ValidationError);
}

}
