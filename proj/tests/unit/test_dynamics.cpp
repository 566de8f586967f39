#include "doctest.h"
#include "helpers.hpp"

#include "sonoheat/dynamics.hpp"
#include "sonoheat/hamiltonian.hpp"
#include "sonoheat/lindblad.hpp"

#include <cmath>

using namespace sonoheat;

namespace {

PhysParams desk() {
    PhysParams p;
    p.nu = 1.0;
    p.omega0 = 1e3;
    p.lambda_coupling = 50.0;
    p.omega_rabi = 0.05;
    p.gamma = 10.0;
    return p;
}

Trajectory synthetic(double t0, double t1, int n, auto&& fn) {
    Trajectory tr;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * i / (n - 1);
        tr.times.push_back(t);
        tr.mean_phonon.push_back(fn(t));
    }
    return tr;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("heating exponent at the sonoluminescence scale") {
    PhysParams p;
    p.nu = 1e7;
    p.omega0 = 1e15;
    p.lambda_coupling = 1e12;
    p.omega_rabi = 1e6;
    const RegimeReport r = heating_exponent(p);
    CHECK(r.above_threshold);
    CHECK(r.strong_coupling);
    CHECK(r.ratio_4L2_nuw0 == doctest::Approx(400.0));
    CHECK(r.lambda_exponent == doctest::Approx(1e7 * std::sqrt(399.0)));
    CHECK(r.lambda_exponent == doctest::Approx(1.997e8).epsilon(1e-3));
    CHECK(r.branch == "exponential");
}

TEST_CASE("threshold and oscillatory branches") {
    PhysParams p = desk();
    p.lambda_coupling = std::sqrt(p.nu * p.omega0) / 2.0;
    const RegimeReport at = heating_exponent(p);
    CHECK_FALSE(at.above_threshold);
    CHECK(at.lambda_exponent == 0.0);

    p.lambda_coupling = 10.0;  // 4 L^2 / (nu w0) = 0.4
    const RegimeReport below = heating_exponent(p);
    CHECK(below.branch == "oscillatory");
    CHECK(below.lambda_exponent == doctest::Approx(std::sqrt(0.6)));
    CHECK_FALSE(below.warnings.empty());
    CHECK_THROWS_AS((void)mean_phonon_analytic(1.0, p, 1.0), RegimeError);
}

TEST_CASE("desk-scale anchor") {
    const PhysParams p = desk();
    CHECK(heating_exponent(p).lambda_exponent == doctest::Approx(3.0));
    CHECK(heating_exponent(p).heating_rate == doctest::Approx(6.0));
    CHECK(mean_phonon_analytic(0.0, p, 1.0) == 1.0);
    const double pref = 8.0 * std::pow(50.0, 4) / std::pow(3e3, 2);
    CHECK(pref == doctest::Approx(5.5556).epsilon(1e-4));
    CHECK(mean_phonon_analytic(1.0, p, 1.0) == doctest::Approx(1.0 + pref * std::pow(std::sinh(3.0), 2)));
    CHECK(mean_phonon_analytic(1.0, p, 3.0) == doctest::Approx(3.0 * mean_phonon_analytic(1.0, p, 1.0)));
    CHECK_THROWS_AS((void)mean_phonon_analytic(1.0, p, 0.0), ValidationError);
}

TEST_CASE("regime report serialization") {
    PhysParams p = desk();
    p.omega_rabi = 0.0;
    const RegimeReport r = heating_exponent(p);
    CHECK(r.to_text().find("above_threshold = true") != std::string::npos);
    CHECK(r.to_json()["lambda_over_omega"].is_null());
    CHECK(r.to_json()["lambda_exponent"].get<double>() == doctest::Approx(3.0));
}

TEST_CASE("monotonicity of the exponent and the analytic law") {
    for (int k = 0; k < 50; ++k) {
        PhysParams p;
        p.nu = testutil::uniform(0.5, 2.0);
        p.omega0 = testutil::uniform(100.0, 1e4);
        p.lambda_coupling = std::sqrt(p.nu * p.omega0) * testutil::uniform(0.6, 5.0);
        PhysParams stronger = p;
        stronger.lambda_coupling *= 1.1;
        PhysParams stiffer = p;
        stiffer.omega0 *= 0.9;  // smaller omega0 raises lambda
        CHECK(heating_exponent(stronger).lambda_exponent > heating_exponent(p).lambda_exponent);
        CHECK(heating_exponent(stiffer).lambda_exponent > heating_exponent(p).lambda_exponent);
        double prev = 0.0;
        for (double t = 0.0; t < 3.0; t += 0.1) {
            const double m = mean_phonon_analytic(t, p, 1.0);
            CHECK(m >= prev);
            prev = m;
        }
    }
}

TEST_CASE("late-time log slope of the analytic law approaches 2 lambda") {
    const PhysParams p = desk();
    const double lam = 3.0;
    const double t = 3.5 / lam;
    const double h = 1e-5;
    const double slope =
        (std::log(mean_phonon_analytic(t + h, p, 1.0)) - std::log(mean_phonon_analytic(t - h, p, 1.0))) / (2 * h);
    CHECK(std::abs(slope - 2.0 * lam) < 0.01 * 2.0 * lam);
}

TEST_CASE("fit of synthetic data") {
    const auto expo = synthetic(0.0, 1.0, 50, [](double t) { return std::exp(6.0 * t); });
    CHECK(std::abs(fit_heating_rate(expo, 0.0, 1.0) - 6.0) < 1e-9);

    const auto flat = synthetic(0.0, 1.0, 20, [](double) { return 3.0; });
    CHECK(std::abs(fit_heating_rate(flat)) < 1e-12);

    const PhysParams p = desk();
    const auto late = synthetic(1.5, 2.5, 40, [&](double t) { return mean_phonon_analytic(t, p, 1.0); });
    CHECK(fit_heating_rate(late) == doctest::Approx(6.0).epsilon(1e-3));

    const auto zero = synthetic(0.0, 1.0, 20, [](double t) { return t; });
    CHECK_THROWS_AS((void)fit_heating_rate(zero, 0.0, 1.0), ValidationError);
    CHECK_THROWS_AS((void)fit_heating_rate(expo, 0.0, 0.05), ValidationError);
    CHECK_THROWS_AS((void)fit_heating_rate(expo, 0.5, 1.5), ValidationError);

    const auto line = synthetic(0.0, 2.0, 30, [](double t) { return 1.0 - 0.25 * t; });
    CHECK(fit_linear_rate(line, 0.0, 2.0) == doctest::Approx(-0.25));
}

TEST_CASE("moment operators reproduce the observables") {
    const FockSpace s(8);
    const DensityMatrix rho = DensityMatrix::pure(fock_state(s, 0, 3));
    const MomentState m = moments_of(rho.data(), s);
    CHECK(m.mean_phonon() == doctest::Approx(3.0));
    CHECK(m.excited_pop() == doctest::Approx(0.0));
    const MomentState g = ground_fock_moments(3);
    for (std::size_t k = 0; k < kMomentCount; ++k) CHECK(m.v[k] == doctest::Approx(g.v[k]));
}

TEST_CASE("zero moments are a fixed point") {
    const MomentState zero;
    const MomentState d = moment_rhs(zero, desk());
    for (double v : d.v) CHECK(v == 0.0);
}

TEST_CASE("moment derivatives match the master equation with the atom in its ground state") {
    // The closure <O sz> -> -<O> is exact for rho = |0><0| (x) rho_phonon.
    const FockSpace s(14);
    const auto ops = moment_operators(s);
    const AtomicOps at = atomic_ops(s);
    for (int trial = 0; trial < 5; ++trial) {
        PhysParams p;
        p.nu = testutil::uniform(0.5, 2.0);
        p.omega0 = testutil::uniform(5.0, 50.0);
        p.lambda_coupling = testutil::uniform(0.1, 3.0);
        p.omega_rabi = testutil::uniform(0.0, 1.0);
        p.gamma = testutil::uniform(0.0, 5.0);
        // Phonon state supported on levels well below the cutoff.
        CMatrix rho = CMatrix::Zero(s.dim(), s.dim());
        rho.topLeftCorner(6, 6) = testutil::random_density(6);
        const DensityMatrix r = DensityMatrix::from(rho);
        const CMatrix h = build_hamiltonian(p, drive_mode(p, DriveKind::field), s);
        const CMatrix drho = sonoheat::rhs(r, h, p.gamma, at.lower, at.raise);
        const MomentState d = moment_rhs(moments_of(rho, s), p);
        for (std::size_t k = 0; k < kMomentCount; ++k) {
            CAPTURE(k);
            CHECK(std::abs(expectation(ops[k], drho).real() - d.v[k]) < 1e-8);
        }
    }
}

TEST_CASE("dominant moment eigenvalue tracks 2 lambda") {
    const PhysParams p = desk();
    CHECK(moment_growth_rate(p) == doctest::Approx(6.0).epsilon(0.05));
}

TEST_CASE("moment integration from a Fock state") {
    const PhysParams p = desk();
    const MomentTrajectory tr = integrate_moments(ground_fock_moments(1), p, 1.0, 0.1);
    CHECK(tr.times.size() == 11);
    CHECK(tr.mean_phonon.front() == doctest::Approx(1.0));
    CHECK(tr.mean_phonon.back() > 10.0 * tr.mean_phonon.front());
    const MomentTrajectory none = integrate_moments(ground_fock_moments(1), p, 0.0, 0.1);
    CHECK(none.times.size() == 1);
}

}
