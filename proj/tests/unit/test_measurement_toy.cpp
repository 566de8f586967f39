#include "doctest.h"
#include "helpers.hpp"

#include "sonoheat/measurement_toy.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace sonoheat;
using namespace sonoheat::toy;

namespace {

BipartiteSystem random_system(Eigen::Index da, Eigen::Index db, double coupling) {
    BipartiteSystem s;
    s.h_a = testutil::random_hermitian(da);
    s.h_b = testutil::random_hermitian(db);
    s.h_int = coupling * testutil::random_hermitian(da * db);
    return s;
}

}  // namespace

TEST_SUITE("measurement_toy") {

TEST_CASE("product state in the B ground sector is unchanged") {
    const BipartiteSystem sys = two_qubit_example(0.3);
    CVector v = CVector::Zero(4);
    v(0) = 0.6;  // |0>_A |0>_B
    v(2) = 0.8;  // |1>_A |0>_B
    const MeasurementRecord r = absorb_measure(PureState::from(v), sys);
    CHECK(r.outcome_probs[0] == doctest::Approx(1.0));
    CHECK((r.post_state.amplitudes() - v).norm() < 1e-12);
    CHECK(r.mean_energy_after == doctest::Approx(r.mean_energy_before));
}

TEST_CASE("uncoupled ground state is a fixed point") {
    BipartiteSystem sys = random_system(2, 3, 0.0);
    sys.h_int.setZero();
    const PureState g = joint_ground_state(sys);
    const MeasurementRecord r = absorb_measure(g, sys);
    CHECK(std::abs(r.mean_energy_after - r.mean_energy_before) < 1e-10);
    CHECK(std::abs(std::abs(r.post_state.amplitudes().dot(g.amplitudes())) - 1.0) < 1e-10);
}

TEST_CASE("two-qubit example gains energy, checked against a 4x4 oracle") {
    const double c = 0.3;
    const BipartiteSystem sys = two_qubit_example(c);
    // In the {|00>, |11>} block H = [[0, c], [c, 2]]; ground energy 1 - sqrt(1 + c^2).
    const double e0 = 1.0 - std::sqrt(1.0 + c * c);
    const PureState g = joint_ground_state(sys);
    CHECK(mean_total_energy(g, sys) == doctest::Approx(e0).epsilon(1e-12));
    const MeasurementRecord r = absorb_measure(g, sys);
    // Projection onto B = 0 leaves |00>, energy 0.
    CHECK(r.mean_energy_after == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(r.mean_energy_after - r.mean_energy_before > 0.0);
    // p(B=0) = |<00|g>|^2 = (1 + 1/sqrt(1+c^2)) / 2
    CHECK(r.outcome_probs[0] == doctest::Approx(0.5 * (1.0 + 1.0 / std::sqrt(1.0 + c * c))));
}

TEST_CASE("excess energy probability") {
    const BipartiteSystem sys = two_qubit_example(0.3);
    CVector v = CVector::Zero(4);
    v(0) = 1.0;
    const PureState s = PureState::from(v);
    CHECK(excess_energy_prob(s, sys, 0.0) == doctest::Approx(0.0));

    BipartiteSystem free = sys;
    free.h_int.setZero();
    CHECK(excess_energy_prob(s, free, 2.7) < 1e-14);

    // |00> couples only to |11>: in that block H = [[0, c], [c, 2]], so
    // p(t) = c^2 / (1 + c^2) sin^2(sqrt(1 + c^2) t).
    const double c = 0.3;
    const double w = std::sqrt(1.0 + c * c);
    const double t = 0.5 * M_PI / w;
    CHECK(excess_energy_prob(s, sys, t) == doctest::Approx(c * c / (1.0 + c * c)).epsilon(1e-10));

    CVector bad = CVector::Zero(4);
    bad(1) = 1.0;
    CHECK_THROWS_AS((void)excess_energy_prob(PureState::from(bad), sys, 1.0), ValidationError);
}

TEST_CASE("energy routes agree") {
    const BipartiteSystem sys = random_system(3, 2, 0.5);
    for (int k = 0; k < 10; ++k) {
        CVector v = testutil::random_complex(6, 1).col(0);
        const PureState s = PureState::from(v / v.norm());
        const double a = mean_total_energy(s, sys);
        const double b = mean_total_energy_direct(s, sys);
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("equal superposition of two eigenstates averages their energies") {
    const BipartiteSystem sys = random_system(2, 2, 0.4);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sys.total());
    const CVector v = (es.eigenvectors().col(0) + es.eigenvectors().col(2)) / std::sqrt(2.0);
    const double want = 0.5 * (es.eigenvalues()(0) + es.eigenvalues()(2));
    CHECK(mean_total_energy(PureState::from(v), sys) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("repeated measurement finds E0 with certainty") {
    const BipartiteSystem sys = random_system(2, 3, 0.7);
    const MeasurementRecord first = absorb_measure(joint_ground_state(sys), sys);
    const MeasurementRecord second = absorb_measure(first.post_state, sys);
    CHECK(second.outcome_probs[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate B ground space is projected as a whole") {
    BipartiteSystem sys;
    sys.h_a = CMatrix::Zero(1, 1);
    sys.h_b = CMatrix::Zero(3, 3);
    sys.h_b(2, 2) = 1.0;
    sys.h_int = CMatrix::Zero(3, 3);
    CVector v(3);
    v << 0.6, 0.0, 0.8;
    const MeasurementRecord r = absorb_measure(PureState::from(v), sys);
    CHECK(r.b_energies.size() == 2);
    CHECK(r.outcome_probs[0] == doctest::Approx(0.36));
    CVector only_excited = CVector::Zero(3);
    only_excited(2) = 1.0;
    CHECK_THROWS_AS((void)absorb_measure(PureState::from(only_excited), sys), DegenerateOutcome);
}

TEST_CASE("validation rejects non-Hermitian parts") {
    BipartiteSystem sys = two_qubit_example();
    sys.h_int(0, 1) = cplx(0.0, 1.0);
    CHECK_THROWS_AS(sys.validate(), ValidationError);
    BipartiteSystem wrong = two_qubit_example();
    wrong.h_int = CMatrix::Zero(3, 3);
    CHECK_THROWS_AS(wrong.validate(), ValidationError);
}

}
