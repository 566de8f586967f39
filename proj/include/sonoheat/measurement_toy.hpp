#pragma once

// Energy-absorbing projective measurements on subsystem B of a bipartite
// system A (x) B. Joint vectors use A as the slow index: |i>_A|j>_B -> i*dB + j.

#include "sonoheat/core.hpp"

#include <vector>

namespace sonoheat::toy {

class DegenerateOutcome : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct BipartiteSystem {
    CMatrix h_a;
    CMatrix h_b;
    CMatrix h_int;  // on the joint space

    /// Checks shapes and Hermiticity; throws ValidationError.
    void validate() const;
    [[nodiscard]] Eigen::Index dim_a() const { return h_a.rows(); }
    [[nodiscard]] Eigen::Index dim_b() const { return h_b.rows(); }
    /// H_A (x) I + I (x) H_B + H_int
    [[nodiscard]] CMatrix total() const;
};

struct MeasurementRecord {
    std::vector<double> b_energies;     // distinct eigenvalues of H_B, ascending
    std::vector<double> outcome_probs;  // one per entry of b_energies
    PureState post_state;
    double mean_energy_before = 0.0;
    double mean_energy_after = 0.0;
};

[[nodiscard]] CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Projects onto the (possibly degenerate) ground eigenspace of H_B and
/// renormalizes. Throws DegenerateOutcome when that projection vanishes.
[[nodiscard]] MeasurementRecord absorb_measure(const PureState& state, const BipartiteSystem& sys);

/// Probability that a second measurement after time dt finds B above E0.
/// `state` must already lie in the B-ground sector.
[[nodiscard]] double excess_energy_prob(const PureState& state, const BipartiteSystem& sys, double dt);

/// <H> via the eigen-expansion sum |xi_i|^2 E_i.
[[nodiscard]] double mean_total_energy(const PureState& state, const BipartiteSystem& sys);
/// <psi|H|psi> directly.
[[nodiscard]] double mean_total_energy_direct(const PureState& state, const BipartiteSystem& sys);

[[nodiscard]] PureState joint_ground_state(const BipartiteSystem& sys);
/// exp(-i H dt) |state>, via eigendecomposition of H.
[[nodiscard]] PureState propagate(const PureState& state, const BipartiteSystem& sys, double dt);

/// Two qubits, H_A = H_B = diag(0, 1), H_int = coupling * sigma_x (x) sigma_x.
[[nodiscard]] BipartiteSystem two_qubit_example(double coupling = 0.3);

}  // namespace sonoheat::toy
